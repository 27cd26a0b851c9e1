use alloc::vec;
use alloc::vec::Vec;

use super::{BayesError, VarId};

/// A nonnegative table over an ordered scope of discrete variables.
///
/// Values are stored densely in lexicographic assignment order: the first
/// scope variable is the most significant digit, the last varies fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    scope: Vec<VarId>,
    cards: Vec<usize>,
    values: Vec<f64>,
}

impl Factor {
    pub fn new(scope: Vec<VarId>, cards: Vec<usize>, values: Vec<f64>) -> Result<Self, BayesError> {
        if scope.len() != cards.len() {
            return Err(BayesError::BadFactor("scope and cardinality lengths differ"));
        }
        let mut sorted = scope.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(BayesError::BadFactor("scope repeats a variable"));
        }
        if cards.contains(&0) {
            return Err(BayesError::BadFactor("zero cardinality"));
        }
        if values.len() != cards.iter().product::<usize>() {
            return Err(BayesError::BadFactor("value count does not match scope"));
        }
        if values.iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(BayesError::BadFactor("negative or NaN value"));
        }
        Ok(Factor { scope, cards, values })
    }

    /// Factor with empty scope holding a single value.
    pub fn scalar(value: f64) -> Self {
        Factor { scope: Vec::new(), cards: Vec::new(), values: vec![value] }
    }

    pub fn scope(&self) -> &[VarId] {
        &self.scope
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mentions(&self, var: VarId) -> bool {
        self.scope.contains(&var)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![0; self.scope.len()];
        let mut acc = 1;
        for i in (0..self.scope.len()).rev() {
            strides[i] = acc;
            acc *= self.cards[i];
        }
        strides
    }

    /// Value at an assignment given in scope order.
    pub fn get(&self, assignment: &[usize]) -> f64 {
        debug_assert_eq!(assignment.len(), self.scope.len());
        let idx = assignment
            .iter()
            .zip(self.strides())
            .map(|(v, s)| v * s)
            .sum::<usize>();
        self.values[idx]
    }

    /// Pointwise product over the union scope. The union keeps `self`'s order
    /// followed by `other`'s new variables.
    pub fn product(&self, other: &Factor) -> Factor {
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        for (v, c) in other.scope.iter().zip(&other.cards) {
            if !scope.contains(v) {
                scope.push(*v);
                cards.push(*c);
            }
        }
        let a_map = project_strides(&scope, &self.scope, &self.strides());
        let b_map = project_strides(&scope, &other.scope, &other.strides());
        let size = cards.iter().product::<usize>();
        let mut values = Vec::with_capacity(size);
        let mut digits = vec![0usize; scope.len()];
        let (mut ia, mut ib) = (0usize, 0usize);
        for _ in 0..size {
            values.push(self.values[ia] * other.values[ib]);
            // Odometer increment, last digit fastest.
            for d in (0..digits.len()).rev() {
                digits[d] += 1;
                ia += a_map[d];
                ib += b_map[d];
                if digits[d] < cards[d] {
                    break;
                }
                ia -= a_map[d] * cards[d];
                ib -= b_map[d] * cards[d];
                digits[d] = 0;
            }
        }
        Factor { scope, cards, values }
    }

    /// Sums `var` out of the table. A factor that does not mention `var` is
    /// returned unchanged.
    pub fn sum_out(&self, var: VarId) -> Factor {
        let Some(pos) = self.scope.iter().position(|&v| v == var) else {
            return self.clone();
        };
        let strides = self.strides();
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        scope.remove(pos);
        cards.remove(pos);
        let outer = self.cards[..pos].iter().product::<usize>();
        let inner = strides[pos];
        let card = self.cards[pos];
        let mut values = vec![0.0; outer * inner];
        for o in 0..outer {
            for k in 0..card {
                let base = (o * card + k) * inner;
                for i in 0..inner {
                    values[o * inner + i] += self.values[base + i];
                }
            }
        }
        Factor { scope, cards, values }
    }

    /// Fixes `var = value`, dropping it from the scope.
    pub fn restrict(&self, var: VarId, value: usize) -> Factor {
        let Some(pos) = self.scope.iter().position(|&v| v == var) else {
            return self.clone();
        };
        let strides = self.strides();
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        scope.remove(pos);
        cards.remove(pos);
        let outer = self.cards[..pos].iter().product::<usize>();
        let inner = strides[pos];
        let card = self.cards[pos];
        let mut values = Vec::with_capacity(outer * inner);
        for o in 0..outer {
            let base = (o * card + value) * inner;
            values.extend_from_slice(&self.values[base..base + inner]);
        }
        Factor { scope, cards, values }
    }
}

/// For each variable of `target`, the stride of that variable inside a factor
/// over `source` (zero when the factor does not mention it).
fn project_strides(target: &[VarId], source: &[VarId], strides: &[usize]) -> Vec<usize> {
    target
        .iter()
        .map(|v| source.iter().position(|s| s == v).map_or(0, |i| strides[i]))
        .collect()
}

/// Multiplies every factor that mentions `var` and sums `var` out. Factors
/// that do not mention it pass through in their original order, followed by
/// the new factor.
pub fn eliminate_variable(factors: Vec<Factor>, var: VarId) -> Result<Vec<Factor>, BayesError> {
    let (touched, mut rest): (Vec<Factor>, Vec<Factor>) =
        factors.into_iter().partition(|f| f.mentions(var));
    let mut touched = touched.into_iter();
    let first = touched.next().ok_or(BayesError::UnknownVariableId(var))?;
    let joined = touched.fold(first, |acc, f| acc.product(&f));
    rest.push(joined.sum_out(var));
    Ok(rest)
}
