use alloc::vec;
use alloc::vec::Vec;

use super::{BayesError, BayesNet, Cpt, VarId, Variable};

/// Estimates every CPT from complete data by counting:
/// `(count(v, u) + alpha) / (count(u) + alpha * |child|)`.
///
/// A parent configuration never seen in the data with `alpha = 0` gets a
/// uniform row.
pub fn learn_cpts(
    variables: Vec<Variable>,
    parents: Vec<Vec<VarId>>,
    data: &[Vec<usize>],
    alpha: f64,
) -> Result<BayesNet, BayesError> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(BayesError::InvalidPseudocount);
    }
    if data.is_empty() && alpha == 0.0 {
        return Err(BayesError::EmptyData);
    }
    if parents.len() != variables.len() {
        return Err(BayesError::InvalidStructure);
    }
    let n = variables.len();
    for row in data {
        if row.len() != n {
            return Err(BayesError::InvalidStructure);
        }
        for (v, &value) in row.iter().enumerate() {
            if value >= variables[v].cardinality {
                return Err(BayesError::ValueOutOfRange { var: variables[v].name.clone(), value });
            }
        }
    }
    for ps in &parents {
        if let Some(&bad) = ps.iter().find(|&&p| p >= n) {
            return Err(BayesError::UnknownVariableId(bad));
        }
    }

    let mut cpts = Vec::with_capacity(n);
    for (child, ps) in parents.into_iter().enumerate() {
        let card = variables[child].cardinality;
        let rows_n: usize = ps.iter().map(|&p| variables[p].cardinality).product();
        let mut counts = vec![vec![0u64; card]; rows_n];
        for row in data {
            let r = ps.iter().fold(0, |acc, &p| acc * variables[p].cardinality + row[p]);
            counts[r][row[child]] += 1;
        }
        let rows = counts
            .into_iter()
            .map(|c| {
                let total: u64 = c.iter().sum();
                let denom = total as f64 + alpha * card as f64;
                if denom == 0.0 {
                    vec![1.0 / card as f64; card]
                } else {
                    c.iter().map(|&k| (k as f64 + alpha) / denom).collect()
                }
            })
            .collect();
        cpts.push(Cpt { child, parents: ps, rows });
    }
    BayesNet::new(variables, cpts)
}
