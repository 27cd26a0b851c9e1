use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::factor::Factor;
use super::{Assignment, BayesError, VarId};

/// Row sums must land within this distance of one.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub cardinality: usize,
    /// Labels for the values `0..cardinality`.
    pub states: Vec<String>,
}

impl Variable {
    /// A variable whose states are labelled `0`, `1`, ...
    pub fn new(name: impl Into<String>, cardinality: usize) -> Self {
        let states = (0..cardinality).map(|i| i.to_string()).collect();
        Variable { name: name.into(), cardinality, states }
    }

    pub fn with_states<S: Into<String>>(name: impl Into<String>, states: impl IntoIterator<Item = S>) -> Self {
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        Variable { name: name.into(), cardinality: states.len(), states }
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }
}

/// Conditional probability table `P(child | parents)`. Rows follow the
/// lexicographic order of parent assignments, first parent most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct Cpt {
    pub child: VarId,
    pub parents: Vec<VarId>,
    pub rows: Vec<Vec<f64>>,
}

/// Name-addressed CPT description, as read from a net file.
#[derive(Clone, Debug, PartialEq)]
pub struct CptSpec {
    pub child: String,
    pub parents: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BayesNet {
    variables: Vec<Variable>,
    /// Indexed by child.
    cpts: Vec<Cpt>,
    topo: Vec<VarId>,
}

impl BayesNet {
    /// Validates and assembles a network. `cpts` may come in any order but
    /// must hold exactly one table per variable.
    pub fn new(variables: Vec<Variable>, cpts: Vec<Cpt>) -> Result<Self, BayesError> {
        let mut names = BTreeSet::new();
        for v in &variables {
            if !names.insert(v.name.as_str()) {
                return Err(BayesError::DuplicateVariable(v.name.clone()));
            }
            if v.cardinality < 2 || v.states.len() != v.cardinality {
                return Err(BayesError::BadCardinality(v.name.clone()));
            }
        }
        let n = variables.len();
        let mut slots: Vec<Option<Cpt>> = vec![None; n];
        for cpt in cpts {
            let child = cpt.child;
            if child >= n {
                return Err(BayesError::UnknownVariableId(child));
            }
            let name = &variables[child].name;
            if slots[child].is_some() {
                return Err(BayesError::DuplicateCpt(name.clone()));
            }
            validate_cpt(&variables, &cpt)?;
            slots[child] = Some(cpt);
        }
        let mut cpts = Vec::with_capacity(n);
        for (i, slot) in slots.into_iter().enumerate() {
            cpts.push(slot.ok_or_else(|| BayesError::MissingCpt(variables[i].name.clone()))?);
        }
        let topo = topological_order(&cpts).ok_or(BayesError::Cycle)?;
        Ok(BayesNet { variables, cpts, topo })
    }

    /// Builds a network from name-addressed tables.
    pub fn from_specs(variables: Vec<Variable>, specs: Vec<CptSpec>) -> Result<Self, BayesError> {
        let index: BTreeMap<&str, VarId> =
            variables.iter().enumerate().map(|(i, v)| (v.name.as_str(), i)).collect();
        let lookup = |name: &str| {
            index.get(name).copied().ok_or_else(|| BayesError::UnknownVariable(name.to_string()))
        };
        let mut cpts = Vec::with_capacity(specs.len());
        for spec in specs {
            let child = lookup(&spec.child)?;
            let parents = spec.parents.iter().map(|p| lookup(p)).collect::<Result<Vec<_>, _>>()?;
            cpts.push(Cpt { child, parents, rows: spec.rows });
        }
        BayesNet::new(variables, cpts)
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, var: VarId) -> Result<&Variable, BayesError> {
        self.variables.get(var).ok_or(BayesError::UnknownVariableId(var))
    }

    pub fn var_id(&self, name: &str) -> Result<VarId, BayesError> {
        self.variables
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| BayesError::UnknownVariable(name.to_string()))
    }

    pub fn cpt(&self, var: VarId) -> &Cpt {
        &self.cpts[var]
    }

    pub fn parents(&self, var: VarId) -> &[VarId] {
        &self.cpts[var].parents
    }

    pub fn children(&self, var: VarId) -> impl Iterator<Item = VarId> + '_ {
        self.cpts.iter().filter(move |c| c.parents.contains(&var)).map(|c| c.child)
    }

    /// Variables ordered so that parents precede children.
    pub fn topological_order(&self) -> &[VarId] {
        &self.topo
    }

    /// Evidence from `(name, state label)` pairs.
    pub fn evidence(&self, pairs: &[(&str, &str)]) -> Result<Assignment, BayesError> {
        let mut out = Assignment::new();
        for (name, label) in pairs {
            let id = self.var_id(name)?;
            let value = self.variables[id].state_index(label).ok_or_else(|| {
                BayesError::UnknownState { var: name.to_string(), state: label.to_string() }
            })?;
            out.insert(id, value);
        }
        Ok(out)
    }

    pub(crate) fn check_assignment(&self, assignment: &Assignment) -> Result<(), BayesError> {
        for (&var, &value) in assignment {
            let v = self.variable(var)?;
            if value >= v.cardinality {
                return Err(BayesError::ValueOutOfRange { var: v.name.clone(), value });
            }
        }
        Ok(())
    }

    /// `P(child = value | parents)` read from a dense assignment.
    fn conditional(&self, var: VarId, values: &[usize]) -> f64 {
        let cpt = &self.cpts[var];
        let row = cpt
            .parents
            .iter()
            .fold(0, |acc, &p| acc * self.variables[p].cardinality + values[p]);
        cpt.rows[row][values[var]]
    }

    /// Product of the CPT entries selected by a full assignment.
    pub fn joint_probability(&self, assignment: &Assignment) -> Result<f64, BayesError> {
        self.check_assignment(assignment)?;
        let mut dense = vec![0; self.len()];
        for (i, v) in self.variables.iter().enumerate() {
            dense[i] = *assignment
                .get(&i)
                .ok_or_else(|| BayesError::IncompleteAssignment(v.name.clone()))?;
        }
        Ok(self.joint_dense(&dense))
    }

    /// Joint probability of a complete assignment indexed by variable id.
    pub fn joint_dense(&self, values: &[usize]) -> f64 {
        (0..self.len()).map(|v| self.conditional(v, values)).product()
    }

    /// Parents, children and the children's other parents of `var`.
    pub fn markov_blanket(&self, var: VarId) -> Result<BTreeSet<VarId>, BayesError> {
        self.variable(var)?;
        let mut blanket: BTreeSet<VarId> = self.parents(var).iter().copied().collect();
        for child in self.children(var) {
            blanket.insert(child);
            blanket.extend(self.parents(child).iter().copied());
        }
        blanket.remove(&var);
        Ok(blanket)
    }

    /// The CPT of `var` as a factor over `parents ++ [var]`.
    pub fn cpt_factor(&self, var: VarId) -> Factor {
        let cpt = &self.cpts[var];
        let mut scope = cpt.parents.clone();
        scope.push(var);
        let cards = scope.iter().map(|&v| self.variables[v].cardinality).collect();
        let values = cpt.rows.iter().flatten().copied().collect();
        Factor::new(scope, cards, values).expect("validated CPT forms a factor")
    }

    /// Ancestral sample of a complete assignment.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let mut values = vec![0; self.len()];
        for &var in &self.topo {
            let cpt = &self.cpts[var];
            let row = cpt
                .parents
                .iter()
                .fold(0, |acc, &p| acc * self.variables[p].cardinality + values[p]);
            let u: f64 = rng.gen();
            let dist = &cpt.rows[row];
            let mut acc = 0.0;
            values[var] = dist.len() - 1;
            for (i, p) in dist.iter().enumerate() {
                acc += p;
                if u < acc {
                    values[var] = i;
                    break;
                }
            }
        }
        values
    }
}

fn validate_cpt(variables: &[Variable], cpt: &Cpt) -> Result<(), BayesError> {
    let child = &variables[cpt.child];
    let mut seen = BTreeSet::new();
    for &p in &cpt.parents {
        if p >= variables.len() {
            return Err(BayesError::UnknownVariableId(p));
        }
        if p == cpt.child || !seen.insert(p) {
            return Err(BayesError::InvalidCpt {
                child: child.name.clone(),
                row: None,
                reason: format!("parent list repeats or contains the child ({})", variables[p].name),
            });
        }
    }
    let expected: usize = cpt.parents.iter().map(|&p| variables[p].cardinality).product();
    if cpt.rows.len() != expected {
        return Err(BayesError::InvalidCpt {
            child: child.name.clone(),
            row: None,
            reason: format!("expected {expected} rows, found {}", cpt.rows.len()),
        });
    }
    for (r, row) in cpt.rows.iter().enumerate() {
        if row.len() != child.cardinality {
            return Err(BayesError::InvalidCpt {
                child: child.name.clone(),
                row: Some(r),
                reason: format!("expected {} entries, found {}", child.cardinality, row.len()),
            });
        }
        if row.iter().any(|p| p.is_nan() || *p < 0.0) {
            return Err(BayesError::InvalidCpt {
                child: child.name.clone(),
                row: Some(r),
                reason: "negative or NaN probability".to_string(),
            });
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
            return Err(BayesError::InvalidCpt {
                child: child.name.clone(),
                row: Some(r),
                reason: format!("row sums to {sum}, expected 1"),
            });
        }
    }
    Ok(())
}

/// Kahn's algorithm; `None` when the parent graph has a cycle.
fn topological_order(cpts: &[Cpt]) -> Option<Vec<VarId>> {
    let n = cpts.len();
    let mut indegree: Vec<usize> = cpts.iter().map(|c| c.parents.len()).collect();
    let mut children: Vec<Vec<VarId>> = vec![Vec::new(); n];
    for c in cpts {
        for &p in &c.parents {
            children[p].push(c.child);
        }
    }
    let mut ready: BTreeSet<VarId> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop_first() {
        order.push(v);
        for &c in &children[v] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.insert(c);
            }
        }
    }
    (order.len() == n).then_some(order)
}
