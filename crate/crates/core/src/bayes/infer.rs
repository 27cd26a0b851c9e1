use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::factor::{eliminate_variable, Factor};
use super::{Assignment, BayesError, BayesNet, VarId};

fn check_query(net: &BayesNet, query: VarId, evidence: &Assignment) -> Result<(), BayesError> {
    net.variable(query)?;
    net.check_assignment(evidence)?;
    if evidence.contains_key(&query) {
        return Err(BayesError::QueryInEvidence(net.variables()[query].name.clone()));
    }
    Ok(())
}

fn normalize(mut dist: Vec<f64>) -> Result<Vec<f64>, BayesError> {
    let total: f64 = dist.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(BayesError::ZeroEvidence);
    }
    for p in &mut dist {
        *p /= total;
    }
    Ok(dist)
}

/// `P(query | evidence)` by summing the full joint over every completion of
/// the unobserved variables.
pub fn infer_enumeration(net: &BayesNet, query: VarId, evidence: &Assignment) -> Result<Vec<f64>, BayesError> {
    check_query(net, query, evidence)?;
    let hidden: Vec<VarId> =
        (0..net.len()).filter(|v| *v != query && !evidence.contains_key(v)).collect();
    let cards: Vec<usize> = net.variables().iter().map(|v| v.cardinality).collect();
    let mut values = vec![0usize; net.len()];
    for (&var, &value) in evidence {
        values[var] = value;
    }
    let mut dist = vec![0.0; cards[query]];
    for (q, slot) in dist.iter_mut().enumerate() {
        values[query] = q;
        for &h in &hidden {
            values[h] = 0;
        }
        loop {
            *slot += net.joint_dense(&values);
            // Advance the odometer over hidden variables.
            let mut carried = true;
            for &h in hidden.iter().rev() {
                values[h] += 1;
                if values[h] < cards[h] {
                    carried = false;
                    break;
                }
                values[h] = 0;
            }
            if carried {
                break;
            }
        }
    }
    normalize(dist)
}

/// Variables that are neither the query nor observed.
pub fn eliminable_variables(net: &BayesNet, query: VarId, evidence: &Assignment) -> BTreeSet<VarId> {
    (0..net.len()).filter(|v| *v != query && !evidence.contains_key(v)).collect()
}

/// Greedy order: repeatedly pick the variable whose elimination produces the
/// smallest scope, breaking ties by name.
pub fn greedy_order(net: &BayesNet, factors: &[Factor], eliminable: &BTreeSet<VarId>) -> Vec<VarId> {
    let mut scopes: Vec<BTreeSet<VarId>> =
        factors.iter().map(|f| f.scope().iter().copied().collect()).collect();
    let mut remaining = eliminable.clone();
    let mut order = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let resulting = |var: VarId| {
            let mut union = BTreeSet::new();
            for s in scopes.iter().filter(|s| s.contains(&var)) {
                union.extend(s.iter().copied());
            }
            union.remove(&var);
            union
        };
        let best = remaining
            .iter()
            .copied()
            .min_by(|&a, &b| {
                resulting(a)
                    .len()
                    .cmp(&resulting(b).len())
                    .then_with(|| net.variables()[a].name.cmp(&net.variables()[b].name))
            })
            .expect("non-empty");
        let merged = resulting(best);
        scopes.retain(|s| !s.contains(&best));
        scopes.push(merged);
        remaining.remove(&best);
        order.push(best);
    }
    order
}

/// `P(query | evidence)` by variable elimination. With `order = None` the
/// greedy min-scope order is used; otherwise `order` must list exactly the
/// eliminable variables.
pub fn infer_variable_elimination(
    net: &BayesNet,
    query: VarId,
    evidence: &Assignment,
    order: Option<&[VarId]>,
) -> Result<Vec<f64>, BayesError> {
    check_query(net, query, evidence)?;
    let mut factors: Vec<Factor> = (0..net.len())
        .map(|v| {
            evidence
                .iter()
                .fold(net.cpt_factor(v), |f, (&var, &value)| f.restrict(var, value))
        })
        .collect();
    let eliminable = eliminable_variables(net, query, evidence);
    let order = match order {
        Some(order) => {
            let given: BTreeSet<VarId> = order.iter().copied().collect();
            if given.len() != order.len() || given != eliminable {
                return Err(BayesError::InvalidOrder);
            }
            order.to_vec()
        }
        None => greedy_order(net, &factors, &eliminable),
    };
    for var in order {
        factors = eliminate_variable(factors, var)?;
    }
    let joined = factors
        .iter()
        .fold(Factor::scalar(1.0), |acc, f| acc.product(f));
    debug_assert_eq!(joined.scope(), [query]);
    normalize(joined.values().to_vec())
}
