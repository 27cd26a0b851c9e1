//! Discrete Bayesian networks.
//!
//! A [`BayesNet`] is a DAG of discrete [`Variable`]s, each with a [`Cpt`]
//! giving its distribution conditioned on its parents. The joint distribution
//! factorizes as the product of the CPTs. Queries `P(X | evidence)` can be
//! answered by brute-force enumeration of the joint
//! ([`infer_enumeration`]) or by variable elimination over [`Factor`]s
//! ([`infer_variable_elimination`]); both must agree.

mod factor;
pub mod fixtures;
mod infer;
mod learn;
mod net;

use alloc::collections::BTreeMap;
use alloc::string::String;

pub use factor::{eliminate_variable, Factor};
pub use infer::{eliminable_variables, greedy_order, infer_enumeration, infer_variable_elimination};
pub use learn::learn_cpts;
pub use net::{BayesNet, Cpt, CptSpec, Variable, ROW_SUM_TOLERANCE};

/// Index of a variable inside its network.
pub type VarId = usize;

/// Partial or complete assignment of values to variables.
pub type Assignment = BTreeMap<VarId, usize>;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum BayesError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown variable id {0}")]
    UnknownVariableId(VarId),
    #[error("variable `{var}` has no state `{state}`")]
    UnknownState { var: String, state: String },
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("variable `{0}` needs cardinality >= 2 matching its state labels")]
    BadCardinality(String),
    #[error("no CPT for variable `{0}`")]
    MissingCpt(String),
    #[error("more than one CPT for variable `{0}`")]
    DuplicateCpt(String),
    #[error("CPT for `{child}`{}: {reason}", row.map(|r| alloc::format!(" row {r}")).unwrap_or_default())]
    InvalidCpt { child: String, row: Option<usize>, reason: String },
    #[error("network graph contains a cycle")]
    Cycle,
    #[error("assignment does not cover variable `{0}`")]
    IncompleteAssignment(String),
    #[error("value {value} out of range for variable `{var}`")]
    ValueOutOfRange { var: String, value: usize },
    #[error("query variable `{0}` is also observed")]
    QueryInEvidence(String),
    #[error("evidence has zero probability")]
    ZeroEvidence,
    #[error("elimination order must list exactly the unobserved non-query variables")]
    InvalidOrder,
    #[error("no data and zero pseudocount")]
    EmptyData,
    #[error("pseudocount must be finite and nonnegative")]
    InvalidPseudocount,
    #[error("data or parent lists do not match the variable list")]
    InvalidStructure,
    #[error("malformed factor: {0}")]
    BadFactor(&'static str),
}

#[cfg(test)]
mod tests {
    use super::fixtures::{chain, fig34, sprinkler};
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn full(net: &BayesNet, pairs: &[(&str, &str)]) -> Assignment {
        net.evidence(pairs).unwrap()
    }

    #[test]
    fn sprinkler_joint_entries() {
        let net = sprinkler();
        let p = net
            .joint_probability(&full(&net, &[("Rain", "T"), ("Sprinkler", "T"), ("WetGrass", "T")]))
            .unwrap();
        assert!((p - 0.2 * 0.01 * 0.99).abs() < 1e-15);
        let p = net
            .joint_probability(&full(&net, &[("Rain", "F"), ("Sprinkler", "F"), ("WetGrass", "T")]))
            .unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn joint_sums_to_one() {
        let net = sprinkler();
        let mut total = 0.0;
        for r in 0..2 {
            for s in 0..2 {
                for w in 0..2 {
                    total += net.joint_dense(&[r, s, w]);
                }
            }
        }
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn joint_needs_every_variable() {
        let net = sprinkler();
        let partial = full(&net, &[("Rain", "T")]);
        assert!(matches!(net.joint_probability(&partial), Err(BayesError::IncompleteAssignment(_))));
        let mut bad = Assignment::new();
        bad.insert(9, 0);
        assert_eq!(net.joint_probability(&bad), Err(BayesError::UnknownVariableId(9)));
    }

    #[test]
    fn sprinkler_queries() {
        let net = sprinkler();
        let rain = net.var_id("Rain").unwrap();
        let prior = infer_enumeration(&net, rain, &Assignment::new()).unwrap();
        assert!((prior[0] - 0.2).abs() < 1e-12);
        let wet = full(&net, &[("WetGrass", "T")]);
        // 0.16038 / 0.44838, summed by hand over the four (S, R) rows.
        let expected = 0.357_687_675_632_276_2;
        let by_enum = infer_enumeration(&net, rain, &wet).unwrap();
        let by_ve = infer_variable_elimination(&net, rain, &wet, None).unwrap();
        assert!((by_enum[0] - expected).abs() < 1e-12);
        assert!((by_ve[0] - expected).abs() < 1e-12);
        let sprinkler = net.var_id("Sprinkler").unwrap();
        let v = infer_variable_elimination(&net, rain, &wet, Some(&[sprinkler])).unwrap();
        assert!((v[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn single_variable_prior() {
        let net = BayesNet::new(
            vec![Variable::new("X", 2)],
            vec![Cpt { child: 0, parents: vec![], rows: vec![vec![0.3, 0.7]] }],
        )
        .unwrap();
        assert_eq!(infer_enumeration(&net, 0, &Assignment::new()).unwrap(), [0.3, 0.7]);
        assert_eq!(infer_variable_elimination(&net, 0, &Assignment::new(), None).unwrap(), [0.3, 0.7]);
    }

    #[test]
    fn zero_evidence_is_an_error() {
        let net = BayesNet::new(
            vec![Variable::new("A", 2), Variable::new("B", 2)],
            vec![
                Cpt { child: 0, parents: vec![], rows: vec![vec![1.0, 0.0]] },
                Cpt { child: 1, parents: vec![0], rows: vec![vec![1.0, 0.0], vec![0.5, 0.5]] },
            ],
        )
        .unwrap();
        let mut ev = Assignment::new();
        ev.insert(1, 1);
        assert_eq!(infer_enumeration(&net, 0, &ev), Err(BayesError::ZeroEvidence));
        assert_eq!(infer_variable_elimination(&net, 0, &ev, None), Err(BayesError::ZeroEvidence));
    }

    #[test]
    fn query_in_evidence_rejected() {
        let net = sprinkler();
        let ev = full(&net, &[("Rain", "T")]);
        assert!(matches!(infer_enumeration(&net, 0, &ev), Err(BayesError::QueryInEvidence(_))));
        assert!(matches!(
            infer_variable_elimination(&net, 0, &ev, None),
            Err(BayesError::QueryInEvidence(_))
        ));
    }

    #[test]
    fn eliminating_c_leaves_w_and_r() {
        // P(C) and P(W | C, R): summing out C yields a factor over {W, R}.
        let (c, r, w) = (0, 1, 2);
        let pc = Factor::new(vec![c], vec![2], vec![0.3, 0.7]).unwrap();
        let pw = Factor::new(
            vec![c, r, w],
            vec![2, 2, 2],
            vec![0.9, 0.1, 0.6, 0.4, 0.5, 0.5, 0.2, 0.8],
        )
        .unwrap();
        let out = eliminate_variable(vec![pc.clone(), pw.clone()], c).unwrap();
        assert_eq!(out.len(), 1);
        let mut scope = out[0].scope().to_vec();
        scope.sort_unstable();
        assert_eq!(scope, [r, w]);
        let f = &out[0];
        let pos_r = f.scope().iter().position(|&v| v == r).unwrap();
        for rv in 0..2 {
            for wv in 0..2 {
                let want: f64 = (0..2).map(|cv| pc.get(&[cv]) * pw.get(&[cv, rv, wv])).sum();
                let idx = if pos_r == 0 { [rv, wv] } else { [wv, rv] };
                assert!((f.get(&idx) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn chain_marginal_by_hand_elimination() {
        let net = chain();
        let [w, x, y, z] = ["W", "X", "Y", "Z"].map(|n| net.var_id(n).unwrap());
        let mut factors: Vec<Factor> = (0..net.len()).map(|v| net.cpt_factor(v)).collect();
        for var in [w, x, z] {
            factors = eliminate_variable(factors, var).unwrap();
        }
        let joined = factors.iter().fold(Factor::scalar(1.0), |a, f| a.product(f));
        assert_eq!(joined.scope(), [y]);
        let reference = infer_enumeration(&net, y, &Assignment::new()).unwrap();
        for (a, b) in joined.values().iter().zip(&reference) {
            assert!((a - b).abs() < 1e-12);
        }
        let ve = infer_variable_elimination(&net, y, &Assignment::new(), Some(&[w, x, z])).unwrap();
        for (a, b) in ve.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_orders_rejected() {
        let net = chain();
        let y = net.var_id("Y").unwrap();
        let e = Assignment::new();
        assert_eq!(infer_variable_elimination(&net, y, &e, Some(&[0, 1])), Err(BayesError::InvalidOrder));
        assert_eq!(infer_variable_elimination(&net, y, &e, Some(&[0, 1, 1, 3])), Err(BayesError::InvalidOrder));
        assert_eq!(infer_variable_elimination(&net, y, &e, Some(&[0, 1, 2])), Err(BayesError::InvalidOrder));
    }

    #[test]
    fn all_other_variables_observed() {
        let net = sprinkler();
        let ev = full(&net, &[("Sprinkler", "F"), ("WetGrass", "T")]);
        let rain = net.var_id("Rain").unwrap();
        let ve = infer_variable_elimination(&net, rain, &ev, Some(&[])).unwrap();
        let en = infer_enumeration(&net, rain, &ev).unwrap();
        // P(R=T, S=F, W=T) = 0.2*0.99*0.8 ; P(R=F, S=F, W=T) = 0
        assert!((ve[0] - 1.0).abs() < 1e-12);
        assert_eq!(ve, en);
    }

    #[test]
    fn blankets() {
        let net = fig34();
        let id = |n: &str| net.var_id(n).unwrap();
        let blanket = net.markov_blanket(id("C")).unwrap();
        assert_eq!(blanket, [id("A"), id("D"), id("E")].into_iter().collect());
        let ch = chain();
        let blanket = ch.markov_blanket(ch.var_id("X").unwrap()).unwrap();
        assert_eq!(blanket, [ch.var_id("W").unwrap(), ch.var_id("Y").unwrap()].into_iter().collect());
        let lone = BayesNet::new(
            vec![Variable::new("L", 2)],
            vec![Cpt { child: 0, parents: vec![], rows: vec![vec![0.5, 0.5]] }],
        )
        .unwrap();
        assert!(lone.markov_blanket(0).unwrap().is_empty());
        assert_eq!(lone.markov_blanket(4), Err(BayesError::UnknownVariableId(4)));
    }

    #[test]
    fn net_validation() {
        let vars = || vec![Variable::new("A", 2), Variable::new("B", 2)];
        let prior = Cpt { child: 0, parents: vec![], rows: vec![vec![0.5, 0.5]] };
        let bad_sum = Cpt { child: 1, parents: vec![0], rows: vec![vec![0.5, 0.4], vec![0.5, 0.5]] };
        assert!(matches!(
            BayesNet::new(vars(), vec![prior.clone(), bad_sum]),
            Err(BayesError::InvalidCpt { row: Some(0), .. })
        ));
        let short = Cpt { child: 1, parents: vec![0], rows: vec![vec![0.5, 0.5]] };
        assert!(matches!(
            BayesNet::new(vars(), vec![prior.clone(), short]),
            Err(BayesError::InvalidCpt { row: None, .. })
        ));
        assert!(matches!(BayesNet::new(vars(), vec![prior.clone()]), Err(BayesError::MissingCpt(_))));
        let cyc = vec![
            Cpt { child: 0, parents: vec![1], rows: vec![vec![0.5, 0.5]; 2] },
            Cpt { child: 1, parents: vec![0], rows: vec![vec![0.5, 0.5]; 2] },
        ];
        assert_eq!(BayesNet::new(vars(), cyc), Err(BayesError::Cycle));
        let dup = vec![Variable::new("A", 2), Variable::new("A", 2)];
        assert!(matches!(BayesNet::new(dup, vec![]), Err(BayesError::DuplicateVariable(_))));
        assert!(matches!(
            BayesNet::from_specs(
                vars(),
                vec![CptSpec { child: "Q".into(), parents: vec![], rows: vec![] }]
            ),
            Err(BayesError::UnknownVariable(_))
        ));
    }

    #[test]
    fn learning_by_counting() {
        let data: Vec<Vec<usize>> = [0, 0, 1, 0].iter().map(|&v| vec![v]).collect();
        let net = learn_cpts(vec![Variable::new("X", 2)], vec![vec![]], &data, 0.0).unwrap();
        assert!((net.cpt(0).rows[0][0] - 0.75).abs() < 1e-15);
        let net = learn_cpts(vec![Variable::new("X", 2)], vec![vec![]], &data, 1.0).unwrap();
        assert!((net.cpt(0).rows[0][0] - 4.0 / 6.0).abs() < 1e-15);
        assert_eq!(
            learn_cpts(vec![Variable::new("X", 2)], vec![vec![]], &[], 0.0),
            Err(BayesError::EmptyData)
        );
        let uniform = learn_cpts(vec![Variable::new("X", 3)], vec![vec![]], &[], 1.0).unwrap();
        assert!(uniform.cpt(0).rows[0].iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn learning_recovers_generating_cpts() {
        let truth = BayesNet::new(
            vec![Variable::new("A", 2), Variable::new("B", 2)],
            vec![
                Cpt { child: 0, parents: vec![], rows: vec![vec![0.3, 0.7]] },
                Cpt { child: 1, parents: vec![0], rows: vec![vec![0.9, 0.1], vec![0.25, 0.75]] },
            ],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let data: Vec<Vec<usize>> = (0..100_000).map(|_| truth.sample(&mut rng)).collect();
        let learned = learn_cpts(truth.variables().to_vec(), vec![vec![], vec![0]], &data, 0.0).unwrap();
        for v in 0..2 {
            for (lr, tr) in learned.cpt(v).rows.iter().zip(&truth.cpt(v).rows) {
                for (l, t) in lr.iter().zip(tr) {
                    assert!((l - t).abs() < 0.02, "learned {l} vs true {t}");
                }
            }
        }
    }
}
