//! Small reference networks.

use alloc::vec;

use super::{BayesNet, CptSpec, Variable};

fn spec(child: &str, parents: &[&str], rows: &[&[f64]]) -> CptSpec {
    CptSpec {
        child: child.into(),
        parents: parents.iter().map(|p| (*p).into()).collect(),
        rows: rows.iter().map(|r| r.to_vec()).collect(),
    }
}

/// Rain → Sprinkler, {Sprinkler, Rain} → WetGrass, states `T`/`F` (T first).
pub fn sprinkler() -> BayesNet {
    let tf = || ["T", "F"];
    BayesNet::from_specs(
        vec![
            Variable::with_states("Rain", tf()),
            Variable::with_states("Sprinkler", tf()),
            Variable::with_states("WetGrass", tf()),
        ],
        vec![
            spec("Rain", &[], &[&[0.2, 0.8]]),
            spec("Sprinkler", &["Rain"], &[&[0.01, 0.99], &[0.4, 0.6]]),
            spec(
                "WetGrass",
                &["Sprinkler", "Rain"],
                &[&[0.99, 0.01], &[0.9, 0.1], &[0.8, 0.2], &[0.0, 1.0]],
            ),
        ],
    )
    .expect("sprinkler fixture is valid")
}

/// A → C, B → D, C → E, D → E with arbitrary binary CPTs.
pub fn fig34() -> BayesNet {
    BayesNet::from_specs(
        ["A", "B", "C", "D", "E"].map(|n| Variable::new(n, 2)).to_vec(),
        vec![
            spec("A", &[], &[&[0.35, 0.65]]),
            spec("B", &[], &[&[0.6, 0.4]]),
            spec("C", &["A"], &[&[0.8, 0.2], &[0.15, 0.85]]),
            spec("D", &["B"], &[&[0.3, 0.7], &[0.55, 0.45]]),
            spec("E", &["C", "D"], &[&[0.95, 0.05], &[0.6, 0.4], &[0.25, 0.75], &[0.1, 0.9]]),
        ],
    )
    .expect("blanket fixture is valid")
}

/// W → X → Y → Z with arbitrary binary CPTs.
pub fn chain() -> BayesNet {
    BayesNet::from_specs(
        ["W", "X", "Y", "Z"].map(|n| Variable::new(n, 2)).to_vec(),
        vec![
            spec("W", &[], &[&[0.4, 0.6]]),
            spec("X", &["W"], &[&[0.7, 0.3], &[0.2, 0.8]]),
            spec("Y", &["X"], &[&[0.9, 0.1], &[0.35, 0.65]]),
            spec("Z", &["Y"], &[&[0.5, 0.5], &[0.05, 0.95]]),
        ],
    )
    .expect("chain fixture is valid")
}
