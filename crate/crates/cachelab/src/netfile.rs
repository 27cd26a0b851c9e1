//! JSON network files.
//!
//! ```json
//! {
//!   "variables": [{"name": "Rain", "cardinality": 2, "states": ["T", "F"]}],
//!   "cpts": [{"child": "Rain", "parents": [], "rows": [[0.2, 0.8]]}]
//! }
//! ```
//!
//! `states` is optional and defaults to `0`, `1`, ... Rows follow the
//! lexicographic order of parent assignments, first parent most significant.

use cachelab_core::bayes::{BayesError, BayesNet, CptSpec, Variable};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetFile {
    variables: Vec<VariableEntry>,
    cpts: Vec<CptEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VariableEntry {
    name: String,
    cardinality: usize,
    #[serde(default)]
    states: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CptEntry {
    child: String,
    #[serde(default)]
    parents: Vec<String>,
    rows: Vec<Vec<f64>>,
}

#[derive(Debug, thiserror::Error)]
pub enum NetFileError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    /// The file parsed but describes an invalid network. `line` points at the
    /// offending entry when it can be located.
    #[error("{}{source}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Invalid { line: Option<usize>, source: BayesError },
}

impl NetFileError {
    pub fn line(&self) -> Option<usize> {
        match self {
            NetFileError::Syntax { line, .. } => Some(*line),
            NetFileError::Invalid { line, .. } => *line,
        }
    }
}

pub fn parse_net(text: &str) -> Result<BayesNet, NetFileError> {
    let file: NetFile = serde_json::from_str(text).map_err(|e| NetFileError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut variables = Vec::with_capacity(file.variables.len());
    for v in file.variables {
        let var = match v.states {
            Some(states) => {
                if states.len() != v.cardinality {
                    return Err(NetFileError::Invalid {
                        line: find_line(text, "name", &v.name),
                        source: BayesError::BadCardinality(v.name),
                    });
                }
                Variable::with_states(v.name, states)
            }
            None => Variable::new(v.name, v.cardinality),
        };
        variables.push(var);
    }
    let specs = file
        .cpts
        .into_iter()
        .map(|c| CptSpec { child: c.child, parents: c.parents, rows: c.rows })
        .collect();
    BayesNet::from_specs(variables, specs).map_err(|source| {
        let line = match &source {
            BayesError::InvalidCpt { child, .. } | BayesError::DuplicateCpt(child) => {
                find_line(text, "child", child)
            }
            BayesError::DuplicateVariable(name) | BayesError::BadCardinality(name) => {
                find_line(text, "name", name)
            }
            _ => None,
        };
        NetFileError::Invalid { line, source }
    })
}

/// 1-based line of the last `"field": "value"` pair, for diagnostics.
fn find_line(text: &str, field: &str, value: &str) -> Option<usize> {
    let value = serde_json::to_string(value).ok()?;
    let needle = format!("\"{field}\"");
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            l.find(&needle)
                .is_some_and(|i| l[i + needle.len()..].trim_start().trim_start_matches(':').trim_start().starts_with(&value))
        })
        .last()
        .map(|(i, _)| i + 1)
}
