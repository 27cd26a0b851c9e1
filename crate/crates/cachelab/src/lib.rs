//! File formats, report rendering and experiment plumbing around
//! [`cachelab_core`]. The `cachelab` binary is a thin front end over this
//! crate.

use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::thread;

use cachelab_core::sim::check_labels;
use cachelab_core::{run_sim, RunConfig, SimError, SimReport, Trace};

pub mod formats;
pub mod lru;
pub mod netfile;
pub mod report;

pub use formats::{emit_plain, parse_lru_problem, parse_plain, parse_smpc};
pub use lru::run_lru_problem;
pub use netfile::{parse_net, NetFileError};
pub use report::{emit_report, parse_csv, ReportFormat};

/// Like [`cachelab_core::compare`], but spreads runs over worker threads.
/// Reports come back in configuration order.
pub fn compare_parallel(trace: &Trace, configs: &[RunConfig]) -> Result<Vec<SimReport>, SimError> {
    check_labels(configs)?;
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(configs.len());
    let next = AtomicUsize::new(0);
    let mut slots: Vec<Option<Result<SimReport, SimError>>> = vec![None; configs.len()];
    thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                s.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        let Some(config) = configs.get(i) else { break };
                        done.push((i, run_sim(trace, config)));
                    }
                    done
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("simulation worker panicked") {
                slots[i] = Some(r);
            }
        }
    });
    slots.into_iter().map(|r| r.expect("every config ran")).collect()
}

/// A capacity given literally or derived from the trace length `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CapacitySpec {
    Fixed(usize),
    /// `log10 n` rounded to the nearest integer, at least 1.
    Log,
    /// `sqrt n` rounded to the nearest integer, at least 1.
    Sqrt,
}

impl CapacitySpec {
    pub fn resolve(self, n: usize) -> usize {
        let n = n as f64;
        match self {
            CapacitySpec::Fixed(k) => k,
            CapacitySpec::Log if n < 1.0 => 1,
            CapacitySpec::Log => (n.log10().round() as usize).max(1),
            CapacitySpec::Sqrt => (n.sqrt().round() as usize).max(1),
        }
    }
}

impl FromStr for CapacitySpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "log" => Ok(CapacitySpec::Log),
            "sqrt" => Ok(CapacitySpec::Sqrt),
            other => match other.parse::<usize>() {
                Ok(0) => Err("capacity must be at least 1".to_string()),
                Ok(k) => Ok(CapacitySpec::Fixed(k)),
                Err(_) => Err(format!("invalid capacity `{other}`; expected an integer, `log` or `sqrt`")),
            },
        }
    }
}
