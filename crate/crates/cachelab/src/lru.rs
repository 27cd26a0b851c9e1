//! The letter-script LRU simulator.

use std::fmt::Write as _;

use cachelab_core::trace::{key_letter, letter_key, LruProblemSet};
use cachelab_core::{CacheConfig, CacheState, Policy};

/// Runs every case and renders the transcript: `Simulation i` per case, then
/// one line of resident letters (least recently used first) per `!`.
///
/// Cases must already be validated.
pub fn run_lru_problem(set: &LruProblemSet) -> String {
    let mut out = String::new();
    for (i, case) in set.cases.iter().enumerate() {
        writeln!(out, "Simulation {}", i + 1).unwrap();
        let config = CacheConfig::new(case.capacity, Policy::Lru).expect("validated capacity");
        let mut cache = CacheState::new(config);
        let mut seq = 0;
        for b in case.script.bytes() {
            if b == b'!' {
                let line: String = cache
                    .snapshot_lru_order()
                    .into_iter()
                    .map(|k| key_letter(k).expect("letters only"))
                    .collect();
                out.push_str(&line);
                out.push('\n');
            } else {
                cache.access(letter_key(b).expect("validated script"), seq);
                seq += 1;
            }
        }
    }
    out
}
