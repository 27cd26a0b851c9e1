//! Trace-driven simulation.
//!
//! [`run_sim`] replays a trace through one configuration. Each trace event is
//! one tick of a single clock shared by recency, timers and the predictor.
//! Per event the order is: timer expiries, predictor update, hit/miss
//! resolution (halfway rule and base policy on a miss), prefetch decision and
//! insertion, then prefetch outcome resolution. Prefetch insertions neither
//! tick the clock nor count as accesses.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::cache::{CacheConfig, EvictionCause};
use crate::pre_evict::{PreEvictCache, PreEvictConfig, PreEvictError};
use crate::prefetch::{
    coverage, decide_prefetch, MarkovPredictor, OutcomeEvent, PrefetchConfig, PrefetchError,
    PrefetchTracker, Trigger,
};
use crate::trace::Trace;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunConfig {
    pub label: String,
    pub cache: CacheConfig,
    pub pre: Option<PreEvictConfig>,
    pub prefetch: Option<PrefetchConfig>,
}

impl RunConfig {
    pub fn new(label: impl Into<String>, cache: CacheConfig) -> Self {
        RunConfig { label: label.into(), cache, pre: None, prefetch: None }
    }

    pub fn with_pre_evict(mut self, pre: PreEvictConfig) -> Self {
        self.pre = Some(pre);
        self
    }

    pub fn with_prefetch(mut self, prefetch: PrefetchConfig) -> Self {
        self.prefetch = Some(prefetch);
        self
    }
}

/// Counters from one run. Field order is the report column order.
#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimReport {
    pub label: String,
    pub accesses: u64,
    pub demand_hits: u64,
    pub demand_misses: u64,
    /// Misses on the first-ever access to a key.
    pub compulsory_misses: u64,
    /// Entries displaced by the replacement policy, including displacements
    /// caused by prefetch insertions.
    pub evictions: u64,
    pub timer_evictions: u64,
    pub halfway_evictions: u64,
    pub prefetch_issued: u64,
    pub prefetch_useful: u64,
    pub prefetch_useless: u64,
    pub prefetch_harmful: u64,
    pub prefetch_hits: u64,
    /// Percentage in `[0, 100]`.
    pub coverage: f64,
    /// `demand_hits / accesses`, 0 for an empty trace.
    pub hit_ratio: f64,
    pub distinct_keys: u64,
}

impl SimReport {
    pub const FIELDS: [&'static str; 16] = [
        "label",
        "accesses",
        "demand_hits",
        "demand_misses",
        "compulsory_misses",
        "evictions",
        "timer_evictions",
        "halfway_evictions",
        "prefetch_issued",
        "prefetch_useful",
        "prefetch_useless",
        "prefetch_harmful",
        "prefetch_hits",
        "coverage",
        "hit_ratio",
        "distinct_keys",
    ];

    /// Checks the conservation and bookkeeping invariants every report must
    /// satisfy.
    pub fn check_invariants(&self) -> Result<(), &'static str> {
        if self.demand_hits + self.demand_misses != self.accesses {
            return Err("hits + misses != accesses");
        }
        if self.compulsory_misses > self.demand_misses || self.compulsory_misses > self.distinct_keys {
            return Err("compulsory misses exceed misses or distinct keys");
        }
        if !(0.0..=1.0).contains(&self.hit_ratio) {
            return Err("hit ratio outside [0, 1]");
        }
        if !(0.0..=100.0).contains(&self.coverage) {
            return Err("coverage outside [0, 100]");
        }
        if self.prefetch_useful + self.prefetch_useless + self.prefetch_harmful != self.prefetch_issued {
            return Err("prefetch outcomes do not partition issued prefetches");
        }
        if self.prefetch_useful != self.prefetch_hits {
            return Err("useful prefetches differ from prefetch hits");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    PreEvict(#[from] PreEvictError),
    #[error(transparent)]
    Prefetch(#[from] PrefetchError),
    #[error("duplicate run label `{0}`")]
    DuplicateLabel(String),
    #[error("no run configurations given")]
    NoConfigs,
}

struct Prefetcher {
    config: PrefetchConfig,
    predictor: MarkovPredictor,
    tracker: PrefetchTracker,
}

/// Replays `trace` through `config`.
pub fn run_sim(trace: &Trace, config: &RunConfig) -> Result<SimReport, SimError> {
    let pre = config.pre.unwrap_or_else(PreEvictConfig::disabled);
    let mut cache = PreEvictCache::new(config.cache, pre)?;
    let mut prefetcher = match config.prefetch {
        Some(pc) => {
            pc.validate()?;
            Some(Prefetcher {
                config: pc,
                predictor: MarkovPredictor::new(pc.predictor)?,
                tracker: PrefetchTracker::new(),
            })
        }
        None => None,
    };

    let mut report = SimReport { label: config.label.clone(), ..Default::default() };
    let mut seen = BTreeSet::new();

    for event in trace.events() {
        let key = event.key;
        let seq = event.seq;
        report.accesses += 1;
        if let Some(p) = prefetcher.as_mut() {
            p.predictor.observe(key);
        }

        let outcome = cache.access(key, seq);
        let first_touch = seen.insert(key);
        if outcome.is_hit() {
            report.demand_hits += 1;
        } else {
            report.demand_misses += 1;
            if first_touch {
                report.compulsory_misses += 1;
            }
        }
        for ev in &outcome.evicted {
            match ev.cause {
                EvictionCause::Capacity => report.evictions += 1,
                EvictionCause::Timer => report.timer_evictions += 1,
                EvictionCause::Halfway => report.halfway_evictions += 1,
            }
        }

        let Some(p) = prefetcher.as_mut() else { continue };
        // A prefetch already judged harmful stays flagged in the cache, so only
        // this direction holds.
        debug_assert!(!(outcome.is_hit() && p.tracker.is_pending(key)) || outcome.was_prefetched_hit);
        // The demand event goes first so a victim re-request is judged harmful
        // before any eviction in the same step can mark its prefetch useless.
        p.tracker.resolve(if outcome.is_hit() {
            OutcomeEvent::DemandHit(key)
        } else {
            OutcomeEvent::DemandMiss(key)
        });
        for k in outcome.evicted_keys() {
            p.tracker.resolve(OutcomeEvent::Evicted(k));
        }

        let triggered = match p.config.trigger {
            Trigger::OnEveryAccess => true,
            Trigger::OnMiss => !outcome.is_hit(),
        };
        if !triggered {
            continue;
        }
        let predictions = p.predictor.predict(usize::MAX);
        let state = cache.state();
        let picks = decide_prefetch(&predictions, &p.config, |k| state.contains(k));
        for k in picks {
            let id = p.tracker.next_id();
            let victim = cache.insert_prefetch(k, id);
            p.tracker.issue(k, seq, victim);
            if let Some(v) = victim {
                report.evictions += 1;
                p.tracker.resolve(OutcomeEvent::Evicted(v));
            }
        }
    }

    if let Some(p) = prefetcher.as_mut() {
        p.tracker.finalize();
        let stats = p.tracker.stats();
        report.prefetch_issued = stats.issued;
        report.prefetch_useful = stats.useful;
        report.prefetch_useless = stats.useless;
        report.prefetch_harmful = stats.harmful;
        report.prefetch_hits = stats.prefetch_hits;
        report.coverage = coverage(stats);
    }
    report.hit_ratio = if report.accesses == 0 {
        0.0
    } else {
        report.demand_hits as f64 / report.accesses as f64
    };
    report.distinct_keys = seen.len() as u64;
    Ok(report)
}

/// Rejects empty or duplicate-labelled configuration lists.
pub fn check_labels(configs: &[RunConfig]) -> Result<(), SimError> {
    if configs.is_empty() {
        return Err(SimError::NoConfigs);
    }
    let mut labels = BTreeSet::new();
    for c in configs {
        if !labels.insert(c.label.as_str()) {
            return Err(SimError::DuplicateLabel(c.label.clone()));
        }
    }
    Ok(())
}

/// Runs every configuration over the same trace; reports come back in
/// configuration order.
pub fn compare(trace: &Trace, configs: &[RunConfig]) -> Result<Vec<SimReport>, SimError> {
    check_labels(configs)?;
    configs.iter().map(|c| run_sim(trace, c)).collect()
}
