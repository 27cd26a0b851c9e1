//! Prediction-driven prefetching.
//!
//! [`MarkovPredictor`] counts transitions from the last one or two keys to the
//! next key and ranks likely successors. [`decide_prefetch`] turns a ranking
//! into keys to fetch. [`PrefetchTracker`] follows every issued prefetch until
//! it resolves as:
//!
//! - **useful**: demand-hit before it left the cache;
//! - **useless**: evicted without ever being demand-touched;
//! - **harmful**: the key it displaced was demand-missed while the prefetched
//!   entry was still untouched.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::{Key, Seq};

/// The last `order` keys seen, oldest first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Context {
    keys: [Key; 2],
    len: u8,
}

impl Context {
    /// Builds a context from up to two keys.
    pub fn new(keys: &[Key]) -> Self {
        assert!(keys.len() <= 2, "context holds at most two keys");
        let mut buf = [0; 2];
        buf[..keys.len()].copy_from_slice(keys);
        Context { keys: buf, len: keys.len() as u8 }
    }

    pub fn as_slice(&self) -> &[Key] {
        &self.keys[..self.len as usize]
    }

    fn push(&mut self, key: Key, order: usize) {
        if (self.len as usize) < order {
            self.keys[self.len as usize] = key;
            self.len += 1;
        } else if order == 2 {
            self.keys = [self.keys[1], key];
        } else {
            self.keys[0] = key;
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Successors {
    total: u64,
    counts: BTreeMap<Key, u64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PredictorConfig {
    /// Context length: 1 (Markov chain) or 2.
    pub order: usize,
    /// Pseudocount added to every seen successor.
    pub alpha: f64,
    /// Transitions a context must have before it predicts anything.
    pub min_support: u64,
}

impl Default for PredictorConfig {
    fn default() -> Self {
        PredictorConfig { order: 1, alpha: 1.0, min_support: 2 }
    }
}

#[derive(Clone, Debug)]
pub struct MarkovPredictor {
    config: PredictorConfig,
    counts: BTreeMap<Context, Successors>,
    window: Context,
}

impl MarkovPredictor {
    pub fn new(config: PredictorConfig) -> Result<Self, PrefetchError> {
        if !(1..=2).contains(&config.order) {
            return Err(PrefetchError::InvalidOrder);
        }
        if !config.alpha.is_finite() || config.alpha < 0.0 {
            return Err(PrefetchError::InvalidAlpha);
        }
        Ok(MarkovPredictor { config, counts: BTreeMap::new(), window: Context::new(&[]) })
    }

    pub fn config(&self) -> &PredictorConfig {
        &self.config
    }

    /// The current context window.
    pub fn context(&self) -> Context {
        self.window
    }

    /// Records the transition `context -> key` once the window is full, then
    /// shifts `key` into the window.
    pub fn observe(&mut self, key: Key) {
        if self.window.len as usize == self.config.order {
            let s = self.counts.entry(self.window).or_default();
            s.total += 1;
            *s.counts.entry(key).or_insert(0) += 1;
        }
        self.window.push(key, self.config.order);
    }

    /// Count of the transition `context -> key`.
    pub fn count(&self, context: &[Key], key: Key) -> u64 {
        self.counts
            .get(&Context::new(context))
            .and_then(|s| s.counts.get(&key))
            .copied()
            .unwrap_or(0)
    }

    /// Number of transitions observed out of `context`.
    pub fn support(&self, context: &[Key]) -> u64 {
        self.counts.get(&Context::new(context)).map_or(0, |s| s.total)
    }

    pub fn contexts(&self) -> usize {
        self.counts.len()
    }

    /// Successors of `context` with smoothed probabilities
    /// `(count + alpha) / (total + alpha * distinct)`, highest first, ties by
    /// ascending key. Empty when the context has too little support.
    pub fn predict_next(&self, context: &[Key], top_k: usize) -> Vec<(Key, f64)> {
        let Some(s) = self.counts.get(&Context::new(context)) else {
            return Vec::new();
        };
        if s.total < self.config.min_support || s.total == 0 {
            return Vec::new();
        }
        let alpha = self.config.alpha;
        let denom = s.total as f64 + alpha * s.counts.len() as f64;
        let mut ranked: Vec<(Key, u64)> = s.counts.iter().map(|(&k, &c)| (k, c)).collect();
        // Probability is monotone in count, so rank on integers.
        ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        ranked.truncate(top_k);
        ranked
            .into_iter()
            .map(|(k, c)| (k, (c as f64 + alpha) / denom))
            .collect()
    }

    /// Predictions from the current window.
    pub fn predict(&self, top_k: usize) -> Vec<(Key, f64)> {
        let ctx = self.window;
        self.predict_next(ctx.as_slice(), top_k)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Trigger {
    OnMiss,
    #[default]
    OnEveryAccess,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PrefetchConfig {
    pub top_k: usize,
    pub p_min: f64,
    pub trigger: Trigger,
    pub predictor: PredictorConfig,
}

impl Default for PrefetchConfig {
    fn default() -> Self {
        PrefetchConfig {
            top_k: 1,
            p_min: 0.1,
            trigger: Trigger::OnEveryAccess,
            predictor: PredictorConfig::default(),
        }
    }
}

impl PrefetchConfig {
    pub fn validate(&self) -> Result<(), PrefetchError> {
        if self.top_k < 1 {
            return Err(PrefetchError::InvalidTopK);
        }
        if !(0.0..=1.0).contains(&self.p_min) {
            return Err(PrefetchError::InvalidThreshold);
        }
        MarkovPredictor::new(self.predictor).map(|_| ())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PrefetchError {
    #[error("predictor order must be 1 or 2")]
    InvalidOrder,
    #[error("pseudocount must be finite and nonnegative")]
    InvalidAlpha,
    #[error("top_k must be at least 1")]
    InvalidTopK,
    #[error("probability threshold must lie in [0, 1]")]
    InvalidThreshold,
}

/// Up to `top_k` predicted keys with probability at least `p_min` that are
/// not already resident, in rank order.
pub fn decide_prefetch(
    predictions: &[(Key, f64)],
    config: &PrefetchConfig,
    is_resident: impl Fn(Key) -> bool,
) -> Vec<Key> {
    predictions
        .iter()
        .filter(|(k, p)| *p >= config.p_min && !is_resident(*k))
        .map(|(k, _)| *k)
        .take(config.top_k)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrefetchOutcome {
    Pending,
    Useful,
    Useless,
    Harmful,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefetchRecord {
    pub prefetch_id: u64,
    pub key: Key,
    pub issued_at: Seq,
    pub victim: Option<Key>,
    pub outcome: PrefetchOutcome,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PrefetchStats {
    pub issued: u64,
    pub useful: u64,
    pub useless: u64,
    pub harmful: u64,
    /// Demand hits on prefetched entries not yet demand-touched.
    pub prefetch_hits: u64,
    pub demand_misses: u64,
}

impl PrefetchStats {
    pub fn pending(&self) -> u64 {
        self.issued - self.useful - self.useless - self.harmful
    }
}

/// `100 * prefetch_hits / (prefetch_hits + demand_misses)`, or 0 when both
/// counters are zero.
pub fn coverage(stats: &PrefetchStats) -> f64 {
    let denom = stats.prefetch_hits + stats.demand_misses;
    if denom == 0 {
        0.0
    } else {
        100.0 * stats.prefetch_hits as f64 / denom as f64
    }
}

/// Cache events that can settle a pending prefetch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutcomeEvent {
    DemandHit(Key),
    DemandMiss(Key),
    Evicted(Key),
}

#[derive(Clone, Debug, Default)]
pub struct PrefetchTracker {
    records: Vec<PrefetchRecord>,
    pending_by_key: BTreeMap<Key, usize>,
    pending_by_victim: BTreeMap<Key, Vec<usize>>,
    stats: PrefetchStats,
}

impl PrefetchTracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Identifier the next [`issue`](Self::issue) call will return.
    pub fn next_id(&self) -> u64 {
        self.records.len() as u64
    }

    pub fn issue(&mut self, key: Key, issued_at: Seq, victim: Option<Key>) -> u64 {
        let idx = self.records.len();
        debug_assert!(!self.pending_by_key.contains_key(&key), "key already pending");
        self.records.push(PrefetchRecord {
            prefetch_id: idx as u64,
            key,
            issued_at,
            victim,
            outcome: PrefetchOutcome::Pending,
        });
        self.pending_by_key.insert(key, idx);
        if let Some(v) = victim {
            self.pending_by_victim.entry(v).or_default().push(idx);
        }
        self.stats.issued += 1;
        idx as u64
    }

    pub fn is_pending(&self, key: Key) -> bool {
        self.pending_by_key.contains_key(&key)
    }

    pub fn records(&self) -> &[PrefetchRecord] {
        &self.records
    }

    pub fn stats(&self) -> &PrefetchStats {
        &self.stats
    }

    pub fn resolve(&mut self, event: OutcomeEvent) {
        match event {
            OutcomeEvent::DemandHit(k) => {
                if let Some(&idx) = self.pending_by_key.get(&k) {
                    self.settle(idx, PrefetchOutcome::Useful);
                    self.stats.prefetch_hits += 1;
                }
            }
            OutcomeEvent::Evicted(k) => {
                if let Some(&idx) = self.pending_by_key.get(&k) {
                    self.settle(idx, PrefetchOutcome::Useless);
                }
            }
            OutcomeEvent::DemandMiss(v) => {
                self.stats.demand_misses += 1;
                if let Some(ids) = self.pending_by_victim.get(&v).cloned() {
                    for idx in ids {
                        self.settle(idx, PrefetchOutcome::Harmful);
                    }
                }
            }
        }
    }

    /// Resolves every still-pending record as useless.
    pub fn finalize(&mut self) {
        let pending: Vec<usize> = self.pending_by_key.values().copied().collect();
        for idx in pending {
            self.settle(idx, PrefetchOutcome::Useless);
        }
    }

    fn settle(&mut self, idx: usize, outcome: PrefetchOutcome) {
        let rec = &mut self.records[idx];
        if rec.outcome != PrefetchOutcome::Pending {
            return;
        }
        rec.outcome = outcome;
        let (key, victim) = (rec.key, rec.victim);
        self.pending_by_key.remove(&key);
        if let Some(v) = victim {
            if let Some(ids) = self.pending_by_victim.get_mut(&v) {
                ids.retain(|&i| i != idx);
                if ids.is_empty() {
                    self.pending_by_victim.remove(&v);
                }
            }
        }
        match outcome {
            PrefetchOutcome::Useful => self.stats.useful += 1,
            PrefetchOutcome::Useless => self.stats.useless += 1,
            PrefetchOutcome::Harmful => self.stats.harmful += 1,
            PrefetchOutcome::Pending => unreachable!(),
        }
    }
}
