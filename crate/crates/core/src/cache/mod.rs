//! Single-level, fully-associative, key-addressed cache.
//!
//! [`CacheState`] keeps per-entry metadata plus two orders over the resident
//! keys: recency (least to most recently used) and insertion (oldest to
//! newest). FIFO, LIFO, LRU and MRU pick victims from the ends of those
//! orders; ARC keeps its own four lists in [`ArcState`].

mod arc;
mod list;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

pub use arc::{ArcList, ArcState};
use list::OrderedKeys;

use crate::{Key, Seq};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Policy {
    Fifo,
    Lifo,
    Lru,
    Mru,
    Arc,
}

impl Policy {
    pub const ALL: [Policy; 5] = [Policy::Fifo, Policy::Lifo, Policy::Lru, Policy::Mru, Policy::Arc];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Fifo => "fifo",
            Policy::Lifo => "lifo",
            Policy::Lru => "lru",
            Policy::Mru => "mru",
            Policy::Arc => "arc",
        }
    }
}

impl core::str::FromStr for Policy {
    type Err = CacheError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Policy::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or(CacheError::UnknownPolicy)
    }
}

impl core::fmt::Display for Policy {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// How far a phantom hit moves ARC's target size.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ArcAdaptation {
    /// Plus or minus one per ghost hit.
    #[default]
    Unit,
    /// `max(1, |B2|/|B1|)` up, `max(1, |B1|/|B2|)` down.
    Ratio,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CacheError {
    #[error("cache capacity must be at least 1")]
    ZeroCapacity,
    #[error("unknown policy")]
    UnknownPolicy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CacheConfig {
    capacity: usize,
    pub policy: Policy,
    pub arc_adaptation: ArcAdaptation,
}

impl CacheConfig {
    pub fn new(capacity: usize, policy: Policy) -> Result<Self, CacheError> {
        if capacity == 0 {
            return Err(CacheError::ZeroCapacity);
        }
        Ok(CacheConfig { capacity, policy, arc_adaptation: ArcAdaptation::Unit })
    }

    pub fn with_arc_adaptation(mut self, adaptation: ArcAdaptation) -> Self {
        self.arc_adaptation = adaptation;
        self
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntryMeta {
    pub key: Key,
    pub inserted_at: Seq,
    pub last_used_at: Seq,
    /// Demand accesses that touched this entry; zero for an untouched prefetch.
    pub use_count: u64,
    /// Requests left before a pre-eviction timer expires the entry.
    pub timer: u64,
    /// Set while a prefetched entry has not yet been demand-touched.
    pub prefetched: bool,
    pub prefetch_id: Option<u64>,
    insert_stamp: u64,
    use_stamp: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AccessKind {
    Hit,
    Miss,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EvictionCause {
    /// Victim chosen by the replacement policy to make room.
    Capacity,
    /// Idle timer reached zero.
    Timer,
    /// Cleared by the halfway address rule.
    Halfway,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Eviction {
    pub key: Key,
    pub cause: EvictionCause,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccessOutcome {
    pub kind: AccessKind,
    /// Every key removed during this access, in removal order.
    pub evicted: Vec<Eviction>,
    /// The hit landed on a prefetched entry not yet demand-touched.
    pub was_prefetched_hit: bool,
}

impl AccessOutcome {
    pub fn is_hit(&self) -> bool {
        self.kind == AccessKind::Hit
    }

    pub fn evicted_keys(&self) -> impl Iterator<Item = Key> + '_ {
        self.evicted.iter().map(|e| e.key)
    }
}

#[derive(Clone, Debug)]
pub struct CacheState {
    config: CacheConfig,
    entries: BTreeMap<Key, EntryMeta>,
    recency: OrderedKeys,
    insertion: OrderedKeys,
    arc: Option<ArcState>,
    clock: Seq,
    stamp: u64,
}

impl CacheState {
    pub fn new(config: CacheConfig) -> Self {
        let arc = (config.policy == Policy::Arc)
            .then(|| ArcState::new(config.capacity, config.arc_adaptation));
        CacheState {
            config,
            entries: BTreeMap::new(),
            recency: OrderedKeys::default(),
            insertion: OrderedKeys::default(),
            arc,
            clock: 0,
            stamp: 0,
        }
    }

    pub fn config(&self) -> &CacheConfig {
        &self.config
    }

    pub fn capacity(&self) -> usize {
        self.config.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.entries.len() >= self.config.capacity
    }

    pub fn clock(&self) -> Seq {
        self.clock
    }

    pub fn contains(&self, key: Key) -> bool {
        self.entries.contains_key(&key)
    }

    pub fn meta(&self, key: Key) -> Option<&EntryMeta> {
        self.entries.get(&key)
    }

    pub(crate) fn meta_mut(&mut self, key: Key) -> Option<&mut EntryMeta> {
        self.entries.get_mut(&key)
    }

    /// Resident keys in ascending key order.
    pub fn residents(&self) -> impl Iterator<Item = Key> + '_ {
        self.entries.keys().copied()
    }

    pub(crate) fn entries_mut(&mut self) -> impl Iterator<Item = &mut EntryMeta> {
        self.entries.values_mut()
    }

    pub fn arc(&self) -> Option<&ArcState> {
        self.arc.as_ref()
    }

    /// Resident keys from least to most recently used.
    pub fn snapshot_lru_order(&self) -> Vec<Key> {
        self.recency.iter().collect()
    }

    /// Resident keys from oldest to newest insertion.
    pub fn insertion_order(&self) -> Vec<Key> {
        self.insertion.iter().collect()
    }

    fn next_stamp(&mut self) -> u64 {
        self.stamp += 1;
        self.stamp
    }

    /// Serves one demand access at tick `seq`.
    pub fn access(&mut self, key: Key, seq: Seq) -> AccessOutcome {
        debug_assert!(seq >= self.clock, "clock moved backwards");
        self.clock = seq;
        if self.entries.contains_key(&key) {
            let was_prefetched_hit = self.touch(key, seq);
            return AccessOutcome { kind: AccessKind::Hit, evicted: Vec::new(), was_prefetched_hit };
        }
        let victim = self.insert(key, seq, None);
        let evicted = victim
            .map(|key| Eviction { key, cause: EvictionCause::Capacity })
            .into_iter()
            .collect();
        AccessOutcome { kind: AccessKind::Miss, evicted, was_prefetched_hit: false }
    }

    /// Inserts a prefetched key through the policy's normal insertion path.
    /// Returns the displaced victim, if the cache was full. A key that is
    /// already resident is left untouched.
    pub fn insert_prefetch(&mut self, key: Key, prefetch_id: u64) -> Option<Key> {
        if self.entries.contains_key(&key) {
            return None;
        }
        let seq = self.clock;
        self.insert(key, seq, Some(prefetch_id))
    }

    /// Removes a resident entry outside the replacement policy (pre-eviction).
    pub fn remove(&mut self, key: Key) -> Option<EntryMeta> {
        let meta = self.entries.remove(&key)?;
        self.recency.remove(key);
        self.insertion.remove(key);
        if let Some(arc) = self.arc.as_mut() {
            arc.forget(key);
        }
        Some(meta)
    }

    fn touch(&mut self, key: Key, seq: Seq) -> bool {
        let stamp = self.next_stamp();
        let meta = self.entries.get_mut(&key).expect("touch on non-resident key");
        meta.last_used_at = seq;
        meta.use_count += 1;
        meta.use_stamp = stamp;
        let was_prefetched = core::mem::replace(&mut meta.prefetched, false);
        self.recency.push_back(key, stamp);
        if let Some(arc) = self.arc.as_mut() {
            arc.on_hit(key);
        }
        was_prefetched
    }

    fn insert(&mut self, key: Key, seq: Seq, prefetch_id: Option<u64>) -> Option<Key> {
        let full = self.is_full();
        let victim = if let Some(arc) = self.arc.as_mut() {
            arc.on_miss(key)
        } else if full {
            self.classical_victim()
        } else {
            None
        };
        if let Some(v) = victim {
            self.entries.remove(&v);
            self.recency.remove(v);
            self.insertion.remove(v);
        }
        let stamp = self.next_stamp();
        let prefetched = prefetch_id.is_some();
        self.entries.insert(
            key,
            EntryMeta {
                key,
                inserted_at: seq,
                last_used_at: seq,
                use_count: u64::from(!prefetched),
                timer: 0,
                prefetched,
                prefetch_id,
                insert_stamp: stamp,
                use_stamp: stamp,
            },
        );
        self.recency.push_back(key, stamp);
        self.insertion.push_back(key, stamp);
        victim
    }

    fn classical_victim(&self) -> Option<Key> {
        match self.config.policy {
            Policy::Fifo => victim_fifo(self),
            Policy::Lifo => victim_lifo(self),
            Policy::Lru => victim_lru(self),
            Policy::Mru => victim_mru(self),
            Policy::Arc => unreachable!("ARC victims come from ArcState"),
        }
    }

    /// Verifies the structural invariants: residency bound, both orders
    /// holding exactly the resident keys, and for ARC, `T1 ∪ T2` equal to the
    /// resident set plus the list-size bounds.
    pub fn check_invariants(&self) -> Result<(), &'static str> {
        if self.entries.len() > self.config.capacity {
            return Err("resident count exceeds capacity");
        }
        if self.recency.len() != self.entries.len() || self.insertion.len() != self.entries.len() {
            return Err("order books disagree with resident set");
        }
        for (key, meta) in &self.entries {
            if !self.recency.contains(*key) || !self.insertion.contains(*key) {
                return Err("resident key missing from an order book");
            }
            if meta.last_used_at < meta.inserted_at || meta.use_stamp < meta.insert_stamp {
                return Err("entry last use precedes its insertion");
            }
        }
        if let Some(arc) = &self.arc {
            arc.check_invariants()?;
            if arc.len(ArcList::T1) + arc.len(ArcList::T2) != self.entries.len() {
                return Err("T1 + T2 differ from resident set");
            }
            for k in arc.keys(ArcList::T1).chain(arc.keys(ArcList::T2)) {
                if !self.entries.contains_key(&k) {
                    return Err("T1/T2 key not resident");
                }
            }
        }
        Ok(())
    }
}

/// Resident key inserted earliest.
pub fn victim_fifo(state: &CacheState) -> Option<Key> {
    state.insertion.front()
}

/// Resident key inserted most recently; hits do not move it.
pub fn victim_lifo(state: &CacheState) -> Option<Key> {
    state.insertion.back()
}

pub fn victim_lru(state: &CacheState) -> Option<Key> {
    state.recency.front()
}

pub fn victim_mru(state: &CacheState) -> Option<Key> {
    state.recency.back()
}
