//! Pre-eviction: removing entries before capacity forces it.
//!
//! Two rules can be layered over any base policy:
//!
//! - **halfway**: on a demand miss for a key at or above `address_space_size / 2`,
//!   every resident key below that threshold is evicted;
//! - **timer**: every entry carries a countdown of `timer_init` requests that
//!   restarts on each demand hit; an entry whose countdown reaches zero is
//!   evicted before the current request is served.
//!
//! Per access the order is fixed: timer expiries, then the hit check, then on a
//! miss the halfway evictions followed by the base policy's insertion.

use alloc::vec::Vec;

use crate::cache::{AccessOutcome, CacheConfig, CacheState, Eviction, EvictionCause};
use crate::{Key, Seq};

/// Default idle window: 2K requests.
pub const DEFAULT_TIMER_INIT: u64 = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PreEvictError {
    #[error("address space size must be at least 2 for the halfway rule")]
    AddressSpaceTooSmall,
    #[error("timer must be at least 1 request")]
    ZeroTimer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PreEvictConfig {
    pub halfway_enabled: bool,
    pub address_space_size: u64,
    pub timer_enabled: bool,
    pub timer_init: u64,
}

impl Default for PreEvictConfig {
    fn default() -> Self {
        PreEvictConfig {
            halfway_enabled: false,
            address_space_size: 2,
            timer_enabled: false,
            timer_init: DEFAULT_TIMER_INIT,
        }
    }
}

impl PreEvictConfig {
    /// Both rules off: the wrapper behaves exactly like its base policy.
    pub fn disabled() -> Self {
        Self::default()
    }

    pub fn with_halfway(mut self, address_space_size: u64) -> Self {
        self.halfway_enabled = true;
        self.address_space_size = address_space_size;
        self
    }

    pub fn with_timer(mut self, timer_init: u64) -> Self {
        self.timer_enabled = true;
        self.timer_init = timer_init;
        self
    }

    pub fn is_disabled(&self) -> bool {
        !self.halfway_enabled && !self.timer_enabled
    }

    pub fn halfway(&self) -> Key {
        self.address_space_size / 2
    }

    pub fn validate(&self) -> Result<(), PreEvictError> {
        if self.halfway_enabled && self.address_space_size < 2 {
            return Err(PreEvictError::AddressSpaceTooSmall);
        }
        if self.timer_init < 1 {
            return Err(PreEvictError::ZeroTimer);
        }
        Ok(())
    }
}

/// Keys the halfway rule would clear for a miss on `requested`. Does not
/// mutate `state`.
pub fn halfway_filter(state: &CacheState, requested: Key, config: &PreEvictConfig) -> Vec<Key> {
    if !config.halfway_enabled {
        return Vec::new();
    }
    let halfway = config.halfway();
    if requested < halfway {
        return Vec::new();
    }
    // residents() is key-ordered, so the lower block is a prefix.
    state.residents().take_while(|&k| k < halfway).collect()
}

/// Decrements every resident timer and returns the keys that reached zero.
/// The caller evicts them.
pub fn tick_timers(state: &mut CacheState, config: &PreEvictConfig) -> Vec<Key> {
    if !config.timer_enabled {
        return Vec::new();
    }
    let mut expired = Vec::new();
    for meta in state.entries_mut() {
        meta.timer = meta.timer.saturating_sub(1);
        if meta.timer == 0 {
            expired.push(meta.key);
        }
    }
    expired
}

/// A base policy composed with the pre-eviction rules.
#[derive(Clone, Debug)]
pub struct PreEvictCache {
    base: CacheState,
    config: PreEvictConfig,
}

impl PreEvictCache {
    pub fn new(base: CacheConfig, config: PreEvictConfig) -> Result<Self, PreEvictError> {
        config.validate()?;
        Ok(PreEvictCache { base: CacheState::new(base), config })
    }

    pub fn state(&self) -> &CacheState {
        &self.base
    }

    pub fn config(&self) -> &PreEvictConfig {
        &self.config
    }

    pub fn access(&mut self, key: Key, seq: Seq) -> AccessOutcome {
        let mut evicted = Vec::new();
        for k in tick_timers(&mut self.base, &self.config) {
            self.base.remove(k);
            evicted.push(Eviction { key: k, cause: EvictionCause::Timer });
        }

        if !self.base.contains(key) {
            for k in halfway_filter(&self.base, key, &self.config) {
                self.base.remove(k);
                evicted.push(Eviction { key: k, cause: EvictionCause::Halfway });
            }
        }

        let mut outcome = self.base.access(key, seq);
        self.arm_timer(key);
        evicted.append(&mut outcome.evicted);
        outcome.evicted = evicted;
        outcome
    }

    /// Prefetch insertion: no tick and no halfway rule, only the base policy.
    pub fn insert_prefetch(&mut self, key: Key, prefetch_id: u64) -> Option<Key> {
        let victim = self.base.insert_prefetch(key, prefetch_id);
        self.arm_timer(key);
        victim
    }

    fn arm_timer(&mut self, key: Key) {
        if self.config.timer_enabled {
            if let Some(meta) = self.base.meta_mut(key) {
                meta.timer = self.config.timer_init;
            }
        }
    }
}
