//! Trace-driven cache replacement laboratory.
//!
//! The crate models a single-level, fully-associative, key-addressed cache and
//! provides:
//!
//! - classical victim selection (FIFO, LIFO, LRU, MRU) and ARC ([`cache`]),
//! - pre-eviction wrappers that evict by address half or by idle timer
//!   ([`pre_evict`]),
//! - a discrete Bayesian-network engine with enumeration and variable
//!   elimination ([`bayes`]),
//! - an online Markov predictor that drives prefetching, plus prefetch outcome
//!   bookkeeping ([`prefetch`]),
//! - a deterministic simulation driver that ties the pieces together ([`sim`]).
//!
//! Everything here is `no_std` + `alloc`. File formats, report rendering and the
//! command-line front end live in the `cachelab` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod bayes;
pub mod cache;
pub mod pre_evict;
pub mod prefetch;
pub mod sim;
pub mod trace;

/// Identifier of a cached item: a block address or a symbol code.
pub type Key = u64;

/// Position of an access in a trace. One tick of the global clock.
pub type Seq = u64;

pub use cache::{AccessOutcome, ArcAdaptation, CacheConfig, CacheState, Policy};
pub use pre_evict::{PreEvictCache, PreEvictConfig};
pub use prefetch::{MarkovPredictor, PrefetchConfig, PrefetchStats, PrefetchTracker};
pub use sim::{compare, run_sim, RunConfig, SimError, SimReport};
pub use trace::{Op, Trace, TraceEvent, TraceSource};
