//! Access traces and the seeded synthetic workload generator.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Key, Seq};

/// Kind of memory operation recorded with an access. Recorded only; every
/// operation is treated as a cache access (write-allocate, no dirty bits).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Op {
    InstrFetch,
    DataRead,
    DataWrite,
    Unspecified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub seq: Seq,
    pub key: Key,
    pub op: Op,
}

/// Where a trace came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceSource {
    Plain,
    Smpc,
    Synthetic,
}

/// An ordered sequence of accesses whose `seq` values run 0, 1, 2, ...
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    events: Vec<TraceEvent>,
    source: TraceSource,
}

impl Trace {
    /// Builds a trace from keys; every event gets `Op::Unspecified`.
    pub fn from_keys<I: IntoIterator<Item = Key>>(keys: I, source: TraceSource) -> Self {
        Self::from_ops(keys.into_iter().map(|k| (k, Op::Unspecified)), source)
    }

    pub fn from_ops<I: IntoIterator<Item = (Key, Op)>>(accesses: I, source: TraceSource) -> Self {
        let events = accesses
            .into_iter()
            .enumerate()
            .map(|(i, (key, op))| TraceEvent { seq: i as Seq, key, op })
            .collect();
        Trace { events, source }
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn source(&self) -> TraceSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = Key> + '_ {
        self.events.iter().map(|e| e.key)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TraceError {
    #[error("malformed line {0}")]
    MalformedLine(usize),
    #[error("malformed case on line {line}: {reason}")]
    MalformedCase { line: usize, reason: &'static str },
    #[error("invalid parameter: {0}")]
    InvalidParam(&'static str),
}

/// One LRU problem: a capacity and a script of letters (accesses) and `!`
/// (print the cache contents).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LruCase {
    pub capacity: usize,
    pub script: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LruProblemSet {
    pub cases: Vec<LruCase>,
}

impl LruCase {
    /// Checks the script grammar: starts with `A-Z`, only `A-Z` and `!`, at
    /// least one `!`, and a capacity of at least one.
    pub fn validate(&self) -> Result<(), &'static str> {
        if self.capacity < 1 {
            return Err("capacity must be at least 1");
        }
        let bytes = self.script.as_bytes();
        match bytes.first() {
            Some(b) if b.is_ascii_uppercase() => {}
            _ => return Err("script must start with an uppercase letter"),
        }
        if bytes.iter().any(|b| !(b.is_ascii_uppercase() || *b == b'!')) {
            return Err("script may only contain A-Z and '!'");
        }
        if !bytes.contains(&b'!') {
            return Err("script must contain at least one '!'");
        }
        Ok(())
    }
}

/// Maps `'A'..='Z'` to keys `0..=25`.
pub fn letter_key(letter: u8) -> Option<Key> {
    letter.is_ascii_uppercase().then(|| Key::from(letter - b'A'))
}

/// Inverse of [`letter_key`].
pub fn key_letter(key: Key) -> Option<char> {
    (key < 26).then(|| char::from(b'A' + key as u8))
}

/// Draws a trace from a seeded order-1 Markov chain over `0..num_keys`.
///
/// The start state is drawn uniformly. From state `s` the next key is
/// `(s + 1) % num_keys` with probability `determinism`, otherwise a uniformly
/// random key (which may coincide with the successor).
pub fn gen_markov_trace(
    seed: u64,
    num_keys: u64,
    length: usize,
    determinism: f64,
) -> Result<Trace, TraceError> {
    if num_keys < 2 {
        return Err(TraceError::InvalidParam("num_keys must be at least 2"));
    }
    if !(0.0..=1.0).contains(&determinism) {
        return Err(TraceError::InvalidParam("determinism must lie in [0, 1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keys = Vec::with_capacity(length);
    if length > 0 {
        let mut state = rng.gen_range(0..num_keys);
        keys.push(state);
        for _ in 1..length {
            state = if rng.gen::<f64>() < determinism {
                (state + 1) % num_keys
            } else {
                rng.gen_range(0..num_keys)
            };
            keys.push(state);
        }
    }
    Ok(Trace::from_keys(keys, TraceSource::Synthetic))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seqs_are_contiguous() {
        let t = Trace::from_keys([5, 5, 9], TraceSource::Plain);
        let seqs: Vec<_> = t.events().iter().map(|e| e.seq).collect();
        assert_eq!(seqs, [0, 1, 2]);
    }

    #[test]
    fn full_determinism_walks_the_cycle() {
        let t = gen_markov_trace(1, 4, 5, 1.0).unwrap();
        let keys: Vec<_> = t.keys().collect();
        for w in keys.windows(2) {
            assert_eq!(w[1], (w[0] + 1) % 4);
        }
        assert_eq!(keys.len(), 5);
    }

    #[test]
    fn generator_is_pure() {
        let a = gen_markov_trace(1, 10, 1000, 0.7).unwrap();
        let b = gen_markov_trace(1, 10, 1000, 0.7).unwrap();
        assert_eq!(a, b);
        let c = gen_markov_trace(2, 10, 1000, 0.7).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn empirical_successor_mass() {
        let n = 100u64;
        let t = gen_markov_trace(2, n, 600_000, 0.9).unwrap();
        let keys: Vec<_> = t.keys().collect();
        let mut total = alloc::vec![0u64; n as usize];
        let mut succ = alloc::vec![0u64; n as usize];
        for w in keys.windows(2) {
            total[w[0] as usize] += 1;
            if w[1] == (w[0] + 1) % n {
                succ[w[0] as usize] += 1;
            }
        }
        for s in 0..n as usize {
            let mass = succ[s] as f64 / total[s] as f64;
            assert!(mass >= 0.85, "state {s}: successor mass {mass}");
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(matches!(gen_markov_trace(1, 4, 5, 1.5), Err(TraceError::InvalidParam(_))));
        assert!(matches!(gen_markov_trace(1, 4, 5, -0.1), Err(TraceError::InvalidParam(_))));
        assert!(matches!(gen_markov_trace(1, 1, 5, 0.5), Err(TraceError::InvalidParam(_))));
        assert!(gen_markov_trace(1, 4, 0, 0.5).unwrap().is_empty());
    }

    #[test]
    fn letters_round_trip() {
        assert_eq!(letter_key(b'A'), Some(0));
        assert_eq!(letter_key(b'Z'), Some(25));
        assert_eq!(letter_key(b'!'), None);
        assert_eq!(key_letter(6), Some('G'));
        assert_eq!(key_letter(26), None);
    }

    #[test]
    fn case_validation() {
        let ok = LruCase { capacity: 5, script: "GHI!".into() };
        assert!(ok.validate().is_ok());
        let bang_first = LruCase { capacity: 3, script: "!ABC!".into() };
        assert!(bang_first.validate().is_err());
        let no_bang = LruCase { capacity: 3, script: "ABC".into() };
        assert!(no_bang.validate().is_err());
        let lower = LruCase { capacity: 3, script: "Ab!".into() };
        assert!(lower.validate().is_err());
        let zero = LruCase { capacity: 0, script: "A!".into() };
        assert!(zero.validate().is_err());
    }
}
