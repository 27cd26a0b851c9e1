//! Adaptive Replacement Cache bookkeeping.
//!
//! `T1` holds keys seen once recently, `T2` keys seen at least twice. `B1` and
//! `B2` are ghost lists: keys recently evicted from `T1` / `T2`, without data.
//! A miss that lands in a ghost list (a phantom hit) moves the target size `p`
//! of `T1`: up for `B1`, down for `B2`.

use alloc::collections::BTreeSet;

use super::list::OrderedKeys;
use super::ArcAdaptation;
use crate::Key;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcList {
    T1,
    T2,
    B1,
    B2,
}

#[derive(Clone, Debug)]
pub struct ArcState {
    t1: OrderedKeys,
    t2: OrderedKeys,
    b1: OrderedKeys,
    b2: OrderedKeys,
    p: usize,
    capacity: usize,
    adaptation: ArcAdaptation,
    stamp: u64,
}

impl ArcState {
    pub fn new(capacity: usize, adaptation: ArcAdaptation) -> Self {
        ArcState {
            t1: OrderedKeys::default(),
            t2: OrderedKeys::default(),
            b1: OrderedKeys::default(),
            b2: OrderedKeys::default(),
            p: 0,
            capacity,
            adaptation,
            stamp: 0,
        }
    }

    /// Target size of `T1`.
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self, list: ArcList) -> usize {
        self.list(list).len()
    }

    /// Keys of `list` from LRU to MRU.
    pub fn keys(&self, list: ArcList) -> impl DoubleEndedIterator<Item = Key> + '_ {
        self.list(list).iter()
    }

    pub fn locate(&self, key: Key) -> Option<ArcList> {
        [ArcList::T1, ArcList::T2, ArcList::B1, ArcList::B2]
            .into_iter()
            .find(|&l| self.list(l).contains(key))
    }

    fn list(&self, list: ArcList) -> &OrderedKeys {
        match list {
            ArcList::T1 => &self.t1,
            ArcList::T2 => &self.t2,
            ArcList::B1 => &self.b1,
            ArcList::B2 => &self.b2,
        }
    }

    fn resident(&self) -> usize {
        self.t1.len() + self.t2.len()
    }

    fn next_stamp(&mut self) -> u64 {
        self.stamp += 1;
        self.stamp
    }

    /// Hit on a resident key: it moves to the MRU end of `T2`.
    pub(crate) fn on_hit(&mut self, key: Key) {
        if !self.t1.remove(key) {
            debug_assert!(self.t2.contains(key));
        }
        let s = self.next_stamp();
        self.t2.push_back(key, s);
    }

    /// Miss on `key`. Returns the resident key displaced to make room, if any.
    pub(crate) fn on_miss(&mut self, key: Key) -> Option<Key> {
        let c = self.capacity;
        if self.b1.contains(key) {
            let delta = match self.adaptation {
                ArcAdaptation::Unit => 1,
                ArcAdaptation::Ratio => (self.b2.len() / self.b1.len()).max(1),
            };
            self.p = (self.p + delta).min(c);
            self.b1.remove(key);
            let evicted = (self.resident() >= c).then(|| self.replace(false));
            let s = self.next_stamp();
            self.t2.push_back(key, s);
            return evicted;
        }
        if self.b2.contains(key) {
            let delta = match self.adaptation {
                ArcAdaptation::Unit => 1,
                ArcAdaptation::Ratio => (self.b1.len() / self.b2.len()).max(1),
            };
            self.p = self.p.saturating_sub(delta);
            self.b2.remove(key);
            let evicted = (self.resident() >= c).then(|| self.replace(true));
            let s = self.next_stamp();
            self.t2.push_back(key, s);
            return evicted;
        }

        let mut evicted = None;
        if self.t1.len() + self.b1.len() >= c {
            if self.t1.len() < c {
                self.b1.pop_front();
                if self.resident() >= c {
                    evicted = Some(self.replace(false));
                }
            } else {
                // B1 is empty and T1 fills the cache: drop T1's LRU outright.
                evicted = self.t1.pop_front();
            }
        } else {
            let total = self.resident() + self.b1.len() + self.b2.len();
            if total >= c {
                if total >= 2 * c {
                    self.b2.pop_front();
                }
                if self.resident() >= c {
                    evicted = Some(self.replace(false));
                }
            }
        }
        let s = self.next_stamp();
        self.t1.push_back(key, s);
        evicted
    }

    /// Moves the LRU of `T1` into `B1` or the LRU of `T2` into `B2`.
    fn replace(&mut self, hit_in_b2: bool) -> Key {
        let t1_len = self.t1.len();
        let from_t1 = t1_len >= 1 && (t1_len > self.p || (hit_in_b2 && t1_len == self.p));
        let from_t1 = if self.t2.is_empty() { true } else if t1_len == 0 { false } else { from_t1 };
        let s = self.next_stamp();
        if from_t1 {
            let key = self.t1.pop_front().expect("replace on empty cache");
            self.b1.push_back(key, s);
            key
        } else {
            let key = self.t2.pop_front().expect("replace on empty cache");
            self.b2.push_back(key, s);
            key
        }
    }

    /// Removes a resident key without recording it as a ghost.
    pub(crate) fn forget(&mut self, key: Key) {
        if !self.t1.remove(key) {
            self.t2.remove(key);
        }
    }

    pub fn check_invariants(&self) -> Result<(), &'static str> {
        let c = self.capacity;
        if self.t1.len() + self.b1.len() > c {
            return Err("|T1| + |B1| exceeds capacity");
        }
        if self.resident() + self.b1.len() + self.b2.len() > 2 * c {
            return Err("directory exceeds twice the capacity");
        }
        if self.resident() > c {
            return Err("|T1| + |T2| exceeds capacity");
        }
        if self.p > c {
            return Err("p exceeds capacity");
        }
        let mut seen = BTreeSet::new();
        for list in [&self.t1, &self.t2, &self.b1, &self.b2] {
            for k in list.iter() {
                if !seen.insert(k) {
                    return Err("ARC lists are not pairwise disjoint");
                }
            }
        }
        Ok(())
    }
}
