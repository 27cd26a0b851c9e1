use alloc::collections::BTreeMap;

use crate::Key;

/// Ordered key list with O(log n) push-to-MRU, pop-LRU and removal.
///
/// Positions are stamps handed out by the owner; larger stamps are more
/// recent. Stamps must be unique across pushes into the same list.
#[derive(Clone, Debug, Default)]
pub(crate) struct OrderedKeys {
    order: BTreeMap<u64, Key>,
    position: BTreeMap<Key, u64>,
}

impl OrderedKeys {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn contains(&self, key: Key) -> bool {
        self.position.contains_key(&key)
    }

    /// Inserts `key` at the most-recent end, moving it if already present.
    pub fn push_back(&mut self, key: Key, stamp: u64) {
        if let Some(old) = self.position.insert(key, stamp) {
            self.order.remove(&old);
        }
        self.order.insert(stamp, key);
    }

    pub fn remove(&mut self, key: Key) -> bool {
        match self.position.remove(&key) {
            Some(stamp) => {
                self.order.remove(&stamp);
                true
            }
            None => false,
        }
    }

    pub fn front(&self) -> Option<Key> {
        self.order.values().next().copied()
    }

    pub fn back(&self) -> Option<Key> {
        self.order.values().next_back().copied()
    }

    pub fn pop_front(&mut self) -> Option<Key> {
        let (_, key) = self.order.pop_first()?;
        self.position.remove(&key);
        Some(key)
    }

    /// Keys from least to most recent.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = Key> + '_ {
        self.order.values().copied()
    }
}
