use std::fmt;

use serde::{Deserialize, Serialize};

/// Bitmask of collected items; bit `i` is the level's `items()[i]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ItemSet(u64);

impl ItemSet {
    pub const EMPTY: ItemSet = ItemSet(0);

    pub fn full(count: usize) -> ItemSet {
        if count >= 64 {
            ItemSet(u64::MAX)
        } else {
            ItemSet((1u64 << count) - 1)
        }
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, bit: usize) -> bool {
        self.0 >> bit & 1 == 1
    }

    #[must_use]
    pub fn with(self, bit: usize) -> ItemSet {
        ItemSet(self.0 | 1 << bit)
    }

    pub fn is_subset(self, other: ItemSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&b| self.contains(b))
    }
}

/// Marker position plus the set of items picked up so far.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GameState {
    pub marker: u32,
    pub collected: ItemSet,
}

impl GameState {
    pub fn new(marker: u32, collected: ItemSet) -> GameState {
        GameState { marker, collected }
    }
}

impl fmt::Display for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {:#x})", self.marker, self.collected.bits())
    }
}
