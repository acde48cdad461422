use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::state::{GameState, ItemSet};

/// Upper bound on keys plus bonuses in one level; collected items are a 64-bit mask.
pub const MAX_ITEMS: usize = 64;

fn default_max_turns() -> u32 {
    5
}

fn default_key_points() -> i64 {
    1
}

/// One level as it appears on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelConfig {
    pub level_id: String,
    pub wheel_size: u32,
    pub cogs: Vec<u32>,
    pub keys: Vec<u32>,
    #[serde(default)]
    pub bonuses: Vec<(u32, i64)>,
    #[serde(default)]
    pub start_position: u32,
    #[serde(default = "default_max_turns")]
    pub max_turns_per_move: u32,
    #[serde(default = "default_key_points")]
    pub key_points: i64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LevelError {
    #[error("level {0}: wheel_size must be positive")]
    EmptyWheel(String),
    #[error("level {0}: at least one cog is required")]
    NoCogs(String),
    #[error("level {level}: cog {index} has zero teeth")]
    ToothlessCog { level: String, index: usize },
    #[error("level {0}: at least one key is required")]
    NoKeys(String),
    #[error("level {level}: position {position} is outside the wheel (size {wheel_size})")]
    OutOfWheel {
        level: String,
        position: u32,
        wheel_size: u32,
    },
    #[error("level {level}: two items share peg {position}")]
    DuplicatePosition { level: String, position: u32 },
    #[error("level {level}: {count} items exceed the limit of {MAX_ITEMS}")]
    TooManyItems { level: String, count: usize },
    #[error("level {0}: max_turns_per_move must be positive")]
    NoTurns(String),
    #[error("invalid level JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ItemClass {
    Bonus,
    Key,
}

/// Item identifier, rendered as `key@<pos>` or `bonus@<pos>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId {
    pub class: ItemClass,
    pub position: u32,
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.class {
            ItemClass::Key => "key",
            ItemClass::Bonus => "bonus",
        };
        write!(f, "{prefix}@{}", self.position)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("not an item identifier: {0:?}")]
pub struct ParseItemError(String);

impl FromStr for ItemId {
    type Err = ParseItemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseItemError(s.to_string());
        let (prefix, pos) = s.split_once('@').ok_or_else(err)?;
        let class = match prefix {
            "key" => ItemClass::Key,
            "bonus" => ItemClass::Bonus,
            _ => return Err(err()),
        };
        let position = pos.parse().map_err(|_| err())?;
        Ok(ItemId { class, position })
    }
}

impl Serialize for ItemId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ItemId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A validated level with precomputed item lookup tables.
///
/// Items are indexed in canonical order (bonuses before keys, ascending peg),
/// and bit `i` of a state's [`ItemSet`] refers to `items()[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    config: LevelConfig,
    items: Vec<ItemId>,
    points: Vec<i64>,
    item_at: Vec<Option<u8>>,
    key_mask: ItemSet,
}

impl LevelConfig {
    pub fn validate(self) -> Result<Level, LevelError> {
        let id = || self.level_id.clone();
        if self.wheel_size == 0 {
            return Err(LevelError::EmptyWheel(id()));
        }
        if self.cogs.is_empty() {
            return Err(LevelError::NoCogs(id()));
        }
        if let Some(index) = self.cogs.iter().position(|&t| t == 0) {
            return Err(LevelError::ToothlessCog { level: id(), index });
        }
        if self.keys.is_empty() {
            return Err(LevelError::NoKeys(id()));
        }
        if self.max_turns_per_move == 0 {
            return Err(LevelError::NoTurns(id()));
        }
        let positions = std::iter::once(self.start_position)
            .chain(self.keys.iter().copied())
            .chain(self.bonuses.iter().map(|b| b.0));
        for position in positions {
            if position >= self.wheel_size {
                return Err(LevelError::OutOfWheel {
                    level: id(),
                    position,
                    wheel_size: self.wheel_size,
                });
            }
        }

        let mut entries: Vec<(ItemId, i64)> = self
            .keys
            .iter()
            .map(|&p| (ItemId { class: ItemClass::Key, position: p }, self.key_points))
            .chain(self.bonuses.iter().map(|&(p, v)| {
                (ItemId { class: ItemClass::Bonus, position: p }, v)
            }))
            .collect();
        if entries.len() > MAX_ITEMS {
            return Err(LevelError::TooManyItems { level: id(), count: entries.len() });
        }
        let mut seen = BTreeSet::new();
        for (item, _) in &entries {
            if !seen.insert(item.position) {
                return Err(LevelError::DuplicatePosition { level: id(), position: item.position });
            }
        }
        entries.sort_by_key(|e| e.0);

        let mut item_at = vec![None; self.wheel_size as usize];
        let mut key_mask = ItemSet::EMPTY;
        for (bit, (item, _)) in entries.iter().enumerate() {
            item_at[item.position as usize] = Some(bit as u8);
            if item.class == ItemClass::Key {
                key_mask = key_mask.with(bit);
            }
        }
        Ok(Level {
            items: entries.iter().map(|e| e.0).collect(),
            points: entries.iter().map(|e| e.1).collect(),
            item_at,
            key_mask,
            config: self,
        })
    }
}

impl Level {
    pub fn from_json(text: &str) -> Result<Level, LevelError> {
        let config: LevelConfig =
            serde_json::from_str(text).map_err(|e| LevelError::Json(e.to_string()))?;
        config.validate()
    }

    pub fn config(&self) -> &LevelConfig {
        &self.config
    }

    pub fn id(&self) -> &str {
        &self.config.level_id
    }

    pub fn wheel_size(&self) -> u32 {
        self.config.wheel_size
    }

    pub fn cogs(&self) -> &[u32] {
        &self.config.cogs
    }

    pub fn max_turns(&self) -> u32 {
        self.config.max_turns_per_move
    }

    /// Items in canonical (bit) order.
    pub fn items(&self) -> &[ItemId] {
        &self.items
    }

    pub fn item_points(&self, bit: usize) -> i64 {
        self.points[bit]
    }

    pub(crate) fn item_at(&self, position: u32) -> Option<usize> {
        self.item_at[position as usize].map(usize::from)
    }

    pub fn item_bit(&self, item: &ItemId) -> Option<usize> {
        self.items.iter().position(|i| i == item)
    }

    pub fn key_mask(&self) -> ItemSet {
        self.key_mask
    }

    pub fn all_items(&self) -> ItemSet {
        ItemSet::full(self.items.len())
    }

    pub fn initial_state(&self) -> GameState {
        GameState::new(self.config.start_position, ItemSet::EMPTY)
    }

    pub fn is_valid_state(&self, state: &GameState) -> bool {
        state.marker < self.config.wheel_size && state.collected.is_subset(self.all_items())
    }

    /// Collected item identifiers of `state`, in canonical order.
    pub fn collected_ids(&self, state: &GameState) -> Vec<ItemId> {
        state.collected.iter().map(|bit| self.items[bit]).collect()
    }

    /// Builds a state from item identifiers; `None` if an identifier is not on this level.
    pub fn state_from_ids(&self, marker: u32, ids: &[ItemId]) -> Option<GameState> {
        let mut set = ItemSet::EMPTY;
        for id in ids {
            set = set.with(self.item_bit(id)?);
        }
        let state = GameState::new(marker, set);
        self.is_valid_state(&state).then_some(state)
    }

    /// Canonical text encoding: `<marker>|<id>,<id>...` with ids in sorted order.
    pub fn encode_state(&self, state: &GameState) -> String {
        let ids: Vec<String> = self.collected_ids(state).iter().map(ToString::to_string).collect();
        format!("{}|{}", state.marker, ids.join(","))
    }
}
