//! Human-readable event text and condensation.
//!
//! Moves render as `Move counter-clockwise 5 steps`, pickups as
//! `Collect 1 key` or `Collect 2 bonus items`. Condensing keeps only the
//! meaningful events (item pickups for this game) and merges neighbouring
//! pickups of the same class into one counted event.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::game::{derive_events, Collection, Direction, ItemClass, Level, MoveError, TraceEventKind};

/// The text-level view of an event: what is displayed, nothing more.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventPhrase {
    Move { direction: Direction, turns: u32 },
    Collect { class: ItemClass, count: u32 },
}

impl fmt::Display for EventPhrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            EventPhrase::Move { direction, turns } => {
                let unit = if turns == 1 { "step" } else { "steps" };
                write!(f, "Move {} {turns} {unit}", direction.long())
            }
            EventPhrase::Collect { class, count } => {
                let noun = match (class, count == 1) {
                    (ItemClass::Key, true) => "key",
                    (ItemClass::Key, false) => "keys",
                    (ItemClass::Bonus, true) => "bonus item",
                    (ItemClass::Bonus, false) => "bonus items",
                };
                write!(f, "Collect {count} {noun}")
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("cannot read event text {0:?}")]
pub struct PhraseError(pub String);

/// Lenient reader: case-insensitive, singular or plural units, and
/// `anti-clockwise`/`cw`/`ccw` accepted as directions.
impl FromStr for EventPhrase {
    type Err = PhraseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || PhraseError(s.to_string());
        let lower = s.trim().to_lowercase();
        let words: Vec<&str> = lower.split_whitespace().collect();
        match words.as_slice() {
            ["move", dir, n, "step" | "steps"] => {
                let direction = match *dir {
                    "clockwise" | "cw" => Direction::Clockwise,
                    "counter-clockwise" | "anti-clockwise" | "counterclockwise" | "ccw" => {
                        Direction::CounterClockwise
                    }
                    _ => return Err(err()),
                };
                let turns = n.parse().map_err(|_| err())?;
                Ok(EventPhrase::Move { direction, turns })
            }
            ["collect", n, rest @ ..] => {
                let count = n.parse().map_err(|_| err())?;
                let class = match rest {
                    ["key" | "keys"] => ItemClass::Key,
                    ["bonus", "item" | "items"] | ["bonus" | "bonuses"] => ItemClass::Bonus,
                    _ => return Err(err()),
                };
                Ok(EventPhrase::Collect { class, count })
            }
            _ => Err(err()),
        }
    }
}

impl From<&TraceEventKind> for EventPhrase {
    fn from(event: &TraceEventKind) -> Self {
        match event {
            TraceEventKind::Move(m) => EventPhrase::Move { direction: m.direction, turns: m.turns },
            TraceEventKind::Collect(c) => EventPhrase::Collect { class: c.class, count: c.items.len() as u32 },
        }
    }
}

/// Events that condensation can merge.
pub trait Condensable: Clone {
    /// Item class for pickup events, `None` otherwise.
    fn collect_class(&self) -> Option<ItemClass>;
    /// Folds a following pickup of the same class into `self`.
    fn absorb(&mut self, next: &Self);
}

impl Condensable for EventPhrase {
    fn collect_class(&self) -> Option<ItemClass> {
        match self {
            EventPhrase::Collect { class, .. } => Some(*class),
            EventPhrase::Move { .. } => None,
        }
    }

    fn absorb(&mut self, next: &Self) {
        if let (EventPhrase::Collect { count, .. }, EventPhrase::Collect { count: more, .. }) = (self, next) {
            *count += more;
        }
    }
}

impl Condensable for TraceEventKind {
    fn collect_class(&self) -> Option<ItemClass> {
        match self {
            TraceEventKind::Collect(c) => Some(c.class),
            TraceEventKind::Move(_) => None,
        }
    }

    fn absorb(&mut self, next: &Self) {
        if let (TraceEventKind::Collect(Collection { items, .. }), TraceEventKind::Collect(more)) = (self, next) {
            items.extend_from_slice(&more.items);
        }
    }
}

/// Stable filter by `meaningful`, then merge of adjacent same-class pickups.
pub fn condense<E: Condensable>(events: &[E], meaningful: impl Fn(&E) -> bool) -> Vec<E> {
    let mut out: Vec<E> = Vec::new();
    for event in events.iter().filter(|e| meaningful(e)) {
        if let (Some(last), Some(class)) = (out.last_mut(), event.collect_class()) {
            if last.collect_class() == Some(class) {
                last.absorb(event);
                continue;
            }
        }
        out.push(event.clone());
    }
    out
}

/// Default predicate: item pickups are the meaningful events.
pub fn is_pickup<E: Condensable>(event: &E) -> bool {
    event.collect_class().is_some()
}

/// Condenses displayed event text, returning the condensed lines.
pub fn condense_text<S: AsRef<str>>(lines: &[S]) -> Result<Vec<String>, PhraseError> {
    let phrases = lines
        .iter()
        .map(|l| l.as_ref().parse::<EventPhrase>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(condense(&phrases, is_pickup).iter().map(ToString::to_string).collect())
}

pub fn render_events(events: &[TraceEventKind]) -> Vec<String> {
    events.iter().map(|e| EventPhrase::from(e).to_string()).collect()
}

/// Raw event text of a move list: one line per move and per pickup group.
pub fn render_sequence_text(level: &Level, moves: &[crate::game::MoveAction]) -> Result<Vec<String>, MoveError> {
    Ok(render_events(&derive_events(level, moves)?))
}

/// Condensed event text of a move list.
pub fn render_condensed_text(level: &Level, moves: &[crate::game::MoveAction]) -> Result<Vec<String>, MoveError> {
    let events = derive_events(level, moves)?;
    Ok(render_events(&condense(&events, is_pickup)))
}

/// One-paragraph description of a level's cogs, keys and bonus items.
pub fn level_info_text(level: &Level) -> String {
    let cfg = level.config();
    let list = |v: &[u32]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
    let plural = |n: usize, one: &str, many: &str| if n == 1 { one.to_string() } else { many.to_string() };
    let mut text = format!(
        "Level {}: wheel of {} pegs, marker starts at peg {}. Cogs: {} (teeth), each turned up to {} times per move. Keys: {} at {} {}.",
        cfg.level_id,
        cfg.wheel_size,
        cfg.start_position,
        list(&cfg.cogs),
        cfg.max_turns_per_move,
        cfg.keys.len(),
        plural(cfg.keys.len(), "peg", "pegs"),
        list(&cfg.keys),
    );
    if !cfg.bonuses.is_empty() {
        let items: Vec<String> = cfg
            .bonuses
            .iter()
            .map(|(pos, points)| format!("peg {pos} ({points:+} points)"))
            .collect();
        text.push_str(&format!(" Bonus items: {} at {}.", cfg.bonuses.len(), items.join(", ")));
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, Strategy};
    use crate::game::MoveAction;

    #[test]
    fn condenses_the_worked_example() {
        let raw = [
            "Move counter-clockwise 5 step",
            "move counter-clockwise 2 step",
            "move counter-clockwise 1 step",
            "collect 1 key",
        ];
        assert_eq!(condense_text(&raw).unwrap(), ["Collect 1 key"]);
    }

    #[test]
    fn moves_only_condense_to_nothing() {
        assert!(condense_text(&["Move clockwise 1 step", "Move clockwise 2 steps"]).unwrap().is_empty());
    }

    #[test]
    fn adjacent_pickups_merge_by_class() {
        let raw = [
            "Collect 1 bonus item",
            "Move clockwise 1 step",
            "Collect 1 bonus item",
            "Move counter-clockwise 5 steps",
            "Collect 1 key",
        ];
        assert_eq!(condense_text(&raw).unwrap(), ["Collect 2 bonus items", "Collect 1 key"]);
    }

    #[test]
    fn renders_t1_traces() {
        let level = fixtures::t1_level();
        assert_eq!(
            render_sequence_text(&level, &[MoveAction::cw(0, 3)]).unwrap(),
            ["Move clockwise 3 steps", "Collect 1 key"]
        );
        assert_eq!(
            render_sequence_text(&level, &[MoveAction::cw(0, 1); 3]).unwrap(),
            ["Move clockwise 1 step", "Move clockwise 1 step", "Move clockwise 1 step", "Collect 1 key"]
        );
        assert!(render_sequence_text(&level, &[]).unwrap().is_empty());
    }

    #[test]
    fn two_bonus_strategy_text() {
        let level = fixtures::strategy_level();
        let moves = Strategy::TwoBonus.moves();
        assert_eq!(
            render_sequence_text(&level, &moves).unwrap(),
            [
                "Move clockwise 5 steps",
                "Collect 2 bonus items",
                "Move counter-clockwise 5 steps",
                "Move counter-clockwise 5 steps",
                "Collect 1 key"
            ]
        );
        assert_eq!(
            render_condensed_text(&level, &moves).unwrap(),
            ["Collect 2 bonus items", "Collect 1 key"]
        );
    }

    #[test]
    fn condensed_items_are_conserved() {
        let level = fixtures::strategy_level();
        for strategy in Strategy::ALL {
            let events = derive_events(&level, &strategy.moves()).unwrap();
            let picked: usize = events
                .iter()
                .map(|e| match e {
                    TraceEventKind::Collect(c) => c.items.len(),
                    _ => 0,
                })
                .sum();
            let condensed: usize = condense(&events, is_pickup)
                .iter()
                .map(|e| match e {
                    TraceEventKind::Collect(c) => c.items.len(),
                    _ => 0,
                })
                .sum();
            assert_eq!(picked, condensed);
        }
    }

    #[test]
    fn phrases_round_trip() {
        for text in ["Move clockwise 1 step", "Move counter-clockwise 4 steps", "Collect 3 keys", "Collect 1 bonus item"] {
            assert_eq!(text.parse::<EventPhrase>().unwrap().to_string(), text);
        }
        assert!("Jump 3".parse::<EventPhrase>().is_err());
        assert!("Collect 1 gem".parse::<EventPhrase>().is_err());
    }

    #[test]
    fn level_info() {
        let fig3 = level_info_text(&fixtures::fig3_level());
        assert!(fig3.contains("Cogs: 3, 8, 13"));
        assert!(fig3.contains("19, 51"));
        assert!(fig3.contains("Bonus items"));
        let t1 = level_info_text(&fixtures::t1_level());
        assert!(t1.contains("Cogs: 1 (teeth)"));
        assert!(t1.contains("Keys: 1 at peg 3."));
        assert!(!t1.contains("Bonus"));
    }
}
