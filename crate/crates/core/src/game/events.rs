use serde::{Deserialize, Serialize};

use super::level::{ItemClass, ItemId, Level};
use super::mechanics::{MoveAction, MoveError};

/// Items of one class picked up consecutively within a single move.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collection {
    pub class: ItemClass,
    pub items: Vec<ItemId>,
}

/// An entry of a trace's event stream. Collect events are always derived by replay.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum TraceEventKind {
    Move(MoveAction),
    Collect(Collection),
}

impl TraceEventKind {
    pub fn is_collect(&self) -> bool {
        matches!(self, TraceEventKind::Collect(_))
    }
}

/// Replays `moves` and interleaves each move with the collections it triggered.
/// Stops of the same item class within one move are grouped into one event.
pub fn derive_events(level: &Level, moves: &[MoveAction]) -> Result<Vec<TraceEventKind>, MoveError> {
    let mut events = Vec::with_capacity(moves.len() * 2);
    let mut state = level.initial_state();
    for action in moves {
        let (next, picked) = level.apply_move(&state, action)?;
        events.push(TraceEventKind::Move(*action));
        for item in picked {
            match events.last_mut() {
                Some(TraceEventKind::Collect(c)) if c.class == item.class => c.items.push(item),
                _ => events.push(TraceEventKind::Collect(Collection { class: item.class, items: vec![item] })),
            }
        }
        state = next;
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn collect_follows_move() {
        let level = fixtures::t1_level();
        let events = derive_events(&level, &[MoveAction::cw(0, 3)]).unwrap();
        assert_eq!(events.len(), 2);
        assert_eq!(events[0], TraceEventKind::Move(MoveAction::cw(0, 3)));
        match &events[1] {
            TraceEventKind::Collect(c) => {
                assert_eq!(c.class, ItemClass::Key);
                assert_eq!(c.items.len(), 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn same_class_stops_group() {
        let level = fixtures::strategy_level();
        // cog of 2 teeth clockwise five times stops on 2, 4, 6, 8, 10: bonuses at 6 and 10
        let events = derive_events(&level, &[MoveAction::cw(1, 5)]).unwrap();
        assert_eq!(events.len(), 2);
        let TraceEventKind::Collect(c) = &events[1] else { panic!() };
        assert_eq!(c.items.len(), 2);
    }
}
