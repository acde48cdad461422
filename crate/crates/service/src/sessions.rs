//! Per-client pin state. Nothing here touches the dataset on disk.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use glyph_core::layout::{Pins, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum View {
    State,
    Sequence,
}

#[derive(Debug, Default)]
struct Session {
    pins: BTreeMap<(String, View), Pins>,
    last_seen: Option<Instant>,
}

#[derive(Debug)]
pub struct Sessions {
    ttl: Duration,
    inner: Mutex<HashMap<String, Session>>,
}

impl Sessions {
    pub fn new(ttl: Duration) -> Sessions {
        Sessions { ttl, inner: Mutex::new(HashMap::new()) }
    }

    pub fn new_token() -> String {
        uuid::Uuid::new_v4().to_string()
    }

    fn expire(&self, sessions: &mut HashMap<String, Session>, now: Instant) {
        sessions.retain(|_, s| s.last_seen.is_some_and(|t| now.duration_since(t) < self.ttl));
    }

    /// Pins for one view of one level; empty for unknown or expired tokens.
    pub fn pins(&self, token: &str, level: &str, view: View) -> Pins {
        let now = Instant::now();
        let mut sessions = self.inner.lock().expect("session lock");
        self.expire(&mut sessions, now);
        match sessions.get_mut(token) {
            Some(s) => {
                s.last_seen = Some(now);
                s.pins.get(&(level.to_string(), view)).cloned().unwrap_or_default()
            }
            None => Pins::new(),
        }
    }

    /// Adds or moves a pin and returns the view's pins afterwards.
    pub fn pin(&self, token: &str, level: &str, view: View, node: usize, at: Point) -> Pins {
        let now = Instant::now();
        let mut sessions = self.inner.lock().expect("session lock");
        self.expire(&mut sessions, now);
        let session = sessions.entry(token.to_string()).or_default();
        session.last_seen = Some(now);
        let pins = session.pins.entry((level.to_string(), view)).or_default();
        pins.insert(node, at);
        pins.clone()
    }

    pub fn clear(&self, token: &str, level: &str, view: View) {
        let mut sessions = self.inner.lock().expect("session lock");
        if let Some(s) = sessions.get_mut(token) {
            s.pins.remove(&(level.to_string(), view));
        }
    }

    pub fn active(&self) -> usize {
        let mut sessions = self.inner.lock().expect("session lock");
        self.expire(&mut sessions, Instant::now());
        sessions.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sessions_are_isolated() {
        let s = Sessions::new(Duration::from_secs(60));
        s.pin("a", "T1", View::State, 0, [1.0, 2.0]);
        assert_eq!(s.pins("a", "T1", View::State)[&0], [1.0, 2.0]);
        assert!(s.pins("b", "T1", View::State).is_empty());
        assert!(s.pins("a", "T1", View::Sequence).is_empty());
        assert!(s.pins("a", "S1", View::State).is_empty());
        s.clear("a", "T1", View::State);
        assert!(s.pins("a", "T1", View::State).is_empty());
    }

    #[test]
    fn sessions_expire() {
        let s = Sessions::new(Duration::ZERO);
        s.pin("a", "T1", View::State, 0, [1.0, 2.0]);
        assert!(s.pins("a", "T1", View::State).is_empty());
        assert_eq!(s.active(), 0);
    }
}
