//! Trace log ingestion, per-level segmentation and sequence deduplication.
//!
//! The log is line-delimited JSON, one move event per line:
//!
//! ```text
//! {"player_id":"9882","session_id":"s1","level_id":"T1","seq_no":0,"ts":1700000000000,"move":{"cog":0,"dir":"cw","turns":3},"completed":true}
//! ```
//!
//! `ts` and `completed` are optional. Events are grouped into one trace per
//! (player, session, level) and ordered by `seq_no`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::BufRead;

use serde::Serialize;

use crate::game::{trace_id, GameState, Level, LogRecord, MoveAction, PlayTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WarningKind {
    Malformed,
    UnknownLevel,
    DuplicateSeqNo,
    InvalidMove,
    MovesAfterCompletion,
    ReplayMismatch,
}

impl WarningKind {
    pub fn label(self) -> &'static str {
        match self {
            WarningKind::Malformed => "malformed line",
            WarningKind::UnknownLevel => "unknown level",
            WarningKind::DuplicateSeqNo => "duplicate seq_no",
            WarningKind::InvalidMove => "invalid move",
            WarningKind::MovesAfterCompletion => "moves after completion",
            WarningKind::ReplayMismatch => "replay mismatch",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IngestWarning {
    /// 1-based line number, when the problem is tied to one line.
    pub line: Option<usize>,
    pub trace_id: Option<String>,
    pub kind: WarningKind,
    pub message: String,
}

impl fmt::Display for IngestWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(id) = &self.trace_id {
            write!(f, "trace {id}: ")?;
        }
        write!(f, "{}: {}", self.kind.label(), self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    /// Accepted traces, sorted by trace id.
    pub traces: Vec<PlayTrace>,
    pub warnings: Vec<IngestWarning>,
    /// Number of (player, session, level) groups rejected.
    pub excluded_traces: usize,
    pub lines_read: usize,
}

struct Event {
    line: usize,
    record: LogRecord,
}

/// Parses a whole log. Problems never abort ingestion: they become warnings and
/// the affected line or trace is excluded.
pub fn parse_trace_log<R: BufRead>(
    reader: R,
    levels: &BTreeMap<String, Level>,
) -> std::io::Result<IngestReport> {
    let mut lines = Vec::new();
    for line in reader.lines() {
        lines.push(line?);
    }
    Ok(parse_trace_lines(lines.iter().map(String::as_str), levels))
}

pub fn parse_trace_lines<'a>(
    lines: impl IntoIterator<Item = &'a str>,
    levels: &BTreeMap<String, Level>,
) -> IngestReport {
    let mut report = IngestReport::default();
    let mut groups: BTreeMap<String, Vec<Event>> = BTreeMap::new();
    let mut unknown = BTreeSet::new();

    for (index, text) in lines.into_iter().enumerate() {
        let line = index + 1;
        report.lines_read = line;
        if text.trim().is_empty() {
            continue;
        }
        let record: LogRecord = match serde_json::from_str(text) {
            Ok(r) => r,
            Err(e) => {
                report.warnings.push(IngestWarning {
                    line: Some(line),
                    trace_id: None,
                    kind: WarningKind::Malformed,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let id = trace_id(&record.player_id, &record.session_id, &record.level_id);
        if !levels.contains_key(&record.level_id) {
            report.warnings.push(IngestWarning {
                line: Some(line),
                trace_id: Some(id.clone()),
                kind: WarningKind::UnknownLevel,
                message: format!("level {:?} is not configured", record.level_id),
            });
            unknown.insert(id);
            continue;
        }
        groups.entry(id).or_default().push(Event { line, record });
    }
    report.excluded_traces += unknown.len();

    for (id, mut events) in groups {
        events.sort_by_key(|e| e.record.seq_no);
        let level = &levels[&events[0].record.level_id];
        match assemble(level, &id, &events) {
            Ok(trace) => report.traces.push(trace),
            Err(warning) => {
                report.warnings.push(warning);
                report.excluded_traces += 1;
            }
        }
    }
    report.traces.sort_by(|a, b| a.trace_id.cmp(&b.trace_id));
    report
}

fn assemble(level: &Level, id: &str, events: &[Event]) -> Result<PlayTrace, IngestWarning> {
    let warn = |line: usize, kind: WarningKind, message: String| IngestWarning {
        line: Some(line),
        trace_id: Some(id.to_string()),
        kind,
        message,
    };
    for pair in events.windows(2) {
        if pair[0].record.seq_no == pair[1].record.seq_no {
            return Err(warn(
                pair[1].line,
                WarningKind::DuplicateSeqNo,
                format!("seq_no {} repeats line {}", pair[1].record.seq_no, pair[0].line),
            ));
        }
    }

    let mut states: Vec<GameState> = vec![level.initial_state()];
    let mut moves: Vec<MoveAction> = Vec::with_capacity(events.len());
    for event in events {
        let current = *states.last().unwrap();
        if level.is_end_state(&current) {
            return Err(warn(
                event.line,
                WarningKind::MovesAfterCompletion,
                "level was already complete".into(),
            ));
        }
        let (next, _) = level
            .apply_move(&current, &event.record.action)
            .map_err(|e| warn(event.line, WarningKind::InvalidMove, e.to_string()))?;
        moves.push(event.record.action);
        states.push(next);
    }

    let completed = level.is_end_state(states.last().unwrap());
    if let Some(event) = events.iter().rev().find(|e| e.record.completed.is_some()) {
        let recorded = event.record.completed.unwrap();
        if recorded != completed {
            return Err(warn(
                event.line,
                WarningKind::ReplayMismatch,
                format!("log says completed={recorded}, replay gives completed={completed}"),
            ));
        }
    }

    let first = &events[0].record;
    Ok(PlayTrace {
        trace_id: id.to_string(),
        player_id: first.player_id.clone(),
        session_id: first.session_id.clone(),
        level_id: first.level_id.clone(),
        moves,
        states,
        completed,
    })
}

/// Serializes traces to the log format, one line per move.
pub fn write_trace_log(traces: &[PlayTrace]) -> String {
    let mut out = String::new();
    for (i, trace) in traces.iter().enumerate() {
        for record in trace.to_records(1_700_000_000_000 + 60_000 * i as i64) {
            out.push_str(&serde_json::to_string(&record).expect("records serialize"));
            out.push('\n');
        }
    }
    out
}

pub fn segment_by_level(traces: Vec<PlayTrace>) -> BTreeMap<String, Vec<PlayTrace>> {
    let mut buckets: BTreeMap<String, Vec<PlayTrace>> = BTreeMap::new();
    for trace in traces {
        buckets.entry(trace.level_id.clone()).or_default().push(trace);
    }
    buckets
}

/// A distinct move list with its popularity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniqueSequence {
    /// Popularity rank; 0 is the most popular.
    pub sequence_id: usize,
    /// Canonical encoding of the move list.
    pub key: String,
    pub level_id: String,
    pub moves: Vec<MoveAction>,
    pub states: Vec<GameState>,
    pub popularity: usize,
    pub member_player_ids: Vec<String>,
    pub member_trace_ids: Vec<String>,
    pub completed: bool,
}

pub fn sequence_key(moves: &[MoveAction]) -> String {
    moves.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

/// Groups traces by identical move lists and ranks the groups by popularity,
/// ties broken by the smallest member trace id.
pub fn dedup_sequences(traces: &[PlayTrace]) -> Vec<UniqueSequence> {
    let mut ordered: Vec<&PlayTrace> = traces.iter().collect();
    ordered.sort_by(|a, b| a.trace_id.cmp(&b.trace_id));

    let mut index: HashMap<&[MoveAction], usize> = HashMap::new();
    let mut groups: Vec<UniqueSequence> = Vec::new();
    for trace in ordered {
        let slot = *index.entry(trace.moves.as_slice()).or_insert_with(|| {
            groups.push(UniqueSequence {
                sequence_id: 0,
                key: sequence_key(&trace.moves),
                level_id: trace.level_id.clone(),
                moves: trace.moves.clone(),
                states: trace.states.clone(),
                popularity: 0,
                member_player_ids: Vec::new(),
                member_trace_ids: Vec::new(),
                completed: trace.completed,
            });
            groups.len() - 1
        });
        let group = &mut groups[slot];
        group.popularity += 1;
        group.member_trace_ids.push(trace.trace_id.clone());
        if !group.member_player_ids.contains(&trace.player_id) {
            group.member_player_ids.push(trace.player_id.clone());
        }
    }
    // groups are in first-seen order, so a stable sort keeps that as the tie-break
    groups.sort_by_key(|g| std::cmp::Reverse(g.popularity));
    for (rank, group) in groups.iter_mut().enumerate() {
        group.sequence_id = rank;
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn levels() -> BTreeMap<String, Level> {
        [fixtures::t1_level(), fixtures::fig3_level(), fixtures::strategy_level()]
            .into_iter()
            .map(|l| (l.id().to_string(), l))
            .collect()
    }

    fn line(player: &str, seq: u64, cog: usize, dir: &str, turns: u32) -> String {
        format!(
            r#"{{"player_id":"{player}","session_id":"s1","level_id":"T1","seq_no":{seq},"move":{{"cog":{cog},"dir":"{dir}","turns":{turns}}}}}"#
        )
    }

    #[test]
    fn groups_one_session() {
        let log = [
            line("a", 0, 0, "cw", 1),
            line("a", 1, 0, "cw", 1),
            line("a", 3, 0, "cw", 5),
            line("a", 2, 0, "ccw", 2),
        ];
        let report = parse_trace_lines(log.iter().map(String::as_str), &levels());
        assert!(report.warnings.is_empty(), "{:?}", report.warnings);
        let trace = &report.traces[0];
        assert_eq!(trace.moves.len(), 4);
        assert_eq!(trace.states.len(), 5);
        assert_eq!(trace.moves[2], MoveAction::ccw(0, 2));
        // 0 -> 1 -> 2 -> 0, then 1..5 stops on the key at 3
        assert!(trace.completed);
    }

    #[test]
    fn unknown_level_is_reported() {
        let text = r#"{"player_id":"a","session_id":"s","level_id":"nope","seq_no":0,"move":{"cog":0,"dir":"cw","turns":1}}"#;
        let report = parse_trace_lines([text], &levels());
        assert!(report.traces.is_empty());
        assert_eq!(report.warnings[0].kind, WarningKind::UnknownLevel);
        assert_eq!(report.excluded_traces, 1);
        assert!(report.warnings[0].to_string().contains("unknown level"));
    }

    #[test]
    fn malformed_line_is_reported() {
        let good = line("a", 0, 0, "cw", 3);
        let report = parse_trace_lines([good.as_str(), "{not json", ""], &levels());
        assert_eq!(report.traces.len(), 1);
        assert_eq!(report.warnings.len(), 1);
        assert_eq!(report.warnings[0].line, Some(2));
        assert_eq!(report.warnings[0].kind, WarningKind::Malformed);
    }

    #[test]
    fn corrupted_completion_flag_is_a_replay_mismatch() {
        let level = fixtures::t1_level();
        let trace = PlayTrace::replay(&level, "a", "s1", vec![MoveAction::cw(0, 1)]).unwrap();
        let mut records = trace.to_records(0);
        assert_eq!(records[0].completed, Some(false));
        records[0].completed = Some(true);
        let text = serde_json::to_string(&records[0]).unwrap();
        let report = parse_trace_lines([text.as_str()], &levels());
        assert!(report.traces.is_empty());
        assert_eq!(report.warnings[0].kind, WarningKind::ReplayMismatch);
        assert!(report.warnings[0].to_string().contains("replay mismatch"));
    }

    #[test]
    fn structural_problems_exclude_the_trace() {
        let dup = [line("a", 0, 0, "cw", 1), line("a", 0, 0, "cw", 2)];
        let r = parse_trace_lines(dup.iter().map(String::as_str), &levels());
        assert_eq!(r.warnings[0].kind, WarningKind::DuplicateSeqNo);
        let bad = [line("a", 0, 4, "cw", 1)];
        let r = parse_trace_lines(bad.iter().map(String::as_str), &levels());
        assert_eq!(r.warnings[0].kind, WarningKind::InvalidMove);
        let after = [line("a", 0, 0, "cw", 3), line("a", 1, 0, "cw", 1)];
        let r = parse_trace_lines(after.iter().map(String::as_str), &levels());
        assert_eq!(r.warnings[0].kind, WarningKind::MovesAfterCompletion);
        assert_eq!(r.excluded_traces, 1);
    }

    #[test]
    fn empty_input() {
        let report = parse_trace_lines(std::iter::empty(), &levels());
        assert_eq!(report, IngestReport::default());
    }

    #[test]
    fn log_round_trip() {
        let traces = fixtures::strategy_corpus([3, 2, 1, 1]);
        let text = write_trace_log(&traces);
        let report = parse_trace_log(text.as_bytes(), &levels()).unwrap();
        assert!(report.warnings.is_empty());
        let mut expected = traces.clone();
        expected.sort_by(|a, b| a.trace_id.cmp(&b.trace_id));
        assert_eq!(report.traces, expected);
    }

    #[test]
    fn dedup_counts_and_ranks() {
        let level = fixtures::t1_level();
        let mk = |p: &str, moves: Vec<MoveAction>| PlayTrace::replay(&level, p, "s1", moves).unwrap();
        let traces = vec![
            mk("d", vec![MoveAction::cw(0, 1)]),
            mk("a", vec![MoveAction::cw(0, 3)]),
            mk("b", vec![MoveAction::cw(0, 3)]),
            mk("c", vec![MoveAction::cw(0, 3)]),
        ];
        let seqs = dedup_sequences(&traces);
        assert_eq!(seqs.len(), 2);
        assert_eq!((seqs[0].sequence_id, seqs[0].popularity), (0, 3));
        assert_eq!((seqs[1].sequence_id, seqs[1].popularity), (1, 1));
        assert_eq!(seqs[0].member_player_ids, ["a", "b", "c"]);
        assert!(dedup_sequences(&[]).is_empty());
    }

    #[test]
    fn ties_break_on_first_trace_id() {
        let level = fixtures::t1_level();
        let mk = |p: &str, moves: Vec<MoveAction>| PlayTrace::replay(&level, p, "s1", moves).unwrap();
        let traces = vec![mk("z", vec![MoveAction::cw(0, 3)]), mk("a", vec![MoveAction::cw(0, 1)])];
        let seqs = dedup_sequences(&traces);
        assert_eq!(seqs[0].member_player_ids, ["a"]);
    }

    #[test]
    fn injected_frequencies_rank_in_order() {
        let seqs = dedup_sequences(&fixtures::strategy_corpus([50, 20, 5, 2]));
        let pops: Vec<usize> = seqs.iter().map(|s| s.popularity).collect();
        assert_eq!(pops, [50, 20, 5, 2]);
        for (seq, strategy) in seqs.iter().zip(fixtures::Strategy::ALL) {
            assert_eq!(seq.moves, strategy.moves());
        }
    }

    #[test]
    fn segmentation_partitions() {
        let mut traces = fixtures::strategy_corpus([2, 0, 0, 0]);
        traces.extend(crate::game::generate_synthetic_traces(
            &fixtures::t1_level(),
            crate::game::Policy::Optimal,
            1,
            0,
        )
        .unwrap());
        let buckets = segment_by_level(traces);
        assert_eq!(buckets["S1"].len(), 2);
        assert_eq!(buckets["T1"].len(), 1);
        assert!(segment_by_level(Vec::new()).is_empty());
    }
}
