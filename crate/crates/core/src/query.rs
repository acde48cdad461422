//! Sequence queries: top-K, K-th most popular, by user id, by sequence id.
//!
//! Query strings follow `top=K`, `kth=K`, `users=id1,id2,...` or `seqs=3,9,10`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::game::Level;
use crate::ingest::UniqueSequence;
use crate::stategraph::SequencePath;
use crate::text::{render_condensed_text, render_sequence_text};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    Top(usize),
    Kth(usize),
    Users(Vec<String>),
    Seqs(Vec<usize>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("bad query {0:?}: expected top=K, kth=K, users=a,b or seqs=1,2")]
    Grammar(String),
    #[error("K must be at least 1")]
    ZeroK,
    #[error("no sequence of popularity rank {k}: only {available} sequences")]
    NotFound { k: usize, available: usize },
}

impl FromStr for Query {
    type Err = QueryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || QueryError::Grammar(s.to_string());
        let (name, value) = s.trim().split_once('=').ok_or_else(err)?;
        let list = || value.split(',').map(str::trim).filter(|v| !v.is_empty());
        let query = match name.trim() {
            "top" => Query::Top(value.trim().parse().map_err(|_| err())?),
            "kth" => Query::Kth(value.trim().parse().map_err(|_| err())?),
            "users" => Query::Users(list().map(String::from).collect()),
            "seqs" => Query::Seqs(list().map(|v| v.parse()).collect::<Result<_, _>>().map_err(|_| err())?),
            _ => return Err(err()),
        };
        match &query {
            Query::Top(0) | Query::Kth(0) => Err(QueryError::ZeroK),
            Query::Users(v) if v.is_empty() => Err(err()),
            Query::Seqs(v) if v.is_empty() => Err(err()),
            _ => Ok(query),
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::Top(k) => write!(f, "top={k}"),
            Query::Kth(k) => write!(f, "kth={k}"),
            Query::Users(u) => write!(f, "users={}", u.join(",")),
            Query::Seqs(s) => {
                let ids: Vec<String> = s.iter().map(ToString::to_string).collect();
                write!(f, "seqs={}", ids.join(","))
            }
        }
    }
}

/// The `min(k, U)` most popular sequence ids, most popular first.
pub fn top_k(sequences: &[UniqueSequence], k: usize) -> Vec<usize> {
    let mut ids: Vec<usize> = sequences.iter().map(|s| s.sequence_id).collect();
    ids.sort_unstable();
    ids.truncate(k);
    ids
}

pub fn kth(sequences: &[UniqueSequence], k: usize) -> Result<usize, QueryError> {
    if k == 0 {
        return Err(QueryError::ZeroK);
    }
    if k > sequences.len() {
        return Err(QueryError::NotFound { k, available: sequences.len() });
    }
    Ok(k - 1)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct UserMatch {
    /// Matched sequence ids, in order of first mention.
    pub sequence_ids: Vec<usize>,
    pub per_user: BTreeMap<String, Vec<usize>>,
    pub unknown_users: Vec<String>,
}

pub fn by_user_ids(sequences: &[UniqueSequence], user_ids: &[String]) -> UserMatch {
    let mut result = UserMatch::default();
    for user in user_ids {
        let hits: Vec<usize> = sequences
            .iter()
            .filter(|s| s.member_player_ids.iter().any(|p| p == user))
            .map(|s| s.sequence_id)
            .collect();
        if hits.is_empty() {
            result.unknown_users.push(user.clone());
        }
        for &id in &hits {
            if !result.sequence_ids.contains(&id) {
                result.sequence_ids.push(id);
            }
        }
        result.per_user.insert(user.clone(), hits);
    }
    result
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceDetail {
    pub sequence_id: usize,
    pub popularity: usize,
    pub completed: bool,
    pub raw_text: Vec<String>,
    pub condensed_text: Vec<String>,
    pub highlight: SequencePath,
    /// Position in the selection; both views use it to pick the same color.
    pub color_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryResult {
    pub query: String,
    pub selected_sequence_ids: Vec<usize>,
    pub sequences: Vec<SequenceDetail>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub users: Option<UserMatch>,
    pub notes: Vec<String>,
}

/// Resolves `query` against one level's sequences and their graph paths.
pub fn run_query(
    level: &Level,
    sequences: &[UniqueSequence],
    paths: &BTreeMap<usize, SequencePath>,
    query: &Query,
) -> Result<QueryResult, QueryError> {
    let mut notes = Vec::new();
    let mut users = None;
    let selected: Vec<usize> = match query {
        Query::Top(k) => top_k(sequences, *k),
        Query::Kth(k) => vec![kth(sequences, *k)?],
        Query::Users(ids) => {
            let m = by_user_ids(sequences, ids);
            for user in &m.unknown_users {
                notes.push(format!("unknown user {user}"));
            }
            let ids = m.sequence_ids.clone();
            users = Some(m);
            ids
        }
        Query::Seqs(ids) => {
            let mut chosen = Vec::new();
            for &id in ids {
                if !sequences.iter().any(|s| s.sequence_id == id) {
                    notes.push(format!("unknown sequence {id}"));
                } else if !chosen.contains(&id) {
                    chosen.push(id);
                }
            }
            chosen
        }
    };

    let details = selected
        .iter()
        .enumerate()
        .map(|(color_index, id)| {
            let seq = sequences.iter().find(|s| s.sequence_id == *id).expect("selected ids exist");
            SequenceDetail {
                sequence_id: seq.sequence_id,
                popularity: seq.popularity,
                completed: seq.completed,
                raw_text: render_sequence_text(level, &seq.moves).expect("sequences replay"),
                condensed_text: render_condensed_text(level, &seq.moves).expect("sequences replay"),
                highlight: paths[id].clone(),
                color_index,
            }
        })
        .collect();

    Ok(QueryResult {
        query: query.to_string(),
        selected_sequence_ids: selected,
        sequences: details,
        users,
        notes,
    })
}
