use std::io;

use discourse_core::lacan::AmbiguityReport;
use discourse_core::{HeadlineId, LacanError};
use thiserror::Error;

use crate::event::SessionPhase;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("session has no headlines")]
    EmptySession,
    #[error("unknown headline id {0}")]
    UnknownHeadline(HeadlineId),
    #[error("headline {0} is listed twice")]
    DuplicateHeadline(HeadlineId),
    #[error("batch size {batch_size} is outside 1..={available}")]
    BadBatchSize { batch_size: usize, available: usize },
    #[error("{operation} is not allowed in phase {phase}")]
    WrongPhase { phase: SessionPhase, operation: &'static str },
    #[error("headline {0} already has a code; use reassign")]
    AlreadyAssigned(HeadlineId),
    #[error("headline {0} has no code yet")]
    NotAssigned(HeadlineId),
    #[error("batch incomplete, unassigned: {}", join_ids(.0))]
    IncompleteBatch(Vec<HeadlineId>),
    #[error("justification must not be empty")]
    EmptyJustification,
    #[error("ambiguous codes: {}", .0.codes().map(|c| c.to_string()).collect::<Vec<_>>().join(", "))]
    Ambiguous(AmbiguityReport),
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("corrupt event log: {0}")]
    CorruptLog(String),
    #[error(transparent)]
    Lacan(#[from] LacanError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn join_ids(ids: &[HeadlineId]) -> String {
    ids.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", ")
}
