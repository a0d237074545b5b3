use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use discourse_core::{HeadlineId, LacanCode};
use serde::{Deserialize, Serialize};

use crate::error::SessionError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionPhase {
    BlindAssign,
    Reveal,
    Resolve,
    Extend,
    Closed,
}

impl SessionPhase {
    pub fn labels_visible(self) -> bool {
        self != SessionPhase::BlindAssign
    }
}

impl fmt::Display for SessionPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SessionPhase::BlindAssign => "blind_assign",
            SessionPhase::Reveal => "reveal",
            SessionPhase::Resolve => "resolve",
            SessionPhase::Extend => "extend",
            SessionPhase::Closed => "closed",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    SessionCreated,
    Assign,
    Reassign,
    Revealed,
    Extended,
    Closed,
}

/// One line of a session log. `phase` is the phase the session was in when
/// the event was accepted. Fields that a kind does not use are omitted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnotationEvent {
    pub sequence_no: u64,
    pub timestamp: DateTime<Utc>,
    pub session_id: String,
    pub phase: SessionPhase,
    pub kind: EventKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub headline_id: Option<HeadlineId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code: Option<LacanCode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub justification: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub headline_ids: Option<Vec<HeadlineId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<usize>,
}

impl AnnotationEvent {
    pub(crate) fn new(session_id: &str, sequence_no: u64, phase: SessionPhase, kind: EventKind) -> Self {
        AnnotationEvent {
            sequence_no,
            timestamp: Utc::now(),
            session_id: session_id.to_owned(),
            phase,
            kind,
            headline_id: None,
            code: None,
            justification: None,
            headline_ids: None,
            batch_size: None,
        }
    }

    /// The event as a single JSON line, newline included.
    pub fn to_line(&self) -> Result<Vec<u8>, SessionError> {
        let mut line = serde_json::to_vec(self)?;
        line.push(b'\n');
        Ok(line)
    }
}

/// Append-only JSON-Lines file. Each event goes out in a single write.
#[derive(Debug)]
pub struct EventLog {
    path: PathBuf,
    file: File,
}

impl EventLog {
    /// Creates a fresh log; fails if the file already exists.
    pub fn create(path: impl Into<PathBuf>) -> Result<Self, SessionError> {
        let path = path.into();
        let file = OpenOptions::new().append(true).create_new(true).open(&path)?;
        Ok(EventLog { path, file })
    }

    pub fn open(path: impl Into<PathBuf>) -> Result<Self, SessionError> {
        let path = path.into();
        let file = OpenOptions::new().append(true).open(&path)?;
        Ok(EventLog { path, file })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&mut self, event: &AnnotationEvent) -> Result<(), SessionError> {
        self.file.write_all(&event.to_line()?)?;
        self.file.flush()?;
        Ok(())
    }
}

pub fn read_events(path: &Path) -> Result<Vec<AnnotationEvent>, SessionError> {
    let reader = BufReader::new(File::open(path)?);
    let mut events = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let event = serde_json::from_str(&line)
            .map_err(|e| SessionError::CorruptLog(format!("{}:{}: {e}", path.display(), n + 1)))?;
        events.push(event);
    }
    Ok(events)
}
