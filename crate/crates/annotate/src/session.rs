use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use discourse_core::lacan::{
    build_partition, derive_classifier, detect_ambiguities, AmbiguityReport, Annotation, Classifier, PartitionTable,
};
use discourse_core::{Dataset, HeadlineId, Label, LacanCode};
use serde::{Deserialize, Serialize};

use crate::error::SessionError;
use crate::event::{AnnotationEvent, EventKind, EventLog, SessionPhase};

/// Client-facing snapshot. `labels` is present only once labels are visible.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionState {
    pub session_id: String,
    pub phase: SessionPhase,
    pub headline_ids: Vec<HeadlineId>,
    pub reserved_ids: Vec<HeadlineId>,
    pub assignments: BTreeMap<HeadlineId, LacanCode>,
    pub label_visibility: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<BTreeMap<HeadlineId, Label>>,
    pub ambiguities: AmbiguityReport,
    pub next_sequence_no: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NextHeadline {
    pub id: HeadlineId,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Export {
    pub annotations: Vec<Annotation>,
    pub partition: PartitionTable,
    pub classifier: Classifier,
}

/// One expert's annotation session. Every mutation is an event that is
/// validated, appended to the log (if any) and then applied, so replaying
/// the log rebuilds the same session.
#[derive(Debug)]
pub struct Session {
    id: String,
    phase: SessionPhase,
    batch: Vec<HeadlineId>,
    reserved: Vec<HeadlineId>,
    assignments: BTreeMap<HeadlineId, LacanCode>,
    ambiguities: AmbiguityReport,
    events: Vec<AnnotationEvent>,
    log: Option<EventLog>,
}

impl Session {
    /// Opens a blind session over the first `batch_size` ids; the rest are
    /// held back for later extension.
    pub fn create(
        session_id: &str,
        headline_ids: &[HeadlineId],
        batch_size: usize,
        dataset: &Dataset,
        log: Option<EventLog>,
    ) -> Result<Session, SessionError> {
        let mut session = Session::empty(session_id, log);
        let mut e = session.event(EventKind::SessionCreated);
        e.headline_ids = Some(headline_ids.to_vec());
        e.batch_size = Some(batch_size);
        session.commit(e, dataset)?;
        Ok(session)
    }

    /// Rebuilds a session from its event log, re-validating every event.
    pub fn replay(events: &[AnnotationEvent], dataset: &Dataset) -> Result<Session, SessionError> {
        let first = events.first().ok_or_else(|| SessionError::CorruptLog("empty log".into()))?;
        let mut session = Session::empty(&first.session_id, None);
        for e in events {
            session.commit(e.clone(), dataset).map_err(|err| match err {
                SessionError::CorruptLog(_) | SessionError::Io(_) | SessionError::Json(_) => err,
                other => SessionError::CorruptLog(format!("event {}: {other}", e.sequence_no)),
            })?;
        }
        Ok(session)
    }

    /// Attaches a log that later events are appended to.
    pub fn attach_log(&mut self, log: EventLog) {
        self.log = Some(log);
    }

    fn empty(session_id: &str, log: Option<EventLog>) -> Session {
        Session {
            id: session_id.to_owned(),
            phase: SessionPhase::BlindAssign,
            batch: Vec::new(),
            reserved: Vec::new(),
            assignments: BTreeMap::new(),
            ambiguities: AmbiguityReport::default(),
            events: Vec::new(),
            log,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn phase(&self) -> SessionPhase {
        self.phase
    }

    pub fn label_visibility(&self) -> bool {
        self.phase.labels_visible()
    }

    pub fn batch(&self) -> &[HeadlineId] {
        &self.batch
    }

    pub fn reserved(&self) -> &[HeadlineId] {
        &self.reserved
    }

    pub fn assignments(&self) -> &BTreeMap<HeadlineId, LacanCode> {
        &self.assignments
    }

    pub fn events(&self) -> &[AnnotationEvent] {
        &self.events
    }

    /// Current ambiguity cache; always empty before the reveal.
    pub fn ambiguities(&self) -> &AmbiguityReport {
        &self.ambiguities
    }

    pub fn state(&self, dataset: &Dataset) -> SessionState {
        let labels = self.label_visibility().then(|| {
            self.batch
                .iter()
                .filter_map(|&id| dataset.get(id).map(|r| (id, r.label())))
                .collect()
        });
        SessionState {
            session_id: self.id.clone(),
            phase: self.phase,
            headline_ids: self.batch.clone(),
            reserved_ids: self.reserved.clone(),
            assignments: self.assignments.clone(),
            label_visibility: self.label_visibility(),
            labels,
            ambiguities: self.ambiguities.clone(),
            next_sequence_no: self.events.len() as u64,
        }
    }

    /// First headline of the batch without a code.
    pub fn next_unassigned(&self, dataset: &Dataset) -> Option<NextHeadline> {
        let id = *self.batch.iter().find(|id| !self.assignments.contains_key(id))?;
        let record = dataset.get(id)?;
        Some(NextHeadline {
            id,
            text: record.headline.text().to_owned(),
            label: self.label_visibility().then(|| record.label()),
        })
    }

    pub fn submit_code(&mut self, id: HeadlineId, code: LacanCode, dataset: &Dataset) -> Result<(), SessionError> {
        let mut e = self.event(EventKind::Assign);
        e.headline_id = Some(id);
        e.code = Some(code);
        self.commit(e, dataset)
    }

    pub fn reveal(&mut self, dataset: &Dataset) -> Result<&AmbiguityReport, SessionError> {
        self.commit(self.event(EventKind::Revealed), dataset)?;
        Ok(&self.ambiguities)
    }

    pub fn reassign(
        &mut self,
        id: HeadlineId,
        code: LacanCode,
        justification: &str,
        dataset: &Dataset,
    ) -> Result<&AmbiguityReport, SessionError> {
        let mut e = self.event(EventKind::Reassign);
        e.headline_id = Some(id);
        e.code = Some(code);
        e.justification = Some(justification.to_owned());
        self.commit(e, dataset)?;
        Ok(&self.ambiguities)
    }

    /// Appends headlines to the batch. Ids may come from the reserved list
    /// or from anywhere else in the dataset.
    pub fn extend(&mut self, ids: &[HeadlineId], dataset: &Dataset) -> Result<(), SessionError> {
        let mut e = self.event(EventKind::Extended);
        e.headline_ids = Some(ids.to_vec());
        self.commit(e, dataset)
    }

    /// Extends by the next `count` reserved ids.
    pub fn extend_reserved(&mut self, count: usize, dataset: &Dataset) -> Result<(), SessionError> {
        let ids: Vec<HeadlineId> = self.reserved.iter().take(count).copied().collect();
        self.extend(&ids, dataset)
    }

    pub fn close(&mut self, dataset: &Dataset) -> Result<(), SessionError> {
        self.commit(self.event(EventKind::Closed), dataset)
    }

    /// Annotations, partition and derived classifier of the current state.
    pub fn export(&self, dataset: &Dataset) -> Result<Export, SessionError> {
        if !self.label_visibility() {
            return Err(SessionError::WrongPhase {
                phase: self.phase,
                operation: "export",
            });
        }
        if !self.ambiguities.is_empty() {
            return Err(SessionError::Ambiguous(self.ambiguities.clone()));
        }
        let annotations = self.annotations(dataset);
        let partition = build_partition(&annotations)?;
        let classifier = derive_classifier(&partition)?;
        Ok(Export {
            annotations,
            partition,
            classifier,
        })
    }

    /// Writes `events.jsonl`, `annotations.jsonl`, `partition.json` and
    /// `classifier.json` into `dir`.
    pub fn write_export(&self, dataset: &Dataset, dir: &Path) -> Result<Export, SessionError> {
        let export = self.export(dataset)?;
        fs::create_dir_all(dir)?;
        let mut events = Vec::new();
        for e in &self.events {
            events.extend(e.to_line()?);
        }
        fs::write(dir.join("events.jsonl"), events)?;
        let mut lines = String::new();
        for a in &export.annotations {
            lines.push_str(&serde_json::to_string(a)?);
            lines.push('\n');
        }
        fs::write(dir.join("annotations.jsonl"), lines)?;
        fs::write(dir.join("partition.json"), pretty(&export.partition)?)?;
        fs::write(dir.join("classifier.json"), pretty(&export.classifier)?)?;
        Ok(export)
    }

    fn annotations(&self, dataset: &Dataset) -> Vec<Annotation> {
        self.assignments
            .iter()
            .filter_map(|(&id, &code)| dataset.get(id).map(|r| Annotation::new(id, code, r.label())))
            .collect()
    }

    fn event(&self, kind: EventKind) -> AnnotationEvent {
        AnnotationEvent::new(&self.id, self.events.len() as u64, self.phase, kind)
    }

    fn commit(&mut self, e: AnnotationEvent, dataset: &Dataset) -> Result<(), SessionError> {
        self.check(&e, dataset)?;
        if let Some(log) = &mut self.log {
            log.append(&e)?;
        }
        self.apply(&e, dataset)?;
        self.events.push(e);
        Ok(())
    }

    fn expect_phase(&self, allowed: &[SessionPhase], operation: &'static str) -> Result<(), SessionError> {
        if allowed.contains(&self.phase) {
            Ok(())
        } else {
            Err(SessionError::WrongPhase {
                phase: self.phase,
                operation,
            })
        }
    }

    fn unassigned(&self) -> Vec<HeadlineId> {
        self.batch.iter().filter(|id| !self.assignments.contains_key(id)).copied().collect()
    }

    fn check(&self, e: &AnnotationEvent, dataset: &Dataset) -> Result<(), SessionError> {
        if e.sequence_no != self.events.len() as u64 {
            return Err(SessionError::CorruptLog(format!(
                "expected sequence_no {}, found {}",
                self.events.len(),
                e.sequence_no
            )));
        }
        if e.session_id != self.id || e.phase != self.phase {
            return Err(SessionError::CorruptLog(format!("event {} does not match session", e.sequence_no)));
        }
        let field = |name: &str| SessionError::CorruptLog(format!("event {} lacks {name}", e.sequence_no));
        use SessionPhase::*;
        match e.kind {
            EventKind::SessionCreated => {
                if !self.events.is_empty() {
                    return Err(SessionError::CorruptLog("session created twice".into()));
                }
                let ids = e.headline_ids.as_deref().ok_or_else(|| field("headline_ids"))?;
                let batch_size = e.batch_size.ok_or_else(|| field("batch_size"))?;
                if ids.is_empty() {
                    return Err(SessionError::EmptySession);
                }
                check_new_ids(ids, &HashSet::new(), dataset)?;
                if batch_size == 0 || batch_size > ids.len() {
                    return Err(SessionError::BadBatchSize {
                        batch_size,
                        available: ids.len(),
                    });
                }
            }
            EventKind::Assign => {
                self.expect_phase(&[BlindAssign, Extend], "assign")?;
                let id = e.headline_id.ok_or_else(|| field("headline_id"))?;
                e.code.ok_or_else(|| field("code"))?;
                if !self.batch.contains(&id) {
                    return Err(SessionError::UnknownHeadline(id));
                }
                if self.assignments.contains_key(&id) {
                    return Err(SessionError::AlreadyAssigned(id));
                }
            }
            EventKind::Reassign => {
                self.expect_phase(&[Resolve, Extend], "reassign")?;
                let id = e.headline_id.ok_or_else(|| field("headline_id"))?;
                e.code.ok_or_else(|| field("code"))?;
                if e.justification.as_deref().is_none_or(|j| j.trim().is_empty()) {
                    return Err(SessionError::EmptyJustification);
                }
                if !self.batch.contains(&id) {
                    return Err(SessionError::UnknownHeadline(id));
                }
                if !self.assignments.contains_key(&id) {
                    return Err(SessionError::NotAssigned(id));
                }
            }
            EventKind::Revealed => {
                self.expect_phase(&[BlindAssign], "reveal")?;
                let missing = self.unassigned();
                if !missing.is_empty() {
                    return Err(SessionError::IncompleteBatch(missing));
                }
            }
            EventKind::Extended => {
                self.expect_phase(&[Extend], "extend")?;
                let ids = e.headline_ids.as_deref().ok_or_else(|| field("headline_ids"))?;
                if ids.is_empty() {
                    return Err(SessionError::EmptySession);
                }
                check_new_ids(ids, &self.batch.iter().copied().collect(), dataset)?;
            }
            EventKind::Closed => {
                self.expect_phase(&[Extend], "close")?;
                let missing = self.unassigned();
                if !missing.is_empty() {
                    return Err(SessionError::IncompleteBatch(missing));
                }
            }
        }
        Ok(())
    }

    // Only called after `check` accepted the event.
    fn apply(&mut self, e: &AnnotationEvent, dataset: &Dataset) -> Result<(), SessionError> {
        match e.kind {
            EventKind::SessionCreated => {
                let ids = e.headline_ids.as_deref().unwrap_or_default();
                let n = e.batch_size.unwrap_or_default();
                self.batch = ids[..n].to_vec();
                self.reserved = ids[n..].to_vec();
            }
            EventKind::Assign | EventKind::Reassign => {
                if let (Some(id), Some(code)) = (e.headline_id, e.code) {
                    self.assignments.insert(id, code);
                }
                if self.label_visibility() {
                    self.refresh(dataset)?;
                }
            }
            EventKind::Revealed => {
                self.phase = SessionPhase::Reveal;
                self.refresh(dataset)?;
            }
            EventKind::Extended => {
                let ids = e.headline_ids.as_deref().unwrap_or_default();
                self.reserved.retain(|r| !ids.contains(r));
                self.batch.extend_from_slice(ids);
            }
            EventKind::Closed => self.phase = SessionPhase::Closed,
        }
        Ok(())
    }

    /// Recomputes the ambiguity cache and moves between Resolve and Extend.
    fn refresh(&mut self, dataset: &Dataset) -> Result<(), SessionError> {
        self.ambiguities = detect_ambiguities(&self.annotations(dataset))?;
        self.phase = if self.ambiguities.is_empty() {
            SessionPhase::Extend
        } else {
            SessionPhase::Resolve
        };
        Ok(())
    }
}

fn check_new_ids(ids: &[HeadlineId], taken: &HashSet<HeadlineId>, dataset: &Dataset) -> Result<(), SessionError> {
    let mut seen = HashSet::with_capacity(ids.len());
    for &id in ids {
        if dataset.get(id).is_none() {
            return Err(SessionError::UnknownHeadline(id));
        }
        if taken.contains(&id) || !seen.insert(id) {
            return Err(SessionError::DuplicateHeadline(id));
        }
    }
    Ok(())
}

fn pretty<T: Serialize>(value: &T) -> Result<String, SessionError> {
    // Round-trip through Value so object keys come out sorted.
    let mut text = serde_json::to_string_pretty(&serde_json::to_value(value)?)?;
    text.push('\n');
    Ok(text)
}
