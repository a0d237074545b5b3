use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, PoisonError, RwLock};

use discourse_core::{Dataset, HeadlineId};

use crate::error::SessionError;
use crate::event::{read_events, EventLog};
use crate::session::{Export, Session, SessionState};

/// All sessions served by one process. Mutations of a session hold its
/// write lock for the whole validate/append/apply step; reads share it.
#[derive(Debug)]
pub struct SessionStore {
    dataset: Arc<Dataset>,
    data_dir: Option<PathBuf>,
    sessions: RwLock<BTreeMap<String, Arc<RwLock<Session>>>>,
}

impl SessionStore {
    pub fn in_memory(dataset: Arc<Dataset>) -> Self {
        SessionStore {
            dataset,
            data_dir: None,
            sessions: RwLock::default(),
        }
    }

    /// Uses `dir/sessions/*.jsonl` as the event store, replaying every
    /// existing log. Exports go to `dir/exports/<session>/`.
    pub fn open(dataset: Arc<Dataset>, dir: &Path) -> Result<Self, SessionError> {
        let log_dir = dir.join("sessions");
        fs::create_dir_all(&log_dir)?;
        let mut sessions = BTreeMap::new();
        let mut paths: Vec<PathBuf> = fs::read_dir(&log_dir)?
            .map(|entry| entry.map(|e| e.path()))
            .collect::<Result<_, _>>()?;
        paths.retain(|p| p.extension().is_some_and(|x| x == "jsonl"));
        paths.sort();
        for path in paths {
            let events = read_events(&path)?;
            let mut session = Session::replay(&events, &dataset)?;
            session.attach_log(EventLog::open(&path)?);
            sessions.insert(session.id().to_owned(), Arc::new(RwLock::new(session)));
        }
        Ok(SessionStore {
            dataset,
            data_dir: Some(dir.to_owned()),
            sessions: RwLock::new(sessions),
        })
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn session_ids(&self) -> Vec<String> {
        self.sessions.read().unwrap_or_else(PoisonError::into_inner).keys().cloned().collect()
    }

    pub fn create(&self, headline_ids: &[HeadlineId], batch_size: usize) -> Result<SessionState, SessionError> {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let log = match &self.data_dir {
            Some(dir) => Some(EventLog::create(dir.join("sessions").join(format!("{id}.jsonl")))?),
            None => None,
        };
        let log_path = log.as_ref().map(|l| l.path().to_owned());
        let session = Session::create(&id, headline_ids, batch_size, &self.dataset, log).inspect_err(|_| {
            if let Some(p) = &log_path {
                let _ = fs::remove_file(p);
            }
        })?;
        let state = session.state(&self.dataset);
        self.sessions
            .write()
            .unwrap_or_else(PoisonError::into_inner)
            .insert(id, Arc::new(RwLock::new(session)));
        Ok(state)
    }

    fn entry(&self, id: &str) -> Result<Arc<RwLock<Session>>, SessionError> {
        self.sessions
            .read()
            .unwrap_or_else(PoisonError::into_inner)
            .get(id)
            .cloned()
            .ok_or_else(|| SessionError::UnknownSession(id.to_owned()))
    }

    pub fn read<T>(&self, id: &str, f: impl FnOnce(&Session, &Dataset) -> T) -> Result<T, SessionError> {
        let entry = self.entry(id)?;
        let session = entry.read().unwrap_or_else(PoisonError::into_inner);
        Ok(f(&session, &self.dataset))
    }

    pub fn write<T>(
        &self,
        id: &str,
        f: impl FnOnce(&mut Session, &Dataset) -> Result<T, SessionError>,
    ) -> Result<T, SessionError> {
        let entry = self.entry(id)?;
        let mut session = entry.write().unwrap_or_else(PoisonError::into_inner);
        f(&mut session, &self.dataset)
    }

    /// Derives the export; with a data directory the files are written too.
    pub fn export(&self, id: &str) -> Result<Export, SessionError> {
        let entry = self.entry(id)?;
        let session = entry.read().unwrap_or_else(PoisonError::into_inner);
        match &self.data_dir {
            Some(dir) => session.write_export(&self.dataset, &dir.join("exports").join(id)),
            None => session.export(&self.dataset),
        }
    }
}
