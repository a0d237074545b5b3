//! Expert annotation workflow: blind code assignment, reveal, justified
//! re-assignment and extension, persisted as one JSON-Lines event log per
//! session and exposed over HTTP.

pub mod error;
pub mod event;
pub mod http;
pub mod session;
pub mod store;

pub use error::SessionError;
pub use event::{read_events, AnnotationEvent, EventKind, EventLog, SessionPhase};
pub use http::router;
pub use session::{Export, NextHeadline, Session, SessionState};
pub use store::SessionStore;
