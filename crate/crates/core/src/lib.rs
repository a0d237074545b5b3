//! Headline reliability toolkit: dataset preparation, Boolean classifiers over
//! Lacanian discourse codes, and threshold rules over personality-trait scores.

pub mod error;
pub mod ingest;
pub mod lacan;
pub mod model;
pub mod traits;

pub use error::{IngestError, LacanError, ModelError, TraitError};
pub use model::{Dataset, Headline, HeadlineId, Label, LacanCode, Record, Trait, TraitVector};
