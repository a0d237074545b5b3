use std::path::PathBuf;

use thiserror::Error;

use crate::lacan::AmbiguityReport;
use crate::model::{HeadlineId, Label, Trait};

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("malformed code {0:?}: expected 4 characters of '0'/'1' in M,A,U,H order")]
    MalformedCode(String),
    #[error("code index {0} is outside 0..=15")]
    CodeIndexOutOfRange(u8),
    #[error("label must be 0 or 1, got {0:?}")]
    BadLabel(String),
    #[error("headline {0} has blank text")]
    EmptyHeadline(HeadlineId),
    #[error("{0} value {1} is outside [0, 1]")]
    TraitOutOfRange(Trait, f64),
    #[error("unknown trait {0:?}")]
    UnknownTrait(String),
    #[error("duplicate headline id {0}")]
    DuplicateId(HeadlineId),
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("input file {0} does not exist")]
    MissingFile(PathBuf),
    #[error("required column {0:?} is missing from the header")]
    MissingColumn(String),
    #[error("row {row}: bad label value {value:?}")]
    BadLabelValue { row: u64, value: String },
    #[error("row {row}: bad {column} value {value:?}")]
    BadTraitValue {
        row: u64,
        column: String,
        value: String,
    },
    #[error("row {row}: bad id value {value:?}")]
    BadIdValue { row: u64, value: String },
    #[error("row {row}: {source}")]
    Record { row: u64, source: ModelError },
    #[error("cannot split an empty dataset")]
    EmptyDataset,
    #[error("test fraction must lie strictly between 0 and 1, got {0}")]
    BadFraction(String),
    #[error("split manifest does not match the dataset: {0}")]
    ManifestMismatch(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error, PartialEq)]
pub enum LacanError {
    #[error("variable {0} appears twice in one product term")]
    RepeatedVariable(char),
    #[error("malformed literal {0:?}")]
    MalformedLiteral(String),
    #[error("code {0} satisfies both expressions")]
    InconsistentClassifier(crate::model::LacanCode),
    #[error("headline {0} is annotated more than once")]
    DuplicateAnnotation(HeadlineId),
    #[error("annotations are ambiguous on {} code(s)", .0.entries.len())]
    AmbiguousPartition(AmbiguityReport),
    #[error("ON-set and don't-care set overlap on {0}")]
    OverlappingSets(crate::model::LacanCode),
    #[error("cannot minimize an empty ON-set")]
    EmptyOnSet,
    #[error("no code is assigned to label {0}")]
    EmptyClass(Label),
    #[error("malformed partition table: {0}")]
    MalformedTable(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum TraitError {
    #[error("cannot evaluate an empty sample")]
    EmptySample,
    #[error("evaluation point {0} is outside [0, 1]")]
    PointOutOfRange(f64),
    #[error("sample value {0} is not a probability")]
    BadSample(f64),
    #[error("headline {0} carries no trait scores")]
    MissingTraits(HeadlineId),
    #[error("dataset contains only {0} headlines")]
    SingleClassDataset(Label),
    #[error("posterior is undefined: both conditional CDFs are zero")]
    UndefinedPosterior,
    #[error("negative CDF value")]
    NegativeCdf,
    #[error("threshold must lie strictly between 0 and 1, got {0}")]
    BadThreshold(f64),
    #[error("global count rule needs k in 1..=3, got {0}")]
    BadCount(u8),
    #[error("unknown rule {0:?}")]
    UnknownRule(String),
    #[error("grid must be ascending probabilities")]
    BadGrid,
}
