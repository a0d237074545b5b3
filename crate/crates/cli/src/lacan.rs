use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, ValueEnum};
use discourse_core::lacan::{
    build_partition, builtin_classifier, classify_code, derive_classifier_with, detect_ambiguities,
    verify_complementarity, AmbiguityReport, Annotation, BoolExpr, Classifier, ComplementarityReport, DontCarePolicy,
    PartitionTable, Verdict,
};
use discourse_core::{Label, LacanCode};
use serde::Serialize;

use crate::args::Common;
use crate::output::{to_json, OutDir};
use crate::VerificationFailure;

pub const PARTITION_FILE: &str = "partition.json";
pub const CLASSIFIER_FILE: &str = "classifier.json";
pub const VERIFICATION_FILE: &str = "verification.json";
pub const TABLE_FILE: &str = "classification.csv";
pub const HOLDOUT_FILE: &str = "holdout.json";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum DontCare {
    /// Unobserved codes are free during minimization
    #[default]
    Free,
    /// Unobserved codes are OFF for both expressions
    Off,
}

impl From<DontCare> for DontCarePolicy {
    fn from(d: DontCare) -> Self {
        match d {
            DontCare::Free => DontCarePolicy::Free,
            DontCare::Off => DontCarePolicy::Off,
        }
    }
}

#[derive(Args, Clone, Debug)]
pub struct LacanArgs {
    #[command(flatten)]
    pub common: Common,
    /// Annotation file: JSON lines (or a JSON array) of {headline_id, code, label}
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long, value_enum, default_value_t = DontCare::Free)]
    pub dont_care: DontCare,
    /// Derive from the first N annotations and score the rest as held out
    #[arg(long)]
    pub train_count: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExprSummary {
    pub expr0: String,
    pub expr1: String,
    pub literal_cost: [usize; 2],
    pub term_count: [usize; 2],
    pub complementarity: ComplementarityReport,
}

impl ExprSummary {
    fn new(c: &Classifier) -> Self {
        ExprSummary {
            expr0: c.expr0.to_string(),
            expr1: c.expr1.to_string(),
            literal_cost: [c.expr0.literal_cost(), c.expr1.literal_cost()],
            term_count: [c.expr0.term_count(), c.expr1.term_count()],
            complementarity: verify_complementarity(&c.expr0, &c.expr1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verification {
    pub annotations: usize,
    pub dont_care: String,
    pub derived: ExprSummary,
    /// Defined codes the derived pair gets wrong; empty on success.
    pub derived_mismatches: Vec<LacanCode>,
    pub reference: ExprSummary,
    /// Defined codes where the reference pair disagrees with the partition.
    pub reference_mismatches: Vec<LacanCode>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Agreement {
    pub held_out: usize,
    pub correct: usize,
    pub wrong: usize,
    pub abstained: usize,
    /// `correct / held_out`; null when nothing was held out.
    pub accuracy: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Holdout {
    pub train: usize,
    pub derived: Agreement,
    pub reference: Agreement,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LacanOutcome {
    pub partition: PartitionTable,
    pub classifier: Classifier,
    pub verification: Verification,
    pub holdout: Option<Holdout>,
}

pub fn read_annotations(path: &Path) -> anyhow::Result<Vec<Annotation>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()));
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| serde_json::from_str(l).with_context(|| format!("{}:{}", path.display(), n + 1)))
        .collect()
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Real => "0",
        Verdict::Fake => "1",
        Verdict::Abstain => "abstain",
    }
}

fn mismatches(partition: &PartitionTable, c: &Classifier) -> anyhow::Result<Vec<LacanCode>> {
    let mut out = Vec::new();
    for (code, label) in partition.defined() {
        if classify_code(code, c)? != Verdict::from(label) {
            out.push(code);
        }
    }
    Ok(out)
}

fn agreement(annotations: &[Annotation], c: &Classifier) -> anyhow::Result<Agreement> {
    let mut a = Agreement {
        held_out: annotations.len(),
        ..Agreement::default()
    };
    for ann in annotations {
        match classify_code(ann.code, c)? {
            Verdict::Abstain => a.abstained += 1,
            v if v == Verdict::from(ann.label) => a.correct += 1,
            _ => a.wrong += 1,
        }
    }
    a.accuracy = (a.held_out > 0).then(|| a.correct as f64 / a.held_out as f64);
    Ok(a)
}

fn ambiguity_message(report: &AmbiguityReport) -> anyhow::Result<String> {
    Ok(format!("annotations are ambiguous; no partition exists\n{}", to_json(report)?))
}

/// Builds the partition, derives and verifies the classifier and writes
/// `partition.json`, `classifier.json`, `verification.json`,
/// `classification.csv` and, with `--train-count`, `holdout.json`.
pub fn run(args: &LacanArgs) -> anyhow::Result<LacanOutcome> {
    let c = &args.common;
    let all = read_annotations(&args.annotations)?;
    let (train, held) = match args.train_count {
        Some(n) => all.split_at(n.min(all.len())),
        None => (all.as_slice(), &[][..]),
    };
    let mut files = vec![PARTITION_FILE, CLASSIFIER_FILE, VERIFICATION_FILE, TABLE_FILE];
    if args.train_count.is_some() {
        files.push(HOLDOUT_FILE);
    }
    let out = OutDir::claim(&c.out, c.force, &files)?;

    let report = detect_ambiguities(train)?;
    if !report.is_empty() {
        return Err(VerificationFailure(ambiguity_message(&report)?).into());
    }
    let partition = build_partition(train)?;
    let classifier = derive_classifier_with(&partition, args.dont_care.into())?;
    let reference = builtin_classifier();
    let verification = Verification {
        annotations: train.len(),
        dont_care: format!("{:?}", args.dont_care).to_lowercase(),
        derived: ExprSummary::new(&classifier),
        derived_mismatches: mismatches(&partition, &classifier)?,
        reference: ExprSummary::new(&reference),
        reference_mismatches: mismatches(&partition, &reference)?,
    };
    let holdout = match args.train_count {
        Some(_) => Some(Holdout {
            train: train.len(),
            derived: agreement(held, &classifier)?,
            reference: agreement(held, &reference)?,
        }),
        None => None,
    };

    let mut table = String::from("code,index,M,A,U,H,partition,derived,reference\n");
    for code in LacanCode::all() {
        let observed = partition.get(code).map_or(String::new(), |l: Label| l.code().to_string());
        writeln!(
            table,
            "{code},{},{},{},{},{},{observed},{},{}",
            code.index(),
            u8::from(code.m()),
            u8::from(code.a()),
            u8::from(code.u()),
            u8::from(code.h()),
            verdict_name(classify_code(code, &classifier)?),
            verdict_name(classify_code(code, &reference)?),
        )?;
    }

    out.json(PARTITION_FILE, &partition)?;
    out.json(
        CLASSIFIER_FILE,
        &serde_json::json!({
            "expr0": classifier.expr0,
            "expr1": classifier.expr1,
            "expr0_text": classifier.expr0.to_string(),
            "expr1_text": classifier.expr1.to_string(),
        }),
    )?;
    out.json(VERIFICATION_FILE, &verification)?;
    out.text(TABLE_FILE, &table)?;
    if let Some(h) = &holdout {
        out.json(HOLDOUT_FILE, h)?;
    }

    if !verification.derived.complementarity.exclusive || !verification.derived_mismatches.is_empty() {
        return Err(VerificationFailure(format!(
            "derived classifier failed verification: exclusive={}, mismatches={:?}",
            verification.derived.complementarity.exclusive, verification.derived_mismatches
        ))
        .into());
    }
    Ok(LacanOutcome {
        partition,
        classifier,
        verification,
        holdout,
    })
}

/// Parses a classifier file written by this command.
pub fn read_classifier(path: &Path) -> anyhow::Result<Classifier> {
    #[derive(serde::Deserialize)]
    struct Stored {
        expr0: BoolExpr,
        expr1: BoolExpr,
    }
    let s: Stored = serde_json::from_slice(&fs::read(path)?)?;
    Ok(Classifier {
        expr0: s.expr0,
        expr1: s.expr1,
    })
}
