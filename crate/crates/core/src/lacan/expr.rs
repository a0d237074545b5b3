use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::LacanError;
use crate::model::{Discourse, Label, LacanCode};

/// A possibly negated discourse variable. Orders by variable (M < A < U < H),
/// then positive before negated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: Discourse,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: Discourse) -> Self {
        Literal { var, negated: false }
    }

    pub fn neg(var: Discourse) -> Self {
        Literal { var, negated: true }
    }

    pub fn holds(self, code: LacanCode) -> bool {
        code.has(self.var) != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("!")?;
        }
        write!(f, "{}", self.var.letter())
    }
}

impl FromStr for Literal {
    type Err = LacanError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LacanError::MalformedLiteral(s.to_owned());
        let (negated, rest) = match s.strip_prefix('!').or_else(|| s.strip_prefix('¬')) {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let mut chars = rest.chars();
        let var = chars.next().and_then(Discourse::from_letter).ok_or_else(bad)?;
        if chars.next().is_some() {
            return Err(bad());
        }
        Ok(Literal { var, negated })
    }
}

/// A product of literals, stored as a cube over the code bits: `care` marks
/// the variables present, `value` their required polarity. The empty product
/// is the constant 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    care: u8,
    value: u8,
}

impl Term {
    pub const ONE: Term = Term { care: 0, value: 0 };

    pub fn new(literals: impl IntoIterator<Item = Literal>) -> Result<Self, LacanError> {
        let mut term = Term::ONE;
        for lit in literals {
            let bit = 1 << lit.var.bit();
            if term.care & bit != 0 {
                return Err(LacanError::RepeatedVariable(lit.var.letter()));
            }
            term.care |= bit;
            if !lit.negated {
                term.value |= bit;
            }
        }
        Ok(term)
    }

    /// The full 4-literal product true only on `code`.
    pub fn minterm(code: LacanCode) -> Self {
        Term {
            care: 0b1111,
            value: code.index(),
        }
    }

    pub(crate) fn from_cube(care: u8, value: u8) -> Self {
        debug_assert_eq!(value & !care, 0);
        Term { care, value }
    }

    pub fn covers(self, code: LacanCode) -> bool {
        code.index() & self.care == self.value
    }

    pub fn literals(self) -> Vec<Literal> {
        Discourse::ALL
            .into_iter()
            .filter(|d| self.care >> d.bit() & 1 == 1)
            .map(|d| Literal {
                var: d,
                negated: self.value >> d.bit() & 1 == 0,
            })
            .collect()
    }

    pub fn len(self) -> usize {
        self.care.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.care == 0
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.literals().cmp(&other.literals())
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("1");
        }
        for (i, lit) in self.literals().into_iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{lit}")?;
        }
        Ok(())
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.literals().iter().map(ToString::to_string))
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(deserializer)?;
        let literals = raw
            .iter()
            .map(|s| s.parse::<Literal>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        Term::new(literals).map_err(serde::de::Error::custom)
    }
}

/// Sum of products over the discourse variables. No terms is the constant 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoolExpr {
    terms: BTreeSet<Term>,
}

impl BoolExpr {
    pub fn zero() -> Self {
        BoolExpr::default()
    }

    pub fn one() -> Self {
        BoolExpr::from_terms([Term::ONE])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = Term>) -> Self {
        BoolExpr {
            terms: terms.into_iter().collect(),
        }
    }

    pub fn terms(&self) -> impl ExactSizeIterator<Item = Term> + '_ {
        self.terms.iter().copied()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn literal_cost(&self) -> usize {
        self.terms.iter().map(|t| t.len()).sum()
    }

    pub fn eval(&self, code: LacanCode) -> bool {
        self.terms.iter().any(|t| t.covers(code))
    }

    /// Codes on which the expression is 1.
    pub fn on_codes(&self) -> BTreeSet<LacanCode> {
        LacanCode::all().filter(|&c| self.eval(c)).collect()
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl FromStr for BoolExpr {
    type Err = LacanError;

    /// Parses `A.!U + M.!U + A.U.!H`; `0` and `1` are the constants.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "0" => return Ok(BoolExpr::zero()),
            "1" => return Ok(BoolExpr::one()),
            _ => {}
        }
        s.split('+')
            .map(|term| {
                let literals = term
                    .split(['.', '·', '*'])
                    .map(str::trim)
                    .map(Literal::from_str)
                    .collect::<Result<Vec<_>, _>>()?;
                Term::new(literals)
            })
            .collect::<Result<BTreeSet<_>, _>>()
            .map(|terms| BoolExpr { terms })
    }
}

/// Evaluates `expr` on `code`.
pub fn eval_expr(expr: &BoolExpr, code: LacanCode) -> bool {
    expr.eval(code)
}

/// A pair of expressions: `expr0` selects Real, `expr1` selects Fake.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classifier {
    pub expr0: BoolExpr,
    pub expr1: BoolExpr,
}

impl Classifier {
    pub fn expr(&self, label: Label) -> &BoolExpr {
        match label {
            Label::Real => &self.expr0,
            Label::Fake => &self.expr1,
        }
    }
}

/// The reference pair: `A.!U + M.!U + A.U.!H` for Real and
/// `!A.U + !M.!A.H + U.H` for Fake.
pub fn builtin_classifier() -> Classifier {
    use Discourse::*;
    let t = |lits: &[Literal]| Term::new(lits.iter().copied()).expect("distinct variables");
    let (p, n) = (Literal::pos, Literal::neg);
    Classifier {
        expr0: BoolExpr::from_terms([
            t(&[p(Analyst), n(University)]),
            t(&[p(Master), n(University)]),
            t(&[p(Analyst), p(University), n(Hysteric)]),
        ]),
        expr1: BoolExpr::from_terms([
            t(&[n(Analyst), p(University)]),
            t(&[n(Master), n(Analyst), p(Hysteric)]),
            t(&[p(University), p(Hysteric)]),
        ]),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Real,
    Fake,
    Abstain,
}

impl From<Label> for Verdict {
    fn from(label: Label) -> Self {
        match label {
            Label::Real => Verdict::Real,
            Label::Fake => Verdict::Fake,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Real => "Real",
            Verdict::Fake => "Fake",
            Verdict::Abstain => "Abstain",
        })
    }
}

pub fn classify_code(code: LacanCode, classifier: &Classifier) -> Result<Verdict, LacanError> {
    match (classifier.expr0.eval(code), classifier.expr1.eval(code)) {
        (true, true) => Err(LacanError::InconsistentClassifier(code)),
        (true, false) => Ok(Verdict::Real),
        (false, true) => Ok(Verdict::Fake),
        (false, false) => Ok(Verdict::Abstain),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplementarityReport {
    pub exclusive: bool,
    pub abstain_codes: Vec<LacanCode>,
    pub conflict_codes: Vec<LacanCode>,
}

/// Evaluates both expressions on all 16 codes.
pub fn verify_complementarity(expr0: &BoolExpr, expr1: &BoolExpr) -> ComplementarityReport {
    let mut abstain_codes = Vec::new();
    let mut conflict_codes = Vec::new();
    for code in LacanCode::all() {
        match (expr0.eval(code), expr1.eval(code)) {
            (true, true) => conflict_codes.push(code),
            (false, false) => abstain_codes.push(code),
            _ => {}
        }
    }
    ComplementarityReport {
        exclusive: conflict_codes.is_empty(),
        abstain_codes,
        conflict_codes,
    }
}
