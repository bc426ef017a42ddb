//! Verbal term sets for probabilities and for changes in probability.
//!
//! A [`TermSet`] is an ordered list of [`VerbalTerm`]s, each with the numeric
//! range over which the phrase was found to apply. Published ranges leave
//! small gaps between neighbours; lookups use *canonical* intervals instead,
//! which stretch each range to the midpoint of the gap on either side so that
//! every input maps to exactly one term.
//!
//! Three kinds exist. A probability set covers the unit interval. The two
//! change sets cover the halves of the relative-belief ratio
//! `r = post / (post + prior)` above and below one half (see [`change`]).

pub mod change;
mod defaults;
mod validate;

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::belief::Probability;

pub use change::{change_phrase, change_ratio, ChangeDescription, ChangeDirection, ChangeRatio};
pub use validate::{validate_term_set, Finding, ValidationReport};

/// Probability term sets larger than this exceed the short-term-memory bound.
pub const PROBABILITY_CAPACITY: usize = 11;
/// Per-direction bound for change term sets.
pub const CHANGE_CAPACITY: usize = 5;

/// File names looked up by [`Lexicons::load_dir`].
pub const PROBABILITY_FILE: &str = "probability.json";
pub const INCREASING_FILE: &str = "change_increasing.json";
pub const DECREASING_FILE: &str = "change_decreasing.json";

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("expected a {expected} term set, got {found}")]
    WrongKind { expected: TermSetKind, found: TermSetKind },
    #[error("cannot parse term set: {0}")]
    Parse(String),
    #[error("malformed term set:\n{0}")]
    Invalid(ValidationReport),
    #[error("relative belief undefined when prior and posterior are both zero")]
    BothZero,
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermSetKind {
    Probability,
    ChangeIncreasing,
    ChangeDecreasing,
}

impl TermSetKind {
    pub fn capacity(self) -> usize {
        match self {
            TermSetKind::Probability => PROBABILITY_CAPACITY,
            _ => CHANGE_CAPACITY,
        }
    }

    /// The part of `[0, 1]` the set must cover.
    pub(crate) fn domain(self) -> (f64, f64) {
        match self {
            TermSetKind::Probability => (0.0, 1.0),
            TermSetKind::ChangeIncreasing => (0.5, 1.0),
            TermSetKind::ChangeDecreasing => (0.0, 0.5),
        }
    }

    /// Increasing-change intervals are closed above, all others below.
    fn upper_closed(self) -> bool {
        matches!(self, TermSetKind::ChangeIncreasing)
    }
}

impl std::fmt::Display for TermSetKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TermSetKind::Probability => "probability",
            TermSetKind::ChangeIncreasing => "change_increasing",
            TermSetKind::ChangeDecreasing => "change_decreasing",
        })
    }
}

/// On-disk form of one term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermEntry {
    pub phrase: String,
    pub noun_form: String,
    pub low: f64,
    pub high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndpointTerm {
    pub phrase: String,
    pub noun_form: String,
}

/// Reserved phrases for exactly 0 and exactly 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndpointTerms {
    pub zero: EndpointTerm,
    pub one: EndpointTerm,
}

/// The JSON document a term set is loaded from and saved to.
///
/// `change_bins`, when present, lists the `n + 1` bin boundaries of a change
/// set explicitly; it must agree with the terms' own ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSetDocument {
    pub kind: TermSetKind,
    pub terms: Vec<TermEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoint_terms: Option<EndpointTerms>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub change_bins: Option<Vec<f64>>,
}

impl TermSetDocument {
    pub fn from_json(text: &str) -> Result<Self, LexiconError> {
        serde_json::from_str(text).map_err(|e| LexiconError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("term set serializes");
        out.push('\n');
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerbalTerm {
    /// Predicate form, e.g. "highly probable".
    pub phrase: String,
    /// Form used after "it is" or "there is", e.g. "a fair chance".
    pub noun_form: String,
    pub range_low: Probability,
    pub range_high: Probability,
    pub midpoint: Probability,
}

impl VerbalTerm {
    fn from_entry(e: &TermEntry) -> Result<Self, crate::belief::BeliefError> {
        let low = Probability::new(e.low)?;
        let high = Probability::new(e.high)?;
        Ok(VerbalTerm {
            phrase: e.phrase.clone(),
            noun_form: e.noun_form.clone(),
            range_low: low,
            range_high: high,
            midpoint: Probability::new((e.low + e.high) / 2.0)?,
        })
    }

    fn point(t: &EndpointTerm, at: Probability) -> Self {
        VerbalTerm {
            phrase: t.phrase.clone(),
            noun_form: t.noun_form.clone(),
            range_low: at,
            range_high: at,
            midpoint: at,
        }
    }
}

/// Snaps a computed boundary to a 1e-12 grid so that gap midpoints such as
/// (0.08 + 0.09) / 2 land on the nearest double to the decimal 0.085.
fn snap(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

/// A validated, immutable term set.
#[derive(Debug, Clone, PartialEq)]
pub struct TermSet {
    kind: TermSetKind,
    terms: Vec<VerbalTerm>,
    endpoints: Option<(VerbalTerm, VerbalTerm)>,
    /// Interior canonical boundaries, one fewer than `terms`.
    boundaries: Vec<f64>,
    document: TermSetDocument,
}

impl TermSet {
    /// Validates `document`; any error finding rejects it. Warnings do not.
    pub fn from_document(document: TermSetDocument) -> Result<Self, LexiconError> {
        let report = validate_term_set(&document);
        if !report.is_valid() {
            return Err(LexiconError::Invalid(report));
        }
        // Validation guarantees every range is a probability.
        let terms: Vec<VerbalTerm> = document
            .terms
            .iter()
            .map(|e| VerbalTerm::from_entry(e).expect("validated range"))
            .collect();
        let boundaries = document
            .terms
            .windows(2)
            .map(|w| snap((w[0].high + w[1].low) / 2.0))
            .collect();
        let endpoints = document.endpoint_terms.as_ref().map(|e| {
            (
                VerbalTerm::point(&e.zero, Probability::ZERO),
                VerbalTerm::point(&e.one, Probability::ONE),
            )
        });
        Ok(TermSet {
            kind: document.kind,
            terms,
            endpoints,
            boundaries,
            document,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, LexiconError> {
        TermSet::from_document(TermSetDocument::from_json(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.to_owned(),
            source,
        })?;
        TermSet::from_json(&text)
    }

    pub fn kind(&self) -> TermSetKind {
        self.kind
    }

    pub fn terms(&self) -> &[VerbalTerm] {
        &self.terms
    }

    pub fn endpoint_terms(&self) -> Option<(&VerbalTerm, &VerbalTerm)> {
        self.endpoints.as_ref().map(|(z, o)| (z, o))
    }

    pub fn canonical_boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    /// The canonical interval `(low, high)` of term `index`.
    pub fn canonical_interval(&self, index: usize) -> (f64, f64) {
        let (lo, hi) = self.kind.domain();
        let low = if index == 0 { lo } else { self.boundaries[index - 1] };
        let high = self.boundaries.get(index).copied().unwrap_or(hi);
        (low, high)
    }

    pub fn document(&self) -> &TermSetDocument {
        &self.document
    }

    pub fn to_json(&self) -> String {
        self.document.to_json()
    }

    pub fn validate(&self) -> ValidationReport {
        validate_term_set(&self.document)
    }

    /// Index of the term whose canonical interval holds `x`, ignoring
    /// endpoint terms and domain limits.
    pub(crate) fn bin(&self, x: f64) -> usize {
        if self.kind.upper_closed() {
            self.boundaries.iter().filter(|&&b| b < x).count()
        } else {
            self.boundaries.iter().filter(|&&b| b <= x).count()
        }
    }

    /// The term for probability `p`.
    pub fn probability_term(&self, p: Probability) -> Result<&VerbalTerm, LexiconError> {
        if self.kind != TermSetKind::Probability {
            return Err(LexiconError::WrongKind {
                expected: TermSetKind::Probability,
                found: self.kind,
            });
        }
        if let Some((zero, one)) = &self.endpoints {
            if p.value() == 0.0 {
                return Ok(zero);
            }
            if p.value() == 1.0 {
                return Ok(one);
            }
        }
        Ok(&self.terms[self.bin(p.value())])
    }

    pub fn default_probability() -> TermSet {
        TermSet::from_document(defaults::probability()).expect("built-in probability set is valid")
    }

    pub fn default_increasing() -> TermSet {
        TermSet::from_document(defaults::increasing()).expect("built-in increasing set is valid")
    }

    pub fn default_decreasing() -> TermSet {
        TermSet::from_document(defaults::decreasing()).expect("built-in decreasing set is valid")
    }
}

/// Parses and validates a term set document.
pub fn load_term_set(document: &str) -> Result<TermSet, LexiconError> {
    TermSet::from_json(document)
}

/// Maps `p` to its verbal term.
pub fn probability_phrase(p: Probability, ts: &TermSet) -> Result<&VerbalTerm, LexiconError> {
    ts.probability_term(p)
}

/// The three term sets an explanation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicons {
    pub probability: TermSet,
    pub increasing: TermSet,
    pub decreasing: TermSet,
}

impl Lexicons {
    pub fn new(probability: TermSet, increasing: TermSet, decreasing: TermSet) -> Result<Self, LexiconError> {
        for (ts, expected) in [
            (&probability, TermSetKind::Probability),
            (&increasing, TermSetKind::ChangeIncreasing),
            (&decreasing, TermSetKind::ChangeDecreasing),
        ] {
            if ts.kind() != expected {
                return Err(LexiconError::WrongKind {
                    expected,
                    found: ts.kind(),
                });
            }
        }
        Ok(Lexicons {
            probability,
            increasing,
            decreasing,
        })
    }

    pub fn builtin() -> &'static Lexicons {
        static BUILTIN: OnceLock<Lexicons> = OnceLock::new();
        BUILTIN.get_or_init(|| Lexicons {
            probability: TermSet::default_probability(),
            increasing: TermSet::default_increasing(),
            decreasing: TermSet::default_decreasing(),
        })
    }

    /// Loads `probability.json`, `change_increasing.json` and
    /// `change_decreasing.json` from `dir`. All three must exist.
    pub fn load_dir(dir: &Path) -> Result<Self, LexiconError> {
        Lexicons::new(
            TermSet::load(&dir.join(PROBABILITY_FILE))?,
            TermSet::load(&dir.join(INCREASING_FILE))?,
            TermSet::load(&dir.join(DECREASING_FILE))?,
        )
    }

    pub fn probability_term(&self, p: Probability) -> &VerbalTerm {
        self.probability
            .probability_term(p)
            .expect("kind checked at construction")
    }

    pub fn change(&self, prior: Probability, post: Probability) -> Result<ChangeDescription, LexiconError> {
        change_phrase(prior, post, &self.increasing, &self.decreasing)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64) -> Probability {
        Probability::new(x).unwrap()
    }

    fn phrase(x: f64) -> String {
        probability_phrase(p(x), &TermSet::default_probability())
            .unwrap()
            .phrase
            .clone()
    }

    #[test]
    fn table_lookups() {
        assert_eq!(phrase(0.85), "highly probable");
        assert_eq!(phrase(0.50), "fair chance");
        assert_eq!(phrase(0.005), "highly improbable");
        assert_eq!(phrase(1.0), "certain");
        assert_eq!(phrase(0.0), "impossible");
        assert_eq!(phrase(0.41), "not quite even chance");
    }

    #[test]
    fn canonical_boundaries_of_default_set() {
        let ts = TermSet::default_probability();
        assert_eq!(
            ts.canonical_boundaries(),
            &[0.085, 0.185, 0.275, 0.365, 0.455, 0.545, 0.635, 0.725, 0.815, 0.905]
        );
        // Lower-closed ownership.
        assert_eq!(phrase(0.085), "improbable");
        assert_eq!(phrase(0.0849999), "highly improbable");
        assert_eq!(phrase(0.905), "almost certain");
        assert_eq!(phrase(0.999999), "almost certain");
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let err = TermSet::default_increasing().probability_term(p(0.3)).unwrap_err();
        assert!(matches!(err, LexiconError::WrongKind { .. }));
        let err = Lexicons::new(
            TermSet::default_increasing(),
            TermSet::default_increasing(),
            TermSet::default_decreasing(),
        )
        .unwrap_err();
        assert!(matches!(err, LexiconError::WrongKind { .. }));
    }

    #[test]
    fn defaults_match_reference_files() {
        assert_eq!(
            TermSet::default_probability().to_json(),
            include_str!("../../data/lexicon/probability.json")
        );
        assert_eq!(
            TermSet::default_increasing().to_json(),
            include_str!("../../data/lexicon/change_increasing.json")
        );
        assert_eq!(
            TermSet::default_decreasing().to_json(),
            include_str!("../../data/lexicon/change_decreasing.json")
        );
    }

    #[test]
    fn default_set_has_eleven_terms() {
        let ts = load_term_set(include_str!("../../data/lexicon/probability.json")).unwrap();
        assert_eq!(ts.terms().len(), 11);
        assert_eq!(ts, TermSet::default_probability());
    }

    #[test]
    fn overlapping_document_is_rejected() {
        let mut doc = defaults::probability();
        doc.terms[3].high = 0.40;
        let err = TermSet::from_document(doc).unwrap_err();
        match err {
            LexiconError::Invalid(report) => {
                assert!(report.errors.iter().any(|f| matches!(f, Finding::Overlap { .. })))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_and_garbage_are_parse_errors() {
        assert!(matches!(load_term_set("{"), Err(LexiconError::Parse(_))));
        let doc = r#"{"kind":"probability","terms":[],"colour":"red"}"#;
        assert!(matches!(load_term_set(doc), Err(LexiconError::Parse(_))));
    }

    #[test]
    fn lexicons_load_from_directory() {
        let dir = tempfile::tempdir().unwrap();
        let lex = Lexicons::builtin();
        std::fs::write(dir.path().join(PROBABILITY_FILE), lex.probability.to_json()).unwrap();
        std::fs::write(dir.path().join(INCREASING_FILE), lex.increasing.to_json()).unwrap();
        assert!(matches!(Lexicons::load_dir(dir.path()), Err(LexiconError::Io { .. })));
        std::fs::write(dir.path().join(DECREASING_FILE), lex.decreasing.to_json()).unwrap();
        assert_eq!(&Lexicons::load_dir(dir.path()).unwrap(), lex);
    }
}
