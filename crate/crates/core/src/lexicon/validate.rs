use std::fmt;

use serde::Serialize;

use super::{TermSetDocument, TermSetKind};

/// Widest gap between adjacent ranges (or between a range and the edge of
/// its domain) that canonical extension may bridge.
pub const MAX_BRIDGED_GAP: f64 = 0.05;

/// Relative deviation of a midpoint step from the mean step that triggers a
/// spacing warning.
pub const SPACING_TOLERANCE: f64 = 0.10;

// Slack for comparisons of decimal boundaries parsed from text.
const EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "finding", rename_all = "snake_case")]
pub enum Finding {
    Empty,
    EmptyPhrase { index: usize },
    BadRange { index: usize, low: f64, high: f64 },
    OutsideDomain { index: usize, low: f64, high: f64 },
    NonMonotoneMidpoints { index: usize },
    Overlap { first: usize, second: usize },
    CoverageGap { from: f64, to: f64 },
    MisplacedField { field: &'static str },
    ChangeBinsMismatch,
    UnequalSpacing { max_relative_deviation: f64 },
    CapacityExceeded { count: usize, limit: usize },
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finding::Empty => write!(f, "term set is empty and covers nothing"),
            Finding::EmptyPhrase { index } => write!(f, "term {index} has an empty phrase or noun form"),
            Finding::BadRange { index, low, high } => {
                write!(f, "term {index} has invalid range {low} - {high}")
            }
            Finding::OutsideDomain { index, low, high } => {
                write!(f, "term {index} range {low} - {high} lies outside the set's domain")
            }
            Finding::NonMonotoneMidpoints { index } => {
                write!(f, "midpoint of term {index} does not exceed that of term {}", index - 1)
            }
            Finding::Overlap { first, second } => write!(f, "terms {first} and {second} overlap"),
            Finding::CoverageGap { from, to } => {
                write!(
                    f,
                    "gap {from} - {to} is wider than {MAX_BRIDGED_GAP} and stays uncovered"
                )
            }
            Finding::MisplacedField { field } => write!(f, "field `{field}` is not allowed for this kind"),
            Finding::ChangeBinsMismatch => write!(f, "change_bins disagree with the term ranges"),
            Finding::UnequalSpacing { max_relative_deviation } => write!(
                f,
                "midpoints are unequally spaced (max relative deviation {:.1}%)",
                max_relative_deviation * 100.0
            ),
            Finding::CapacityExceeded { count, limit } => {
                write!(f, "{count} terms exceed the capacity bound of {limit}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub kind: TermSetKind,
    pub term_count: usize,
    pub errors: Vec<Finding>,
    pub warnings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} term set, {} terms: {} error(s), {} warning(s)",
            self.kind,
            self.term_count,
            self.errors.len(),
            self.warnings.len()
        )?;
        for e in &self.errors {
            writeln!(f, "  error: {e}")?;
        }
        for w in &self.warnings {
            writeln!(f, "  warning: {w}")?;
        }
        Ok(())
    }
}

/// Checks a term set document. Never fails; findings carry the verdict.
///
/// Errors: empty set, bad ranges, non-increasing midpoints, overlaps,
/// uncovered gaps, fields that do not belong to the kind. Warnings: more
/// terms than the capacity bound and, for probability sets, midpoints whose
/// spacing strays from equal.
pub fn validate_term_set(doc: &TermSetDocument) -> ValidationReport {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    let terms = &doc.terms;
    let (dom_lo, dom_hi) = doc.kind.domain();

    if terms.is_empty() {
        errors.push(Finding::Empty);
    }

    let mut ranges_ok = true;
    for (index, t) in terms.iter().enumerate() {
        if t.phrase.trim().is_empty() || t.noun_form.trim().is_empty() {
            errors.push(Finding::EmptyPhrase { index });
        }
        let finite = t.low.is_finite() && t.high.is_finite();
        if !finite || t.low < 0.0 || t.high > 1.0 || t.low >= t.high {
            errors.push(Finding::BadRange {
                index,
                low: t.low,
                high: t.high,
            });
            ranges_ok = false;
        } else if t.low < dom_lo - EPS || t.high > dom_hi + EPS {
            errors.push(Finding::OutsideDomain {
                index,
                low: t.low,
                high: t.high,
            });
        }
    }

    match doc.kind {
        TermSetKind::Probability => {
            if doc.change_bins.is_some() {
                errors.push(Finding::MisplacedField { field: "change_bins" });
            }
        }
        _ => {
            if doc.endpoint_terms.is_some() {
                errors.push(Finding::MisplacedField {
                    field: "endpoint_terms",
                });
            }
            if let Some(bins) = &doc.change_bins {
                let expected: Vec<f64> = terms
                    .first()
                    .map(|t| t.low)
                    .into_iter()
                    .chain(terms.iter().map(|t| t.high))
                    .collect();
                let interior_agrees = terms.windows(2).all(|w| w[0].high == w[1].low);
                if *bins != expected || !interior_agrees {
                    errors.push(Finding::ChangeBinsMismatch);
                }
            }
        }
    }

    if let Some(e) = &doc.endpoint_terms {
        let blank = |s: &str| s.trim().is_empty();
        if blank(&e.zero.phrase) || blank(&e.zero.noun_form) || blank(&e.one.phrase) || blank(&e.one.noun_form) {
            errors.push(Finding::EmptyPhrase { index: terms.len() });
        }
    }

    if ranges_ok && !terms.is_empty() {
        let mids: Vec<f64> = terms.iter().map(|t| (t.low + t.high) / 2.0).collect();
        for i in 1..terms.len() {
            if mids[i] <= mids[i - 1] {
                errors.push(Finding::NonMonotoneMidpoints { index: i });
            }
            if terms[i - 1].high > terms[i].low + EPS {
                errors.push(Finding::Overlap {
                    first: i - 1,
                    second: i,
                });
            }
        }

        let mut edges = Vec::with_capacity(terms.len() + 1);
        edges.push((dom_lo, terms[0].low));
        edges.extend(terms.windows(2).map(|w| (w[0].high, w[1].low)));
        edges.push((terms[terms.len() - 1].high, dom_hi));
        for (from, to) in edges {
            if to - from > MAX_BRIDGED_GAP + EPS {
                errors.push(Finding::CoverageGap { from, to });
            }
        }

        if doc.kind == TermSetKind::Probability && mids.len() >= 3 {
            let steps: Vec<f64> = mids.windows(2).map(|w| w[1] - w[0]).collect();
            let mean = steps.iter().sum::<f64>() / steps.len() as f64;
            if mean > 0.0 {
                let worst = steps.iter().map(|s| (s - mean).abs() / mean).fold(0.0_f64, f64::max);
                if worst > SPACING_TOLERANCE {
                    warnings.push(Finding::UnequalSpacing {
                        max_relative_deviation: worst,
                    });
                }
            }
        }
    }

    let limit = doc.kind.capacity();
    if terms.len() > limit {
        warnings.push(Finding::CapacityExceeded {
            count: terms.len(),
            limit,
        });
    }

    ValidationReport {
        kind: doc.kind,
        term_count: terms.len(),
        errors,
        warnings,
    }
}
