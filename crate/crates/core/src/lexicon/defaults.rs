//! Built-in term sets.
//!
//! The probability ranges are the published Lichtenstein and Newman scale as
//! adapted for an eleven-term lexicon. "impossible" and "certain" are reserved
//! for exactly 0 and 1 and are not part of that scale.
//!
//! Change terms have no published ranges. Their bins over the relative-belief
//! ratio are chosen so that 0.91 -> 0.95 gets the mildest term and
//! 0.01 -> 0.05 the strongest.

use super::{EndpointTerm, EndpointTerms, TermEntry, TermSetDocument, TermSetKind};

fn entry(phrase: &str, noun_form: &str, low: f64, high: f64) -> TermEntry {
    TermEntry {
        phrase: phrase.to_owned(),
        noun_form: noun_form.to_owned(),
        low,
        high,
    }
}

fn same(phrase: &str, low: f64, high: f64) -> TermEntry {
    entry(phrase, phrase, low, high)
}

pub(super) fn probability() -> TermSetDocument {
    TermSetDocument {
        kind: TermSetKind::Probability,
        terms: vec![
            same("highly improbable", 0.01, 0.08),
            same("improbable", 0.09, 0.18),
            same("rather unlikely", 0.19, 0.27),
            same("somewhat unlikely", 0.28, 0.36),
            entry("not quite even chance", "not quite an even chance", 0.37, 0.45),
            entry("fair chance", "a fair chance", 0.46, 0.54),
            same("better than even", 0.55, 0.63),
            same("rather likely", 0.64, 0.72),
            same("quite likely", 0.73, 0.81),
            same("highly probable", 0.82, 0.90),
            same("almost certain", 0.91, 0.99),
        ],
        endpoint_terms: Some(EndpointTerms {
            zero: EndpointTerm {
                phrase: "impossible".to_owned(),
                noun_form: "impossible".to_owned(),
            },
            one: EndpointTerm {
                phrase: "certain".to_owned(),
                noun_form: "certain".to_owned(),
            },
        }),
        change_bins: None,
    }
}

pub(super) fn increasing() -> TermSetDocument {
    TermSetDocument {
        kind: TermSetKind::ChangeIncreasing,
        terms: vec![
            same("a bit more likely", 0.5, 0.575),
            same("somewhat more likely", 0.575, 0.65),
            same("quite a bit more likely", 0.65, 0.725),
            same("much more likely", 0.725, 0.8),
            same("a great deal more likely", 0.8, 1.0),
        ],
        endpoint_terms: None,
        change_bins: None,
    }
}

pub(super) fn decreasing() -> TermSetDocument {
    TermSetDocument {
        kind: TermSetKind::ChangeDecreasing,
        terms: vec![
            same("a great deal less likely", 0.0, 0.2),
            same("much less likely", 0.2, 0.275),
            same("quite a bit less likely", 0.275, 0.35),
            same("somewhat less likely", 0.35, 0.425),
            same("a bit less likely", 0.425, 0.5),
        ],
        endpoint_terms: None,
        change_bins: None,
    }
}
