//! Phrasing a change of belief.
//!
//! The size of a revision is judged relatively: `r = post / (post + prior)`.
//! Moving from 0.91 to 0.95 gives `r` just above one half, moving from 0.01
//! to 0.05 gives `r = 5/6`, even though both differences are 0.04. Values of
//! `r` above one half are phrased from the increasing set, below one half
//! from the decreasing set.

use serde::Serialize;

use super::{LexiconError, TermSet, TermSetKind};
use crate::belief::Probability;

/// Below this absolute difference a revision is reported as no change.
pub const NO_CHANGE_TOLERANCE: f64 = 1e-9;

/// Emitted for null updates; neither change set has a term for them.
pub const UNCHANGED_PHRASE: &str = "essentially unchanged";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChangeDirection {
    Increasing,
    Decreasing,
    Unchanged,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChangeRatio {
    pub r: f64,
    pub direction: ChangeDirection,
}

pub fn change_ratio(prior: Probability, post: Probability) -> Result<ChangeRatio, LexiconError> {
    let (a, b) = (prior.value(), post.value());
    if a + b == 0.0 {
        return Err(LexiconError::BothZero);
    }
    let r = b / (b + a);
    let direction = if (b - a).abs() < NO_CHANGE_TOLERANCE {
        ChangeDirection::Unchanged
    } else if r > 0.5 {
        ChangeDirection::Increasing
    } else {
        ChangeDirection::Decreasing
    };
    Ok(ChangeRatio { r, direction })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChangeDescription {
    pub ratio: ChangeRatio,
    /// Intensity, 0 for the mildest term of its direction. `None` when
    /// unchanged.
    pub level: Option<usize>,
    pub phrase: String,
}

/// Describes the move from `prior` to `post`.
pub fn change_phrase(
    prior: Probability,
    post: Probability,
    increasing: &TermSet,
    decreasing: &TermSet,
) -> Result<ChangeDescription, LexiconError> {
    for (ts, expected) in [
        (increasing, TermSetKind::ChangeIncreasing),
        (decreasing, TermSetKind::ChangeDecreasing),
    ] {
        if ts.kind() != expected {
            return Err(LexiconError::WrongKind {
                expected,
                found: ts.kind(),
            });
        }
    }
    let ratio = change_ratio(prior, post)?;
    let (level, phrase) = match ratio.direction {
        ChangeDirection::Unchanged => (None, UNCHANGED_PHRASE.to_owned()),
        ChangeDirection::Increasing => {
            let i = increasing.bin(ratio.r);
            (Some(i), increasing.terms()[i].phrase.clone())
        }
        ChangeDirection::Decreasing => {
            let i = decreasing.bin(ratio.r);
            let n = decreasing.terms().len();
            (Some(n - 1 - i), decreasing.terms()[i].phrase.clone())
        }
    };
    Ok(ChangeDescription { ratio, level, phrase })
}
