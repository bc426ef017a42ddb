//! Arithmetic of Bayesian conditioning over a binary hypothesis.
//!
//! A [`DiagnosticUpdate`] pairs a prior `P(H)` with the two likelihoods of a
//! binary test and the observed outcome. Everything here is a pure function
//! of its inputs.
//!
//! Sequences of results are combined under the assumption that tests are
//! conditionally independent given the hypothesis. Nothing in this module can
//! detect a violation of that assumption; callers owning domain knowledge
//! (e.g. the session layer, which refuses repeated tests) must guard it.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BeliefError {
    #[error("probability {0} is outside [0, 1]")]
    OutOfRange(f64),
    #[error("probability is NaN")]
    NotANumber,
    /// The evidence has probability zero under the model.
    #[error("evidence is impossible under the model (zero marginal){}", step_suffix(*.step))]
    ZeroMarginal { step: Option<usize> },
    #[error("likelihood ratio undefined: both effective likelihoods are zero")]
    UndefinedRatio,
}

fn step_suffix(step: Option<usize>) -> String {
    step.map(|i| format!(" at step {i}")).unwrap_or_default()
}

/// A real number in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self, BeliefError> {
        if value.is_nan() {
            return Err(BeliefError::NotANumber);
        }
        if !(0.0..=1.0).contains(&value) {
            return Err(BeliefError::OutOfRange(value));
        }
        Ok(Probability(value))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 - p`.
    #[inline]
    pub fn complement(self) -> Probability {
        Probability(1.0 - self.0)
    }

    /// Clamps rounding noise back into the unit interval.
    pub(crate) fn saturating(value: f64) -> Probability {
        debug_assert!(!value.is_nan());
        Probability(value.clamp(0.0, 1.0))
    }
}

impl TryFrom<f64> for Probability {
    type Error = BeliefError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Probability::new(value)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Which outcome of a binary test was observed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flipped(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Polarity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+" | "positive" | "pos" => Ok(Polarity::Positive),
            "-" | "negative" | "neg" => Ok(Polarity::Negative),
            other => Err(format!("unknown polarity `{other}` (expected + or -)")),
        }
    }
}

/// Characteristics of a binary test, always stated for the *positive* outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Likelihoods {
    /// `P(positive | H)`.
    pub sens: Probability,
    /// `P(positive | not H)`.
    pub fpr: Probability,
}

impl Likelihoods {
    pub fn new(sens: f64, fpr: f64) -> Result<Self, BeliefError> {
        Ok(Likelihoods {
            sens: Probability::new(sens)?,
            fpr: Probability::new(fpr)?,
        })
    }

    /// `(P(E|H), P(E|not H))` for the observed outcome.
    pub fn effective(self, polarity: Polarity) -> (Probability, Probability) {
        match polarity {
            Polarity::Positive => (self.sens, self.fpr),
            Polarity::Negative => (self.sens.complement(), self.fpr.complement()),
        }
    }

    /// The same test with its outcomes relabelled.
    pub fn swapped(self) -> Likelihoods {
        Likelihoods {
            sens: self.sens.complement(),
            fpr: self.fpr.complement(),
        }
    }
}

/// One observed test result, independent of any prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub likelihoods: Likelihoods,
    pub polarity: Polarity,
}

impl Evidence {
    pub fn new(likelihoods: Likelihoods, polarity: Polarity) -> Self {
        Evidence { likelihoods, polarity }
    }

    pub fn with_prior(self, prior: Probability) -> DiagnosticUpdate {
        DiagnosticUpdate {
            prior,
            p_e_given_h: self.likelihoods.sens,
            p_e_given_not_h: self.likelihoods.fpr,
            polarity: self.polarity,
        }
    }
}

/// A single conditioning step.
///
/// `p_e_given_h` and `p_e_given_not_h` describe the positive outcome; for a
/// negative observation both are complemented before use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticUpdate {
    pub prior: Probability,
    pub p_e_given_h: Probability,
    pub p_e_given_not_h: Probability,
    pub polarity: Polarity,
}

impl DiagnosticUpdate {
    pub fn new(prior: f64, sens: f64, fpr: f64, polarity: Polarity) -> Result<Self, BeliefError> {
        Ok(DiagnosticUpdate {
            prior: Probability::new(prior)?,
            p_e_given_h: Probability::new(sens)?,
            p_e_given_not_h: Probability::new(fpr)?,
            polarity,
        })
    }

    pub fn evidence(&self) -> Evidence {
        Evidence {
            likelihoods: Likelihoods {
                sens: self.p_e_given_h,
                fpr: self.p_e_given_not_h,
            },
            polarity: self.polarity,
        }
    }

    /// Polarity-adjusted `(P(E|H), P(E|not H))`.
    pub fn effective_likelihoods(&self) -> (Probability, Probability) {
        self.evidence().likelihoods.effective(self.polarity)
    }

    pub fn marginal(&self) -> Probability {
        marginal(self)
    }

    pub fn posterior(&self) -> Result<Probability, BeliefError> {
        posterior(self)
    }
}

/// `P(E) = P(H) P(E|H) + P(not H) P(E|not H)`.
pub fn marginal(u: &DiagnosticUpdate) -> Probability {
    let (l_h, l_not_h) = u.effective_likelihoods();
    let prior = u.prior.value();
    Probability::saturating(prior * l_h.value() + (1.0 - prior) * l_not_h.value())
}

/// `P(H|E)` by Bayes' rule.
///
/// Evidence with equal likelihoods under both hypotheses returns the prior
/// unchanged, bit for bit.
pub fn posterior(u: &DiagnosticUpdate) -> Result<Probability, BeliefError> {
    let (l_h, l_not_h) = u.effective_likelihoods();
    let m = marginal(u).value();
    if m == 0.0 {
        return Err(BeliefError::ZeroMarginal { step: None });
    }
    if l_h == l_not_h {
        return Ok(u.prior);
    }
    Ok(Probability::saturating(u.prior.value() * l_h.value() / m))
}

/// `P(E|H) / P(E|not H)`; infinite when only the denominator vanishes.
pub fn likelihood_ratio(u: &DiagnosticUpdate) -> Result<f64, BeliefError> {
    let (l_h, l_not_h) = u.effective_likelihoods();
    match (l_h.value(), l_not_h.value()) {
        (a, b) if a == 0.0 && b == 0.0 => Err(BeliefError::UndefinedRatio),
        (_, 0.0) => Ok(f64::INFINITY),
        (a, b) => Ok(a / b),
    }
}

/// The representativeness answer: `P(E|H)` mistaken for `P(H|E)`.
///
/// The prior is ignored entirely.
pub fn biased_estimate(u: &DiagnosticUpdate) -> Probability {
    u.effective_likelihoods().0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub update: DiagnosticUpdate,
    pub marginal: Probability,
    pub posterior: Probability,
}

impl TraceStep {
    pub fn compute(update: DiagnosticUpdate) -> Result<TraceStep, BeliefError> {
        Ok(TraceStep {
            marginal: marginal(&update),
            posterior: posterior(&update)?,
            update,
        })
    }
}

/// The beliefs visited while folding a sequence of results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefTrace {
    pub initial_prior: Probability,
    pub steps: Vec<TraceStep>,
}

impl BeliefTrace {
    pub fn new(initial_prior: Probability) -> Self {
        BeliefTrace {
            initial_prior,
            steps: Vec::new(),
        }
    }

    pub fn belief(&self) -> Probability {
        self.steps.last().map_or(self.initial_prior, |s| s.posterior)
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    /// Conditions the current belief on `evidence` and records the step.
    pub fn push(&mut self, evidence: Evidence) -> Result<&TraceStep, BeliefError> {
        let index = self.steps.len();
        let step = TraceStep::compute(evidence.with_prior(self.belief())).map_err(|e| match e {
            BeliefError::ZeroMarginal { .. } => BeliefError::ZeroMarginal { step: Some(index) },
            other => other,
        })?;
        self.steps.push(step);
        Ok(&self.steps[index])
    }

    /// Checks the chaining and recomputation invariants.
    pub fn is_consistent(&self) -> bool {
        let mut belief = self.initial_prior;
        for step in &self.steps {
            if step.update.prior != belief {
                return false;
            }
            match TraceStep::compute(step.update) {
                Ok(again) if again == *step => belief = step.posterior,
                _ => return false,
            }
        }
        true
    }
}

/// Folds `posterior` left to right, each step's prior being the previous
/// posterior. A zero marginal reports the offending step index.
pub fn apply_sequence<'a, I>(prior: Probability, evidence: I) -> Result<BeliefTrace, BeliefError>
where
    I: IntoIterator<Item = &'a Evidence>,
{
    let mut trace = BeliefTrace::new(prior);
    for e in evidence {
        trace.push(*e)?;
    }
    Ok(trace)
}
