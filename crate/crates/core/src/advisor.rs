//! Choosing the most definitive follow-up test.
//!
//! Tests are scored by expected information gain: the Kullback-Leibler
//! divergence (in nats) of the posterior from the current belief, averaged
//! over both outcomes with their predictive probabilities. Scoring goes
//! through [`GainCriterion`] so other criteria can be substituted.

use serde::Serialize;
use thiserror::Error;

use crate::belief::{marginal, posterior, Likelihoods, Polarity, Probability};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdvisorError {
    #[error("belief {0} is degenerate; no test can change it")]
    DegenerateBelief(f64),
    #[error("no candidate tests")]
    NoCandidates,
}

/// What each outcome of a test would do to the current belief.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutcomePreview {
    /// `None` when a positive result is impossible.
    pub posterior_if_positive: Option<Probability>,
    /// `None` when a negative result is impossible.
    pub posterior_if_negative: Option<Probability>,
    pub p_positive: Probability,
}

pub fn preview(belief: Probability, test: Likelihoods) -> OutcomePreview {
    let branch = |polarity| {
        let u = crate::belief::Evidence::new(test, polarity).with_prior(belief);
        posterior(&u).ok()
    };
    let positive = crate::belief::Evidence::new(test, Polarity::Positive).with_prior(belief);
    OutcomePreview {
        posterior_if_positive: branch(Polarity::Positive),
        posterior_if_negative: branch(Polarity::Negative),
        p_positive: marginal(&positive),
    }
}

pub trait GainCriterion {
    fn gain(&self, belief: Probability, test: Likelihoods) -> Result<f64, AdvisorError>;
}

/// Expected KL divergence from the current belief to the posterior.
#[derive(Debug, Clone, Copy, Default)]
pub struct InformationGain;

/// `KL(Bern(q) || Bern(p))` in nats with `0 ln 0 = 0`.
fn bernoulli_kl(q: f64, p: f64) -> f64 {
    let term = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a * (a / b).ln() };
    term(q, p) + term(1.0 - q, 1.0 - p)
}

impl GainCriterion for InformationGain {
    fn gain(&self, belief: Probability, test: Likelihoods) -> Result<f64, AdvisorError> {
        let b = belief.value();
        if b <= 0.0 || b >= 1.0 {
            return Err(AdvisorError::DegenerateBelief(b));
        }
        let view = preview(belief, test);
        let p_pos = view.p_positive.value();
        let mut total = 0.0;
        if let Some(q) = view.posterior_if_positive {
            total += p_pos * bernoulli_kl(q.value(), b);
        }
        if let Some(q) = view.posterior_if_negative {
            total += (1.0 - p_pos) * bernoulli_kl(q.value(), b);
        }
        // Rounding can leave a tiny negative for nearly uninformative tests.
        Ok(total.max(0.0))
    }
}

pub fn expected_gain(belief: Probability, test: Likelihoods) -> Result<f64, AdvisorError> {
    InformationGain.gain(belief, test)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedTest {
    pub test_id: String,
    pub expected_gain: f64,
    pub preview: OutcomePreview,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestRecommendation {
    /// Best first; equal gains ordered by test id.
    pub ranked: Vec<RankedTest>,
}

impl TestRecommendation {
    pub fn best(&self) -> &RankedTest {
        &self.ranked[0]
    }
}

pub fn recommend<S: AsRef<str>>(
    belief: Probability,
    candidates: &[(S, Likelihoods)],
) -> Result<TestRecommendation, AdvisorError> {
    recommend_with(&InformationGain, belief, candidates)
}

pub fn recommend_with<C: GainCriterion + ?Sized, S: AsRef<str>>(
    criterion: &C,
    belief: Probability,
    candidates: &[(S, Likelihoods)],
) -> Result<TestRecommendation, AdvisorError> {
    if candidates.is_empty() {
        return Err(AdvisorError::NoCandidates);
    }
    let mut ranked = candidates
        .iter()
        .map(|(id, lik)| {
            Ok(RankedTest {
                test_id: id.as_ref().to_owned(),
                expected_gain: criterion.gain(belief, *lik)?,
                preview: preview(belief, *lik),
            })
        })
        .collect::<Result<Vec<_>, AdvisorError>>()?;
    ranked.sort_by(|a, b| {
        b.expected_gain
            .total_cmp(&a.expected_gain)
            .then_with(|| a.test_id.cmp(&b.test_id))
    });
    Ok(TestRecommendation { ranked })
}
