//! Independent oracles shared by the integration tests and the acceptance
//! harness. Nothing here calls into the code under test for the values it
//! checks.

#![allow(dead_code)]

use std::path::PathBuf;

use bayeslex::belief::Polarity;
use bayeslex::kb::KnowledgeBase;
use bayeslex::session::{Consultant, Session};
use rand::Rng;

/// The eleven published ranges, ascending.
pub const PUBLISHED_RANGES: [(&str, f64, f64); 11] = [
    ("highly improbable", 0.01, 0.08),
    ("improbable", 0.09, 0.18),
    ("rather unlikely", 0.19, 0.27),
    ("somewhat unlikely", 0.28, 0.36),
    ("not quite even chance", 0.37, 0.45),
    ("fair chance", 0.46, 0.54),
    ("better than even", 0.55, 0.63),
    ("rather likely", 0.64, 0.72),
    ("quite likely", 0.73, 0.81),
    ("highly probable", 0.82, 0.90),
    ("almost certain", 0.91, 0.99),
];

/// Midpoints of the gaps between neighbouring ranges.
pub const BOUNDARIES: [f64; 10] = [0.085, 0.185, 0.275, 0.365, 0.455, 0.545, 0.635, 0.725, 0.815, 0.905];

/// Expected phrase for `p` straight from the table above.
pub fn published_phrase(p: f64) -> &'static str {
    if p == 0.0 {
        return "impossible";
    }
    if p == 1.0 {
        return "certain";
    }
    let index = BOUNDARIES.iter().filter(|&&b| b <= p).count();
    PUBLISHED_RANGES[index].0
}

/// Posterior via odds times likelihood ratio.
pub fn odds_posterior(prior: f64, l_h: f64, l_not_h: f64) -> f64 {
    let odds = prior / (1.0 - prior) * (l_h / l_not_h);
    odds / (1.0 + odds)
}

/// Likelihoods of the observed outcome.
pub fn observed(sens: f64, fpr: f64, polarity: Polarity) -> (f64, f64) {
    match polarity {
        Polarity::Positive => (sens, fpr),
        Polarity::Negative => (1.0 - sens, 1.0 - fpr),
    }
}

/// Mutual information (nats) between hypothesis and test outcome, from the
/// joint table.
pub fn mutual_information(belief: f64, sens: f64, fpr: f64) -> f64 {
    let joint = [
        [belief * sens, belief * (1.0 - sens)],
        [(1.0 - belief) * fpr, (1.0 - belief) * (1.0 - fpr)],
    ];
    let row = [belief, 1.0 - belief];
    let col = [joint[0][0] + joint[1][0], joint[0][1] + joint[1][1]];
    let mut mi = 0.0;
    for h in 0..2 {
        for o in 0..2 {
            let p = joint[h][o];
            if p > 0.0 {
                mi += p * (p / (row[h] * col[o])).ln();
            }
        }
    }
    mi
}

/// Entropy (nats) of a Bernoulli variable.
pub fn binary_entropy(p: f64) -> f64 {
    -[p, 1.0 - p]
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|x| x * x.ln())
        .sum::<f64>()
}

pub struct GoldenCase {
    pub name: &'static str,
    pub prior: f64,
    pub sens: f64,
    pub fpr: f64,
}

pub const GOLDEN: [GoldenCase; 3] = [
    GoldenCase {
        name: "surprising",
        prior: 0.3,
        sens: 0.6,
        fpr: 0.05,
    },
    GoldenCase {
        name: "neutral",
        prior: 0.4,
        sens: 0.8,
        fpr: 0.3,
    },
    GoldenCase {
        name: "uninformative",
        prior: 0.5,
        sens: 0.7,
        fpr: 0.7,
    },
];

pub const GOLDEN_HYPOTHESIS: &str = "the new chemical is a carcinogen";
pub const GOLDEN_BASIS: &str = "its structure";
pub const GOLDEN_CLASS: &str = "a pyrrolizidine";
pub const GOLDEN_EVIDENCE: &str = "a positive Ames test";

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("tests/golden/{name}.txt"))
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("tests/fixtures/{name}"))
}

/// Drives a session with random commands, ignoring rejected ones, and
/// returns it. Commands include duplicates, uncovered tests and undo on an
/// empty stack, so the log covers every reachable shape.
pub fn random_session<R: Rng>(consultant: &Consultant<'_>, kb: &KnowledgeBase, rng: &mut R, ops: usize) -> Session {
    let class = &kb.classes[rng.random_range(0..kb.classes.len())].id;
    let mut session = consultant.create_session(class).unwrap();
    for _ in 0..ops {
        if rng.random_bool(0.25) {
            let _ = consultant.undo(&mut session);
        } else {
            let test = &kb.tests[rng.random_range(0..kb.tests.len())].id;
            let polarity = if rng.random_bool(0.5) {
                Polarity::Positive
            } else {
                Polarity::Negative
            };
            let _ = consultant.assert_result(&mut session, test, polarity);
        }
    }
    session
}
