//! Base-rate problems from the heuristics-and-biases literature.
//!
//! Each problem states a base rate, a hit rate and a false-alarm rate, then
//! asks for a posterior. The normative answer comes from Bayes' rule, the
//! biased one from the representativeness heuristic, and both are placed in
//! one of five answer intervals of equal width.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::belief::{biased_estimate, BeliefError, DiagnosticUpdate, Polarity, Probability, TraceStep};
use crate::lexicon::Lexicons;
use crate::narrative::{NarrativeContext, NarrativeError, Narrator, StepRendering};

pub const BUNDLED_PROBLEMS: &str = include_str!("../data/problems.json");

/// Lower edges of answer intervals 1 to 4.
pub const INTERVAL_EDGES: [f64; 4] = [0.2, 0.4, 0.6, 0.8];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot parse problems: {0}")]
    Parse(String),
    #[error("cannot read {}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("problem `{id}`: {field} = {value} is out of range")]
    Range {
        id: String,
        field: &'static str,
        value: f64,
    },
    #[error("problem `{id}`: narrative does not mention {field} = {value}")]
    Unmentioned {
        id: String,
        field: &'static str,
        value: f64,
    },
    #[error("problem `{id}`: `{field}` must not be empty")]
    Empty { id: String, field: &'static str },
    #[error("duplicate problem id `{0}`")]
    Duplicate(String),
    #[error("problem `{id}`: {source}")]
    Belief {
        id: String,
        #[source]
        source: BeliefError,
    },
    #[error("problem `{id}`: {source}")]
    Narrative {
        id: String,
        #[source]
        source: NarrativeError,
    },
}

/// Words substituted into the explanation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSlots {
    /// "Joe Employee"
    pub individual: String,
    /// "a drug user"
    pub class_name: String,
    /// "a positive test"
    pub feature: String,
    /// "the rate of drug use among employees"
    pub prior_basis: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Problem {
    pub id: String,
    pub provenance: String,
    pub narrative_text: String,
    pub question_text: String,
    pub prior: Probability,
    pub sens: Probability,
    pub fpr: Probability,
    pub polarity: Polarity,
    pub slots: ProblemSlots,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    id: String,
    provenance: String,
    narrative_text: String,
    question_text: String,
    prior: f64,
    sens: f64,
    fpr: f64,
    polarity: Polarity,
    slots: ProblemSlots,
}

/// Whether `text` states `value` as a decimal ("0.05") or a percentage ("5%").
fn mentions(text: &str, value: f64) -> bool {
    let percent = (value * 100.0 * 1e9).round() / 1e9;
    let forms = [format!("{value}"), format!("{percent}%"), format!("{percent} percent")];
    forms.iter().any(|form| {
        text.match_indices(form.as_str()).any(|(at, _)| {
            let before = text[..at].chars().next_back();
            let after = text[at + form.len()..].chars().next();
            let numeric = |c: Option<char>| c.is_some_and(|c| c.is_ascii_digit());
            !numeric(before) && before != Some('.') && !numeric(after)
        })
    })
}

impl RawProblem {
    fn validate(self) -> Result<Problem, CorpusError> {
        let id = self.id;
        if id.trim().is_empty() {
            return Err(CorpusError::Empty { id, field: "id" });
        }
        for (field, value) in [
            ("provenance", &self.provenance),
            ("narrative_text", &self.narrative_text),
            ("question_text", &self.question_text),
            ("slots.individual", &self.slots.individual),
            ("slots.class_name", &self.slots.class_name),
            ("slots.feature", &self.slots.feature),
            ("slots.prior_basis", &self.slots.prior_basis),
        ] {
            if value.trim().is_empty() {
                return Err(CorpusError::Empty { id, field });
            }
        }
        let mut checked = [Probability::ZERO; 3];
        for (slot, (field, value)) in
            checked
                .iter_mut()
                .zip([("prior", self.prior), ("sens", self.sens), ("fpr", self.fpr)])
        {
            *slot = Probability::new(value).map_err(|_| CorpusError::Range {
                id: id.clone(),
                field,
                value,
            })?;
            if !mentions(&self.narrative_text, value) {
                return Err(CorpusError::Unmentioned { id, field, value });
            }
        }
        let [prior, sens, fpr] = checked;
        Ok(Problem {
            id,
            provenance: self.provenance,
            narrative_text: self.narrative_text,
            question_text: self.question_text,
            prior,
            sens,
            fpr,
            polarity: self.polarity,
            slots: self.slots,
        })
    }
}

pub fn load_problems(document: &str) -> Result<Vec<Problem>, CorpusError> {
    let raw: Vec<RawProblem> = serde_json::from_str(document).map_err(|e| CorpusError::Parse(e.to_string()))?;
    let mut seen = HashSet::new();
    raw.into_iter()
        .map(|r| {
            let p = r.validate()?;
            if !seen.insert(p.id.clone()) {
                return Err(CorpusError::Duplicate(p.id));
            }
            Ok(p)
        })
        .collect()
}

pub fn load_problems_file(path: &Path) -> Result<Vec<Problem>, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|e| CorpusError::Io {
        path: path.to_owned(),
        message: e.to_string(),
    })?;
    load_problems(&text)
}

pub fn bundled_problems() -> Vec<Problem> {
    load_problems(BUNDLED_PROBLEMS).expect("bundled problems are valid")
}

/// Answer interval 0..=4 of `p`; each interval owns its lower edge and the
/// last one also owns 1.
pub fn interval_of(p: Probability) -> u8 {
    INTERVAL_EDGES.iter().filter(|&&edge| edge <= p.value()).count() as u8
}

/// Human-readable bounds of interval `i`, e.g. "[0.2, 0.4)".
pub fn interval_label(i: u8) -> String {
    let lo = if i == 0 { 0.0 } else { INTERVAL_EDGES[i as usize - 1] };
    match INTERVAL_EDGES.get(i as usize) {
        Some(hi) => format!("[{lo:.1}, {hi:.1})"),
        None => format!("[{lo:.1}, 1.0]"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemAnswer {
    pub normative: Probability,
    pub biased: Probability,
    pub normative_interval: u8,
    pub biased_interval: u8,
    pub explanation: String,
    pub rendering: StepRendering,
}

impl Problem {
    pub fn update(&self) -> DiagnosticUpdate {
        DiagnosticUpdate {
            prior: self.prior,
            p_e_given_h: self.sens,
            p_e_given_not_h: self.fpr,
            polarity: self.polarity,
        }
    }

    pub fn narrative_context(&self) -> NarrativeContext {
        NarrativeContext::new(
            format!("{} is {}", self.slots.individual, self.slots.class_name),
            self.slots.prior_basis.clone(),
            self.slots.class_name.clone(),
        )
    }
}

pub fn evaluate_problem(problem: &Problem, lexicons: &Lexicons) -> Result<ProblemAnswer, CorpusError> {
    let update = problem.update();
    let step = TraceStep::compute(update).map_err(|source| CorpusError::Belief {
        id: problem.id.clone(),
        source,
    })?;
    let rendering = Narrator::new(lexicons)
        .render_step(&step, &problem.narrative_context(), &problem.slots.feature)
        .map_err(|source| CorpusError::Narrative {
            id: problem.id.clone(),
            source,
        })?;
    let biased = biased_estimate(&update);
    Ok(ProblemAnswer {
        normative: step.posterior,
        biased,
        normative_interval: interval_of(step.posterior),
        biased_interval: interval_of(biased),
        explanation: rendering.text(),
        rendering,
    })
}
