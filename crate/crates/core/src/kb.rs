//! Declarative domain knowledge: one binary hypothesis, structural classes
//! carrying priors, and tests carrying per-class likelihoods.
//!
//! A test may leave out classes it does not apply to; asking for such a
//! pair is an [`KbError::Uncovered`] error that [`KnowledgeBase::covers`]
//! can rule out in advance. Everything else is checked at load time.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::belief::{Evidence, Likelihoods, Polarity, Probability};
use crate::narrative::NarrativeContext;

#[derive(Debug, Error, PartialEq)]
pub enum KbError {
    #[error("cannot parse knowledge base: {0}")]
    Parse(String),
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("test `{test}` references unknown class `{class}`")]
    Reference { test: String, class: String },
    #[error("{what} = {value} is out of range")]
    Range { what: String, value: f64 },
    #[error("duplicate {kind} id `{id}`")]
    Duplicate { kind: &'static str, id: String },
    #[error("{0} must not be empty")]
    Empty(String),
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("unknown test `{0}`")]
    UnknownTest(String),
    #[error("test `{test}` does not apply to class `{class}`")]
    Uncovered { test: String, class: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructuralClass {
    pub id: String,
    /// With article, e.g. "a pyrrolizidine".
    pub display_name: String,
    pub prior: Probability,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestSpec {
    pub id: String,
    pub display_name_positive: String,
    pub display_name_negative: String,
    pub per_class: BTreeMap<String, Likelihoods>,
}

impl TestSpec {
    pub fn display_name(&self, polarity: Polarity) -> &str {
        match polarity {
            Polarity::Positive => &self.display_name_positive,
            Polarity::Negative => &self.display_name_negative,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnowledgeBase {
    pub domain_name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
    pub hypothesis_text: String,
    pub prior_basis_text: String,
    pub classes: Vec<StructuralClass>,
    pub tests: Vec<TestSpec>,
}

// Wire form, with bare numbers so that range problems surface as
// `KbError::Range` rather than as parse failures.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawKb {
    domain_name: String,
    #[serde(default)]
    notes: Option<String>,
    hypothesis_text: String,
    prior_basis_text: String,
    classes: Vec<RawClass>,
    tests: Vec<RawTest>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClass {
    id: String,
    display_name: String,
    prior: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTest {
    id: String,
    display_name_positive: String,
    display_name_negative: String,
    per_class: BTreeMap<String, RawLikelihoods>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLikelihoods {
    sens: f64,
    fpr: f64,
}

fn non_empty(what: impl FnOnce() -> String, value: &str) -> Result<(), KbError> {
    if value.trim().is_empty() {
        Err(KbError::Empty(what()))
    } else {
        Ok(())
    }
}

fn probability(what: impl FnOnce() -> String, value: f64) -> Result<Probability, KbError> {
    Probability::new(value).map_err(|_| KbError::Range { what: what(), value })
}

impl RawKb {
    fn validate(self) -> Result<KnowledgeBase, KbError> {
        non_empty(|| "domain_name".into(), &self.domain_name)?;
        non_empty(|| "hypothesis_text".into(), &self.hypothesis_text)?;
        non_empty(|| "prior_basis_text".into(), &self.prior_basis_text)?;

        let mut class_ids = HashSet::new();
        let mut classes = Vec::with_capacity(self.classes.len());
        for c in self.classes {
            non_empty(|| "class id".into(), &c.id)?;
            non_empty(|| format!("display_name of class `{}`", c.id), &c.display_name)?;
            if !class_ids.insert(c.id.clone()) {
                return Err(KbError::Duplicate {
                    kind: "class",
                    id: c.id,
                });
            }
            // Degenerate priors would make every test moot.
            if !(c.prior > 0.0 && c.prior < 1.0) {
                return Err(KbError::Range {
                    what: format!("prior of class `{}`", c.id),
                    value: c.prior,
                });
            }
            classes.push(StructuralClass {
                prior: Probability::new(c.prior).expect("checked above"),
                id: c.id,
                display_name: c.display_name,
            });
        }

        let mut test_ids = HashSet::new();
        let mut tests = Vec::with_capacity(self.tests.len());
        for t in self.tests {
            non_empty(|| "test id".into(), &t.id)?;
            non_empty(
                || format!("display_name_positive of test `{}`", t.id),
                &t.display_name_positive,
            )?;
            non_empty(
                || format!("display_name_negative of test `{}`", t.id),
                &t.display_name_negative,
            )?;
            if !test_ids.insert(t.id.clone()) {
                return Err(KbError::Duplicate { kind: "test", id: t.id });
            }
            let mut per_class = BTreeMap::new();
            for (class, l) in t.per_class {
                if !class_ids.contains(&class) {
                    return Err(KbError::Reference { test: t.id, class });
                }
                let sens = probability(|| format!("sens of test `{}` for `{class}`", t.id), l.sens)?;
                let fpr = probability(|| format!("fpr of test `{}` for `{class}`", t.id), l.fpr)?;
                per_class.insert(class, Likelihoods { sens, fpr });
            }
            tests.push(TestSpec {
                id: t.id,
                display_name_positive: t.display_name_positive,
                display_name_negative: t.display_name_negative,
                per_class,
            });
        }

        Ok(KnowledgeBase {
            domain_name: self.domain_name,
            notes: self.notes,
            hypothesis_text: self.hypothesis_text,
            prior_basis_text: self.prior_basis_text,
            classes,
            tests,
        })
    }
}

/// Parses and validates a knowledge base document. Unknown fields are
/// rejected.
pub fn load_kb(document: &str) -> Result<KnowledgeBase, KbError> {
    let raw: RawKb = serde_json::from_str(document).map_err(|e| KbError::Parse(e.to_string()))?;
    raw.validate()
}

pub fn prior_for(kb: &KnowledgeBase, class_id: &str) -> Result<Probability, KbError> {
    kb.prior_for(class_id)
}

pub fn evidence_model(
    kb: &KnowledgeBase,
    test_id: &str,
    class_id: &str,
    polarity: Polarity,
) -> Result<Evidence, KbError> {
    kb.evidence_model(test_id, class_id, polarity)
}

impl KnowledgeBase {
    pub fn load(path: &Path) -> Result<Self, KbError> {
        let text = std::fs::read_to_string(path).map_err(|e| KbError::Io {
            path: path.to_owned(),
            message: e.to_string(),
        })?;
        load_kb(&text)
    }

    /// The bundled carcinogenicity screening example.
    pub fn demo() -> KnowledgeBase {
        load_kb(DEMO_KB).expect("bundled demo knowledge base is valid")
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("knowledge base serializes");
        out.push('\n');
        out
    }

    pub fn class(&self, class_id: &str) -> Result<&StructuralClass, KbError> {
        self.classes
            .iter()
            .find(|c| c.id == class_id)
            .ok_or_else(|| KbError::UnknownClass(class_id.to_owned()))
    }

    pub fn test(&self, test_id: &str) -> Result<&TestSpec, KbError> {
        self.tests
            .iter()
            .find(|t| t.id == test_id)
            .ok_or_else(|| KbError::UnknownTest(test_id.to_owned()))
    }

    pub fn prior_for(&self, class_id: &str) -> Result<Probability, KbError> {
        Ok(self.class(class_id)?.prior)
    }

    /// Whether `test_id` has likelihoods for `class_id`. Unknown ids are
    /// simply not covered.
    pub fn covers(&self, test_id: &str, class_id: &str) -> bool {
        self.test(test_id)
            .map(|t| t.per_class.contains_key(class_id))
            .unwrap_or(false)
    }

    pub fn likelihoods(&self, test_id: &str, class_id: &str) -> Result<Likelihoods, KbError> {
        self.class(class_id)?;
        let test = self.test(test_id)?;
        test.per_class.get(class_id).copied().ok_or_else(|| KbError::Uncovered {
            test: test_id.to_owned(),
            class: class_id.to_owned(),
        })
    }

    /// Likelihoods of `test_id` for `class_id`, with `polarity` passed through.
    /// Complementing for negative results happens in [`crate::belief`].
    pub fn evidence_model(&self, test_id: &str, class_id: &str, polarity: Polarity) -> Result<Evidence, KbError> {
        Ok(Evidence::new(self.likelihoods(test_id, class_id)?, polarity))
    }

    /// Tests applicable to `class_id`, in file order.
    pub fn tests_for<'a>(&'a self, class_id: &'a str) -> impl Iterator<Item = &'a TestSpec> + 'a {
        self.tests.iter().filter(move |t| t.per_class.contains_key(class_id))
    }

    pub fn narrative_context(&self, class_id: &str) -> Result<NarrativeContext, KbError> {
        let class = self.class(class_id)?;
        Ok(NarrativeContext::new(
            self.hypothesis_text.clone(),
            self.prior_basis_text.clone(),
            class.display_name.clone(),
        ))
    }
}

pub const DEMO_KB: &str = include_str!("../data/demo_kb.json");
