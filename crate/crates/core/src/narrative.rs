//! English explanations of conditioning steps.
//!
//! Each step is keyed by the marginal probability of its evidence. A small
//! marginal means the result was surprising and belief moves a lot; a large
//! one means it was anticipated and belief barely moves; near one half the
//! evidence was neither. Surprising and anticipated steps share the
//! "Because ..." template, neutral steps use the "There is ..." template.
//!
//! Every word chosen from a term set is wrapped in asterisks:
//!
//! ```text
//! Based only on its structure, it is *not quite an even chance* that the
//! chemical is a carcinogen.
//! ```
//!
//! Probability slots use the term's noun form, which for adjectival terms is
//! the phrase itself.

use serde::Serialize;
use thiserror::Error;

use crate::belief::{BeliefTrace, Probability, TraceStep};
use crate::lexicon::{ChangeDescription, LexiconError, Lexicons, TermSet};

#[derive(Debug, Error)]
pub enum NarrativeError {
    #[error("narrative context is incomplete: `{0}` is empty")]
    IncompleteContext(&'static str),
    #[error("expected {expected} evidence descriptions, got {got}")]
    EvidenceCount { expected: usize, got: usize },
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternClass {
    Anticipated,
    Surprising,
    Neutral,
}

/// The neutral band of marginals, `[neutral_low, neutral_high)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PatternThresholds {
    pub neutral_low: f64,
    pub neutral_high: f64,
}

impl PatternThresholds {
    /// The canonical interval of whichever term covers one half.
    pub fn from_lexicon(ts: &TermSet) -> Self {
        let (neutral_low, neutral_high) = ts.canonical_interval(ts.bin(0.5));
        PatternThresholds {
            neutral_low,
            neutral_high,
        }
    }
}

impl Default for PatternThresholds {
    fn default() -> Self {
        PatternThresholds::from_lexicon(&Lexicons::builtin().probability)
    }
}

pub fn classify_pattern(marginal: Probability, thresholds: &PatternThresholds) -> PatternClass {
    let m = marginal.value();
    if m < thresholds.neutral_low {
        PatternClass::Surprising
    } else if m < thresholds.neutral_high {
        PatternClass::Neutral
    } else {
        PatternClass::Anticipated
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Template {
    /// "Because {evidence} is ..., the hypothesis ... is ..., making it ..."
    A,
    /// "There is ... of {evidence} ..., making it ... It is ..."
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct NarrativeConfig {
    pub thresholds: PatternThresholds,
    /// Use template A for every step.
    pub single_template: bool,
}

impl NarrativeConfig {
    pub fn for_lexicons(lexicons: &Lexicons) -> Self {
        NarrativeConfig {
            thresholds: PatternThresholds::from_lexicon(&lexicons.probability),
            single_template: false,
        }
    }
}

/// Application-dependent wording.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NarrativeContext {
    /// "P345-22 is a carcinogen"
    pub hypothesis_text: String,
    /// "its structure"
    pub prior_basis_text: String,
    /// "a pyrrolizidine"
    pub class_name: String,
}

impl NarrativeContext {
    pub fn new(hypothesis: impl Into<String>, prior_basis: impl Into<String>, class_name: impl Into<String>) -> Self {
        NarrativeContext {
            hypothesis_text: hypothesis.into(),
            prior_basis_text: prior_basis.into(),
            class_name: class_name.into(),
        }
    }

    fn check(&self) -> Result<(), NarrativeError> {
        for (name, value) in [
            ("hypothesis_text", &self.hypothesis_text),
            ("prior_basis_text", &self.prior_basis_text),
            ("class_name", &self.class_name),
        ] {
            if value.trim().is_empty() {
                return Err(NarrativeError::IncompleteContext(name));
            }
        }
        Ok(())
    }
}

/// A number and the words chosen for it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Slot {
    pub value: f64,
    /// The matched term's phrase.
    pub term: String,
    /// What was written into the sentence.
    pub text: String,
}

impl Slot {
    pub fn probability(p: Probability, lexicons: &Lexicons) -> Slot {
        let term = lexicons.probability_term(p);
        Slot {
            value: p.value(),
            term: term.phrase.clone(),
            text: term.noun_form.clone(),
        }
    }
}

/// Structured form of one rendered step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRendering {
    pub template: Template,
    pub pattern: PatternClass,
    pub marginal: f64,
    pub prior: Slot,
    /// `P(E|H)` for the observed outcome.
    pub likelihood: Slot,
    pub change: ChangeDescription,
    pub posterior: Slot,
    pub opening: String,
    pub body: String,
}

impl StepRendering {
    /// The opening sentence and the body as two paragraphs.
    pub fn text(&self) -> String {
        format!("{}\n\n{}", self.opening, self.body)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRendering {
    pub prior: Slot,
    pub opening: String,
    pub steps: Vec<StepRendering>,
}

impl TraceRendering {
    /// Paragraphs separated by blank lines; the opening appears once.
    pub fn text(&self) -> String {
        let mut out = self.opening.clone();
        for s in &self.steps {
            out.push_str("\n\n");
            out.push_str(&s.body);
        }
        out
    }
}

/// Renders explanations with a fixed set of lexicons and configuration.
#[derive(Debug, Clone, Copy)]
pub struct Narrator<'a> {
    lexicons: &'a Lexicons,
    config: NarrativeConfig,
}

impl<'a> Narrator<'a> {
    pub fn new(lexicons: &'a Lexicons) -> Self {
        Narrator {
            lexicons,
            config: NarrativeConfig::for_lexicons(lexicons),
        }
    }

    pub fn with_config(lexicons: &'a Lexicons, config: NarrativeConfig) -> Self {
        Narrator { lexicons, config }
    }

    pub fn lexicons(&self) -> &'a Lexicons {
        self.lexicons
    }

    pub fn config(&self) -> &NarrativeConfig {
        &self.config
    }

    pub fn classify(&self, marginal: Probability) -> PatternClass {
        classify_pattern(marginal, &self.config.thresholds)
    }

    /// "Based only on {basis}, it is {prior} that {hypothesis}."
    pub fn opening(&self, prior: Probability, ctx: &NarrativeContext) -> Result<(Slot, String), NarrativeError> {
        ctx.check()?;
        let slot = Slot::probability(prior, self.lexicons);
        let text = format!(
            "Based only on {}, it is *{}* that {}.",
            ctx.prior_basis_text, slot.text, ctx.hypothesis_text
        );
        Ok((slot, text))
    }

    pub fn render_step(
        &self,
        step: &TraceStep,
        ctx: &NarrativeContext,
        evidence_text: &str,
    ) -> Result<StepRendering, NarrativeError> {
        if evidence_text.trim().is_empty() {
            return Err(NarrativeError::IncompleteContext("evidence_text"));
        }
        let (prior, opening) = self.opening(step.update.prior, ctx)?;
        let pattern = self.classify(step.marginal);
        let template = match pattern {
            PatternClass::Neutral if !self.config.single_template => Template::B,
            _ => Template::A,
        };
        let likelihood = Slot::probability(step.update.effective_likelihoods().0, self.lexicons);
        let change = self.lexicons.change(step.update.prior, step.posterior)?;
        let posterior = Slot::probability(step.posterior, self.lexicons);
        let hyp = &ctx.hypothesis_text;
        let body = match template {
            Template::A => format!(
                "Because {evidence_text} is *{}* for {}, the hypothesis that {hyp} is *{}*, making it *{}* that {hyp}.",
                likelihood.text, ctx.class_name, change.phrase, posterior.text
            ),
            Template::B => format!(
                "There is *{}* of {evidence_text} for {}, making it *{}* that {hyp}. It is *{}* that {hyp}.",
                likelihood.text, ctx.class_name, change.phrase, posterior.text
            ),
        };
        Ok(StepRendering {
            template,
            pattern,
            marginal: step.marginal.value(),
            prior,
            likelihood,
            change,
            posterior,
            opening,
            body,
        })
    }

    /// Renders every step of `trace`; `evidence_texts[i]` describes step `i`.
    pub fn render_trace<S: AsRef<str>>(
        &self,
        trace: &BeliefTrace,
        ctx: &NarrativeContext,
        evidence_texts: &[S],
    ) -> Result<TraceRendering, NarrativeError> {
        if evidence_texts.len() != trace.steps.len() {
            return Err(NarrativeError::EvidenceCount {
                expected: trace.steps.len(),
                got: evidence_texts.len(),
            });
        }
        let (prior, opening) = self.opening(trace.initial_prior, ctx)?;
        let steps = trace
            .steps
            .iter()
            .zip(evidence_texts)
            .map(|(step, e)| self.render_step(step, ctx, e.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TraceRendering { prior, opening, steps })
    }
}

/// Renders one step with the lexicons' default configuration.
pub fn render_step(
    step: &TraceStep,
    ctx: &NarrativeContext,
    evidence_text: &str,
    lexicons: &Lexicons,
) -> Result<StepRendering, NarrativeError> {
    Narrator::new(lexicons).render_step(step, ctx, evidence_text)
}

pub fn render_trace<S: AsRef<str>>(
    trace: &BeliefTrace,
    ctx: &NarrativeContext,
    evidence_texts: &[S],
    lexicons: &Lexicons,
) -> Result<TraceRendering, NarrativeError> {
    Narrator::new(lexicons).render_trace(trace, ctx, evidence_texts)
}

/// The asterisk-delimited spans of `text`, in order.
pub fn emphasized(text: &str) -> Vec<&str> {
    text.split('*').skip(1).step_by(2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::{apply_sequence, DiagnosticUpdate, Evidence, Likelihoods, Polarity};

    fn p(x: f64) -> Probability {
        Probability::new(x).unwrap()
    }

    fn step(prior: f64, sens: f64, fpr: f64) -> TraceStep {
        TraceStep::compute(DiagnosticUpdate::new(prior, sens, fpr, Polarity::Positive).unwrap()).unwrap()
    }

    fn ctx() -> NarrativeContext {
        NarrativeContext::new("the compound is a carcinogen", "its structure", "a nitrosamine")
    }

    #[test]
    fn default_neutral_band() {
        let t = PatternThresholds::default();
        assert_eq!((t.neutral_low, t.neutral_high), (0.455, 0.545));
    }

    #[test]
    fn classification_examples() {
        let t = PatternThresholds::default();
        assert_eq!(classify_pattern(p(0.215), &t), PatternClass::Surprising);
        assert_eq!(classify_pattern(p(0.50), &t), PatternClass::Neutral);
        assert_eq!(classify_pattern(p(0.69), &t), PatternClass::Anticipated);
        assert_eq!(classify_pattern(p(0.455), &t), PatternClass::Neutral);
        assert_eq!(classify_pattern(p(0.545), &t), PatternClass::Anticipated);
        assert_eq!(classify_pattern(p(0.0), &t), PatternClass::Surprising);
        assert_eq!(classify_pattern(p(1.0), &t), PatternClass::Anticipated);
    }

    #[test]
    fn surprising_step_slots() {
        let r = render_step(&step(0.3, 0.6, 0.05), &ctx(), "a positive assay", Lexicons::builtin()).unwrap();
        assert_eq!(r.template, Template::A);
        assert_eq!(r.pattern, PatternClass::Surprising);
        assert_eq!(r.prior.text, "somewhat unlikely");
        assert_eq!(r.likelihood.text, "better than even");
        assert_eq!(r.change.phrase, "much more likely");
        assert_eq!(r.posterior.text, "highly probable");
    }

    #[test]
    fn neutral_step_slots() {
        let r = render_step(&step(0.4, 0.8, 0.3), &ctx(), "a positive assay", Lexicons::builtin()).unwrap();
        assert_eq!(r.template, Template::B);
        assert_eq!(r.prior.text, "not quite an even chance");
        assert_eq!(r.likelihood.text, "quite likely");
        assert_eq!(r.change.phrase, "somewhat more likely");
        assert_eq!(r.posterior.text, "rather likely");
        assert!(r.body.starts_with("There is *quite likely* of a positive assay"));
    }

    #[test]
    fn single_template_flag() {
        let lex = Lexicons::builtin();
        let cfg = NarrativeConfig {
            single_template: true,
            ..NarrativeConfig::for_lexicons(lex)
        };
        let r = Narrator::with_config(lex, cfg)
            .render_step(&step(0.4, 0.8, 0.3), &ctx(), "a positive assay")
            .unwrap();
        assert_eq!(r.pattern, PatternClass::Neutral);
        assert_eq!(r.template, Template::A);
    }

    #[test]
    fn uninformative_step_is_unchanged() {
        let r = render_step(&step(0.5, 0.7, 0.7), &ctx(), "a positive assay", Lexicons::builtin()).unwrap();
        assert_eq!(r.change.phrase, "essentially unchanged");
    }

    #[test]
    fn incomplete_context_is_rejected() {
        let mut c = ctx();
        c.class_name = "  ".into();
        let err = render_step(&step(0.3, 0.6, 0.05), &c, "x", Lexicons::builtin()).unwrap_err();
        assert!(matches!(err, NarrativeError::IncompleteContext("class_name")));
        let err = render_step(&step(0.3, 0.6, 0.05), &ctx(), "", Lexicons::builtin()).unwrap_err();
        assert!(matches!(err, NarrativeError::IncompleteContext("evidence_text")));
    }

    #[test]
    fn trace_composition() {
        let lex = Lexicons::builtin();
        let empty = apply_sequence(p(0.41), &[]).unwrap();
        let r = render_trace::<&str>(&empty, &ctx(), &[], lex).unwrap();
        assert!(r.text().contains("*not quite an even chance*"));
        assert!(!r.text().contains('\n'));

        let e = Evidence::new(Likelihoods::new(0.8, 0.3).unwrap(), Polarity::Positive);
        let one = apply_sequence(p(0.4), &[e]).unwrap();
        let single = render_step(&one.steps[0], &ctx(), "a positive assay", lex).unwrap();
        assert_eq!(
            render_trace(&one, &ctx(), &["a positive assay"], lex).unwrap().text(),
            single.text()
        );

        let two = apply_sequence(p(0.4), &[e, e]).unwrap();
        let text = render_trace(&two, &ctx(), &["a positive assay", "a second positive assay"], lex)
            .unwrap()
            .text();
        assert_eq!(text.matches("Based only on").count(), 1);

        let err = render_trace(&two, &ctx(), &["only one"], lex).unwrap_err();
        assert!(matches!(err, NarrativeError::EvidenceCount { expected: 2, got: 1 }));
    }

    #[test]
    fn emphasized_spans() {
        assert_eq!(emphasized("a *b* c *d e* f"), vec!["b", "d e"]);
        assert!(emphasized("plain").is_empty());
    }

    #[test]
    fn rendering_is_deterministic() {
        let a = render_step(&step(0.3, 0.6, 0.05), &ctx(), "x", Lexicons::builtin()).unwrap();
        let b = render_step(&step(0.3, 0.6, 0.05), &ctx(), "x", Lexicons::builtin()).unwrap();
        assert_eq!(a.text(), b.text());
    }
}
