//! Event-sourced consultation sessions.
//!
//! A session is nothing but a class id and an ordered log of events. The
//! belief trace and the rendered explanations are derived by folding the log
//! through [`Consultant::apply`], which is also the code path used for live
//! mutations, so replaying a log always reproduces the live session.

mod store;

use std::fmt;

use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::advisor::{recommend, AdvisorError, TestRecommendation};
use crate::belief::{BeliefError, BeliefTrace, Polarity, Probability, TraceStep};
use crate::kb::{KbError, KnowledgeBase};
use crate::narrative::{NarrativeContext, NarrativeError, Narrator, Slot, StepRendering};

pub use store::{parse_log, render_log, FileStore, LogRecord, RecordKind};

#[derive(Debug, Error)]
pub enum SessionError {
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error("test `{0}` has already been asserted in this session")]
    DuplicateAssertion(String),
    #[error("nothing to undo")]
    NothingToUndo,
    #[error(transparent)]
    Belief(#[from] BeliefError),
    #[error(transparent)]
    Narrative(#[from] NarrativeError),
    #[error(transparent)]
    Advisor(#[from] AdvisorError),
    #[error("malformed event log at entry {index}: {reason}")]
    MalformedLog { index: usize, reason: String },
    #[error("unknown session `{0}`")]
    UnknownSession(String),
    #[error("session store: {0}")]
    Store(String),
}

impl SessionError {
    /// Stable machine-readable code for error envelopes.
    pub fn code(&self) -> &'static str {
        match self {
            SessionError::Kb(KbError::UnknownClass(_)) => "unknown_class",
            SessionError::Kb(KbError::UnknownTest(_)) => "unknown_test",
            SessionError::Kb(KbError::Uncovered { .. }) => "uncovered_class",
            SessionError::Kb(_) => "invalid_kb",
            SessionError::DuplicateAssertion(_) => "duplicate_assertion",
            SessionError::NothingToUndo => "nothing_to_undo",
            SessionError::Belief(BeliefError::ZeroMarginal { .. }) => "zero_marginal",
            SessionError::Belief(_) => "invalid_probability",
            SessionError::Narrative(_) => "narrative_error",
            SessionError::Advisor(AdvisorError::NoCandidates) => "no_candidates",
            SessionError::Advisor(AdvisorError::DegenerateBelief(_)) => "degenerate_belief",
            SessionError::MalformedLog { .. } => "malformed_log",
            SessionError::UnknownSession(_) => "unknown_session",
            SessionError::Store(_) => "store_error",
        }
    }
}

/// Opaque 128-bit session token, rendered as 32 lowercase hex digits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SessionId(String);

impl SessionId {
    pub fn random() -> Self {
        SessionId(format!("{:032x}", rand::random::<u128>()))
    }

    pub fn parse(s: &str) -> Result<Self, SessionError> {
        if s.len() == 32 && s.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')) {
            Ok(SessionId(s.to_owned()))
        } else {
            Err(SessionError::UnknownSession(s.to_owned()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for SessionId {
    type Error = SessionError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        SessionId::parse(&s)
    }
}

impl From<SessionId> for String {
    fn from(id: SessionId) -> String {
        id.0
    }
}

impl fmt::Display for SessionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Action {
    Asserted { test_id: String, polarity: Polarity },
    Undone,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Event {
    #[serde(flatten)]
    pub action: Action,
    /// ISO-8601, recorded for audit only.
    pub timestamp: String,
}

impl Event {
    pub fn now(action: Action) -> Self {
        Event {
            action,
            timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
        }
    }

    pub fn asserted(test_id: impl Into<String>, polarity: Polarity) -> Self {
        Event::now(Action::Asserted {
            test_id: test_id.into(),
            polarity,
        })
    }

    pub fn undone() -> Self {
        Event::now(Action::Undone)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assertion {
    pub test_id: String,
    pub polarity: Polarity,
}

/// A consultation over one subject of one structural class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Session {
    id: SessionId,
    class_id: String,
    events: Vec<Event>,
    live: Vec<Assertion>,
    trace: BeliefTrace,
    prior_slot: Slot,
    /// Opening sentence, then one paragraph per live assertion.
    rendered: Vec<String>,
    renderings: Vec<StepRendering>,
}

impl Session {
    pub fn id(&self) -> &SessionId {
        &self.id
    }

    pub fn class_id(&self) -> &str {
        &self.class_id
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Assertions not cancelled by an undo, oldest first.
    pub fn assertions(&self) -> &[Assertion] {
        &self.live
    }

    pub fn trace(&self) -> &BeliefTrace {
        &self.trace
    }

    pub fn belief(&self) -> Probability {
        self.trace.belief()
    }

    pub fn prior_slot(&self) -> &Slot {
        &self.prior_slot
    }

    pub fn rendered(&self) -> &[String] {
        &self.rendered
    }

    pub fn renderings(&self) -> &[StepRendering] {
        &self.renderings
    }

    /// The whole explanation so far.
    pub fn explanation(&self) -> String {
        self.rendered.join("\n\n")
    }

    pub fn is_asserted(&self, test_id: &str) -> bool {
        self.live.iter().any(|a| a.test_id == test_id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepOutcome {
    pub belief: Probability,
    pub explanation: String,
    pub rendering: StepRendering,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchPreview {
    pub posterior: Probability,
    pub explanation: String,
    pub rendering: StepRendering,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WhatIf {
    pub test_id: String,
    pub p_positive: Probability,
    /// `None` for an outcome the model says cannot happen.
    pub positive: Option<BranchPreview>,
    pub negative: Option<BranchPreview>,
}

/// Binds a knowledge base and a narrator; every session operation goes
/// through one.
#[derive(Debug, Clone, Copy)]
pub struct Consultant<'a> {
    kb: &'a KnowledgeBase,
    narrator: Narrator<'a>,
}

impl<'a> Consultant<'a> {
    pub fn new(kb: &'a KnowledgeBase, narrator: Narrator<'a>) -> Self {
        Consultant { kb, narrator }
    }

    pub fn kb(&self) -> &'a KnowledgeBase {
        self.kb
    }

    pub fn narrator(&self) -> &Narrator<'a> {
        &self.narrator
    }

    fn context(&self, class_id: &str) -> Result<NarrativeContext, SessionError> {
        Ok(self.kb.narrative_context(class_id)?)
    }

    pub fn create_session(&self, class_id: &str) -> Result<Session, SessionError> {
        self.create_with_id(SessionId::random(), class_id)
    }

    pub fn create_with_id(&self, id: SessionId, class_id: &str) -> Result<Session, SessionError> {
        let prior = self.kb.prior_for(class_id)?;
        let (prior_slot, opening) = self.narrator.opening(prior, &self.context(class_id)?)?;
        Ok(Session {
            id,
            class_id: class_id.to_owned(),
            events: Vec::new(),
            live: Vec::new(),
            trace: BeliefTrace::new(prior),
            prior_slot,
            rendered: vec![opening],
            renderings: Vec::new(),
        })
    }

    /// The step and its rendering that asserting `test_id` would add.
    fn pending_step(
        &self,
        session: &Session,
        test_id: &str,
        polarity: Polarity,
    ) -> Result<StepRendering, SessionError> {
        let evidence = self.kb.evidence_model(test_id, &session.class_id, polarity)?;
        let step = TraceStep::compute(evidence.with_prior(session.belief())).map_err(|e| match e {
            BeliefError::ZeroMarginal { .. } => BeliefError::ZeroMarginal {
                step: Some(session.trace.len()),
            },
            other => other,
        })?;
        let test = self.kb.test(test_id)?;
        Ok(self
            .narrator
            .render_step(&step, &self.context(&session.class_id)?, test.display_name(polarity))?)
    }

    /// Applies one event. Validation happens before any mutation, so a
    /// failed event leaves the session untouched.
    pub fn apply(&self, session: &mut Session, event: Event) -> Result<(), SessionError> {
        match &event.action {
            Action::Asserted { test_id, polarity } => {
                if session.is_asserted(test_id) {
                    return Err(SessionError::DuplicateAssertion(test_id.clone()));
                }
                let rendering = self.pending_step(session, test_id, *polarity)?;
                session
                    .trace
                    .push(self.kb.evidence_model(test_id, &session.class_id, *polarity)?)?;
                session.live.push(Assertion {
                    test_id: test_id.clone(),
                    polarity: *polarity,
                });
                session.rendered.push(rendering.body.clone());
                session.renderings.push(rendering);
            }
            Action::Undone => {
                if session.live.pop().is_none() {
                    return Err(SessionError::NothingToUndo);
                }
                session.trace.steps.pop();
                session.rendered.pop();
                session.renderings.pop();
            }
        }
        session.events.push(event);
        Ok(())
    }

    pub fn assert_result(
        &self,
        session: &mut Session,
        test_id: &str,
        polarity: Polarity,
    ) -> Result<StepOutcome, SessionError> {
        self.apply(session, Event::asserted(test_id, polarity))?;
        let rendering = session.renderings.last().expect("just pushed").clone();
        Ok(StepOutcome {
            belief: session.belief(),
            explanation: rendering.body.clone(),
            rendering,
        })
    }

    pub fn undo(&self, session: &mut Session) -> Result<(), SessionError> {
        self.apply(session, Event::undone())
    }

    /// Both outcomes of `test_id`, without touching the session.
    pub fn what_if(&self, session: &Session, test_id: &str) -> Result<WhatIf, SessionError> {
        let evidence = self.kb.evidence_model(test_id, &session.class_id, Polarity::Positive)?;
        let p_positive = evidence.with_prior(session.belief()).marginal();
        let branch = |polarity| -> Result<Option<BranchPreview>, SessionError> {
            match self.pending_step(session, test_id, polarity) {
                Ok(rendering) => Ok(Some(BranchPreview {
                    posterior: Probability::new(rendering.posterior.value)?,
                    explanation: rendering.body.clone(),
                    rendering,
                })),
                Err(SessionError::Belief(BeliefError::ZeroMarginal { .. })) => Ok(None),
                Err(e) => Err(e),
            }
        };
        Ok(WhatIf {
            test_id: test_id.to_owned(),
            p_positive,
            positive: branch(Polarity::Positive)?,
            negative: branch(Polarity::Negative)?,
        })
    }

    /// Ranks the applicable tests not yet asserted.
    pub fn recommend(&self, session: &Session) -> Result<TestRecommendation, SessionError> {
        let candidates: Vec<(&str, _)> = self
            .kb
            .tests_for(&session.class_id)
            .filter(|t| !session.is_asserted(&t.id))
            .map(|t| (t.id.as_str(), t.per_class[&session.class_id]))
            .collect();
        Ok(recommend(session.belief(), &candidates)?)
    }

    /// Rebuilds a session from its log.
    pub fn replay(&self, id: SessionId, class_id: &str, events: &[Event]) -> Result<Session, SessionError> {
        let mut session = self.create_with_id(id, class_id)?;
        for (index, event) in events.iter().enumerate() {
            self.apply(&mut session, event.clone())
                .map_err(|e| SessionError::MalformedLog {
                    index,
                    reason: e.to_string(),
                })?;
        }
        Ok(session)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::Lexicons;

    fn consultant(kb: &KnowledgeBase) -> Consultant<'_> {
        Consultant::new(kb, Narrator::new(Lexicons::builtin()))
    }

    #[test]
    fn create_examples() {
        let kb = KnowledgeBase::demo();
        let c = consultant(&kb);
        let s = c.create_session("pyrrolizidine").unwrap();
        assert_eq!(s.belief().value(), 0.41);
        assert_eq!(s.rendered().len(), 1);
        assert!(s.rendered()[0].contains("*not quite an even chance*"));
        assert!(matches!(
            c.create_session("dioxin"),
            Err(SessionError::Kb(KbError::UnknownClass(_)))
        ));
        assert_ne!(c.create_session("pyrrolizidine").unwrap().id(), s.id());
    }

    #[test]
    fn assert_matches_composition() {
        let kb = KnowledgeBase::demo();
        let c = consultant(&kb);
        let mut s = c.create_session("pyrrolizidine").unwrap();
        let out = c.assert_result(&mut s, "sce", Polarity::Positive).unwrap();

        let step = TraceStep::compute(
            kb.evidence_model("sce", "pyrrolizidine", Polarity::Positive)
                .unwrap()
                .with_prior(kb.prior_for("pyrrolizidine").unwrap()),
        )
        .unwrap();
        let expected = crate::narrative::render_step(
            &step,
            &kb.narrative_context("pyrrolizidine").unwrap(),
            "a Positive Sister-Chromatid Exchange test",
            Lexicons::builtin(),
        )
        .unwrap();
        assert_eq!(out.belief, step.posterior);
        assert_eq!(out.explanation, expected.body);
        assert_eq!(s.explanation(), expected.text());
    }

    #[test]
    fn duplicate_and_undo() {
        let kb = KnowledgeBase::demo();
        let c = consultant(&kb);
        let mut s = c.create_session("pyrrolizidine").unwrap();
        assert!(matches!(c.undo(&mut s), Err(SessionError::NothingToUndo)));
        c.assert_result(&mut s, "sce", Polarity::Positive).unwrap();
        assert!(matches!(
            c.assert_result(&mut s, "sce", Polarity::Negative),
            Err(SessionError::DuplicateAssertion(_))
        ));
        c.undo(&mut s).unwrap();
        assert_eq!(s.belief().value(), 0.41);
        c.assert_result(&mut s, "sce", Polarity::Negative).unwrap();
    }

    #[test]
    fn undo_restores_previous_state() {
        let kb = KnowledgeBase::demo();
        let c = consultant(&kb);
        let mut s = c.create_session("benz_a_anthracene").unwrap();
        c.assert_result(&mut s, "ames", Polarity::Positive).unwrap();
        let after_a = (s.trace().clone(), s.rendered().to_vec());
        c.assert_result(&mut s, "l5178y", Polarity::Negative).unwrap();
        c.undo(&mut s).unwrap();
        assert_eq!((s.trace().clone(), s.rendered().to_vec()), after_a);
        assert_eq!(s.events().len(), 3);
    }

    #[test]
    fn uncovered_test_is_rejected_without_side_effects() {
        let kb = KnowledgeBase::demo();
        let c = consultant(&kb);
        let mut s = c.create_session("aromatic_amine").unwrap();
        let before = s.clone();
        assert!(matches!(
            c.assert_result(&mut s, "micronucleus", Polarity::Positive),
            Err(SessionError::Kb(KbError::Uncovered { .. }))
        ));
        assert!(matches!(
            c.what_if(&s, "micronucleus"),
            Err(SessionError::Kb(KbError::Uncovered { .. }))
        ));
        assert_eq!(s, before);
    }

    #[test]
    fn what_if_agrees_with_assert() {
        let kb = KnowledgeBase::demo();
        let c = consultant(&kb);
        let mut s = c.create_session("pyrrolizidine").unwrap();
        c.assert_result(&mut s, "ames", Polarity::Negative).unwrap();
        let before = s.clone();
        let w = c.what_if(&s, "micronucleus").unwrap();
        assert_eq!(c.what_if(&s, "micronucleus").unwrap(), w);
        assert_eq!(s, before);
        let expected_marginal = kb
            .evidence_model("micronucleus", "pyrrolizidine", Polarity::Positive)
            .unwrap()
            .with_prior(s.belief())
            .marginal();
        assert_eq!(w.p_positive, expected_marginal);

        let out = c.assert_result(&mut s, "micronucleus", Polarity::Positive).unwrap();
        let pos = w.positive.unwrap();
        assert_eq!(out.belief, pos.posterior);
        assert_eq!(out.explanation, pos.explanation);
    }

    #[test]
    fn replay_examples() {
        let kb = KnowledgeBase::demo();
        let c = consultant(&kb);
        let id = SessionId::random();
        let fresh = c.create_with_id(id.clone(), "pyrrolizidine").unwrap();
        assert_eq!(c.replay(id.clone(), "pyrrolizidine", &[]).unwrap(), fresh);

        let mut s = c.create_with_id(id.clone(), "pyrrolizidine").unwrap();
        c.assert_result(&mut s, "sce", Polarity::Positive).unwrap();
        c.undo(&mut s).unwrap();
        c.assert_result(&mut s, "ames", Polarity::Negative).unwrap();
        c.undo(&mut s).unwrap();
        let replayed = c.replay(id.clone(), "pyrrolizidine", s.events()).unwrap();
        assert_eq!(replayed, s);
        assert_eq!(replayed.trace(), fresh.trace());
        assert_eq!(replayed.rendered(), fresh.rendered());
    }

    #[test]
    fn malformed_log_names_index() {
        let kb = KnowledgeBase::demo();
        let c = consultant(&kb);
        let events = vec![
            Event::asserted("sce", Polarity::Positive),
            Event::undone(),
            Event::undone(),
        ];
        match c.replay(SessionId::random(), "pyrrolizidine", &events) {
            Err(SessionError::MalformedLog { index, .. }) => assert_eq!(index, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn recommendation_excludes_asserted_tests() {
        let kb = KnowledgeBase::demo();
        let c = consultant(&kb);
        let mut s = c.create_session("pyrrolizidine").unwrap();
        assert_eq!(c.recommend(&s).unwrap().ranked.len(), 4);
        c.assert_result(&mut s, "micronucleus", Polarity::Positive).unwrap();
        let r = c.recommend(&s).unwrap();
        assert_eq!(r.ranked.len(), 3);
        assert!(r.ranked.iter().all(|t| t.test_id != "micronucleus"));
        let candidates: Vec<(&str, _)> = ["ames", "l5178y", "sce"]
            .iter()
            .map(|id| (*id, kb.likelihoods(id, "pyrrolizidine").unwrap()))
            .collect();
        assert_eq!(r, recommend(s.belief(), &candidates).unwrap());
    }

    #[test]
    fn session_id_format() {
        let id = SessionId::random();
        assert_eq!(id.as_str().len(), 32);
        assert!(SessionId::parse(id.as_str()).is_ok());
        assert!(SessionId::parse("../etc/passwd").is_err());
        assert!(SessionId::parse("ABCDEF0123456789ABCDEF0123456789").is_err());
    }
}
