//! Verbal explanations of Bayesian belief updates.
//!
//! [`belief`] does the arithmetic, [`lexicon`] maps probabilities and
//! belief changes to words, and [`narrative`] fills explanation templates.
//! On top of those, [`kb`] describes a diagnostic domain, [`advisor`] ranks
//! follow-up tests, [`session`] runs event-sourced consultations and
//! [`corpus`] evaluates classic base-rate problems.

pub mod advisor;
pub mod belief;
pub mod corpus;
pub mod kb;
pub mod lexicon;
pub mod narrative;
pub mod session;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/belief.md")]
    mod belief {}
    #[doc = include_str!("../../../book/src/lexicon.md")]
    mod lexicon {}
    #[doc = include_str!("../../../book/src/change.md")]
    mod change {}
    #[doc = include_str!("../../../book/src/templates.md")]
    mod templates {}
    #[doc = include_str!("../../../book/src/knowledge-bases.md")]
    mod knowledge_bases {}
    #[doc = include_str!("../../../book/src/test-selection.md")]
    mod test_selection {}
    #[doc = include_str!("../../../book/src/consultations.md")]
    mod consultations {}
    #[doc = include_str!("../../../book/src/corpus.md")]
    mod corpus {}
    #[doc = include_str!("../../../book/src/interfaces.md")]
    mod interfaces {}
}
