mod common;

use bayeslex::advisor::expected_gain;
use bayeslex::belief::{
    apply_sequence, biased_estimate, posterior, DiagnosticUpdate, Evidence, Likelihoods, Polarity, Probability,
};
use bayeslex::kb::KnowledgeBase;
use bayeslex::lexicon::{ChangeDirection, Lexicons, TermSet, TermSetDocument};
use bayeslex::narrative::Narrator;
use bayeslex::session::{parse_log, render_log, Consultant};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn prob(x: f64) -> Probability {
    Probability::new(x).unwrap()
}

fn interior() -> impl Strategy<Value = f64> {
    0.01f64..0.99
}

fn polarity() -> impl Strategy<Value = Polarity> {
    prop_oneof![Just(Polarity::Positive), Just(Polarity::Negative)]
}

proptest! {
    #[test]
    fn posterior_agrees_with_odds_form(p in interior(), s in interior(), f in interior(), pol in polarity()) {
        let u = DiagnosticUpdate::new(p, s, f, pol).unwrap();
        let (lh, lnh) = observed(s, f, pol);
        let got = posterior(&u).unwrap().value();
        prop_assert!((got - odds_posterior(p, lh, lnh)).abs() <= 1e-12);
    }

    #[test]
    fn order_does_not_matter(
        prior in interior(),
        items in prop::collection::vec((0.05f64..0.95, 0.05f64..0.95, polarity()), 1..7),
        seed in any::<u64>(),
    ) {
        let evidence: Vec<Evidence> = items
            .iter()
            .map(|&(s, f, pol)| Evidence::new(Likelihoods::new(s, f).unwrap(), pol))
            .collect();
        let mut shuffled = evidence.clone();
        rand::seq::SliceRandom::shuffle(&mut shuffled[..], &mut ChaCha8Rng::seed_from_u64(seed));
        let a = apply_sequence(prob(prior), &evidence).unwrap().belief().value();
        let b = apply_sequence(prob(prior), &shuffled).unwrap().belief().value();
        prop_assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
    }

    #[test]
    fn biased_estimate_ignores_prior(p1 in 0.0f64..=1.0, p2 in 0.0f64..=1.0, s in 0.0f64..=1.0, f in 0.0f64..=1.0, pol in polarity()) {
        let a = biased_estimate(&DiagnosticUpdate::new(p1, s, f, pol).unwrap());
        let b = biased_estimate(&DiagnosticUpdate::new(p2, s, f, pol).unwrap());
        prop_assert_eq!(a, b);
        prop_assert_eq!(a.value(), observed(s, f, pol).0);
    }

    #[test]
    fn change_depends_only_on_ratio(a in 0.01f64..0.5, b in 0.01f64..0.5, k in 0.1f64..2.0) {
        let lex = Lexicons::builtin();
        let base = lex.change(prob(a), prob(b)).unwrap();
        let scaled = lex.change(prob(a * k), prob(b * k)).unwrap();
        // Scaling both preserves b / (a + b) up to rounding; skip pairs sitting on a bin edge.
        let r = b / (a + b);
        let near_edge = [0.2, 0.275, 0.35, 0.425, 0.5, 0.575, 0.65, 0.725, 0.8]
            .iter()
            .any(|e| (r - e).abs() < 1e-9);
        prop_assume!(!near_edge);
        prop_assert_eq!(base.phrase, scaled.phrase);
    }

    #[test]
    fn change_is_antisymmetric(a in 0.001f64..0.999, b in 0.001f64..0.999) {
        prop_assume!((a - b).abs() >= 1e-9);
        let lex = Lexicons::builtin();
        let up = lex.change(prob(a), prob(b)).unwrap();
        let down = lex.change(prob(b), prob(a)).unwrap();
        prop_assert_eq!(up.level, down.level);
        let flipped = match up.ratio.direction {
            ChangeDirection::Increasing => ChangeDirection::Decreasing,
            ChangeDirection::Decreasing => ChangeDirection::Increasing,
            ChangeDirection::Unchanged => ChangeDirection::Unchanged,
        };
        prop_assert_eq!(down.ratio.direction, flipped);
    }

    #[test]
    fn probability_mapping_is_total_and_monotone(x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
        let lex = Lexicons::builtin();
        let rank = |p: f64| {
            let phrase = &lex.probability_term(prob(p)).phrase;
            prop_assert_eq!(phrase.as_str(), published_phrase(p));
            Ok(match phrase.as_str() {
                "impossible" => -1,
                "certain" => 11,
                other => PUBLISHED_RANGES.iter().position(|t| t.0 == other).unwrap() as i32,
            })
        };
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        prop_assert!(rank(lo)? <= rank(hi)?);
    }

    #[test]
    fn term_set_round_trips(shift in -0.004f64..0.004) {
        let mut doc = TermSet::default_probability().document().clone();
        for t in &mut doc.terms {
            t.low = ((t.low + shift) * 1e6).round() / 1e6;
            t.high = ((t.high + shift) * 1e6).round() / 1e6;
        }
        let json = doc.to_json();
        let back = TermSetDocument::from_json(&json).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(back.to_json(), json);
        let set = TermSet::from_document(back).unwrap();
        prop_assert_eq!(set.terms().len(), 11);
    }

    #[test]
    fn polarity_swap_mirrors_likelihoods(p in interior(), s in interior(), f in interior(), b in 0.05f64..0.95) {
        let neg = posterior(&DiagnosticUpdate::new(p, s, f, Polarity::Negative).unwrap()).unwrap();
        let pos = posterior(&DiagnosticUpdate::new(p, 1.0 - s, 1.0 - f, Polarity::Positive).unwrap()).unwrap();
        prop_assert!((neg.value() - pos.value()).abs() <= 1e-15);
        let g1 = expected_gain(prob(b), Likelihoods::new(s, f).unwrap()).unwrap();
        let g2 = expected_gain(prob(b), Likelihoods::new(1.0 - s, 1.0 - f).unwrap()).unwrap();
        prop_assert!((g1 - g2).abs() <= 1e-12);
    }

    #[test]
    fn perfect_test_dominates(b in 0.01f64..0.99, s in 0.0f64..=1.0, f in 0.0f64..=1.0) {
        let perfect = expected_gain(prob(b), Likelihoods::new(1.0, 0.0).unwrap()).unwrap();
        let other = expected_gain(prob(b), Likelihoods::new(s, f).unwrap()).unwrap();
        prop_assert!(perfect + 1e-12 >= other);
        prop_assert!((perfect - binary_entropy(b)).abs() <= 1e-12);
    }

    #[test]
    fn replay_reproduces_live_session(seed in any::<u64>(), ops in 0usize..15) {
        let kb = KnowledgeBase::demo();
        let c = Consultant::new(&kb, Narrator::new(Lexicons::builtin()));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_session(&c, &kb, &mut rng, ops);
        let (class_id, events) = parse_log(&render_log(&s, "2026-01-01T00:00:00Z")).unwrap();
        prop_assert_eq!(c.replay(s.id().clone(), &class_id, &events).unwrap(), s);
    }
}
