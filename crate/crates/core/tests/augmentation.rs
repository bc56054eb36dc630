use std::collections::HashSet;

use syntaug::augmentation::{build_candidates, sample_tier, AugmentError, Strategy, Tier};
use syntaug::corpus::{read_corpus, render_corpus, CorpusFormat, Label, NliExample};
use syntaug::morphology::Lexicon;
use syntaug::synth;
use syntaug::transforms::Transformation;

fn fixture() -> Vec<NliExample> {
    read_corpus(format!("{}/fixtures/synth_mnli.tsv", env!("CARGO_MANIFEST_DIR")), CorpusFormat::MnliTsv)
        .unwrap()
}

/// Lowercased tokens with verb forms removed, sorted, plus the verb count.
fn content_bag(tokens: &[String], lex: &Lexicon) -> (Vec<String>, usize) {
    let lower: Vec<String> = tokens.iter().map(|t| t.to_lowercase()).collect();
    let mut rest: Vec<String> = lower.iter().filter(|t| !lex.is_verb_form(t)).cloned().collect();
    rest.sort();
    (rest, lower.len() - lower.iter().filter(|t| !lex.is_verb_form(t)).count())
}

#[test]
fn inversion_keeps_the_token_multiset_up_to_inflection() {
    let lex = Lexicon::bundled();
    let pool = build_candidates(Strategy::InvTransHyp, &fixture(), &lex, 13).unwrap();
    assert!(!pool.candidates.is_empty());
    for c in &pool.candidates {
        let e = &c.example;
        assert_eq!(c.provenance.transformation, Transformation::Inversion);
        assert_eq!(content_bag(&e.premise.tokens, &lex), content_bag(&e.hypothesis.tokens, &lex), "{}", e.id);
        assert_ne!(e.premise.tokens, e.hypothesis.tokens);
    }
}

#[test]
fn random_shuffle_labels_are_balanced() {
    let lex = Lexicon::bundled();
    let corpus = synth::generate_corpus(&synth::bundled_train_words(), &lex, 2000, 5).unwrap();
    let pool = build_candidates(Strategy::RandomShuffle, &corpus, &lex, 13).unwrap();
    let n = pool.candidates.len();
    assert!(n >= 1000, "{n}");
    let ent = pool.candidates.iter().filter(|c| c.example.label == Label::Entailment).count();
    assert!(pool.candidates.iter().all(|c| c.example.label != Label::Contradiction));
    let share = ent as f64 / n as f64;
    assert!((0.45..=0.55).contains(&share), "{share}");
    let sorted = |t: &[String]| {
        let mut t = t.to_vec();
        t.sort();
        t
    };
    for c in &pool.candidates {
        let src = corpus.iter().find(|e| e.id == c.provenance.source_id).unwrap();
        assert_eq!(sorted(&c.example.premise.tokens), sorted(&src.premise.tokens));
        assert_eq!(sorted(&c.example.hypothesis.tokens), sorted(&src.hypothesis.tokens));
    }
}

#[test]
fn combined_sets_mix_both_transformations() {
    let lex = Lexicon::bundled();
    for strategy in [Strategy::CombinedOrigPremise, Strategy::CombinedTransHyp] {
        let pool = build_candidates(strategy, &fixture(), &lex, 13).unwrap();
        let set = sample_tier(&pool, Tier::Small, 13).unwrap();
        let inv = set.provenance.iter().filter(|p| p.transformation == Transformation::Inversion).count();
        let other = set.provenance.len() - inv;
        let n = set.examples.len() as f64;
        assert!(inv as f64 / n >= 0.25 && other as f64 / n >= 0.25, "{strategy:?}: {inv} vs {other}");
        assert_ne!(inv, other);
    }
}

#[test]
fn tiers_nest_and_are_reproducible() {
    let lex = Lexicon::bundled();
    let corpus = synth::generate_corpus(&synth::bundled_train_words(), &lex, 3000, 21).unwrap();
    for strategy in [Strategy::InvOrigPremise, Strategy::PassTransHyp, Strategy::CombinedTransHyp] {
        let pool = build_candidates(strategy, &corpus, &lex, 7).unwrap();
        let sets: Vec<_> = [Tier::Small, Tier::Medium, Tier::Large]
            .into_iter()
            .map(|t| sample_tier(&pool, t, 7).unwrap())
            .collect();
        assert!(sets[1].examples.starts_with(&sets[0].examples));
        assert!(sets[2].examples.starts_with(&sets[1].examples));
        let ids: HashSet<&str> = sets[2].examples.iter().map(|e| e.id.as_str()).collect();
        assert_eq!(ids.len(), 1215);
        let again =
            sample_tier(&build_candidates(strategy, &corpus, &lex, 7).unwrap(), Tier::Large, 7).unwrap();
        assert_eq!(
            render_corpus(&again.examples, CorpusFormat::Jsonl),
            render_corpus(&sets[2].examples, CorpusFormat::Jsonl)
        );
    }
}

#[test]
fn small_pool_is_insufficient() {
    let lex = Lexicon::bundled();
    let mut pool = build_candidates(Strategy::InvTransHyp, &fixture(), &lex, 13).unwrap();
    pool.candidates.truncate(100);
    match sample_tier(&pool, Tier::Small, 13) {
        Err(AugmentError::InsufficientCandidates { found, needed }) => {
            assert_eq!((found, needed), (100, 101))
        }
        other => panic!("{other:?}"),
    }
}
