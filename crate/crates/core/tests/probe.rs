use syntaug::corpus::{read_corpus, BinaryLabel, CorpusFormat, NliExample};
use syntaug::diagnostics::{generate_diagnostics, Catalog, Heuristic, WordLists};
use syntaug::probe::{
    featurize, run_experiment, train, train_with_history, FeatureVector, ProbeError, TrainConfig, N_FEATURES,
};

fn toks(s: &str) -> Vec<String> {
    s.split_whitespace().map(String::from).collect()
}

fn fixture() -> Vec<NliExample> {
    read_corpus(format!("{}/fixtures/synth_mnli.tsv", env!("CARGO_MANIFEST_DIR")), CorpusFormat::MnliTsv)
        .unwrap()
}

fn toy() -> Vec<(FeatureVector, BinaryLabel)> {
    (0..200)
        .map(|i| {
            let overlap = i % 2 == 0;
            let jitter = (i % 7) as f64 / 20.0;
            let x = FeatureVector {
                overlap_fraction: if overlap { 1.0 } else { 0.3 + jitter },
                is_subsequence: 0.0,
                first_noun_match: f64::from(i % 3 == 0),
                last_noun_match: 0.0,
                aligned_bigram_overlap: jitter,
                length_ratio: 0.5 + jitter,
                bias: 1.0,
            };
            (x, if overlap { BinaryLabel::Entailment } else { BinaryLabel::NonEntailment })
        })
        .collect()
}

#[test]
fn featurize_examples() {
    let s = toks("The judge saw the actor .");
    let f = featurize(&s, &s);
    assert_eq!((f.overlap_fraction, f.is_subsequence, f.aligned_bigram_overlap), (1.0, 1.0, 1.0));

    let f = featurize(&toks("The lawyer saw the actor ."), &toks("The actor saw the lawyer ."));
    assert_eq!((f.overlap_fraction, f.is_subsequence, f.first_noun_match), (1.0, 0.0, 0.0));

    let f = featurize(
        &toks("The managers heard the secretary resigned ."),
        &toks("The managers heard the secretary ."),
    );
    assert_eq!(f.is_subsequence, 1.0);
}

#[test]
fn features_are_bounded_and_finite() {
    for e in fixture().iter().take(200) {
        let f = featurize(&e.premise.tokens, &e.hypothesis.tokens).to_array();
        assert_eq!(f.len(), N_FEATURES);
        assert!(f.iter().all(|v| v.is_finite()));
        assert!(f[..5].iter().all(|v| (0.0..=1.0).contains(v)));
    }
}

#[test]
fn separable_toy_set_is_learned() {
    let data = toy();
    let model = train(&data, &TrainConfig::default()).unwrap();
    assert_eq!(model.weights.len(), N_FEATURES);
    assert!(model.accuracy(&data) >= 0.99);
}

#[test]
fn training_is_bitwise_deterministic() {
    let data = toy();
    let a = train(&data, &TrainConfig::default()).unwrap();
    let b = train(&data, &TrainConfig::default()).unwrap();
    assert_eq!(a, b);
    let bits = |w: &[f64]| w.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.weights), bits(&b.weights));
}

#[test]
fn loss_never_rises() {
    for data in [toy(), syntaug::probe::labelled_features(&fixture())] {
        for seed in 0..5 {
            let config = TrainConfig { seed, ..TrainConfig::default() };
            let (_, history) = train_with_history(&data, &config).unwrap();
            assert_eq!(history.len(), config.epochs + 1);
            for w in history.windows(2) {
                assert!(w[1] <= w[0] + 1e-6, "{} -> {}", w[0], w[1]);
            }
        }
    }
}

#[test]
fn degenerate_datasets_are_rejected() {
    assert!(matches!(train(&[], &TrainConfig::default()), Err(ProbeError::EmptyDataset)));
    let one: Vec<_> = toy().into_iter().filter(|(_, y)| *y == BinaryLabel::Entailment).collect();
    assert!(matches!(train(&one, &TrainConfig::default()), Err(ProbeError::SingleClassDataset(_))));
}

#[test]
fn unaugmented_probe_adopts_the_overlap_heuristic() {
    let diags = generate_diagnostics(&Catalog::bundled(), &WordLists::bundled_eval(), 100, 13).unwrap();
    let config = TrainConfig::default();
    let report = run_experiment(&fixture(), None, &diags, &config).unwrap();
    let acc = |g| report.unaugmented.cell(Heuristic::LexicalOverlap, g).unwrap().accuracy;
    let gap = acc(BinaryLabel::Entailment) - acc(BinaryLabel::NonEntailment);
    assert!(gap >= 0.3, "gap {gap}");
    assert!(report.augmented.is_none());
    assert_eq!(run_experiment(&fixture(), None, &diags, &config).unwrap(), report);
}
