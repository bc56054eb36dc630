//! Logistic-regression probe over surface features, and the augmentation
//! experiment built on it.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::augmentation::{build_candidates, sample_tier, AugmentError, Strategy, Tier};
use crate::corpus::{BinaryLabel, Label, NliExample};
use crate::diagnostics::{
    evaluate, generate_diagnostics, merge_labels, welch_t_test, Catalog, DiagnosticExample, DiagnosticsError,
    EvaluationReport, Heuristic, StatsError, WordLists,
};
use crate::morphology::Lexicon;
use crate::synth;

pub const FEATURE_NAMES: [&str; 7] = [
    "overlap_fraction",
    "is_subsequence",
    "first_noun_match",
    "last_noun_match",
    "aligned_bigram_overlap",
    "length_ratio",
    "bias",
];
pub const N_FEATURES: usize = FEATURE_NAMES.len();

/// Function words never taken for nouns.
const STOPWORDS: &[&str] = &[
    "a",
    "an",
    "the",
    "this",
    "that",
    "these",
    "those",
    "some",
    "any",
    "each",
    "every",
    "no",
    "all",
    "his",
    "her",
    "its",
    "their",
    "our",
    "my",
    "your",
    "he",
    "she",
    "it",
    "they",
    "we",
    "i",
    "you",
    "him",
    "them",
    "us",
    "me",
    "who",
    "whom",
    "which",
    "what",
    "and",
    "or",
    "but",
    "if",
    "because",
    "although",
    "though",
    "while",
    "since",
    "unless",
    "whether",
    "before",
    "after",
    "is",
    "are",
    "was",
    "were",
    "be",
    "been",
    "being",
    "am",
    "do",
    "does",
    "did",
    "has",
    "have",
    "had",
    "not",
    "by",
    "of",
    "in",
    "on",
    "at",
    "near",
    "behind",
    "beside",
    "to",
    "from",
    "with",
    "for",
    "under",
    "over",
    "as",
    "into",
    "across",
    "inside",
    "outside",
    "there",
    "also",
    "probably",
    "certainly",
    "clearly",
    "obviously",
    "definitely",
    "undoubtedly",
    "maybe",
    "hopefully",
    "supposedly",
    "perhaps",
];

#[derive(Debug, thiserror::Error)]
pub enum ProbeError {
    #[error("training set is empty")]
    EmptyDataset,
    #[error("training set contains only {0:?} examples")]
    SingleClassDataset(BinaryLabel),
    #[error("base corpus is unbalanced: {entailment} entailment of {total}")]
    Unbalanced { entailment: usize, total: usize },
    #[error(transparent)]
    Augment(#[from] AugmentError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub overlap_fraction: f64,
    pub is_subsequence: f64,
    pub first_noun_match: f64,
    pub last_noun_match: f64,
    pub aligned_bigram_overlap: f64,
    pub length_ratio: f64,
    pub bias: f64,
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; N_FEATURES] {
        [
            self.overlap_fraction,
            self.is_subsequence,
            self.first_noun_match,
            self.last_noun_match,
            self.aligned_bigram_overlap,
            self.length_ratio,
            self.bias,
        ]
    }
}

/// Lowercases tokens and drops leading and trailing punctuation; tokens
/// that are pure punctuation disappear.
fn normalize<S: AsRef<str>>(tokens: &[S]) -> Vec<String> {
    tokens
        .iter()
        .map(|t| t.as_ref().trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase())
        .filter(|t| !t.is_empty())
        .collect()
}

const DETERMINERS: &[&str] = &[
    "a", "an", "the", "this", "that", "these", "those", "some", "each", "every", "any", "no", "his", "her",
    "its", "their", "our", "my", "your",
];

fn is_content(t: &str) -> bool {
    !STOPWORDS.contains(&t) && !t.chars().all(|c| c.is_ascii_digit())
}

fn verbs() -> &'static Lexicon {
    static LEXICON: OnceLock<Lexicon> = OnceLock::new();
    LEXICON.get_or_init(Lexicon::bundled)
}

/// Positions of likely noun heads: content words that are not verb forms
/// (unless right after a determiner) and are not followed by another
/// non-verb content word, which skips prenominal modifiers.
fn noun_heads(xs: &[String]) -> Vec<usize> {
    let lex = verbs();
    let nominal = |i: usize| {
        is_content(&xs[i])
            && (!lex.is_verb_form(&xs[i]) || (i > 0 && DETERMINERS.contains(&xs[i - 1].as_str())))
    };
    (0..xs.len())
        .filter(|&i| nominal(i))
        .filter(|&i| i + 1 == xs.len() || !(is_content(&xs[i + 1]) && !lex.is_verb_form(&xs[i + 1])))
        .collect()
}

fn fraction(hits: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        hits as f64 / total as f64
    }
}

/// Surface features of a premise/hypothesis pair. Fractions over an empty
/// hypothesis are 0.
pub fn featurize<S: AsRef<str>>(premise: &[S], hypothesis: &[S]) -> FeatureVector {
    let p = normalize(premise);
    let h = normalize(hypothesis);
    let pset: HashSet<&str> = p.iter().map(String::as_str).collect();
    let overlap = fraction(h.iter().filter(|t| pset.contains(t.as_str())).count(), h.len());
    let contiguous = !h.is_empty() && p.windows(h.len()).any(|w| w == h.as_slice());
    let (ph, hh) = (noun_heads(&p), noun_heads(&h));
    let first = |xs: &[String], heads: &[usize]| heads.first().map(|&i| xs[i].clone());
    let last = |xs: &[String], heads: &[usize]| heads.last().map(|&i| xs[i].clone());
    let matches = |a: Option<String>, b: Option<String>| match (a, b) {
        (Some(a), Some(b)) if a == b => 1.0,
        _ => 0.0,
    };
    let bigrams = if h.len() < 2 {
        overlap
    } else {
        let pb: HashSet<(&str, &str)> = p.windows(2).map(|w| (w[0].as_str(), w[1].as_str())).collect();
        let hits = h.windows(2).filter(|w| pb.contains(&(w[0].as_str(), w[1].as_str()))).count();
        fraction(hits, h.len() - 1)
    };
    FeatureVector {
        overlap_fraction: overlap,
        is_subsequence: f64::from(u8::from(contiguous)),
        first_noun_match: matches(first(&p, &ph), first(&h, &hh)),
        last_noun_match: matches(last(&p, &ph), last(&h, &hh)),
        aligned_bigram_overlap: bigrams,
        length_ratio: fraction(h.len(), p.len()),
        bias: 1.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { epochs: 50, learning_rate: 0.1, seed: 13 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeModel {
    pub weights: Vec<f64>,
    /// FNV-1a digest of the training features and labels.
    pub trained_on: String,
    pub seed: u64,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn target(label: BinaryLabel) -> f64 {
    match label {
        BinaryLabel::Entailment => 1.0,
        BinaryLabel::NonEntailment => 0.0,
    }
}

impl ProbeModel {
    /// Probability of entailment.
    pub fn probability(&self, x: &FeatureVector) -> f64 {
        let z: f64 = self.weights.iter().zip(x.to_array()).map(|(w, v)| w * v).sum();
        sigmoid(z)
    }

    pub fn predict(&self, x: &FeatureVector) -> BinaryLabel {
        if self.probability(x) >= 0.5 {
            BinaryLabel::Entailment
        } else {
            BinaryLabel::NonEntailment
        }
    }

    pub fn accuracy(&self, data: &[(FeatureVector, BinaryLabel)]) -> f64 {
        let hits = data.iter().filter(|(x, y)| self.predict(x) == *y).count();
        fraction(hits, data.len())
    }

    /// Mean logistic loss.
    pub fn loss(&self, data: &[(FeatureVector, BinaryLabel)]) -> f64 {
        let total: f64 = data
            .iter()
            .map(|(x, y)| {
                let p = self.probability(x).clamp(1e-15, 1.0 - 1e-15);
                let t = target(*y);
                -(t * p.ln() + (1.0 - t) * (1.0 - p).ln())
            })
            .sum();
        total / data.len().max(1) as f64
    }
}

fn fingerprint(data: &[(FeatureVector, BinaryLabel)]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: &[u8]| {
        for b in bytes {
            h ^= u64::from(*b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    };
    for (x, y) in data {
        for v in x.to_array() {
            eat(&v.to_bits().to_le_bytes());
        }
        eat(&[u8::from(*y == BinaryLabel::Entailment)]);
    }
    format!("{h:016x}")
}

/// Trains and returns the model with the training loss before the first
/// epoch and after each one.
///
/// Stochastic gradient descent on the logistic loss, one update per example
/// in an order reshuffled every epoch from `seed`; results depend only on the
/// inputs and the seed. An epoch that would raise the training loss is
/// undone and the step size halved, so the recorded loss never increases.
pub fn train_with_history(
    data: &[(FeatureVector, BinaryLabel)],
    config: &TrainConfig,
) -> Result<(ProbeModel, Vec<f64>), ProbeError> {
    let Some((_, first)) = data.first() else {
        return Err(ProbeError::EmptyDataset);
    };
    if data.iter().all(|(_, y)| y == first) {
        return Err(ProbeError::SingleClassDataset(*first));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = ProbeModel {
        weights: (0..N_FEATURES).map(|_| rng.gen_range(-0.01..0.01)).collect(),
        trained_on: fingerprint(data),
        seed: config.seed,
    };
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut loss = model.loss(data);
    let mut history = vec![loss];
    let mut rate = config.learning_rate;
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        let previous = model.weights.clone();
        for &i in &order {
            let (x, y) = &data[i];
            let err = model.probability(x) - target(*y);
            for (w, v) in model.weights.iter_mut().zip(x.to_array()) {
                *w -= rate * err * v;
            }
        }
        let next = model.loss(data);
        if next <= loss {
            loss = next;
        } else {
            model.weights = previous;
            rate /= 2.0;
        }
        history.push(loss);
    }
    Ok((model, history))
}

pub fn train(data: &[(FeatureVector, BinaryLabel)], config: &TrainConfig) -> Result<ProbeModel, ProbeError> {
    train_with_history(data, config).map(|(m, _)| m)
}

/// Features and merged gold labels of a corpus.
pub fn labelled_features(examples: &[NliExample]) -> Vec<(FeatureVector, BinaryLabel)> {
    examples
        .iter()
        .map(|e| (featurize(&e.premise.tokens, &e.hypothesis.tokens), merge_labels(e.label)))
        .collect()
}

/// Three-way predictions for the diagnostics, with non-entailment written
/// as neutral.
pub fn predict_diagnostics(model: &ProbeModel, diagnostics: &[DiagnosticExample]) -> HashMap<String, Label> {
    diagnostics
        .iter()
        .map(|d| {
            let label = match model.predict(&featurize(&d.premise, &d.hypothesis)) {
                BinaryLabel::Entailment => Label::Entailment,
                BinaryLabel::NonEntailment => Label::Neutral,
            };
            (d.id.clone(), label)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub unaugmented: EvaluationReport,
    pub augmented: Option<EvaluationReport>,
    pub unaugmented_model: ProbeModel,
    pub augmented_model: Option<ProbeModel>,
}

/// Largest allowed distance of the base entailment share from one half.
pub const BALANCE_TOLERANCE: f64 = 0.10;

fn check_balance(base: &[NliExample]) -> Result<(), ProbeError> {
    let entailment = base.iter().filter(|e| merge_labels(e.label) == BinaryLabel::Entailment).count();
    let share = fraction(entailment, base.len());
    if base.is_empty() || (share - 0.5).abs() > BALANCE_TOLERANCE {
        return Err(ProbeError::Unbalanced { entailment, total: base.len() });
    }
    Ok(())
}

/// Trains on `base` and, if given, on `base` plus `augmentation`, then
/// scores both probes on the diagnostics.
pub fn run_experiment(
    base: &[NliExample],
    augmentation: Option<&[NliExample]>,
    diagnostics: &[DiagnosticExample],
    config: &TrainConfig,
) -> Result<ExperimentReport, ProbeError> {
    check_balance(base)?;
    let base_data = labelled_features(base);
    let unaugmented_model = train(&base_data, config)?;
    let unaugmented = evaluate(&predict_diagnostics(&unaugmented_model, diagnostics), diagnostics)?;
    let (augmented, augmented_model) = match augmentation {
        Some(extra) => {
            let mut data = base_data;
            data.extend(labelled_features(extra));
            let model = train(&data, config)?;
            let report = evaluate(&predict_diagnostics(&model, diagnostics), diagnostics)?;
            (Some(report), Some(model))
        }
        None => (None, None),
    };
    Ok(ExperimentReport { unaugmented, augmented, unaugmented_model, augmented_model })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiSeedConfig {
    pub seeds: Vec<u64>,
    /// Rows of the synthetic training corpus per seed.
    pub base_rows: usize,
    /// Rows of the held-out in-distribution test corpus per seed.
    pub heldout_rows: usize,
    pub n_per_subcase: usize,
    pub strategy: Strategy,
    pub tier: Tier,
    pub epochs: usize,
    pub learning_rate: f64,
}

impl Default for MultiSeedConfig {
    fn default() -> Self {
        Self {
            seeds: vec![13, 14, 15, 16, 17],
            base_rows: 2000,
            heldout_rows: 1000,
            n_per_subcase: 100,
            strategy: Strategy::InvTransHyp,
            tier: Tier::Medium,
            epochs: 50,
            learning_rate: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRun {
    pub seed: u64,
    pub unaugmented: EvaluationReport,
    pub augmented: EvaluationReport,
    pub in_distribution_unaugmented: f64,
    pub in_distribution_augmented: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub name: String,
    pub unaugmented_mean: f64,
    pub augmented_mean: f64,
    /// Welch two-sided p-value across seeds; `None` when undefined.
    pub p_value: Option<f64>,
}

impl Comparison {
    fn new(name: String, a: &[f64], b: &[f64]) -> Self {
        let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
        Self { name, unaugmented_mean: mean(a), augmented_mean: mean(b), p_value: welch_t_test(a, b).ok() }
    }

    pub fn delta(&self) -> f64 {
        self.augmented_mean - self.unaugmented_mean
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiSeedReport {
    pub config: MultiSeedConfig,
    pub runs: Vec<SeedRun>,
    /// One entry per (heuristic, gold) cell, named `heuristic/gold`.
    pub cells: Vec<Comparison>,
    /// One entry per subcase, named by its subcase key.
    pub subcases: Vec<Comparison>,
    pub in_distribution: Comparison,
}

impl MultiSeedReport {
    pub fn cell(&self, heuristic: Heuristic, gold: BinaryLabel) -> Option<&Comparison> {
        let name = format!("{}/{}", heuristic.as_str(), gold.as_str());
        self.cells.iter().find(|c| c.name == name)
    }

    pub fn subcase(&self, key: &str) -> Option<&Comparison> {
        self.subcases.iter().find(|c| c.name == key)
    }

    /// Plain-text comparison table.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<48} {:>8} {:>8} {:>8} {:>10}", "cell", "unaug", "aug", "delta", "p");
        let rows = self.cells.iter().chain(std::iter::once(&self.in_distribution)).chain(&self.subcases);
        for c in rows {
            let p = c.p_value.map_or_else(|| "-".to_string(), |p| format!("{p:.2e}"));
            let _ = writeln!(
                out,
                "{:<48} {:>8.3} {:>8.3} {:>+8.3} {:>10}",
                c.name,
                c.unaugmented_mean,
                c.augmented_mean,
                c.delta(),
                p
            );
        }
        out
    }
}

/// One seed of the multi-seed experiment. The seed drives corpus
/// synthesis, augmentation sampling, diagnostics and training.
pub fn run_seed(config: &MultiSeedConfig, seed: u64) -> Result<SeedRun, ProbeError> {
    let lexicon = Lexicon::bundled();
    let train_words = synth::bundled_train_words();
    let base = synth::generate_corpus(&train_words, &lexicon, config.base_rows, seed)?;
    let heldout =
        synth::generate_corpus(&train_words, &lexicon, config.heldout_rows, seed ^ 0x5bd1_e995_0000_0000)?;
    let diagnostics =
        generate_diagnostics(&Catalog::bundled(), &WordLists::bundled_eval(), config.n_per_subcase, seed)?;
    let pool = build_candidates(config.strategy, &base, &lexicon, seed)?;
    let set = sample_tier(&pool, config.tier, seed)?;
    let train_config = TrainConfig { epochs: config.epochs, learning_rate: config.learning_rate, seed };
    let report = run_experiment(&base, Some(&set.examples), &diagnostics, &train_config)?;
    let heldout = labelled_features(&heldout);
    let augmented_model = report.augmented_model.expect("augmentation was given");
    Ok(SeedRun {
        seed,
        unaugmented: report.unaugmented,
        augmented: report.augmented.expect("augmentation was given"),
        in_distribution_unaugmented: report.unaugmented_model.accuracy(&heldout),
        in_distribution_augmented: augmented_model.accuracy(&heldout),
    })
}

#[cfg(not(target_arch = "wasm32"))]
fn run_all(config: &MultiSeedConfig) -> Vec<Result<SeedRun, ProbeError>> {
    std::thread::scope(|s| {
        let handles: Vec<_> =
            config.seeds.iter().map(|&seed| s.spawn(move || run_seed(config, seed))).collect();
        handles.into_iter().map(|h| h.join().expect("seed worker panicked")).collect()
    })
}

#[cfg(target_arch = "wasm32")]
fn run_all(config: &MultiSeedConfig) -> Vec<Result<SeedRun, ProbeError>> {
    config.seeds.iter().map(|&s| run_seed(config, s)).collect()
}

/// Runs every seed (in parallel where threads are available) and compares
/// unaugmented with augmented accuracy per cell, per subcase and in
/// distribution.
pub fn run_multi_seed(config: &MultiSeedConfig) -> Result<MultiSeedReport, ProbeError> {
    let runs = run_all(config).into_iter().collect::<Result<Vec<_>, _>>()?;
    let Some(first) = runs.first() else {
        return Err(ProbeError::Stats(StatsError::DegenerateSample("no seeds")));
    };
    let cells = first
        .unaugmented
        .cells
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let a: Vec<f64> = runs.iter().map(|r| r.unaugmented.cells[i].accuracy).collect();
            let b: Vec<f64> = runs.iter().map(|r| r.augmented.cells[i].accuracy).collect();
            Comparison::new(format!("{}/{}", c.heuristic.as_str(), c.gold.as_str()), &a, &b)
        })
        .collect();
    let subcases = first
        .unaugmented
        .subcases
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let a: Vec<f64> = runs.iter().map(|r| r.unaugmented.subcases[i].accuracy).collect();
            let b: Vec<f64> = runs.iter().map(|r| r.augmented.subcases[i].accuracy).collect();
            let key = crate::diagnostics::subcase_key(s.heuristic, s.gold, &s.subcase);
            Comparison::new(key, &a, &b)
        })
        .collect();
    let a: Vec<f64> = runs.iter().map(|r| r.in_distribution_unaugmented).collect();
    let b: Vec<f64> = runs.iter().map(|r| r.in_distribution_augmented).collect();
    Ok(MultiSeedReport {
        config: config.clone(),
        cells,
        subcases,
        in_distribution: Comparison::new("in-distribution".to_string(), &a, &b),
        runs,
    })
}
