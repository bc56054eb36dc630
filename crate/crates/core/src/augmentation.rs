//! Augmentation strategies, candidate pools and size-tiered sampling.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clause::{filter_corpus, ClauseHit, FilterError, FilterReport};
use crate::corpus::{Label, NliExample, Sentence, Side};
use crate::morphology::Lexicon;
use crate::transforms::{
    invert, passivize, passivize_inverted, shuffle_tokens, GeneratedSentence, Transformation,
};

/// Three-way label written for generated non-entailment examples.
pub const NON_ENTAILMENT_LABEL: Label = Label::Neutral;

#[derive(Debug, Error)]
pub enum AugmentError {
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error("insufficient candidates: found {found}, needed {needed}")]
    InsufficientCandidates { found: usize, needed: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    InvOrigPremise,
    InvTransHyp,
    PassOrigPremise,
    PassTransHyp,
    PassTransHypEntailOnly,
    PassTransHypNonentailOnly,
    CombinedOrigPremise,
    CombinedTransHyp,
    RandomShuffle,
}

impl Strategy {
    pub const ALL: [Strategy; 9] = [
        Strategy::InvOrigPremise,
        Strategy::InvTransHyp,
        Strategy::PassOrigPremise,
        Strategy::PassTransHyp,
        Strategy::PassTransHypEntailOnly,
        Strategy::PassTransHypNonentailOnly,
        Strategy::CombinedOrigPremise,
        Strategy::CombinedTransHyp,
        Strategy::RandomShuffle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::InvOrigPremise => "inv-orig-premise",
            Strategy::InvTransHyp => "inv-trans-hyp",
            Strategy::PassOrigPremise => "pass-orig-premise",
            Strategy::PassTransHyp => "pass-trans-hyp",
            Strategy::PassTransHypEntailOnly => "pass-trans-hyp-entail-only",
            Strategy::PassTransHypNonentailOnly => "pass-trans-hyp-nonentail-only",
            Strategy::CombinedOrigPremise => "combined-orig-premise",
            Strategy::CombinedTransHyp => "combined-trans-hyp",
            Strategy::RandomShuffle => "random-shuffle",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL.into_iter().find(|st| st.name() == s).ok_or_else(|| format!("unknown strategy {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Small,
    Medium,
    Large,
}

impl Tier {
    pub const ALL: [Tier; 3] = [Tier::Small, Tier::Medium, Tier::Large];

    pub fn size(self) -> usize {
        match self {
            Tier::Small => 101,
            Tier::Medium => 405,
            Tier::Large => 1215,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Tier::Small => "small",
            Tier::Medium => "medium",
            Tier::Large => "large",
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tier {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tier::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| format!("unknown tier {s:?}"))
    }
}

/// Audit record linking a generated example to its corpus row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub id: String,
    pub source_id: String,
    pub transformation: Transformation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub example: NliExample,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildReport {
    pub filter: FilterReport,
    /// Sources dropped because their label does not feed the strategy.
    pub label_skipped: usize,
    /// Sources dropped because a transformation could not inflect the verb.
    pub transform_failed: usize,
    pub candidates: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidatePool {
    pub strategy: Strategy,
    pub candidates: Vec<Candidate>,
    pub report: BuildReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentationSet {
    pub strategy: Strategy,
    pub tier: Tier,
    pub seed: u64,
    pub examples: Vec<NliExample>,
    pub provenance: Vec<Provenance>,
}

fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

struct Emit {
    premise: Sentence,
    hypothesis: GeneratedSentence,
    label: Label,
}

fn transitive_sources(
    corpus: &[NliExample],
    lexicon: &Lexicon,
) -> Result<(Vec<ClauseHit>, FilterReport), FilterError> {
    filter_corpus(corpus, Side::Hypothesis, lexicon)
}

/// Examples from hypothesis transformations, one source row at a time.
fn from_hypotheses(
    corpus: &[NliExample],
    lexicon: &Lexicon,
    report: &mut BuildReport,
    emit: impl Fn(&NliExample, &ClauseHit) -> Option<Result<Vec<Emit>, ()>>,
) -> Result<Vec<(String, String, Emit)>, FilterError> {
    let (hits, filter) = transitive_sources(corpus, lexicon)?;
    report.filter = filter;
    let mut out = Vec::new();
    for hit in &hits {
        let src = &corpus[hit.row];
        match emit(src, hit) {
            None => report.label_skipped += 1,
            Some(Err(())) => report.transform_failed += 1,
            Some(Ok(items)) => out.extend(items.into_iter().map(|e| (src.id.clone(), src.genre.clone(), e))),
        }
    }
    Ok(out)
}

fn single_strategy(
    strategy: Strategy,
    corpus: &[NliExample],
    lexicon: &Lexicon,
    seed: u64,
    report: &mut BuildReport,
) -> Result<Vec<(String, String, Emit)>, FilterError> {
    let lx = lexicon;
    match strategy {
        Strategy::InvOrigPremise => from_hypotheses(corpus, lx, report, |src, hit| {
            if src.label != Label::Entailment {
                return None;
            }
            Some(
                invert(&hit.clause, lx, &src.id)
                    .map(|h| {
                        vec![Emit {
                            premise: src.premise.clone(),
                            hypothesis: h,
                            label: NON_ENTAILMENT_LABEL,
                        }]
                    })
                    .map_err(drop),
            )
        }),
        Strategy::InvTransHyp => from_hypotheses(corpus, lx, report, |src, hit| {
            Some(
                invert(&hit.clause, lx, &src.id)
                    .map(|h| {
                        vec![Emit {
                            premise: src.hypothesis.clone(),
                            hypothesis: h,
                            label: NON_ENTAILMENT_LABEL,
                        }]
                    })
                    .map_err(drop),
            )
        }),
        Strategy::PassOrigPremise => from_hypotheses(corpus, lx, report, |src, hit| {
            Some(
                passivize(&hit.clause, lx, &src.id)
                    .map(|h| vec![Emit { premise: src.premise.clone(), hypothesis: h, label: src.label }])
                    .map_err(drop),
            )
        }),
        Strategy::PassTransHyp | Strategy::PassTransHypEntailOnly | Strategy::PassTransHypNonentailOnly => {
            let positive = strategy != Strategy::PassTransHypNonentailOnly;
            let negative = strategy != Strategy::PassTransHypEntailOnly;
            from_hypotheses(corpus, lx, report, move |src, hit| {
                let mut items = Vec::new();
                if positive {
                    match passivize(&hit.clause, lx, &src.id) {
                        Ok(h) => items.push(Emit {
                            premise: src.hypothesis.clone(),
                            hypothesis: h,
                            label: Label::Entailment,
                        }),
                        Err(_) => return Some(Err(())),
                    }
                }
                if negative {
                    match passivize_inverted(&hit.clause, lx, &src.id) {
                        Ok(h) => items.push(Emit {
                            premise: src.hypothesis.clone(),
                            hypothesis: h,
                            label: NON_ENTAILMENT_LABEL,
                        }),
                        Err(_) => return Some(Err(())),
                    }
                }
                Some(Ok(items))
            })
        }
        Strategy::CombinedOrigPremise | Strategy::CombinedTransHyp => {
            let (inv, pass) = if strategy == Strategy::CombinedOrigPremise {
                (Strategy::InvOrigPremise, Strategy::PassOrigPremise)
            } else {
                (Strategy::InvTransHyp, Strategy::PassTransHyp)
            };
            let mut inv_report = BuildReport::default();
            let mut pool = single_strategy(inv, corpus, lexicon, seed, &mut inv_report)?;
            pool.extend(single_strategy(pass, corpus, lexicon, seed, report)?);
            report.label_skipped += inv_report.label_skipped;
            report.transform_failed += inv_report.transform_failed;
            // Keep a random half, in pool order.
            let mut order: Vec<usize> = (0..pool.len()).collect();
            order.shuffle(&mut seeded(seed, 1));
            let mut keep = vec![false; pool.len()];
            for &i in &order[..pool.len().div_ceil(2)] {
                keep[i] = true;
            }
            Ok(pool.into_iter().zip(keep).filter_map(|(item, k)| k.then_some(item)).collect())
        }
        Strategy::RandomShuffle => {
            report.filter.rows = corpus.len();
            let mut out = Vec::new();
            for (row, src) in corpus.iter().enumerate() {
                if src.genre == "telephone" {
                    report.filter.excluded_genre += 1;
                    continue;
                }
                let mut rng = seeded(seed, 2 + row as u64);
                let premise = shuffle_tokens(&src.premise.tokens, &mut rng);
                let hypothesis = shuffle_tokens(&src.hypothesis.tokens, &mut rng);
                let label = if rng.gen_bool(0.5) { Label::Entailment } else { NON_ENTAILMENT_LABEL };
                report.filter.accepted += 1;
                out.push((
                    src.id.clone(),
                    src.genre.clone(),
                    Emit {
                        premise: Sentence::from_tokens(premise),
                        hypothesis: GeneratedSentence {
                            tokens: hypothesis,
                            provenance: Transformation::Shuffle,
                            source_id: src.id.clone(),
                        },
                        label,
                    },
                ));
            }
            Ok(out)
        }
    }
}

/// Every example a strategy can generate from `corpus`, in corpus order.
///
/// `seed` drives the random choices of the combined and shuffling
/// strategies; other strategies ignore it. Sources that cannot be used are
/// counted in the report.
pub fn build_candidates(
    strategy: Strategy,
    corpus: &[NliExample],
    lexicon: &Lexicon,
    seed: u64,
) -> Result<CandidatePool, AugmentError> {
    let mut report = BuildReport::default();
    let items = single_strategy(strategy, corpus, lexicon, seed, &mut report)?;
    let candidates: Vec<Candidate> = items
        .into_iter()
        .enumerate()
        .map(|(seq, (source_id, genre, e))| {
            let id = format!("aug-{}-{:06}", strategy.name(), seq);
            let transformation = e.hypothesis.provenance;
            Candidate {
                example: NliExample {
                    id: id.clone(),
                    genre,
                    premise: e.premise,
                    hypothesis: Sentence::from_tokens(e.hypothesis.tokens),
                    label: e.label,
                },
                provenance: Provenance { id, source_id, transformation },
            }
        })
        .collect();
    report.candidates = candidates.len();
    Ok(CandidatePool { strategy, candidates, report })
}

/// Seeded sample without replacement. For one pool and seed the tiers are
/// prefixes of the same permutation, so Small ⊂ Medium ⊂ Large.
pub fn sample_tier(pool: &CandidatePool, tier: Tier, seed: u64) -> Result<AugmentationSet, AugmentError> {
    let needed = tier.size();
    let found = pool.candidates.len();
    if found < needed {
        return Err(AugmentError::InsufficientCandidates { found, needed });
    }
    let mut order: Vec<usize> = (0..found).collect();
    order.shuffle(&mut seeded(seed, 0));
    let chosen = &order[..needed];
    Ok(AugmentationSet {
        strategy: pool.strategy,
        tier,
        seed,
        examples: chosen.iter().map(|&i| pool.candidates[i].example.clone()).collect(),
        provenance: chosen.iter().map(|&i| pool.candidates[i].provenance.clone()).collect(),
    })
}

/// Provenance sidecar: one JSON object per generated example.
pub fn render_provenance(records: &[Provenance]) -> String {
    records.iter().map(|r| serde_json::to_string(r).expect("provenance serializes") + "\n").collect()
}
