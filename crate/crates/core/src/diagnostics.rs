//! Template-generated heuristic diagnostics and their evaluation.
//!
//! The catalog and word lists are plain text (see `data/hans_templates.tsv`
//! and `data/words_eval.txt` for the grammar). Evaluation merges three-way
//! predictions into entailment / non-entailment and reports accuracy per
//! (heuristic, gold label) cell and per subcase.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::corpus::{BinaryLabel, Label, UnknownLabel};

const BUNDLED_CATALOG: &str = include_str!("../data/hans_templates.tsv");
const BUNDLED_EVAL_WORDS: &str = include_str!("../data/words_eval.txt");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagnosticsError {
    #[error("catalog line {line}: {reason}")]
    BadCatalogLine { line: usize, reason: String },
    #[error("word list line {line}: {reason}")]
    BadWordList { line: usize, reason: String },
    #[error("catalog is missing subcases: {0:?}")]
    CatalogIncomplete(Vec<String>),
    #[error("word class {class:?} cannot fill {needed} distinct slots")]
    WordListTooSmall { class: String, needed: usize },
    #[error("no prediction for example {0}")]
    MissingPrediction(String),
    #[error("predictions line {line}: {reason}")]
    BadPrediction { line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("degenerate sample: {0}")]
    DegenerateSample(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Heuristic {
    LexicalOverlap,
    Subsequence,
    Constituent,
}

impl Heuristic {
    pub const ALL: [Heuristic; 3] =
        [Heuristic::LexicalOverlap, Heuristic::Subsequence, Heuristic::Constituent];

    pub fn as_str(self) -> &'static str {
        match self {
            Heuristic::LexicalOverlap => "lexical_overlap",
            Heuristic::Subsequence => "subsequence",
            Heuristic::Constituent => "constituent",
        }
    }
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Heuristic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Heuristic::ALL.into_iter().find(|h| h.as_str() == s).ok_or_else(|| format!("unknown heuristic {s:?}"))
    }
}

use BinaryLabel::{Entailment as E, NonEntailment as N};
use Heuristic::{Constituent as C, LexicalOverlap as L, Subsequence as S};

/// The thirty subcases every catalog must provide.
pub const SUBCASE_INVENTORY: [(Heuristic, BinaryLabel, &str); 30] = [
    (L, N, "subject-object swap"),
    (L, N, "sentences with PPs"),
    (L, N, "sentences with relative clauses"),
    (L, N, "passives"),
    (L, N, "conjunctions"),
    (L, E, "untangling relative clauses"),
    (L, E, "sentences with PPs"),
    (L, E, "sentences with relative clauses"),
    (L, E, "conjunctions"),
    (L, E, "passives"),
    (S, N, "NP/S"),
    (S, N, "PP on subject"),
    (S, N, "relative clause on subject"),
    (S, N, "MV/RR"),
    (S, N, "NP/Z"),
    (S, E, "conjunctions"),
    (S, E, "adjectives"),
    (S, E, "understood argument"),
    (S, E, "relative clause on object"),
    (S, E, "PP on object"),
    (C, N, "embedded under preposition"),
    (C, N, "outside embedded clause"),
    (C, N, "embedded under verb"),
    (C, N, "disjunction"),
    (C, N, "adverbs"),
    (C, E, "embedded under preposition"),
    (C, E, "outside embedded clause"),
    (C, E, "embedded under verb"),
    (C, E, "conjunction"),
    (C, E, "adverbs"),
];

/// `heuristic/gold/name`, unique across the inventory.
pub fn subcase_key(heuristic: Heuristic, gold: BinaryLabel, name: &str) -> String {
    format!("{heuristic}/{gold}/{name}")
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternToken {
    Literal(String),
    Slot { class: String, index: u32 },
}

fn parse_pattern(text: &str) -> Result<Vec<PatternToken>, String> {
    let mut out = Vec::new();
    for tok in text.split_whitespace() {
        if let Some(inner) = tok.strip_prefix('<') {
            let inner = inner.strip_suffix('>').ok_or_else(|| format!("unterminated slot {tok:?}"))?;
            let (class, index) =
                inner.split_once(':').ok_or_else(|| format!("slot {tok:?} lacks an index"))?;
            let index = index.parse().map_err(|_| format!("slot {tok:?} has a non-numeric index"))?;
            if class.is_empty() {
                return Err(format!("slot {tok:?} has no class"));
            }
            out.push(PatternToken::Slot { class: class.to_string(), index });
        } else {
            out.push(PatternToken::Literal(tok.to_string()));
        }
    }
    if out.is_empty() {
        return Err("empty pattern".into());
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubcaseTemplate {
    pub heuristic: Heuristic,
    pub gold: BinaryLabel,
    pub name: String,
    pub premise: Vec<PatternToken>,
    pub hypothesis: Vec<PatternToken>,
}

impl SubcaseTemplate {
    pub fn key(&self) -> String {
        subcase_key(self.heuristic, self.gold, &self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    pub subcases: Vec<SubcaseTemplate>,
}

impl Catalog {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_CATALOG).expect("bundled catalog is well-formed")
    }

    pub fn parse(text: &str) -> Result<Self, DiagnosticsError> {
        let mut subcases = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let bad = |reason: String| DiagnosticsError::BadCatalogLine { line: i + 1, reason };
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 5 {
                return Err(bad(format!("expected 5 fields, found {}", f.len())));
            }
            subcases.push(SubcaseTemplate {
                heuristic: f[0].parse().map_err(bad)?,
                gold: f[1].parse().map_err(|e: UnknownLabel| bad(e.to_string()))?,
                name: f[2].trim().to_string(),
                premise: parse_pattern(f[3]).map_err(bad)?,
                hypothesis: parse_pattern(f[4]).map_err(bad)?,
            });
        }
        Ok(Self { subcases })
    }

    /// Inventory keys with no template in this catalog.
    pub fn missing_subcases(&self) -> Vec<String> {
        let have: HashSet<String> = self.subcases.iter().map(SubcaseTemplate::key).collect();
        SUBCASE_INVENTORY
            .iter()
            .map(|(h, g, n)| subcase_key(*h, *g, n))
            .filter(|k| !have.contains(k))
            .collect()
    }
}

/// One word-list entry: a single form, or `singular/plural` for nouns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordEntry {
    pub forms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordLists {
    classes: BTreeMap<String, Vec<WordEntry>>,
}

impl WordLists {
    /// Evaluation vocabulary shipped with the crate.
    pub fn bundled_eval() -> Self {
        Self::parse(BUNDLED_EVAL_WORDS).expect("bundled word lists are well-formed")
    }

    /// Lines of the form `class: entry entry ...`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, DiagnosticsError> {
        let mut classes = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (class, words) = line.split_once(':').ok_or(DiagnosticsError::BadWordList {
                line: i + 1,
                reason: "expected `class: words`".into(),
            })?;
            let entries: Vec<WordEntry> = words
                .split_whitespace()
                .map(|w| WordEntry { forms: w.split('/').map(str::to_string).collect() })
                .collect();
            if entries.is_empty() {
                return Err(DiagnosticsError::BadWordList {
                    line: i + 1,
                    reason: format!("class {class:?} is empty"),
                });
            }
            classes.insert(class.trim().to_string(), entries);
        }
        Ok(Self { classes })
    }

    pub fn class(&self, name: &str) -> Option<&[WordEntry]> {
        self.classes.get(name).map(Vec::as_slice)
    }

    pub fn classes(&self) -> impl Iterator<Item = (&str, &[WordEntry])> {
        self.classes.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagnosticExample {
    pub id: String,
    pub premise: Vec<String>,
    pub hypothesis: Vec<String>,
    pub gold: BinaryLabel,
    pub heuristic: Heuristic,
    pub subcase: String,
}

impl DiagnosticExample {
    pub fn key(&self) -> String {
        subcase_key(self.heuristic, self.gold, &self.subcase)
    }
}

/// How a slot maps onto the word lists.
#[derive(Debug, Clone, PartialEq, Eq)]
enum SlotKind {
    /// Plain word from `class`; `number` forces singular (0) or plural (1).
    Word { class: String, number: Option<usize> },
    /// `was`/`were` agreeing with noun slot of the same index.
    BePast,
}

fn slot_kind(class: &str) -> SlotKind {
    if class == "be-past" {
        return SlotKind::BePast;
    }
    if let Some(base) = class.strip_suffix("-sg") {
        return SlotKind::Word { class: base.into(), number: Some(0) };
    }
    if let Some(base) = class.strip_suffix("-pl") {
        return SlotKind::Word { class: base.into(), number: Some(1) };
    }
    SlotKind::Word { class: class.into(), number: None }
}

/// Slot variables of one template, in first-appearance order.
#[derive(Debug)]
struct Variables {
    /// (class, index, forced number)
    vars: Vec<(String, u32, Option<usize>)>,
}

impl Variables {
    fn of(t: &SubcaseTemplate) -> Self {
        let mut vars: Vec<(String, u32, Option<usize>)> = Vec::new();
        for tok in t.premise.iter().chain(&t.hypothesis) {
            if let PatternToken::Slot { class, index } = tok {
                if let SlotKind::Word { class, number } = slot_kind(class) {
                    match vars.iter_mut().find(|(c, i, _)| *c == class && i == index) {
                        Some(v) => v.2 = v.2.or(number),
                        None => vars.push((class, *index, number)),
                    }
                }
            }
        }
        Self { vars }
    }
}

/// Word choice for one example: (class, index) -> (entry index, form index).
type Assignment = HashMap<(String, u32), (usize, usize)>;

fn space_size(vars: &Variables, words: &WordLists) -> Result<f64, DiagnosticsError> {
    let mut per_class: BTreeMap<&str, usize> = BTreeMap::new();
    let mut size = 1f64;
    for (class, _, number) in &vars.vars {
        let entries = words
            .class(class)
            .ok_or_else(|| DiagnosticsError::WordListTooSmall { class: class.clone(), needed: 1 })?;
        let used = per_class.entry(class).or_default();
        if *used >= entries.len() {
            return Err(DiagnosticsError::WordListTooSmall { class: class.clone(), needed: *used + 1 });
        }
        size *= (entries.len() - *used) as f64;
        *used += 1;
        if number.is_none() && entries.iter().all(|e| e.forms.len() > 1) {
            size *= 2.0;
        }
    }
    Ok(size)
}

fn draw(vars: &Variables, words: &WordLists, rng: &mut ChaCha8Rng) -> Assignment {
    let mut taken: HashMap<&str, HashSet<usize>> = HashMap::new();
    let mut out = Assignment::new();
    for (class, index, number) in &vars.vars {
        let entries = words.class(class).expect("checked by space_size");
        let used = taken.entry(class).or_default();
        let free: Vec<usize> = (0..entries.len()).filter(|i| !used.contains(i)).collect();
        let pick = *free.choose(rng).expect("checked by space_size");
        used.insert(pick);
        let n_forms = entries[pick].forms.len();
        let form = match number {
            Some(n) => (*n).min(n_forms - 1),
            None if n_forms > 1 => rng.gen_range(0..n_forms),
            None => 0,
        };
        out.insert((class.clone(), *index), (pick, form));
    }
    out
}

fn render(pattern: &[PatternToken], a: &Assignment, words: &WordLists) -> Vec<String> {
    let mut out: Vec<String> = pattern
        .iter()
        .map(|tok| match tok {
            PatternToken::Literal(s) => s.clone(),
            PatternToken::Slot { class, index } => match slot_kind(class) {
                SlotKind::BePast => {
                    let plural = a.get(&("noun".to_string(), *index)).map_or(0, |x| x.1);
                    if plural == 1 { "were" } else { "was" }.to_string()
                }
                SlotKind::Word { class, .. } => {
                    let (entry, form) = a[&(class.clone(), *index)];
                    words.class(&class).expect("drawn")[entry].forms[form].clone()
                }
            },
        })
        .collect();
    if let Some(first) = out.first_mut() {
        let mut chars = first.chars();
        if let Some(c) = chars.next() {
            *first = c.to_uppercase().chain(chars).collect();
        }
    }
    out
}

/// `n_per_subcase` examples for every catalog subcase, in catalog order.
///
/// Each subcase draws from its own seeded stream, and a subcase repeats a
/// (premise, hypothesis) pair only after its space of distinct fillings is
/// exhausted.
pub fn generate_diagnostics(
    catalog: &Catalog,
    words: &WordLists,
    n_per_subcase: usize,
    seed: u64,
) -> Result<Vec<DiagnosticExample>, DiagnosticsError> {
    let missing = catalog.missing_subcases();
    if !missing.is_empty() {
        return Err(DiagnosticsError::CatalogIncomplete(missing));
    }
    let mut out = Vec::with_capacity(n_per_subcase * catalog.subcases.len());
    for (ci, t) in catalog.subcases.iter().enumerate() {
        let vars = Variables::of(t);
        let space = space_size(&vars, words)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(ci as u64);
        let mut seen: HashSet<(Vec<String>, Vec<String>)> = HashSet::new();
        let mut produced = 0;
        while produced < n_per_subcase {
            let a = draw(&vars, words, &mut rng);
            let pair = (render(&t.premise, &a, words), render(&t.hypothesis, &a, words));
            let exhausted = (seen.len() as f64) >= space;
            if !seen.insert(pair.clone()) && !exhausted {
                continue;
            }
            out.push(DiagnosticExample {
                id: format!("diag-{ci:02}-{produced:05}"),
                premise: pair.0,
                hypothesis: pair.1,
                gold: t.gold,
                heuristic: t.heuristic,
                subcase: t.name.clone(),
            });
            produced += 1;
        }
    }
    Ok(out)
}

/// Neutral and contradiction both count as non-entailment.
pub fn merge_labels(label: Label) -> BinaryLabel {
    match label {
        Label::Entailment => BinaryLabel::Entailment,
        Label::Neutral | Label::Contradiction => BinaryLabel::NonEntailment,
    }
}

pub fn merge_label_str(label: &str) -> Result<BinaryLabel, UnknownLabel> {
    label.parse::<Label>().map(merge_labels)
}

/// Predictions TSV: `id<TAB>label` per line with three-way labels. An
/// optional `id<TAB>label` header is skipped. Binary labels are rejected.
pub fn parse_predictions(text: &str) -> Result<HashMap<String, Label>, DiagnosticsError> {
    let mut out = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || (i == 0 && line == "id\tlabel") {
            continue;
        }
        let bad = |reason: String| DiagnosticsError::BadPrediction { line: i + 1, reason };
        let (id, label) = line.split_once('\t').ok_or_else(|| bad("expected `id<TAB>label`".into()))?;
        if label == "non-entailment" {
            return Err(bad("binary label; predictions must be three-way".into()));
        }
        let label: Label = label.parse().map_err(|e: UnknownLabel| bad(e.to_string()))?;
        out.insert(id.to_string(), label);
    }
    Ok(out)
}

pub fn render_predictions(predictions: &[(String, Label)]) -> String {
    let mut out = String::from("id\tlabel\n");
    for (id, l) in predictions {
        let _ = writeln!(out, "{id}\t{l}");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub heuristic: Heuristic,
    pub gold: BinaryLabel,
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubcaseReport {
    pub heuristic: Heuristic,
    pub gold: BinaryLabel,
    pub subcase: String,
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
    /// (heuristic, gold) cells in heuristic then label order.
    pub cells: Vec<CellReport>,
    /// Subcases in order of first appearance.
    pub subcases: Vec<SubcaseReport>,
}

fn ratio(correct: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        correct as f64 / total as f64
    }
}

impl EvaluationReport {
    pub fn cell(&self, heuristic: Heuristic, gold: BinaryLabel) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.heuristic == heuristic && c.gold == gold)
    }

    pub fn subcase(&self, heuristic: Heuristic, gold: BinaryLabel, name: &str) -> Option<&SubcaseReport> {
        self.subcases.iter().find(|s| s.heuristic == heuristic && s.gold == gold && s.subcase == name)
    }

    /// Aligned text table: one row per gold label, one column per heuristic,
    /// followed by the subcase breakdown.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<16}{:>10}{:>14}{:>14}", "gold", "Overlap", "Subsequence", "Constituent");
        for gold in [BinaryLabel::Entailment, BinaryLabel::NonEntailment] {
            let _ = write!(out, "{:<16}", gold.as_str());
            for (h, w) in Heuristic::ALL.into_iter().zip([10, 14, 14]) {
                match self.cell(h, gold) {
                    Some(c) => {
                        let _ = write!(out, "{:>w$.2}", c.accuracy);
                    }
                    None => {
                        let _ = write!(out, "{:>w$}", "-");
                    }
                }
            }
            out.push('\n');
        }
        let _ = writeln!(out, "{:<16}{:>10.2}  (n={})", "overall", self.accuracy, self.total);
        out.push('\n');
        for s in &self.subcases {
            let _ = writeln!(
                out,
                "{:<16}{:<16}{:<36}{:>6.2}  (n={})",
                s.heuristic.as_str(),
                s.gold.as_str(),
                s.subcase,
                s.accuracy,
                s.total
            );
        }
        out
    }
}

/// Accuracy of merged predictions, overall and broken down.
pub fn evaluate(
    predictions: &HashMap<String, Label>,
    diagnostics: &[DiagnosticExample],
) -> Result<EvaluationReport, DiagnosticsError> {
    let mut cells: BTreeMap<(Heuristic, BinaryLabel), (usize, usize)> = BTreeMap::new();
    let mut subcase_order: Vec<(Heuristic, BinaryLabel, String)> = Vec::new();
    let mut subcases: HashMap<(Heuristic, BinaryLabel, String), (usize, usize)> = HashMap::new();
    let mut correct = 0;
    for ex in diagnostics {
        let predicted =
            predictions.get(&ex.id).ok_or_else(|| DiagnosticsError::MissingPrediction(ex.id.clone()))?;
        let hit = usize::from(merge_labels(*predicted) == ex.gold);
        correct += hit;
        let cell = cells.entry((ex.heuristic, ex.gold)).or_default();
        cell.0 += hit;
        cell.1 += 1;
        let key = (ex.heuristic, ex.gold, ex.subcase.clone());
        let sub = subcases.entry(key.clone()).or_insert_with(|| {
            subcase_order.push(key);
            (0, 0)
        });
        sub.0 += hit;
        sub.1 += 1;
    }
    Ok(EvaluationReport {
        correct,
        total: diagnostics.len(),
        accuracy: ratio(correct, diagnostics.len()),
        cells: cells
            .into_iter()
            .map(|((heuristic, gold), (c, t))| CellReport {
                heuristic,
                gold,
                correct: c,
                total: t,
                accuracy: ratio(c, t),
            })
            .collect(),
        subcases: subcase_order
            .into_iter()
            .map(|key| {
                let (c, t) = subcases[&key];
                SubcaseReport {
                    heuristic: key.0,
                    gold: key.1,
                    subcase: key.2,
                    correct: c,
                    total: t,
                    accuracy: ratio(c, t),
                }
            })
            .collect(),
    })
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Two-sided Welch unequal-variance t-test p-value.
///
/// Two constant samples with equal means give p = 1; constant samples with
/// different means, or samples of fewer than two values, are degenerate.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(StatsError::DegenerateSample("fewer than two values"));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(StatsError::DegenerateSample("non-finite value"));
    }
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (sa, sb) = (va / na, vb / nb);
    let se2 = sa + sb;
    if se2 == 0.0 {
        return if ma == mb {
            Ok(1.0)
        } else {
            Err(StatsError::DegenerateSample("zero variance with different means"))
        };
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    Ok((2.0 * dist.sf(t.abs())).min(1.0))
}
