//! Browser bindings. Each export returns a JSON string; the plain functions
//! underneath are what the native tests exercise.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use syntaug::clause::analyze_clause;
use syntaug::diagnostics::{generate_diagnostics, Catalog, WordLists};
use syntaug::morphology::Lexicon;
use syntaug::probe::{run_multi_seed, MultiSeedConfig};
use syntaug::transforms::{invert, passivize, passivize_inverted};
use syntaug::treebank::parse_bracketed;

#[derive(Serialize)]
pub struct Transformed {
    pub original: String,
    pub verb_lemma: String,
    pub inversion: String,
    pub passive: String,
    pub passive_inverted: String,
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("demo output serializes")
}

/// Inversion and both passives of a bracketed parse.
pub fn transform_parse(parse: &str) -> Result<Transformed, String> {
    let lex = Lexicon::bundled();
    let tree = parse_bracketed(parse).map_err(|e| format!("parse error: {e}"))?;
    let clause = analyze_clause(&tree, &lex).map_err(|r| format!("not a transitive clause: {r}"))?;
    let surface = |r: Result<syntaug::transforms::GeneratedSentence, _>| {
        r.map(|g| g.surface()).map_err(|e: syntaug::morphology::MorphError| e.to_string())
    };
    Ok(Transformed {
        original: syntaug::transforms::detokenize(&tree.yield_tokens()),
        verb_lemma: clause.verb_lemma.clone(),
        inversion: surface(invert(&clause, &lex, "demo"))?,
        passive: surface(passivize(&clause, &lex, "demo"))?,
        passive_inverted: surface(passivize_inverted(&clause, &lex, "demo"))?,
    })
}

#[derive(Serialize)]
pub struct DiagnosticRow {
    pub heuristic: String,
    pub gold: String,
    pub subcase: String,
    pub premise: String,
    pub hypothesis: String,
}

/// `n_per_subcase` generated examples for every subcase.
pub fn sample_diagnostics(n_per_subcase: usize, seed: u64) -> Result<Vec<DiagnosticRow>, String> {
    let examples = generate_diagnostics(&Catalog::bundled(), &WordLists::bundled_eval(), n_per_subcase, seed)
        .map_err(|e| e.to_string())?;
    Ok(examples
        .into_iter()
        .map(|d| DiagnosticRow {
            heuristic: d.heuristic.as_str().into(),
            gold: d.gold.as_str().into(),
            subcase: d.subcase,
            premise: syntaug::transforms::detokenize(&d.premise),
            hypothesis: syntaug::transforms::detokenize(&d.hypothesis),
        })
        .collect())
}

#[derive(Serialize)]
pub struct ProbeSummary {
    pub table: String,
    pub report: syntaug::probe::MultiSeedReport,
}

/// Unaugmented vs augmented probe over `runs` seeds starting at `seed`.
pub fn compare_probes(runs: u64, seed: u64, base_rows: usize, tier: &str) -> Result<ProbeSummary, String> {
    let config = MultiSeedConfig {
        seeds: (seed..seed + runs.max(2)).collect(),
        base_rows,
        tier: tier.parse()?,
        ..MultiSeedConfig::default()
    };
    let report = run_multi_seed(&config).map_err(|e| e.to_string())?;
    Ok(ProbeSummary { table: report.to_table(), report })
}

#[wasm_bindgen]
pub fn transform(parse: &str) -> Result<String, JsError> {
    transform_parse(parse).map(|t| to_json(&t)).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn diagnostics(n_per_subcase: u32, seed: u32) -> Result<String, JsError> {
    sample_diagnostics(n_per_subcase as usize, seed.into()).map(|d| to_json(&d)).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn probe(runs: u32, seed: u32, base_rows: u32, tier: &str) -> Result<String, JsError> {
    compare_probes(runs.into(), seed.into(), base_rows as usize, tier)
        .map(|p| to_json(&p))
        .map_err(|e| JsError::new(&e))
}
