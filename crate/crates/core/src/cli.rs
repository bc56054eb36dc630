//! Command-line front end.
//!
//! Every file written gets a `<file>.meta.json` sidecar recording the toolkit
//! version, the subcommand and its full configuration, which is enough to
//! reproduce the file byte for byte. Exit codes: 0 success, 1 usage or output
//! error, 2 too few augmentation candidates, 3 malformed input.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::augmentation::{build_candidates, render_provenance, sample_tier, AugmentError, Strategy, Tier};
use crate::clause::{filter_corpus, FilterError};
use crate::corpus::{read_corpus, render_corpus, CorpusError, CorpusFormat, Side};
use crate::diagnostics::{
    evaluate, generate_diagnostics, parse_predictions, Catalog, DiagnosticExample, DiagnosticsError,
    WordLists,
};
use crate::morphology::Lexicon;
use crate::probe::{self, MultiSeedConfig, ProbeError, TrainConfig};
use crate::synth;
use crate::VERSION;

pub const DEFAULT_SEED: u64 = 13;

#[derive(Debug, Parser)]
#[command(name = "syntaug", version, about = "Syntactic augmentation and diagnostics for NLI")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
pub enum Command {
    /// List transitive clauses in a corpus with skip-reason counts.
    Extract(ExtractArgs),
    /// Build an augmentation set.
    Augment(AugmentArgs),
    /// Generate diagnostic examples from the template catalog.
    Diagnose(DiagnoseArgs),
    /// Score a predictions file against diagnostic examples.
    Evaluate(EvaluateArgs),
    /// Train the probe with and without augmentation and compare.
    Probe(ProbeArgs),
    /// Write a synthetic parsed corpus.
    Synth(SynthArgs),
}

fn parse_side(s: &str) -> Result<Side, String> {
    match s {
        "premise" => Ok(Side::Premise),
        "hypothesis" => Ok(Side::Hypothesis),
        _ => Err(format!("unknown side {s:?} (expected premise or hypothesis)")),
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ExtractArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "mnli-tsv")]
    pub format: CorpusFormat,
    #[arg(long, default_value = "hypothesis", value_parser = parse_side)]
    pub side: Side,
    /// JSONL output, one clause per line.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct AugmentArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "mnli-tsv")]
    pub format: CorpusFormat,
    #[arg(long)]
    pub strategy: Strategy,
    #[arg(long)]
    pub tier: Tier,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Dataset output; provenance goes to `<out>.provenance.jsonl`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct DiagnoseArgs {
    #[arg(long, default_value_t = 1000)]
    pub n_per_subcase: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Template catalog; defaults to the bundled one.
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Word lists; default to the bundled evaluation vocabulary.
    #[arg(long)]
    pub words: Option<PathBuf>,
    /// JSONL output, one example per line.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct EvaluateArgs {
    /// Diagnostic examples as written by `diagnose`.
    #[arg(long)]
    pub diagnostics: PathBuf,
    /// TSV of example id and three-way label.
    #[arg(long)]
    pub predictions: PathBuf,
    /// JSON report; the text table goes to standard output.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ProbeArgs {
    /// Base corpus. Without it, each seed trains on a synthetic corpus.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "mnli-tsv")]
    pub format: CorpusFormat,
    #[arg(long, default_value = "inv-trans-hyp")]
    pub strategy: Strategy,
    #[arg(long, default_value = "medium")]
    pub tier: Tier,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Number of consecutive seeds, starting at --seed, for synthetic runs.
    #[arg(long, default_value_t = 5)]
    pub runs: u64,
    #[arg(long, default_value_t = 2000)]
    pub base_rows: usize,
    #[arg(long, default_value_t = 1000)]
    pub heldout_rows: usize,
    #[arg(long, default_value_t = 100)]
    pub n_per_subcase: usize,
    #[arg(long, default_value_t = 50)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    pub learning_rate: f64,
    /// JSON results; the comparison table goes to standard output.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 2000)]
    pub rows: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value = "mnli-tsv")]
    pub format: CorpusFormat,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Insufficient(AugmentError),
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Output { .. } => 1,
            CliError::Insufficient(_) => 2,
            CliError::Input(_) => 3,
        }
    }
}

fn input<E: std::fmt::Display>(context: &Path) -> impl FnOnce(E) -> CliError + '_ {
    move |e| CliError::Input(format!("{}: {e}", context.display()))
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<FilterError> for CliError {
    fn from(e: FilterError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<AugmentError> for CliError {
    fn from(e: AugmentError) -> Self {
        match e {
            AugmentError::InsufficientCandidates { .. } => CliError::Insufficient(e),
            AugmentError::Filter(f) => f.into(),
        }
    }
}

impl From<DiagnosticsError> for CliError {
    fn from(e: DiagnosticsError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ProbeError> for CliError {
    fn from(e: ProbeError) -> Self {
        match e {
            ProbeError::Augment(a) => a.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Output { path: path.to_path_buf(), source })
}

#[derive(Serialize)]
struct Meta<'a, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    config: &'a Command,
    report: Option<R>,
}

/// Writes `<path>.meta.json` describing the run that produced `path`.
fn write_meta<R: Serialize>(path: &Path, config: &Command, report: Option<R>) -> Result<(), CliError> {
    let meta = Meta { tool: "syntaug", version: VERSION, config, report };
    let json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    write(&sidecar(path, ".meta.json"), &(json + "\n"))
}

fn to_jsonl<T: Serialize>(items: &[T]) -> String {
    items.iter().map(|x| serde_json::to_string(x).expect("record serializes") + "\n").collect()
}

#[derive(Serialize)]
struct ClauseRecord<'a> {
    id: &'a str,
    row: usize,
    side: Side,
    clause: &'a crate::clause::TransitiveClause,
}

fn extract(a: &ExtractArgs, cmd: &Command) -> Result<(), CliError> {
    let corpus = read_corpus(&a.input, a.format)?;
    let (hits, report) = filter_corpus(&corpus, a.side, &Lexicon::bundled())?;
    let records: Vec<ClauseRecord> = hits
        .iter()
        .map(|h| ClauseRecord { id: &corpus[h.row].id, row: h.row, side: h.side, clause: &h.clause })
        .collect();
    write(&a.out, &to_jsonl(&records))?;
    eprintln!(
        "{} rows, {} telephone excluded, {} clauses",
        report.rows, report.excluded_genre, report.accepted
    );
    for (reason, n) in &report.rejected {
        let name = serde_json::to_value(reason).expect("reason serializes");
        eprintln!("  rejected {}: {n}", name.as_str().unwrap_or_default());
    }
    write_meta(&a.out, cmd, Some(&report))
}

fn augment(a: &AugmentArgs, cmd: &Command) -> Result<(), CliError> {
    let corpus = read_corpus(&a.input, a.format)?;
    let pool = build_candidates(a.strategy, &corpus, &Lexicon::bundled(), a.seed)?;
    eprintln!("{} candidates for {}", pool.candidates.len(), a.strategy.name());
    let set = sample_tier(&pool, a.tier, a.seed)?;
    write(&a.out, &render_corpus(&set.examples, a.format))?;
    write(&sidecar(&a.out, ".provenance.jsonl"), &render_provenance(&set.provenance))?;
    write_meta(&a.out, cmd, Some(&pool.report))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(input(path))
}

fn diagnose(a: &DiagnoseArgs, cmd: &Command) -> Result<(), CliError> {
    let catalog = match &a.catalog {
        Some(p) => Catalog::parse(&read_text(p)?).map_err(input(p))?,
        None => Catalog::bundled(),
    };
    let words = match &a.words {
        Some(p) => WordLists::parse(&read_text(p)?).map_err(input(p))?,
        None => WordLists::bundled_eval(),
    };
    let examples = generate_diagnostics(&catalog, &words, a.n_per_subcase, a.seed)?;
    write(&a.out, &to_jsonl(&examples))?;
    eprintln!("{} diagnostic examples", examples.len());
    write_meta::<()>(&a.out, cmd, None)
}

fn read_diagnostics(path: &Path) -> Result<Vec<DiagnosticExample>, CliError> {
    read_text(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| CliError::Input(format!("{}:{}: {e}", path.display(), i + 1)))
        })
        .collect()
}

fn evaluate_cmd(a: &EvaluateArgs, cmd: &Command) -> Result<(), CliError> {
    let diagnostics = read_diagnostics(&a.diagnostics)?;
    let predictions = parse_predictions(&read_text(&a.predictions)?).map_err(input(&a.predictions))?;
    let report = evaluate(&predictions, &diagnostics)?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write(&a.out, &(json + "\n"))?;
    print!("{}", report.to_table());
    write_meta::<()>(&a.out, cmd, None)
}

fn probe_cmd(a: &ProbeArgs, cmd: &Command) -> Result<(), CliError> {
    let json = match &a.input {
        Some(path) => {
            let base = read_corpus(path, a.format)?;
            let lexicon = Lexicon::bundled();
            let pool = build_candidates(a.strategy, &base, &lexicon, a.seed)?;
            let set = sample_tier(&pool, a.tier, a.seed)?;
            let diagnostics = generate_diagnostics(
                &Catalog::bundled(),
                &WordLists::bundled_eval(),
                a.n_per_subcase,
                a.seed,
            )?;
            let config = TrainConfig { epochs: a.epochs, learning_rate: a.learning_rate, seed: a.seed };
            let r = probe::run_experiment(&base, Some(&set.examples), &diagnostics, &config)?;
            println!("unaugmented\n{}", r.unaugmented.to_table());
            if let Some(aug) = &r.augmented {
                println!("augmented\n{}", aug.to_table());
            }
            serde_json::to_string_pretty(&r)
        }
        None => {
            let config = MultiSeedConfig {
                seeds: (a.seed..a.seed + a.runs).collect(),
                base_rows: a.base_rows,
                heldout_rows: a.heldout_rows,
                n_per_subcase: a.n_per_subcase,
                strategy: a.strategy,
                tier: a.tier,
                epochs: a.epochs,
                learning_rate: a.learning_rate,
            };
            let r = probe::run_multi_seed(&config)?;
            print!("{}", r.to_table());
            serde_json::to_string_pretty(&r)
        }
    }
    .expect("results serialize");
    write(&a.out, &(json + "\n"))?;
    write_meta::<()>(&a.out, cmd, None)
}

fn synth_cmd(a: &SynthArgs, cmd: &Command) -> Result<(), CliError> {
    let corpus = synth::generate_corpus(&synth::bundled_train_words(), &Lexicon::bundled(), a.rows, a.seed)?;
    write(&a.out, &render_corpus(&corpus, a.format))?;
    write_meta::<()>(&a.out, cmd, None)
}

pub fn execute(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Extract(a) => extract(a, command),
        Command::Augment(a) => augment(a, command),
        Command::Diagnose(a) => diagnose(a, command),
        Command::Evaluate(a) => evaluate_cmd(a, command),
        Command::Probe(a) => probe_cmd(a, command),
        Command::Synth(a) => synth_cmd(a, command),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
