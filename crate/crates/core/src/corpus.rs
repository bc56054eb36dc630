//! MNLI-shaped corpora: examples, labels and the two on-disk formats.
//!
//! `mnli-tsv` has a header row and the columns `id genre gold_label
//! sentence1_parse sentence2_parse sentence1 sentence2`. Sentences are stored
//! as space-joined tokens; a missing parse is written as `-`. `jsonl` holds
//! one object per line with the same field names.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::treebank::{parse_bracketed, ConstituencyTree};

pub const TSV_COLUMNS: [&str; 7] =
    ["id", "genre", "gold_label", "sentence1_parse", "sentence2_parse", "sentence1", "sentence2"];

const NO_PARSE: &str = "-";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("line {line}: unknown label {label:?}")]
    UnknownLabel { line: usize, label: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Entailment,
    Neutral,
    Contradiction,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Entailment, Label::Neutral, Label::Contradiction];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Entailment => "entailment",
            Label::Neutral => "neutral",
            Label::Contradiction => "contradiction",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown label {0:?}")]
pub struct UnknownLabel(pub String);

impl FromStr for Label {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "entailment" => Ok(Label::Entailment),
            "neutral" => Ok(Label::Neutral),
            "contradiction" => Ok(Label::Contradiction),
            other => Err(UnknownLabel(other.to_string())),
        }
    }
}

/// Two-way label used for heuristic diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BinaryLabel {
    Entailment,
    NonEntailment,
}

impl BinaryLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            BinaryLabel::Entailment => "entailment",
            BinaryLabel::NonEntailment => "non-entailment",
        }
    }
}

impl fmt::Display for BinaryLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BinaryLabel {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "entailment" => Ok(BinaryLabel::Entailment),
            "non-entailment" => Ok(BinaryLabel::NonEntailment),
            other => Err(UnknownLabel(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Premise,
    Hypothesis,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Premise => "premise",
            Side::Hypothesis => "hypothesis",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<String>,
    pub parse: Option<ConstituencyTree>,
}

impl Sentence {
    pub fn from_tokens(tokens: Vec<String>) -> Self {
        Self { tokens, parse: None }
    }

    /// Tokens taken from the tree's yield.
    pub fn from_parse(parse: ConstituencyTree) -> Self {
        Self { tokens: parse.yield_tokens(), parse: Some(parse) }
    }

    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NliExample {
    pub id: String,
    pub genre: String,
    pub premise: Sentence,
    pub hypothesis: Sentence,
    pub label: Label,
}

impl NliExample {
    pub fn sentence(&self, side: Side) -> &Sentence {
        match side {
            Side::Premise => &self.premise,
            Side::Hypothesis => &self.hypothesis,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorpusFormat {
    MnliTsv,
    Jsonl,
}

impl FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mnli-tsv" => Ok(Self::MnliTsv),
            "jsonl" => Ok(Self::Jsonl),
            other => Err(format!("unknown corpus format {other:?}")),
        }
    }
}

impl fmt::Display for CorpusFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::MnliTsv => "mnli-tsv",
            Self::Jsonl => "jsonl",
        })
    }
}

#[derive(Serialize, Deserialize)]
struct Record {
    id: String,
    genre: String,
    gold_label: String,
    sentence1_parse: String,
    sentence2_parse: String,
    sentence1: String,
    sentence2: String,
}

fn parse_cell(cell: &str, line: usize, column: &str) -> Result<Option<ConstituencyTree>, CorpusError> {
    let cell = cell.trim();
    if cell.is_empty() || cell == NO_PARSE {
        return Ok(None);
    }
    parse_bracketed(cell)
        .map(Some)
        .map_err(|e| CorpusError::MalformedRow { line, reason: format!("{column}: {e}") })
}

fn sentence_cell(
    text: &str,
    parse: Option<ConstituencyTree>,
    line: usize,
    column: &str,
) -> Result<Sentence, CorpusError> {
    let tokens: Vec<String> = text.split_whitespace().map(str::to_string).collect();
    if tokens.is_empty() {
        return Err(CorpusError::MalformedRow { line, reason: format!("{column} is empty") });
    }
    Ok(Sentence { tokens, parse })
}

fn record_to_example(r: Record, line: usize) -> Result<NliExample, CorpusError> {
    let label =
        r.gold_label.parse().map_err(|_| CorpusError::UnknownLabel { line, label: r.gold_label.clone() })?;
    let p1 = parse_cell(&r.sentence1_parse, line, "sentence1_parse")?;
    let p2 = parse_cell(&r.sentence2_parse, line, "sentence2_parse")?;
    Ok(NliExample {
        id: r.id,
        genre: r.genre,
        premise: sentence_cell(&r.sentence1, p1, line, "sentence1")?,
        hypothesis: sentence_cell(&r.sentence2, p2, line, "sentence2")?,
        label,
    })
}

fn example_to_record(ex: &NliExample) -> Record {
    let parse =
        |s: &Sentence| s.parse.as_ref().map_or_else(|| NO_PARSE.to_string(), ConstituencyTree::serialize);
    Record {
        id: ex.id.clone(),
        genre: ex.genre.clone(),
        gold_label: ex.label.to_string(),
        sentence1_parse: parse(&ex.premise),
        sentence2_parse: parse(&ex.hypothesis),
        sentence1: ex.premise.text(),
        sentence2: ex.hypothesis.text(),
    }
}

/// Parse corpus text. TSV columns are located by header name, so wider
/// MNLI exports (with `pairID` as the id column) load too; parse columns
/// may be absent, leaving `parse` empty.
pub fn parse_corpus(text: &str, format: CorpusFormat) -> Result<Vec<NliExample>, CorpusError> {
    match format {
        CorpusFormat::MnliTsv => parse_tsv(text),
        CorpusFormat::Jsonl => parse_jsonl(text),
    }
}

fn parse_tsv(text: &str) -> Result<Vec<NliExample>, CorpusError> {
    let mut lines = text.lines().enumerate();
    let header = match lines.next() {
        Some((_, h)) => h.trim_end_matches('\r'),
        None => return Ok(Vec::new()),
    };
    let names: Vec<&str> = header.split('\t').collect();
    let find = |name: &str| names.iter().position(|n| *n == name);
    let required = |name: &str| {
        find(name)
            .ok_or_else(|| CorpusError::MalformedRow { line: 1, reason: format!("missing column {name}") })
    };
    let id_col = match find("id").or_else(|| find("pairID")) {
        Some(c) => c,
        None => required("id")?,
    };
    let genre_col = required("genre")?;
    let label_col = required("gold_label")?;
    let s1_col = required("sentence1")?;
    let s2_col = required("sentence2")?;
    let p1_col = find("sentence1_parse");
    let p2_col = find("sentence2_parse");

    let mut out = Vec::new();
    for (i, raw) in lines {
        let line = i + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.is_empty() {
            continue;
        }
        let cells: Vec<&str> = raw.split('\t').collect();
        if cells.len() != names.len() {
            return Err(CorpusError::MalformedRow {
                line,
                reason: format!("expected {} fields, found {}", names.len(), cells.len()),
            });
        }
        let cell = |c: Option<usize>| c.map_or(NO_PARSE, |c| cells[c]).to_string();
        let record = Record {
            id: cells[id_col].to_string(),
            genre: cells[genre_col].to_string(),
            gold_label: cells[label_col].to_string(),
            sentence1_parse: cell(p1_col),
            sentence2_parse: cell(p2_col),
            sentence1: cells[s1_col].to_string(),
            sentence2: cells[s2_col].to_string(),
        };
        out.push(record_to_example(record, line)?);
    }
    Ok(out)
}

fn parse_jsonl(text: &str) -> Result<Vec<NliExample>, CorpusError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(raw)
            .map_err(|e| CorpusError::MalformedRow { line, reason: e.to_string() })?;
        out.push(record_to_example(record, line)?);
    }
    Ok(out)
}

pub fn read_corpus(path: impl AsRef<Path>, format: CorpusFormat) -> Result<Vec<NliExample>, CorpusError> {
    let text = fs::read_to_string(path)?;
    parse_corpus(&text, format)
}

/// Serialize examples; output is a pure function of the input.
pub fn render_corpus(examples: &[NliExample], format: CorpusFormat) -> String {
    let mut out = String::new();
    match format {
        CorpusFormat::MnliTsv => {
            out.push_str(&TSV_COLUMNS.join("\t"));
            out.push('\n');
            for ex in examples {
                let r = example_to_record(ex);
                let cells = [
                    r.id,
                    r.genre,
                    r.gold_label,
                    r.sentence1_parse,
                    r.sentence2_parse,
                    r.sentence1,
                    r.sentence2,
                ];
                out.push_str(&cells.join("\t"));
                out.push('\n');
            }
        }
        CorpusFormat::Jsonl => {
            for ex in examples {
                out.push_str(&serde_json::to_string(&example_to_record(ex)).expect("record serializes"));
                out.push('\n');
            }
        }
    }
    out
}

pub fn write_corpus(
    examples: &[NliExample],
    path: impl AsRef<Path>,
    format: CorpusFormat,
) -> Result<(), CorpusError> {
    fs::write(path, render_corpus(examples, format))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "id\tgenre\tgold_label\tsentence1_parse\tsentence2_parse\tsentence1\tsentence2\n";

    #[test]
    fn unknown_label_names_the_line() {
        let text = format!("{HEADER}r1\tfiction\tmaybe\t-\t-\ta b\tc d\n");
        match parse_corpus(&text, CorpusFormat::MnliTsv) {
            Err(CorpusError::UnknownLabel { line, label }) => {
                assert_eq!(line, 2);
                assert_eq!(label, "maybe");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn short_row_is_malformed() {
        let text = format!("{HEADER}r1\tfiction\tneutral\t-\n");
        assert!(matches!(
            parse_corpus(&text, CorpusFormat::MnliTsv),
            Err(CorpusError::MalformedRow { line: 2, .. })
        ));
    }

    #[test]
    fn bad_parse_is_malformed() {
        let text = format!("{HEADER}r1\tfiction\tneutral\t(S (NP\t-\ta b\tc d\n");
        assert!(matches!(
            parse_corpus(&text, CorpusFormat::MnliTsv),
            Err(CorpusError::MalformedRow { line: 2, .. })
        ));
    }

    #[test]
    fn parse_columns_are_optional() {
        let text = "pairID\tgenre\tgold_label\tsentence1\tsentence2\nx\tslate\tentailment\ta b .\tb .\n";
        let ex = parse_corpus(text, CorpusFormat::MnliTsv).unwrap();
        assert_eq!(ex.len(), 1);
        assert_eq!(ex[0].id, "x");
        assert!(ex[0].premise.parse.is_none());
        assert_eq!(ex[0].hypothesis.tokens, ["b", "."]);
    }

    #[test]
    fn empty_text_is_empty_corpus() {
        assert!(parse_corpus("", CorpusFormat::MnliTsv).unwrap().is_empty());
        assert!(parse_corpus("", CorpusFormat::Jsonl).unwrap().is_empty());
    }

    #[test]
    fn jsonl_unknown_label() {
        let text = r#"{"id":"a","genre":"g","gold_label":"yes","sentence1_parse":"-","sentence2_parse":"-","sentence1":"x","sentence2":"y"}"#;
        assert!(matches!(
            parse_corpus(text, CorpusFormat::Jsonl),
            Err(CorpusError::UnknownLabel { line: 1, .. })
        ));
    }

    #[test]
    fn labels_parse() {
        for l in Label::ALL {
            assert_eq!(l.as_str().parse::<Label>().unwrap(), l);
        }
        assert!("maybe".parse::<Label>().is_err());
        assert_eq!("non-entailment".parse::<BinaryLabel>().unwrap(), BinaryLabel::NonEntailment);
    }
}
