//! Selection of transitive matrix clauses.
//!
//! A sentence qualifies when its root S is exactly `NP VP` (plus optional
//! final punctuation), the VP opens with a finite verb tagged VBZ/VBP/VBD,
//! has exactly one NP daughter directly after the verb, and neither argument
//! is a pronoun. Verbs lemmatizing to *be* or *have* are excluded.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{NliExample, Side};
use crate::morphology::{np_number, FiniteTag, Lexicon, Number, Tense};
use crate::treebank::ConstituencyTree;

/// Closed class of personal pronouns plus their possessive and reflexive
/// forms. An argument NP consisting of one of these is not a full NP.
pub const PRONOUNS: &[&str] = &[
    "i",
    "me",
    "you",
    "he",
    "him",
    "she",
    "her",
    "it",
    "we",
    "us",
    "they",
    "them",
    "my",
    "mine",
    "your",
    "yours",
    "his",
    "hers",
    "its",
    "our",
    "ours",
    "their",
    "theirs",
    "myself",
    "yourself",
    "yourselves",
    "himself",
    "herself",
    "itself",
    "ourselves",
    "themselves",
];

const EXCLUDED_LEMMAS: &[&str] = &["be", "have"];
const EXCLUDED_GENRE: &str = "telephone";

/// Why a sentence did not yield a clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rejection {
    NotMatrixS,
    NoSubject,
    ExtraClauseMaterial,
    NoFiniteVerb,
    ZeroObjects,
    MultipleObjects,
    ObjectNotAdjacent,
    ClausalMaterial,
    PronounArgument,
    UnknownVerbForm,
    ExcludedLemma,
    NoNominalHead,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit enum serializes");
        f.write_str(s.as_str().unwrap_or("?"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitiveClause {
    #[serde(with = "tree_string")]
    pub subject: ConstituencyTree,
    pub verb_token: String,
    pub verb_tag: FiniteTag,
    pub verb_lemma: String,
    pub tense: Tense,
    #[serde(with = "tree_string")]
    pub object: ConstituencyTree,
    /// VP material after the object (adjuncts), carried into every output.
    #[serde(with = "tree_strings")]
    pub rest: Vec<ConstituencyTree>,
    pub subject_number: Number,
    pub object_number: Number,
    pub trailing_punct: String,
    pub source_tokens: Vec<String>,
}

impl TransitiveClause {
    pub fn subject_tokens(&self) -> Vec<String> {
        self.subject.yield_tokens()
    }

    pub fn object_tokens(&self) -> Vec<String> {
        self.object.yield_tokens()
    }

    pub fn rest_tokens(&self) -> Vec<String> {
        self.rest.iter().flat_map(|t| t.yield_tokens()).collect()
    }

    /// The same clause with subject and object exchanged.
    pub fn swapped(&self) -> Self {
        let mut c = self.clone();
        std::mem::swap(&mut c.subject, &mut c.object);
        std::mem::swap(&mut c.subject_number, &mut c.object_number);
        c
    }
}

mod tree_string {
    use crate::treebank::{parse_bracketed, ConstituencyTree};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &ConstituencyTree, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&t.serialize())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ConstituencyTree, D::Error> {
        let s = String::deserialize(d)?;
        parse_bracketed(&s).map_err(serde::de::Error::custom)
    }
}

mod tree_strings {
    use crate::treebank::{parse_bracketed, ConstituencyTree};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(ts: &[ConstituencyTree], s: S) -> Result<S::Ok, S::Error> {
        ts.iter().map(ConstituencyTree::serialize).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<ConstituencyTree>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| parse_bracketed(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

fn is_pronoun_np(np: &ConstituencyTree) -> bool {
    let leaves: Vec<_> = np.leaves().collect();
    match leaves.as_slice() {
        [(tag, tok)] => matches!(*tag, "PRP" | "PRP$") || PRONOUNS.contains(&tok.to_lowercase().as_str()),
        _ => false,
    }
}

/// Full analysis of a sentence tree; the error names the first failed
/// condition.
pub fn analyze_clause(tree: &ConstituencyTree, lexicon: &Lexicon) -> Result<TransitiveClause, Rejection> {
    if tree.label() != "S" || tree.is_leaf() {
        return Err(Rejection::NotMatrixS);
    }
    let mut kids: &[ConstituencyTree] = tree.children();
    let mut trailing_punct = String::new();
    if let Some(last) = kids.last() {
        if last.is_leaf() && last.label() == "." {
            trailing_punct = last.token().unwrap_or_default().to_string();
            kids = &kids[..kids.len() - 1];
        }
    }
    let (subject, vp) = match kids {
        [np, vp] if np.label() == "NP" && vp.label() == "VP" => (np, vp),
        _ if !kids.iter().any(|k| k.label() == "NP") => return Err(Rejection::NoSubject),
        _ => return Err(Rejection::ExtraClauseMaterial),
    };

    let vp_kids = vp.children();
    let verb = match vp_kids.first() {
        Some(v) if v.is_leaf() => v,
        _ => return Err(Rejection::NoFiniteVerb),
    };
    let verb_tag = FiniteTag::from_tag(verb.label()).map_err(|_| Rejection::NoFiniteVerb)?;
    let n_objects = vp_kids.iter().filter(|k| k.label() == "NP").count();
    match n_objects {
        0 => return Err(Rejection::ZeroObjects),
        1 => {}
        _ => return Err(Rejection::MultipleObjects),
    }
    let object = match vp_kids.get(1) {
        Some(o) if o.label() == "NP" => o,
        _ => return Err(Rejection::ObjectNotAdjacent),
    };
    let rest: Vec<ConstituencyTree> = vp_kids[2..].to_vec();
    if rest.iter().any(|r| matches!(r.label(), "S" | "SBAR" | "VP" | "PRT" | "SQ" | "SINV")) {
        return Err(Rejection::ClausalMaterial);
    }
    if is_pronoun_np(subject) || is_pronoun_np(object) {
        return Err(Rejection::PronounArgument);
    }
    let verb_token = verb.token().unwrap_or_default();
    let lemma = lexicon.lemmatize(verb_token, verb_tag).map_err(|_| Rejection::UnknownVerbForm)?;
    if EXCLUDED_LEMMAS.contains(&lemma) {
        return Err(Rejection::ExcludedLemma);
    }
    let subject_number = np_number(subject).map_err(|_| Rejection::NoNominalHead)?;
    let object_number = np_number(object).map_err(|_| Rejection::NoNominalHead)?;
    let tense = match verb_tag {
        FiniteTag::Vbd => Tense::Past,
        FiniteTag::Vbz | FiniteTag::Vbp => Tense::Present,
    };
    Ok(TransitiveClause {
        subject: subject.clone(),
        verb_token: verb_token.to_string(),
        verb_tag,
        verb_lemma: lemma.to_string(),
        tense,
        object: object.clone(),
        rest,
        subject_number,
        object_number,
        trailing_punct,
        source_tokens: tree.yield_tokens(),
    })
}

/// The transitive clause of a sentence, or `None` when any condition fails.
pub fn find_transitive_clause(tree: &ConstituencyTree, lexicon: &Lexicon) -> Option<TransitiveClause> {
    analyze_clause(tree, lexicon).ok()
}

pub fn lemmatize_verb(verb_token: &str, verb_tag: &str, lexicon: &Lexicon) -> Option<String> {
    let tag = FiniteTag::from_tag(verb_tag).ok()?;
    lexicon.lemmatize(verb_token, tag).ok().map(str::to_string)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FilterError {
    #[error("example {id}: no {side} parse column")]
    MissingParseColumn { id: String, side: Side },
}

/// A clause found in one corpus row.
#[derive(Debug, Clone, PartialEq)]
pub struct ClauseHit {
    pub row: usize,
    pub side: Side,
    pub clause: TransitiveClause,
}

/// Counts of how each row was disposed of.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterReport {
    pub rows: usize,
    pub excluded_genre: usize,
    pub accepted: usize,
    pub rejected: BTreeMap<Rejection, usize>,
}

/// Rows outside the telephone genre whose `side` sentence holds a
/// transitive clause, in corpus order.
pub fn filter_corpus(
    corpus: &[NliExample],
    side: Side,
    lexicon: &Lexicon,
) -> Result<(Vec<ClauseHit>, FilterReport), FilterError> {
    let mut report = FilterReport { rows: corpus.len(), ..FilterReport::default() };
    let mut hits = Vec::new();
    for (row, ex) in corpus.iter().enumerate() {
        let sentence = ex.sentence(side);
        let parse = sentence
            .parse
            .as_ref()
            .ok_or_else(|| FilterError::MissingParseColumn { id: ex.id.clone(), side })?;
        if ex.genre == EXCLUDED_GENRE {
            report.excluded_genre += 1;
            continue;
        }
        match analyze_clause(parse, lexicon) {
            Ok(clause) => {
                report.accepted += 1;
                hits.push(ClauseHit { row, side, clause });
            }
            Err(r) => *report.rejected.entry(r).or_default() += 1,
        }
    }
    Ok((hits, report))
}
