//! Verb inflection, passive auxiliaries and noun-phrase number.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::treebank::ConstituencyTree;

const BUNDLED_LEXICON: &str = include_str!("../data/verbs.tsv");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphError {
    #[error("unsupported verb tag {0}")]
    UnsupportedTag(String),
    #[error("unknown lemma {0:?}")]
    UnknownLemma(String),
    #[error("unknown verb form {form:?} for tag {tag}")]
    UnknownForm { form: String, tag: String },
    #[error("noun phrase has no nominal head")]
    NoNominalHead,
    #[error("lexicon line {line}: {reason}")]
    BadLexiconLine { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Number {
    Singular,
    Plural,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tense {
    Present,
    Past,
}

impl fmt::Display for Tense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tense::Present => "present",
            Tense::Past => "past",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerbEntry {
    pub lemma: String,
    pub present_3sg: String,
    pub present_plural: String,
    pub past: String,
    pub past_participle: String,
}

/// Finite verb tags the transformations can re-inflect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FiniteTag {
    #[serde(rename = "VBZ")]
    Vbz,
    #[serde(rename = "VBP")]
    Vbp,
    #[serde(rename = "VBD")]
    Vbd,
}

impl FiniteTag {
    pub fn from_tag(tag: &str) -> Result<Self, MorphError> {
        match tag {
            "VBZ" => Ok(Self::Vbz),
            "VBP" => Ok(Self::Vbp),
            "VBD" => Ok(Self::Vbd),
            other => Err(MorphError::UnsupportedTag(other.to_string())),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Vbz => "VBZ",
            Self::Vbp => "VBP",
            Self::Vbd => "VBD",
        }
    }
}

/// Verb table with tag-keyed reverse maps. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Lexicon {
    entries: HashMap<String, VerbEntry>,
    by_3sg: HashMap<String, String>,
    by_plural: HashMap<String, String>,
    by_past: HashMap<String, String>,
    forms: HashSet<String>,
}

impl Lexicon {
    /// The verb table shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_tsv(BUNDLED_LEXICON).expect("bundled lexicon is well-formed")
    }

    /// Five tab-separated columns per line: lemma, 3sg, plural present,
    /// past, past participle. Blank lines and `#` comments are skipped.
    pub fn from_tsv(text: &str) -> Result<Self, MorphError> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 5 {
                return Err(MorphError::BadLexiconLine {
                    line: i + 1,
                    reason: format!("expected 5 columns, found {}", cols.len()),
                });
            }
            if cols.iter().any(|c| c.trim().is_empty()) {
                return Err(MorphError::BadLexiconLine { line: i + 1, reason: "empty form".into() });
            }
            entries.push(VerbEntry {
                lemma: cols[0].to_string(),
                present_3sg: cols[1].to_string(),
                present_plural: cols[2].to_string(),
                past: cols[3].to_string(),
                past_participle: cols[4].to_string(),
            });
        }
        Ok(Self::from_entries(entries))
    }

    pub fn from_entries(entries: impl IntoIterator<Item = VerbEntry>) -> Self {
        let mut lex = Self {
            entries: HashMap::new(),
            by_3sg: HashMap::new(),
            by_plural: HashMap::new(),
            by_past: HashMap::new(),
            forms: HashSet::new(),
        };
        for e in entries {
            lex.by_3sg.entry(e.present_3sg.clone()).or_insert_with(|| e.lemma.clone());
            lex.by_plural.entry(e.present_plural.clone()).or_insert_with(|| e.lemma.clone());
            lex.by_past.entry(e.past.clone()).or_insert_with(|| e.lemma.clone());
            lex.forms.extend([
                e.lemma.clone(),
                e.present_3sg.clone(),
                e.present_plural.clone(),
                e.past.clone(),
                e.past_participle.clone(),
            ]);
            lex.entries.insert(e.lemma.clone(), e);
        }
        // "be" has more finite forms than the five columns hold.
        if lex.entries.contains_key("be") {
            lex.by_plural.entry("am".into()).or_insert_with(|| "be".into());
            lex.by_past.entry("were".into()).or_insert_with(|| "be".into());
            lex.forms.extend(["am".into(), "were".into()]);
        }
        lex
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Whether `token` is any listed form of any verb.
    pub fn is_verb_form(&self, token: &str) -> bool {
        self.forms.contains(token)
    }

    pub fn entry(&self, lemma: &str) -> Option<&VerbEntry> {
        self.entries.get(lemma)
    }

    /// Lemma of a finite verb form, looked up in the column its tag selects.
    /// Capitalized forms are retried in lowercase.
    pub fn lemmatize(&self, form: &str, tag: FiniteTag) -> Result<&str, MorphError> {
        let map = match tag {
            FiniteTag::Vbz => &self.by_3sg,
            FiniteTag::Vbp => &self.by_plural,
            FiniteTag::Vbd => &self.by_past,
        };
        map.get(form)
            .or_else(|| map.get(&form.to_lowercase()))
            .map(String::as_str)
            .ok_or_else(|| MorphError::UnknownForm { form: form.to_string(), tag: tag.as_str().to_string() })
    }

    pub fn inflect(&self, lemma: &str, tense: Tense, number: Number) -> Result<&str, MorphError> {
        let e = self.entry(lemma).ok_or_else(|| MorphError::UnknownLemma(lemma.to_string()))?;
        Ok(match (tense, number) {
            (Tense::Present, Number::Singular) => &e.present_3sg,
            (Tense::Present, Number::Plural) => &e.present_plural,
            (Tense::Past, _) => &e.past,
        })
    }

    pub fn past_participle(&self, lemma: &str) -> Result<&str, MorphError> {
        self.entry(lemma)
            .map(|e| e.past_participle.as_str())
            .ok_or_else(|| MorphError::UnknownLemma(lemma.to_string()))
    }
}

/// Tense and (where marked) number of a finite verb.
///
/// Past forms do not mark number, so the number is `None` for `VBD`.
pub fn detect_tense_number(verb_tag: &str) -> Result<(Tense, Option<Number>), MorphError> {
    Ok(match FiniteTag::from_tag(verb_tag)? {
        FiniteTag::Vbz => (Tense::Present, Some(Number::Singular)),
        FiniteTag::Vbp => (Tense::Present, Some(Number::Plural)),
        FiniteTag::Vbd => (Tense::Past, None),
    })
}

pub fn passive_aux(tense: Tense, number: Number) -> &'static str {
    match (tense, number) {
        (Tense::Present, Number::Singular) => "is",
        (Tense::Present, Number::Plural) => "are",
        (Tense::Past, Number::Singular) => "was",
        (Tense::Past, Number::Plural) => "were",
    }
}

fn is_nominal(t: &ConstituencyTree) -> bool {
    matches!(t.label(), "NP" | "NN" | "NNS" | "NNP" | "NNPS" | "NX")
}

/// Grammatical number of a noun phrase.
///
/// A CC child with nominal material on both sides makes the phrase plural.
/// Otherwise the head is the rightmost noun-tagged child, descending into
/// the rightmost nested NP when it comes first.
pub fn np_number(np: &ConstituencyTree) -> Result<Number, MorphError> {
    let children = np.children();
    if np.is_leaf() {
        return leaf_number(np.label()).ok_or(MorphError::NoNominalHead);
    }
    for (i, c) in children.iter().enumerate() {
        if c.label() == "CC"
            && children[..i].iter().any(is_nominal)
            && children[i + 1..].iter().any(is_nominal)
        {
            return Ok(Number::Plural);
        }
    }
    for c in children.iter().rev() {
        if let Some(n) = c.is_leaf().then(|| leaf_number(c.label())).flatten() {
            return Ok(n);
        }
        if c.label() == "NP" || c.label() == "NX" {
            if let Ok(n) = np_number(c) {
                return Ok(n);
            }
        }
    }
    Err(MorphError::NoNominalHead)
}

fn leaf_number(tag: &str) -> Option<Number> {
    match tag {
        "NN" | "NNP" => Some(Number::Singular),
        "NNS" | "NNPS" => Some(Number::Plural),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::parse_bracketed;

    fn lex() -> Lexicon {
        Lexicon::bundled()
    }

    #[test]
    fn bundled_lexicon_is_sizeable() {
        let l = lex();
        assert!(l.len() >= 250, "{}", l.len());
        assert!(l.entry("be").is_some() && l.entry("have").is_some());
    }

    #[test]
    fn tense_number_from_tag() {
        assert_eq!(detect_tense_number("VBZ").unwrap(), (Tense::Present, Some(Number::Singular)));
        assert_eq!(detect_tense_number("VBP").unwrap(), (Tense::Present, Some(Number::Plural)));
        assert_eq!(detect_tense_number("VBD").unwrap(), (Tense::Past, None));
        for t in ["VBG", "VB", "VBN", "MD"] {
            assert_eq!(detect_tense_number(t), Err(MorphError::UnsupportedTag(t.into())));
        }
    }

    #[test]
    fn inflects_known_lemmas() {
        let l = lex();
        assert_eq!(l.inflect("star", Tense::Present, Number::Plural).unwrap(), "star");
        assert_eq!(l.inflect("contain", Tense::Present, Number::Plural).unwrap(), "contain");
        assert_eq!(l.inflect("contain", Tense::Present, Number::Singular).unwrap(), "contains");
        assert_eq!(l.inflect("see", Tense::Past, Number::Singular).unwrap(), "saw");
        assert_eq!(l.past_participle("contain").unwrap(), "contained");
        assert_eq!(
            l.inflect("frobnicate", Tense::Past, Number::Plural),
            Err(MorphError::UnknownLemma("frobnicate".into()))
        );
    }

    #[test]
    fn lemmatizes_by_tag_column() {
        let l = lex();
        assert_eq!(l.lemmatize("contains", FiniteTag::Vbz).unwrap(), "contain");
        assert_eq!(l.lemmatize("saw", FiniteTag::Vbd).unwrap(), "see");
        assert_eq!(l.lemmatize("is", FiniteTag::Vbz).unwrap(), "be");
        assert_eq!(l.lemmatize("were", FiniteTag::Vbd).unwrap(), "be");
        assert_eq!(l.lemmatize("has", FiniteTag::Vbz).unwrap(), "have");
        assert_eq!(l.lemmatize("read", FiniteTag::Vbd).unwrap(), "read");
        assert!(l.lemmatize("contains", FiniteTag::Vbd).is_err());
    }

    #[test]
    fn passive_auxiliaries() {
        assert_eq!(passive_aux(Tense::Present, Number::Plural), "are");
        assert_eq!(passive_aux(Tense::Present, Number::Singular), "is");
        assert_eq!(passive_aux(Tense::Past, Number::Plural), "were");
        assert_eq!(passive_aux(Tense::Past, Number::Singular), "was");
    }

    #[test]
    fn noun_phrase_number() {
        let np = |s: &str| np_number(&parse_bracketed(s).unwrap());
        assert_eq!(np("(NP (NNP Matt) (NNP Dillon) (CC and) (NNP Gary) (NNP Sinise))"), Ok(Number::Plural));
        assert_eq!(
            np("(NP (NP (NNP Matt) (NNP Dillon)) (CC and) (NP (NNP Gary) (NNP Sinise)))"),
            Ok(Number::Plural)
        );
        assert_eq!(np("(NP (DT the) (NN movie))"), Ok(Number::Singular));
        assert_eq!(np("(NP (DT the) (NNS managers))"), Ok(Number::Plural));
        assert_eq!(np("(NP (CD 16) (NNP El) (NNPS Grecos))"), Ok(Number::Plural));
        assert_eq!(
            np("(NP (NP (DT the) (NN judge)) (PP (IN behind) (NP (DT the) (NNS managers))))"),
            Ok(Number::Singular)
        );
        assert_eq!(np("(NP (DT those))"), Err(MorphError::NoNominalHead));
    }

    #[test]
    fn present_forms_round_trip_through_tags() {
        let l = lex();
        for lemma in ["contain", "star", "see", "teach", "carry", "fix"] {
            for (number, tag) in [(Number::Singular, "VBZ"), (Number::Plural, "VBP")] {
                let form = l.inflect(lemma, Tense::Present, number).unwrap();
                let (t, n) = detect_tense_number(tag).unwrap();
                assert_eq!((t, n), (Tense::Present, Some(number)));
                let ftag = FiniteTag::from_tag(tag).unwrap();
                assert_eq!(l.lemmatize(form, ftag).unwrap(), lemma);
            }
        }
    }

    #[test]
    fn rejects_short_lines() {
        assert!(matches!(
            Lexicon::from_tsv("see\tsees\tsee\tsaw\n"),
            Err(MorphError::BadLexiconLine { line: 1, .. })
        ));
    }
}
