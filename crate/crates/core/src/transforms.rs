//! Surface rewrites of a transitive clause: inversion, passivization and
//! token shuffling.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::clause::TransitiveClause;
use crate::morphology::{passive_aux, Lexicon, MorphError};
use crate::treebank::ConstituencyTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transformation {
    Inversion,
    Passivization,
    PassivizedInversion,
    Shuffle,
}

impl fmt::Display for Transformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Inversion => "inversion",
            Self::Passivization => "passivization",
            Self::PassivizedInversion => "passivized-inversion",
            Self::Shuffle => "shuffle",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratedSentence {
    pub tokens: Vec<String>,
    pub provenance: Transformation,
    pub source_id: String,
}

impl GeneratedSentence {
    /// Detokenized text with punctuation attached to the preceding word.
    pub fn surface(&self) -> String {
        detokenize(&self.tokens)
    }
}

fn is_punct(tok: &str) -> bool {
    !tok.is_empty() && tok.chars().all(|c| c.is_ascii_punctuation())
}

pub fn detokenize(tokens: &[String]) -> String {
    let mut out = String::new();
    for tok in tokens {
        let attach = matches!(tok.as_str(), "." | "," | "!" | "?" | ";" | ":" | "'s" | "n't");
        if !out.is_empty() && !attach {
            out.push(' ');
        }
        out.push_str(tok);
    }
    out
}

fn capitalize(tok: &str) -> String {
    let mut chars = tok.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn decapitalize(tok: &str) -> String {
    let mut chars = tok.chars();
    match chars.next() {
        Some(c) => c.to_lowercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Tokens of an argument NP, capitalized at sentence start and otherwise
/// lowercased when its first word is title-case but not a proper noun.
fn place_np(np: &ConstituencyTree, initial: bool) -> Vec<String> {
    let mut leaves: Vec<(String, String)> =
        np.leaves().map(|(tag, tok)| (tag.to_string(), tok.to_string())).collect();
    if let Some((tag, tok)) = leaves.first_mut() {
        if initial {
            *tok = capitalize(tok);
        } else if !matches!(tag.as_str(), "NNP" | "NNPS") && is_title_case(tok) {
            *tok = decapitalize(tok);
        }
    }
    leaves.into_iter().map(|(_, tok)| tok).collect()
}

fn is_title_case(tok: &str) -> bool {
    let mut chars = tok.chars();
    matches!(chars.next(), Some(c) if c.is_uppercase()) && !chars.any(char::is_uppercase)
}

fn assemble(
    clause: &TransitiveClause,
    front: &ConstituencyTree,
    verb_group: &[&str],
    back: &ConstituencyTree,
) -> Vec<String> {
    let mut tokens = place_np(front, true);
    tokens.extend(verb_group.iter().map(|s| s.to_string()));
    tokens.extend(place_np(back, false));
    tokens.extend(clause.rest_tokens());
    if !clause.trailing_punct.is_empty() {
        tokens.push(clause.trailing_punct.clone());
    }
    tokens
}

/// Object and subject exchanged, verb re-inflected for the new subject.
pub fn invert(
    clause: &TransitiveClause,
    lexicon: &Lexicon,
    source_id: &str,
) -> Result<GeneratedSentence, MorphError> {
    let verb = lexicon.inflect(&clause.verb_lemma, clause.tense, clause.object_number)?;
    Ok(GeneratedSentence {
        tokens: assemble(clause, &clause.object, &[verb], &clause.subject),
        provenance: Transformation::Inversion,
        source_id: source_id.to_string(),
    })
}

/// Meaning-preserving passive: object, auxiliary, participle, `by`, subject.
pub fn passivize(
    clause: &TransitiveClause,
    lexicon: &Lexicon,
    source_id: &str,
) -> Result<GeneratedSentence, MorphError> {
    let participle = lexicon.past_participle(&clause.verb_lemma)?;
    let aux = passive_aux(clause.tense, clause.object_number);
    Ok(GeneratedSentence {
        tokens: assemble(clause, &clause.object, &[aux, participle, "by"], &clause.subject),
        provenance: Transformation::Passivization,
        source_id: source_id.to_string(),
    })
}

/// Passive of the inverted clause: the subject stays in front and becomes
/// the patient.
pub fn passivize_inverted(
    clause: &TransitiveClause,
    lexicon: &Lexicon,
    source_id: &str,
) -> Result<GeneratedSentence, MorphError> {
    let participle = lexicon.past_participle(&clause.verb_lemma)?;
    let aux = passive_aux(clause.tense, clause.subject_number);
    Ok(GeneratedSentence {
        tokens: assemble(clause, &clause.subject, &[aux, participle, "by"], &clause.object),
        provenance: Transformation::PassivizedInversion,
        source_id: source_id.to_string(),
    })
}

/// Uniform random permutation of `tokens`. A final punctuation token stays
/// in place.
pub fn shuffle_tokens<R: Rng + ?Sized>(tokens: &[String], rng: &mut R) -> Vec<String> {
    let mut out = tokens.to_vec();
    let movable = match out.last() {
        Some(last) if out.len() > 1 && is_punct(last) => out.len() - 1,
        _ => out.len(),
    };
    out[..movable].shuffle(rng);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clause::analyze_clause;
    use crate::treebank::parse_bracketed;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn clause(s: &str) -> TransitiveClause {
        analyze_clause(&parse_bracketed(s).unwrap(), &Lexicon::bundled()).unwrap()
    }

    const EL_GRECO: &str = "(S (NP (DT This) (JJ small) (NN collection)) (VP (VBZ contains) (NP (CD 16) (NNP El) (NNPS Grecos))) (. .))";
    const MOVIE: &str = "(S (NP (DT the) (NN movie)) (VP (VBZ stars) (NP (NNP Matt) (NNP Dillon) (CC and) (NNP Gary) (NNP Sinise))))";

    #[test]
    fn el_greco_rewrites() {
        let c = clause(EL_GRECO);
        let l = Lexicon::bundled();
        assert_eq!(invert(&c, &l, "s").unwrap().surface(), "16 El Grecos contain this small collection.");
        assert_eq!(
            passivize(&c, &l, "s").unwrap().surface(),
            "16 El Grecos are contained by this small collection."
        );
        assert_eq!(
            passivize_inverted(&c, &l, "s").unwrap().surface(),
            "This small collection is contained by 16 El Grecos."
        );
    }

    #[test]
    fn coordination_agreement() {
        let c = clause(MOVIE);
        let out = invert(&c, &Lexicon::bundled(), "s").unwrap();
        assert_eq!(out.surface(), "Matt Dillon and Gary Sinise star the movie");
    }

    #[test]
    fn past_passives() {
        let l = Lexicon::bundled();
        let c = clause("(S (NP (DT the) (NNS tourists)) (VP (VBD supported) (NP (DT the) (NNS authors))))");
        assert_eq!(passivize(&c, &l, "s").unwrap().surface(), "The authors were supported by the tourists");
        let c = clause("(S (NP (DT the) (NNS senators)) (VP (VBD helped) (NP (DT the) (NNS managers))))");
        let expected = "The senators were helped by the managers";
        assert_eq!(passivize_inverted(&c, &l, "s").unwrap().surface(), expected);
        assert_eq!(passivize(&c.swapped(), &l, "s").unwrap().surface(), expected);
    }

    #[test]
    fn proper_noun_subject_keeps_case() {
        let l = Lexicon::bundled();
        let c = clause("(S (NP (NNP Maria)) (VP (VBD fixed) (NP (DT the) (NN engine))) (. .))");
        assert_eq!(invert(&c, &l, "s").unwrap().surface(), "The engine fixed Maria.");
    }

    #[test]
    fn adjuncts_follow_the_second_argument() {
        let l = Lexicon::bundled();
        let c = clause("(S (NP (DT The) (NN lawyer)) (VP (VBD saw) (NP (DT the) (NNS actors)) (PP (IN in) (NP (DT the) (NN park)))) (. .))");
        assert_eq!(invert(&c, &l, "s").unwrap().surface(), "The actors saw the lawyer in the park.");
        assert_eq!(
            passivize(&c, &l, "s").unwrap().surface(),
            "The actors were seen by the lawyer in the park."
        );
    }

    #[test]
    fn past_inversion_is_an_involution() {
        let l = Lexicon::bundled();
        let c = clause("(S (NP (DT The) (NN lawyer)) (VP (VBD saw) (NP (DT the) (NNS actors))) (. .))");
        let back = invert(&c.swapped(), &l, "s").unwrap();
        assert_eq!(back.surface(), "The lawyer saw the actors.");
    }

    #[test]
    fn shuffle_is_seeded_and_keeps_final_period() {
        let toks: Vec<String> =
            "This small collection contains 16 El Grecos .".split(' ').map(String::from).collect();
        let a = shuffle_tokens(&toks, &mut ChaCha8Rng::seed_from_u64(7));
        let b = shuffle_tokens(&toks, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
        assert_eq!(a.last().unwrap(), ".");
        let mut sa = a.clone();
        let mut st = toks.clone();
        sa.sort();
        st.sort();
        assert_eq!(sa, st);
        let one = vec!["x".to_string()];
        assert_eq!(shuffle_tokens(&one, &mut ChaCha8Rng::seed_from_u64(1)), one);
    }
}
