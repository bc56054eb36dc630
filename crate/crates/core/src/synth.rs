//! Synthetic MNLI-shaped corpora with gold constituency parses.
//!
//! Rows mimic the label/overlap statistics of crowd-sourced NLI data. Every
//! premise is a transitive clause with random modifiers (adjectives, PPs,
//! coordinated arguments, a VP adjunct). Hypotheses drop some modifiers
//! regardless of label; entailed ones add nothing else or reorder the
//! conjuncts of a coordinated object, so all their words occur in the
//! premise, while neutral and contradictory ones also replace or add a word.
//! Labels are split 50% entailment, 25% neutral, 25% contradiction. Most
//! hypotheses are simple transitive clauses, so the corpus also feeds the
//! augmentation strategies.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Label, NliExample, Sentence};
use crate::diagnostics::{DiagnosticsError, WordEntry, WordLists};
use crate::morphology::{Lexicon, Number, Tense};
use crate::treebank::ConstituencyTree as T;

const BUNDLED_TRAIN_WORDS: &str = include_str!("../data/words_train.txt");

const GENRES: [(&str, u32); 5] =
    [("fiction", 23), ("government", 23), ("slate", 22), ("travel", 22), ("telephone", 10)];

/// Training vocabulary shipped with the crate; content words are disjoint
/// from the diagnostic vocabulary.
pub fn bundled_train_words() -> WordLists {
    WordLists::parse(BUNDLED_TRAIN_WORDS).expect("bundled word lists are well-formed")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    /// Hypothesis drops some premise modifiers, or copies the premise.
    Reduce,
    /// Conjuncts of a coordinated argument in the opposite order.
    Reorder,
    NewPredicate,
    AddedModifier,
    NewObject,
    NewSubject,
    NewVerb,
    Negation,
}

impl Kind {
    fn label(self) -> Label {
        use Kind::*;
        match self {
            Reduce | Reorder => Label::Entailment,
            NewPredicate | AddedModifier | NewObject => Label::Neutral,
            NewSubject | NewVerb | Negation => Label::Contradiction,
        }
    }
}

const ENTAILING: [Kind; 6] =
    [Kind::Reduce, Kind::Reduce, Kind::Reduce, Kind::Reduce, Kind::Reorder, Kind::Reduce];
const NEUTRAL: [Kind; 3] = [Kind::NewPredicate, Kind::AddedModifier, Kind::NewObject];
const CONTRADICTING: [Kind; 3] = [Kind::NewSubject, Kind::NewVerb, Kind::Negation];

/// A noun phrase under construction, kept abstract until rendered.
#[derive(Debug, Clone)]
struct Np {
    det: Option<&'static str>,
    adj: Option<String>,
    head: String,
    tag: &'static str,
    number: Number,
    pp: Option<(String, Box<Np>)>,
    conj: Option<Box<Np>>,
}

impl Np {
    fn number(&self) -> Number {
        if self.conj.is_some() {
            Number::Plural
        } else {
            self.number
        }
    }

    /// Swaps the two conjuncts of a coordination.
    fn reversed(&self) -> Np {
        match &self.conj {
            Some(second) => {
                Np { conj: Some(Box::new(Np { conj: None, ..self.clone() })), ..(**second).clone() }
            }
            None => self.clone(),
        }
    }

    fn tree(&self, initial: bool) -> T {
        if let Some(second) = &self.conj {
            let first = Np { conj: None, ..self.clone() };
            return T::node("NP", vec![first.tree(initial), T::leaf("CC", "and"), second.tree(false)]);
        }
        let mut leaves = Vec::new();
        if let Some(d) = self.det {
            let next = self.adj.as_deref().unwrap_or(&self.head);
            let vowel = next.starts_with(['a', 'e', 'i', 'o', 'u']);
            leaves.push(T::leaf("DT", if d == "a" && vowel { "an" } else { d }));
        }
        if let Some(a) = &self.adj {
            leaves.push(T::leaf("JJ", a.clone()));
        }
        leaves.push(T::leaf(self.tag, self.head.clone()));
        if initial {
            let (tag, tok) = {
                let first = &leaves[0];
                (first.label().to_string(), first.token().unwrap_or_default().to_string())
            };
            leaves[0] = T::leaf(tag, capitalize(&tok));
        }
        let base = T::node("NP", leaves);
        match &self.pp {
            Some((prep, obj)) => {
                T::node("NP", vec![base, T::node("PP", vec![T::leaf("IN", prep.clone()), obj.tree(false)])])
            }
            None => base,
        }
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
}

struct Vocab<'a> {
    nouns: &'a [WordEntry],
    names: &'a [WordEntry],
    things: &'a [WordEntry],
    places: &'a [WordEntry],
    person_verbs: &'a [WordEntry],
    thing_verbs: &'a [WordEntry],
    adjectives: &'a [WordEntry],
    preps: &'a [WordEntry],
}

impl<'a> Vocab<'a> {
    fn new(words: &'a WordLists) -> Result<Self, DiagnosticsError> {
        let get = |c: &str| {
            words
                .class(c)
                .ok_or_else(|| DiagnosticsError::WordListTooSmall { class: c.to_string(), needed: 2 })
        };
        Ok(Self {
            nouns: get("noun")?,
            names: get("name")?,
            things: get("thing")?,
            places: get("place")?,
            person_verbs: get("vt")?,
            thing_verbs: get("vthing")?,
            adjectives: get("adj")?,
            preps: get("prep")?,
        })
    }
}

struct Builder<'a> {
    v: Vocab<'a>,
    lexicon: &'a Lexicon,
    rng: ChaCha8Rng,
}

/// A finite clause: subject, verb lemma, object, optional VP adjunct.
#[derive(Clone)]
struct Clause {
    subject: Np,
    verb: String,
    object: Np,
    thing_object: bool,
    adjunct: Option<(String, Np)>,
}

impl<'a> Builder<'a> {
    fn pick<'b>(&mut self, from: &'b [WordEntry]) -> &'b WordEntry {
        from.choose(&mut self.rng).expect("non-empty class")
    }

    fn pick_other<'b>(&mut self, from: &'b [WordEntry], not: &str) -> &'b WordEntry {
        loop {
            let e = self.pick(from);
            if e.forms.iter().all(|f| f != not) {
                return e;
            }
        }
    }

    fn common_np(&mut self, entry: &WordEntry) -> Np {
        let plural = entry.forms.len() > 1 && self.rng.gen_bool(0.4);
        let det = if plural {
            *["the", "the", "these", "some"].choose(&mut self.rng).unwrap()
        } else {
            *["the", "the", "a", "this"].choose(&mut self.rng).unwrap()
        };
        Np {
            det: Some(det),
            adj: None,
            head: entry.forms[usize::from(plural)].clone(),
            tag: if plural { "NNS" } else { "NN" },
            number: if plural { Number::Plural } else { Number::Singular },
            pp: None,
            conj: None,
        }
    }

    fn person(&mut self) -> Np {
        if self.rng.gen_bool(0.15) {
            let name = self.pick(self.v.names).forms[0].clone();
            return Np {
                det: None,
                adj: None,
                head: name,
                tag: "NNP",
                number: Number::Singular,
                pp: None,
                conj: None,
            };
        }
        let e = self.pick(self.v.nouns);
        self.common_np(e)
    }

    fn other_person(&mut self, not: &Np) -> Np {
        loop {
            let p = self.person();
            if p.head != not.head {
                return p;
            }
        }
    }

    fn place(&mut self) -> Np {
        let e = self.pick(self.v.places);
        self.common_np(e)
    }

    /// A random transitive clause; people objects take person verbs and
    /// thing objects take thing verbs.
    fn clause(&mut self) -> Clause {
        let subject = self.person();
        let thing_object = self.rng.gen_bool(0.5);
        let object = loop {
            let o = self.object(thing_object);
            if o.head != subject.head {
                break o;
            }
        };
        let verbs = if thing_object { self.v.thing_verbs } else { self.v.person_verbs };
        Clause { subject, verb: self.pick(verbs).forms[0].clone(), object, thing_object, adjunct: None }
    }

    fn other_verb(&mut self, c: &Clause) -> String {
        let pool = if c.thing_object { self.v.thing_verbs } else { self.v.person_verbs };
        self.pick_other(pool, &c.verb).forms[0].clone()
    }

    fn verb_leaf(&self, lemma: &str, tense: Tense, number: Number) -> T {
        let form = self.lexicon.inflect(lemma, tense, number).expect("training verbs are in the lexicon");
        let tag = match (tense, number) {
            (Tense::Past, _) => "VBD",
            (Tense::Present, Number::Singular) => "VBZ",
            (Tense::Present, Number::Plural) => "VBP",
        };
        T::leaf(tag, form)
    }

    fn sentence(&self, c: &Clause, tense: Tense) -> T {
        let mut vp = vec![self.verb_leaf(&c.verb, tense, c.subject.number()), c.object.tree(false)];
        if let Some((prep, np)) = &c.adjunct {
            vp.push(T::node("PP", vec![T::leaf("IN", prep.clone()), np.tree(false)]));
        }
        T::node("S", vec![c.subject.tree(true), T::node("VP", vp), T::leaf(".", ".")])
    }

    fn negated(&self, c: &Clause, tense: Tense) -> T {
        let aux = match (tense, c.subject.number()) {
            (Tense::Past, _) => T::leaf("VBD", "did"),
            (Tense::Present, Number::Singular) => T::leaf("VBZ", "does"),
            (Tense::Present, Number::Plural) => T::leaf("VBP", "do"),
        };
        let vp = T::node(
            "VP",
            vec![
                aux,
                T::leaf("RB", "not"),
                T::node("VP", vec![T::leaf("VB", c.verb.clone()), c.object.tree(false)]),
            ],
        );
        T::node("S", vec![c.subject.tree(true), vp, T::leaf(".", ".")])
    }

    fn adjective_np(&mut self, np: &mut Np) {
        if np.tag != "NNP" && np.conj.is_none() && np.pp.is_none() {
            np.adj = Some(self.pick(self.v.adjectives).forms[0].clone());
        }
    }

    /// Random modifiers: at most one on each argument, plus an adjunct.
    fn decorate(&mut self, c: &mut Clause) {
        match self.rng.gen_range(0..10) {
            0..=2 => self.adjective_np(&mut c.subject),
            3 | 4 => {
                let prep = self.pick(self.v.preps).forms[0].clone();
                c.subject.pp = Some((prep, Box::new(self.place())));
            }
            5 => {
                let second = self.other_person(&c.subject);
                if second.head != c.object.head {
                    c.subject.conj = Some(Box::new(second));
                }
            }
            _ => {}
        }
        match self.rng.gen_range(0..10) {
            0..=2 => self.adjective_np(&mut c.object),
            3 => {
                let second = self.object(c.thing_object);
                if second.head != c.object.head && second.head != c.subject.head {
                    c.object.conj = Some(Box::new(second));
                }
            }
            _ => {}
        }
        if self.rng.gen_bool(0.3) {
            let prep = self.pick(self.v.preps).forms[0].clone();
            c.adjunct = Some((prep, self.place()));
        }
    }

    fn reduce_np(&mut self, np: &Np) -> Np {
        let mut np = np.clone();
        if np.adj.is_some() && self.rng.gen_bool(0.75) {
            np.adj = None;
        }
        if np.pp.is_some() && self.rng.gen_bool(0.75) {
            np.pp = None;
        }
        if let Some(second) = np.conj.take() {
            if !self.rng.gen_bool(0.75) {
                np.conj = Some(second);
            } else if self.rng.gen_bool(0.5) {
                np = *second;
            }
        }
        np
    }

    /// A copy of `c` with each modifier dropped with probability 3/4.
    fn reduce(&mut self, c: &Clause) -> Clause {
        let mut h = c.clone();
        h.subject = self.reduce_np(&c.subject);
        h.object = self.reduce_np(&c.object);
        if self.rng.gen_bool(0.75) {
            h.adjunct = None;
        }
        h
    }

    fn object(&mut self, thing: bool) -> Np {
        if thing {
            let e = self.pick(self.v.things);
            self.common_np(e)
        } else {
            self.person()
        }
    }

    fn try_row(&mut self, kind: Kind) -> (T, T) {
        let mut p = self.clause();
        self.decorate(&mut p);
        if kind == Kind::Reorder && p.object.conj.is_none() {
            let second = self.object(p.thing_object);
            if second.head == p.object.head || second.head == p.subject.head {
                return self.try_row(kind);
            }
            p.object = Np { adj: None, ..p.object };
            p.object.conj = Some(Box::new(second));
        }
        // A coordinated subject keeps the verb form only in the past tense.
        let tense =
            if p.subject.conj.is_none() && self.rng.gen_bool(0.5) { Tense::Present } else { Tense::Past };
        let mut h = self.reduce(&p);
        match kind {
            Kind::Reduce => {}
            Kind::Reorder => {
                h = p.clone();
                h.object = p.object.reversed();
                if self.rng.gen_bool(0.5) {
                    h.adjunct = None;
                }
            }
            Kind::NewPredicate => {
                let fresh = self.clause();
                h.verb = fresh.verb;
                h.object = fresh.object;
                h.thing_object = fresh.thing_object;
            }
            Kind::AddedModifier => {
                if h.object.tag != "NNP" && h.object.conj.is_none() {
                    self.adjective_np(&mut h.object);
                } else {
                    h.subject.pp = None;
                    self.adjective_np(&mut h.subject);
                }
            }
            Kind::NewObject => h.object = self.object(h.thing_object),
            Kind::NewSubject => h.subject = self.other_person(&p.subject),
            Kind::NewVerb => h.verb = self.other_verb(&h),
            Kind::Negation => return (self.sentence(&p, tense), self.negated(&h, tense)),
        }
        (self.sentence(&p, tense), self.sentence(&h, tense))
    }

    /// Retries until the hypothesis words are covered by the premise exactly
    /// for the pure reductions and reorderings.
    fn row(&mut self, kind: Kind) -> (T, T) {
        loop {
            let (p, h) = self.try_row(kind);
            let pw: Vec<String> = p.yield_tokens().iter().map(|t| t.to_lowercase()).collect();
            let covered = h.yield_tokens().iter().all(|t| pw.contains(&t.to_lowercase()));
            if covered == matches!(kind, Kind::Reduce | Kind::Reorder) {
                return (p, h);
            }
        }
    }
}

/// `rows` parsed NLI examples drawn deterministically from `seed`.
pub fn generate_corpus(
    words: &WordLists,
    lexicon: &Lexicon,
    rows: usize,
    seed: u64,
) -> Result<Vec<NliExample>, DiagnosticsError> {
    let mut b = Builder { v: Vocab::new(words)?, lexicon, rng: ChaCha8Rng::seed_from_u64(seed) };
    let genre_total: u32 = GENRES.iter().map(|g| g.1).sum();
    let mut out = Vec::with_capacity(rows);
    for i in 0..rows {
        let kind = match i % 4 {
            0 | 1 => *ENTAILING.choose(&mut b.rng).unwrap(),
            2 => *NEUTRAL.choose(&mut b.rng).unwrap(),
            _ => *CONTRADICTING.choose(&mut b.rng).unwrap(),
        };
        let mut g = b.rng.gen_range(0..genre_total);
        let genre = GENRES
            .iter()
            .find(|(_, w)| {
                if g < *w {
                    true
                } else {
                    g -= w;
                    false
                }
            })
            .map(|(name, _)| *name)
            .unwrap_or("fiction");
        let (premise, hypothesis) = b.row(kind);
        out.push(NliExample {
            id: format!("syn-{seed}-{i:06}"),
            genre: genre.to_string(),
            premise: Sentence::from_parse(premise),
            hypothesis: Sentence::from_parse(hypothesis),
            label: kind.label(),
        });
    }
    Ok(out)
}
