use proptest::prelude::*;
use syntaug::corpus::{read_corpus, CorpusFormat};
use syntaug::treebank::{normalize_ws, parse_bracketed, ConstituencyTree};

fn label() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["S", "NP", "VP", "PP", "SBAR", "ADJP", "NP-SBJ"]).prop_map(String::from)
}

fn leaf() -> impl Strategy<Value = ConstituencyTree> {
    let tag = prop::sample::select(vec!["DT", "NN", "NNS", "VBD", "VBZ", "JJ", "IN", ".", ",", "PRP$"]);
    (tag, "[A-Za-z0-9'.,$-]{1,8}").prop_map(|(t, w)| ConstituencyTree::leaf(t, w))
}

fn tree() -> impl Strategy<Value = ConstituencyTree> {
    leaf().prop_recursive(5, 48, 4, |inner| {
        (label(), prop::collection::vec(inner, 1..4)).prop_map(|(l, kids)| ConstituencyTree::node(l, kids))
    })
}

proptest! {
    #[test]
    fn serialize_parse_round_trip(t in tree()) {
        let text = t.serialize();
        let back = parse_bracketed(&text).unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(back.serialize(), text);
        prop_assert_eq!(t.yield_tokens().len(), t.leaf_count());
    }

    #[test]
    fn whitespace_is_irrelevant(t in tree(), pad in "[ \t\n]{1,3}") {
        let loose = t.serialize().replace(' ', &pad).replace('(', &format!("{pad}("));
        prop_assert_eq!(parse_bracketed(&loose).unwrap().serialize(), normalize_ws(&t.serialize()));
    }
}

#[test]
fn fixture_parses_round_trip() {
    for name in ["mini_mnli.tsv", "synth_mnli.tsv"] {
        let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
        for ex in read_corpus(&path, CorpusFormat::MnliTsv).unwrap() {
            for sentence in [&ex.premise, &ex.hypothesis] {
                let Some(tree) = &sentence.parse else { continue };
                let text = tree.serialize();
                let again = parse_bracketed(&text).unwrap();
                assert_eq!(again.serialize(), text);
                assert_eq!(again.leaf_count(), tree.leaf_count());
            }
        }
    }
}

#[test]
fn rejects_unbalanced_and_empty_labels() {
    for bad in ["(S (NP (NN x))", "(S (NP (NN x))))", "( (NN x) (NN y))", "(S ( (NN x)))", ""] {
        assert!(parse_bracketed(bad).is_err(), "{bad:?} accepted");
    }
}
