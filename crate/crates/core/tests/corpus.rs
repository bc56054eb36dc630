use syntaug::augmentation::{build_candidates, sample_tier, Strategy, Tier};
use syntaug::corpus::{
    parse_corpus, read_corpus, render_corpus, write_corpus, CorpusError, CorpusFormat, NliExample,
};
use syntaug::morphology::Lexicon;

fn fixture(name: &str) -> Vec<NliExample> {
    read_corpus(format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR")), CorpusFormat::MnliTsv).unwrap()
}

fn round_trip(corpus: &[NliExample]) {
    let dir = tempfile::tempdir().unwrap();
    for format in [CorpusFormat::MnliTsv, CorpusFormat::Jsonl] {
        let path = dir.path().join("out");
        write_corpus(corpus, &path, format).unwrap();
        assert_eq!(read_corpus(&path, format).unwrap(), corpus, "{format:?}");
    }
}

#[test]
fn mini_fixture_has_twenty_rows_with_genres() {
    let corpus = fixture("mini_mnli.tsv");
    assert_eq!(corpus.len(), 20);
    assert_eq!(corpus.iter().filter(|e| e.genre == "telephone").count(), 2);
    assert!(corpus.iter().all(|e| !e.genre.is_empty()));
    round_trip(&corpus);
}

#[test]
fn augmentation_sets_round_trip() {
    let corpus = fixture("synth_mnli.tsv");
    round_trip(&corpus);
    let lex = Lexicon::bundled();
    for strategy in [Strategy::InvTransHyp, Strategy::CombinedOrigPremise, Strategy::RandomShuffle] {
        let pool = build_candidates(strategy, &corpus, &lex, 13).unwrap();
        let set = sample_tier(&pool, Tier::Small, 13).unwrap();
        round_trip(&set.examples);
    }
}

#[test]
fn unknown_label_names_the_line() {
    let text = render_corpus(&fixture("mini_mnli.tsv")[..3], CorpusFormat::MnliTsv);
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let cols: Vec<&str> = lines[2].split('\t').collect();
    let mut cols: Vec<String> = cols.into_iter().map(String::from).collect();
    cols[2] = "maybe".into();
    lines[2] = cols.join("\t");
    match parse_corpus(&(lines.join("\n") + "\n"), CorpusFormat::MnliTsv) {
        Err(CorpusError::UnknownLabel { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected UnknownLabel, got {other:?}"),
    }
}
