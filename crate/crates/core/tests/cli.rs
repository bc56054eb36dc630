use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_syntaug");

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn syntaug(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn extract_counts_fixture_clauses() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("clauses.jsonl");
    let o = syntaug(&["extract", "--input", s(&fixture("mini_mnli.tsv")), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let ids: Vec<String> = text
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["id"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(ids, ["f01", "f02", "f03", "f04", "f13", "f15", "f17", "f18"]);
    assert!(dir.path().join("clauses.jsonl.meta.json").exists());
}

#[test]
fn extract_empty_file_is_fine() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty.tsv");
    fs::write(&input, "").unwrap();
    let out = dir.path().join("clauses.jsonl");
    let o = syntaug(&["extract", "--input", s(&input), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(&out).unwrap(), "");
}

#[test]
fn extract_missing_parse_column_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.tsv");
    let text = fs::read_to_string(fixture("mini_mnli.tsv")).unwrap();
    let cut: String = text
        .lines()
        .map(|l| {
            let cols: Vec<&str> = l.split('\t').collect();
            [&cols[..4], &cols[5..]].concat().join("\t") + "\n"
        })
        .collect();
    fs::write(&input, cut).unwrap();
    let o = syntaug(&["extract", "--input", s(&input), "--out", s(&dir.path().join("x"))]);
    assert_eq!(o.status.code(), Some(3));
}

fn augment(out: &Path, tier: &str) -> Output {
    syntaug(&[
        "augment",
        "--input",
        s(&fixture("synth_mnli.tsv")),
        "--strategy",
        "inv-trans-hyp",
        "--tier",
        tier,
        "--seed",
        "13",
        "--out",
        s(out),
    ])
}

#[test]
fn augment_matches_golden_and_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.tsv");
    let b = dir.path().join("b.tsv");
    assert_eq!(augment(&a, "small").status.code(), Some(0));
    assert_eq!(augment(&b, "small").status.code(), Some(0));
    let name = "synth_mnli.inv-trans-hyp.small.13.tsv";
    assert_eq!(fs::read(&a).unwrap(), fs::read(golden(name)).unwrap());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let prov = |p: &Path| fs::read(format!("{}.provenance.jsonl", p.display())).unwrap();
    assert_eq!(prov(&a), fs::read(golden(&format!("{name}.provenance.jsonl"))).unwrap());
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(format!("{}.meta.json", a.display())).unwrap()).unwrap();
    assert_eq!(meta["config"]["seed"], 13);
    assert_eq!(meta["config"]["tier"], "small");
    assert_eq!(meta["version"], syntaug::VERSION);
}

#[test]
fn augment_tier_beyond_pool_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = augment(&dir.path().join("a.tsv"), "large");
    assert_eq!(o.status.code(), Some(2));
}

fn diagnose(dir: &Path) -> (PathBuf, Vec<(String, String)>) {
    let out = dir.join("diag.jsonl");
    let o = syntaug(&["diagnose", "--n-per-subcase", "5", "--seed", "3", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let rows = fs::read_to_string(&out)
        .unwrap()
        .lines()
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            (v["id"].as_str().unwrap().to_string(), v["gold"].as_str().unwrap().to_string())
        })
        .collect();
    (out, rows)
}

#[test]
fn oracle_predictions_score_perfectly() {
    let dir = tempfile::tempdir().unwrap();
    let (diag, rows) = diagnose(dir.path());
    assert_eq!(rows.len(), 150);
    let preds: String = rows
        .iter()
        .map(|(id, g)| format!("{id}\t{}\n", if g == "entailment" { "entailment" } else { "contradiction" }))
        .collect();
    let pred_path = dir.path().join("preds.tsv");
    fs::write(&pred_path, preds).unwrap();
    let out = dir.path().join("report.json");
    let o =
        syntaug(&["evaluate", "--diagnostics", s(&diag), "--predictions", s(&pred_path), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["accuracy"], 1.0);
    for key in ["cells", "subcases"] {
        let items = report[key].as_array().unwrap();
        assert!(!items.is_empty());
        assert!(items.iter().all(|c| c["accuracy"] == 1.0));
    }
}

#[test]
fn missing_prediction_names_the_id() {
    let dir = tempfile::tempdir().unwrap();
    let (diag, rows) = diagnose(dir.path());
    let preds: String = rows[1..].iter().map(|(id, _)| format!("{id}\tneutral\n")).collect();
    let pred_path = dir.path().join("preds.tsv");
    fs::write(&pred_path, preds).unwrap();
    let o = syntaug(&[
        "evaluate",
        "--diagnostics",
        s(&diag),
        "--predictions",
        s(&pred_path),
        "--out",
        s(&dir.path().join("r.json")),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains(&rows[0].0));
}

#[test]
fn probe_emits_paired_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("probe.json");
    let o = syntaug(&[
        "probe",
        "--input",
        s(&fixture("synth_mnli.tsv")),
        "--tier",
        "small",
        "--n-per-subcase",
        "10",
        "--epochs",
        "10",
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(r["unaugmented"]["cells"].is_array());
    assert!(r["augmented"]["cells"].is_array());
    let table = String::from_utf8_lossy(&o.stdout);
    assert!(table.contains("unaugmented") && table.contains("augmented"));

    let multi = dir.path().join("multi.json");
    let o = syntaug(&[
        "probe",
        "--runs",
        "2",
        "--base-rows",
        "400",
        "--heldout-rows",
        "200",
        "--tier",
        "small",
        "--n-per-subcase",
        "10",
        "--epochs",
        "10",
        "--out",
        s(&multi),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(&multi).unwrap()).unwrap();
    assert_eq!(r["runs"].as_array().unwrap().len(), 2);
    assert_eq!(r["cells"].as_array().unwrap().len(), 6);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(syntaug(&["augment", "--tier", "huge"]).status.code(), Some(1));
    assert_eq!(syntaug(&["--help"]).status.code(), Some(0));
}
