#[allow(dead_code)]
mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Duration;

use common::stub::StubServer;
use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn traitlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_traitlab")).args(args).output().unwrap()
}

fn fixture(name: &str) -> String {
    fixtures().join(name).to_string_lossy().into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn profile_synthetic_fixture_as_json() {
    let out = traitlab(&["profile", &fixture("synthetic"), "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    for field in ["imperative_ratio", "ttr", "avg_sentence_len", "sentiment_variance", "detachment"] {
        assert!(v["profile"][field].is_f64(), "{field}");
    }
    assert_eq!(v["metadata"]["cap_tokens"], 200_000);
    assert_eq!(v["metadata"]["seed"], 0);
    assert_eq!(v["metadata"]["lexicon_digests"].as_object().unwrap().len(), 6);

    let expected: Value = serde_json::from_str(&fs::read_to_string(fixtures().join("synthetic/expected.json")).unwrap()).unwrap();
    let (got, want) = (&v["profile"], &expected["profile"]);
    assert_eq!(got["imperative_ratio"], want["imperative_ratio"]);
    assert_eq!(got["detachment"], want["detachment"]);
    assert_eq!(got["ttr"], want["ttr"]);
    let sv = |x: &Value| x["sentiment_variance"].as_f64().unwrap();
    assert!((sv(got) - sv(want)).abs() < 1e-9);
}

#[test]
fn profile_tsv_has_table_columns() {
    let out = traitlab(&["profile", &fixture("synthetic"), "--format", "tsv", "--cap", "0"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("Imperative\tTTR\tComplexity\tSentiment\tDetachment"));
    assert_eq!(lines.next().unwrap().split('\t').count(), 5);
}

#[test]
fn profile_exit_codes() {
    assert_eq!(traitlab(&["profile", "/definitely/not/here"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("empty.txt"), "  \n").unwrap();
    let out = traitlab(&["profile", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    assert_eq!(traitlab(&["profile"]).status.code(), Some(2));
    assert_eq!(traitlab(&["profile", &fixture("synthetic"), "--format", "xml"]).status.code(), Some(2));
}

#[test]
fn profile_is_rerunnable() {
    let a = traitlab(&["profile", &fixture("ten_sentences.txt"), "--seed", "5"]);
    let b = traitlab(&["profile", &fixture("ten_sentences.txt"), "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["profile"]["imperative_ratio"], 0.3);
}

#[test]
fn score_outputs_feed_correlate() {
    let inv = fixture("inventory.json");
    let resp = fixture("responses.jsonl");
    let out = traitlab(&["score", "--inventory", &inv, "--responses", &resp]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["traits"]["E"]["n_skipped"], 1);
    assert_eq!(v["traits"]["N"]["n_answered"], 3);

    // Two scored "models" stacked into a trait matrix, then correlated.
    let dir = tempfile::tempdir().unwrap();
    let mut matrix = String::from("model,O,C,E,A,N\n");
    for (name, file) in [("m1", resp.clone()), ("m2", resp.clone()), ("m3", resp)] {
        let csv = stdout(&traitlab(&["score", "--inventory", &inv, "--responses", &file, "--format", "csv", "--model", name]));
        matrix.push_str(csv.lines().nth(1).unwrap());
        matrix.push('\n');
    }
    let traits = dir.path().join("traits.csv");
    fs::write(&traits, matrix).unwrap();
    let perf = dir.path().join("perf.csv");
    fs::write(&perf, "model,x\nm1,0.1\nm2,0.2\nm3,0.3\n").unwrap();
    let out = traitlab(&["correlate", "--traits", traits.to_str().unwrap(), "--perf", perf.to_str().unwrap()]);
    // Identical trait rows have zero variance: a domain error, not a crash.
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn score_rejects_unknown_items() {
    let dir = tempfile::tempdir().unwrap();
    let resp = dir.path().join("r.jsonl");
    fs::write(&resp, "{\"item_id\":\"zz\",\"raw\":\"(A)\"}\n").unwrap();
    let out = traitlab(&["score", "--inventory", &fixture("inventory.json"), "--responses", resp.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

fn correlate_cell(text: &str, table: &str, rows: &str, trait_code: &str, domain: &str) -> f64 {
    let marker = format!("# table={table} rows={rows} ");
    let section = text.split(&marker).nth(1).unwrap();
    let mut lines = section.lines().skip(1);
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == domain).unwrap();
    let row = lines.find(|l| l.starts_with(&format!("{trait_code},"))).unwrap();
    row.split(',').nth(col).unwrap().parse().unwrap()
}

#[test]
fn correlate_reproduces_extraversion_stem() {
    let out = traitlab(&["correlate", "--traits", &fixture("table2.csv"), "--perf", &fixture("table1_mmlupro.csv")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = correlate_cell(&stdout(&out), "table1_mmlupro", "all_rows", "E", "STEM");
    assert!((r - 0.43).abs() <= 0.10, "{r}");
}

#[test]
fn correlate_with_base_reports_both_row_sets_and_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let out = traitlab(&[
        "correlate",
        "--traits",
        &fixture("table2.csv"),
        "--perf",
        &fixture("table1_mmlupro.csv"),
        "--perf",
        &fixture("table1_mmlu.csv"),
        "--base",
        "llama_3_8b",
        "--pairs",
        "--format",
        "json",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = json(&out);
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 4);
    assert_eq!(results[0]["n"], 12);
    assert_eq!(results[1]["n"], 11);
    assert_eq!(results[0]["pairs"].as_array().unwrap().len(), 70);
    let pairs = fs::read_to_string(dir.path().join("pairs_table1_mmlupro_with_base.jsonl")).unwrap();
    assert_eq!(pairs.lines().count(), 70);
    let first: Value = serde_json::from_str(pairs.lines().next().unwrap()).unwrap();
    assert!(first["combo_rho"].as_f64().unwrap() >= 0.0);
    assert!(dir.path().join("correlations_table1_mmlu_without_base.csv").exists());
    assert_eq!(
        traitlab(&["correlate", "--traits", &fixture("table2.csv"), "--perf", &fixture("table1_mmlu.csv"), "--base", "nope"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn pca_both_preprocessings_with_plot() {
    let dir = tempfile::tempdir().unwrap();
    let plot = dir.path().join("scatter.svg");
    let out = traitlab(&[
        "pca",
        "--traits",
        &fixture("table2.csv"),
        "--preprocessing",
        "both",
        "--out-dir",
        dir.path().to_str().unwrap(),
        "--plot",
        plot.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "preprocessing,rows,n,PC1,PC2");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("centered,all_rows,12,"));
    assert!(lines[2].starts_with("standardized,all_rows,12,"));
    let svg = fs::read_to_string(dir.path().join("scatter_standardized_all_rows.svg")).unwrap();
    assert!(svg.contains("literary_classicist"));
    let loadings = fs::read_to_string(dir.path().join("pca_centered_all_rows_loadings.csv")).unwrap();
    assert_eq!(loadings.lines().count(), 6);
    let scores = fs::read_to_string(dir.path().join("pca_centered_all_rows_scores.csv")).unwrap();
    assert_eq!(scores.lines().count(), 13);
}

#[test]
fn sample_plan_manifest_is_reproducible() {
    let args = ["sample", "--budget", "68551839", "--seq-len", "512", "--seed", "7"];
    let a = traitlab(&args);
    let b = traitlab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["n_sequences"], 133_891);
    assert_eq!(v["selected_tokens"], 68_552_192);
    assert_eq!(v["rounding"], "ceil");
    assert_eq!(v["replacement"], false);
    assert_eq!(traitlab(&["sample", "--budget", "100", "--seq-len", "512"]).status.code(), Some(1));
}

#[test]
fn sample_corpus_writes_chunks_and_digest() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let run = |d: &Path| {
        traitlab(&[
            "sample",
            "--budget",
            "20",
            "--seq-len",
            "4",
            "--seed",
            "3",
            "--input",
            &fixture("synthetic"),
            "--out-dir",
            d.to_str().unwrap(),
        ])
    };
    let a = run(&out_dir);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let manifest: Value = serde_json::from_slice(&fs::read(out_dir.join("manifest.json")).unwrap()).unwrap();
    let chunks = fs::read(out_dir.join("chunks.jsonl")).unwrap();
    let lines: Vec<Value> = chunks.split(|&b| b == b'\n').filter(|l| !l.is_empty()).map(|l| serde_json::from_slice(l).unwrap()).collect();
    assert_eq!(lines.len(), 5);
    assert!(lines.iter().all(|c| c["tokens"].as_array().unwrap().len() == 4));
    assert_eq!(manifest["inputs"][0]["path"], "corpus.txt");
    assert_eq!(manifest["output_sha256"].as_str().unwrap().len(), 64);
    let other = dir.path().join("again");
    run(&other);
    assert_eq!(fs::read(other.join("manifest.json")).unwrap(), fs::read(out_dir.join("manifest.json")).unwrap());
    assert_eq!(fs::read(other.join("chunks.jsonl")).unwrap(), chunks);
}

#[test]
fn synth_writes_corpus_and_expected_profile() {
    let dir = tempfile::tempdir().unwrap();
    let out = traitlab(&["synth", "--target", &fixture("synth_target.json"), "--out-dir", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(
        fs::read(dir.path().join("corpus.txt")).unwrap(),
        fs::read(fixtures().join("synthetic/corpus.txt")).unwrap()
    );
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"imperative_ratio":0.25,"detachment":0,"polarities":[0,0,0],"n_sentences":3}"#).unwrap();
    assert_eq!(traitlab(&["synth", "--target", bad.to_str().unwrap()]).status.code(), Some(1));
}

const SECRET: &str = "sk-cli-test-c0ffee-9f8e7d";

fn administer(url: &str, out_dir: &Path, env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_traitlab"));
    cmd.args([
        "administer",
        "--inventory",
        &fixture("inventory.json"),
        "--base-url",
        url,
        "--model",
        "stub",
        "--api-key-env",
        "TRAITLAB_CLI_TEST_KEY",
        "--max-retries",
        "1",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    cmd.env_remove("TRAITLAB_CLI_TEST_KEY");
    if let Some(key) = env {
        cmd.env("TRAITLAB_CLI_TEST_KEY", key);
    }
    cmd.output().unwrap()
}

fn scan_for_secret(dir: &Path) {
    for entry in fs::read_dir(dir).unwrap() {
        let text = fs::read_to_string(entry.unwrap().path()).unwrap();
        assert!(!text.contains(SECRET));
    }
}

#[test]
fn administer_then_score_round_trip() {
    let server = StubServer::constant("(B) Moderately Accurate");
    let dir = tempfile::tempdir().unwrap();
    let out = administer(&server.url, dir.path(), Some(SECRET));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!String::from_utf8_lossy(&out.stdout).contains(SECRET));
    scan_for_secret(dir.path());
    let run: Value = serde_json::from_slice(&fs::read(dir.path().join("run.json")).unwrap()).unwrap();
    assert_eq!(run["transcript"].as_array().unwrap().len(), 20);
    assert_eq!(run["config"]["api_key_env"], "TRAITLAB_CLI_TEST_KEY");
    let scored = traitlab(&[
        "score",
        "--inventory",
        &fixture("inventory.json"),
        "--responses",
        dir.path().join("responses.jsonl").to_str().unwrap(),
    ]);
    let v = json(&scored);
    // B scores 4 on positive items and 2 on reverse-keyed ones; two of each per trait.
    assert_eq!(v["traits"]["O"]["mean"], 3.0);
    assert_eq!(v["traits"]["O"]["n_answered"], 4);
}

#[test]
fn administer_failure_modes() {
    let dir = tempfile::tempdir().unwrap();
    let down = StubServer::start(Duration::ZERO, |_, _| (503, "overloaded".into()));
    let out = administer(&down.url, dir.path(), Some(SECRET));
    assert_eq!(out.status.code(), Some(3));
    scan_for_secret(dir.path());
    let run: Value = serde_json::from_slice(&fs::read(dir.path().join("run.json")).unwrap()).unwrap();
    assert!(run["responses"].as_array().unwrap().iter().all(|r| r["outcome"]["Unparsed"].is_string()));

    let missing = tempfile::tempdir().unwrap();
    assert_eq!(administer(&down.url, missing.path(), None).status.code(), Some(2));
}
