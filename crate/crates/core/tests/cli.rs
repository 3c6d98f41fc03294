//! End-to-end runs of the command-line tool.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use influence_tracker::report::compare_block;
use influence_tracker::{generate_synthetic, load_dataset, BuildParams};
use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_influence-tracker"));
    cmd.env_remove("INFLUENCE_TRACKER_FORMAT");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/reference_accounts.jsonl")
}

fn schema(name: &str) -> jsonschema::JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema").join(name);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::JSONSchema::compile(&doc).unwrap()
}

fn assert_valid(schema: &jsonschema::JSONSchema, doc: &Value) {
    if let Err(errors) = schema.validate(doc) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("schema violations: {msgs:?}");
    }
}

fn gen(dir: &Path, seed: u64, accounts: usize, max_followers: usize) -> PathBuf {
    let path = dir.join(format!("s{seed}-{accounts}.jsonl"));
    let o = run(&[
        "gen",
        "--seed",
        &seed.to_string(),
        "--accounts",
        &accounts.to_string(),
        "--max-followers",
        &max_followers.to_string(),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    path
}

#[test]
fn score_reference_rows() {
    let o = run(&[
        "score",
        "--dataset",
        fixture().to_str().unwrap(),
        "--format",
        "csv",
        "skaigr",
        "@YOURANONNEWS",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    assert_eq!(&headers[0], "handle");
    let rows: Vec<_> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(&rows[0][0], "@YourAnonNews");
    assert_eq!(&rows[1][0], "@SkaiGr");
    let sg1: f64 = rows[1][1].parse().unwrap();
    assert!((sg1 - 35_356_300.107).abs() / 35_356_300.107 < 1e-3);
    assert_eq!(&rows[1][2], "100.000");
}

#[test]
fn score_without_handles_prints_header() {
    let o = run(&["score", "--dataset", fixture().to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn score_unknown_handle_is_data_error() {
    let o = run(&["score", "--dataset", fixture().to_str().unwrap(), "@SkaiGr", "@ghost"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("@ghost"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    let ds = fixture();
    let p = ds.to_str().unwrap();
    assert_eq!(
        run(&["compare", "--dataset", p, "--root", "skaigr", "--nf", "2", "--k", "3"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["compare", "--dataset", p, "--root", "skaigr", "--ttl", "0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["score", "--dataset", p, "--format", "xml"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["score", "--dataset", p, "--as-of", "yesterday"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_or_malformed_dataset_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        run(&["score", "--dataset", dir.path().join("nope.jsonl").to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"kind\":\"mystery\"}\n").unwrap();
    let o = run(&["score", "--dataset", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn clock_skew_is_data_error() {
    let o = run(&[
        "score",
        "--dataset",
        fixture().to_str().unwrap(),
        "--as-of",
        "2013-01-01T00:00:00Z",
        "skaigr",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gen_is_byte_identical_and_loadable() {
    let dir = tempfile::tempdir().unwrap();
    let a = gen(dir.path(), 1, 10, 5);
    let b_dir = dir.path().join("b");
    std::fs::create_dir(&b_dir).unwrap();
    let b = gen(&b_dir, 1, 10, 5);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let minimal = gen(dir.path(), 3, 2, 5);
    assert_eq!(load_dataset(&minimal).unwrap().account_count(), 2);

    let big = gen(dir.path(), 7, 100, 40);
    let loaded = load_dataset(&big).unwrap();
    assert_eq!(loaded.account_count(), 100);
    let mut again = Vec::new();
    loaded.write_jsonl(&mut again).unwrap();
    assert_eq!(again, std::fs::read(&big).unwrap());

    assert_eq!(
        run(&[
            "gen",
            "--seed",
            "1",
            "--accounts",
            "1",
            "--max-followers",
            "3",
            "--out",
            "/tmp/x"
        ])
        .status
        .code(),
        Some(1)
    );
}

#[test]
fn compare_matches_engine() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen(dir.path(), 7, 100, 40);
    let o = run(&[
        "compare",
        "--dataset",
        path.to_str().unwrap(),
        "--root",
        "u00000",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid(&schema("compare.schema.json"), &doc);

    let ds = generate_synthetic(7, 100, 40);
    let expected = compare_block(&ds, "u00000", BuildParams::default(), ds.captured_at, false).unwrap();
    let block = &doc["blocks"][0];
    assert_eq!(block["by_influence"].as_f64().unwrap(), expected.by_influence);
    assert_eq!(block["by_followers"].as_f64().unwrap(), expected.by_followers);
    assert_eq!(block["difference"].as_f64().unwrap(), expected.difference);
    assert_eq!(block["winner"], expected.winner.as_str());
    assert_eq!(block["followers"], 50);
    assert_eq!(block["top_k"], 3);
    assert_eq!(block["ttl"], 3);
}

#[test]
fn compare_batches_four_budgets() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen(dir.path(), 7, 100, 40);
    let p = path.to_str().unwrap();
    let args = [
        "compare",
        "--dataset",
        p,
        "--root",
        "@user0",
        "--nf",
        "50",
        "--k",
        "3",
        "--nf",
        "100",
        "--k",
        "5",
        "--nf",
        "180",
        "--k",
        "7",
        "--nf",
        "360",
        "--k",
        "7",
    ];
    let o = run(&args);
    assert!(o.status.success());
    let text = stdout(&o);
    let headers: Vec<_> = text.lines().filter(|l| l.starts_with("Followers = ")).collect();
    assert_eq!(
        headers,
        [
            "Followers = 50, top-k users = 3, TTL = 3",
            "Followers = 100, top-k users = 5, TTL = 3",
            "Followers = 180, top-k users = 7, TTL = 3",
            "Followers = 360, top-k users = 7, TTL = 3",
        ]
    );
    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let csv_out = stdout(&run(&csv_args));
    assert_eq!(csv_out.lines().count(), 5);
    assert!(csv_out.starts_with("followers,top_k,ttl,user,by_influence,by_followers,difference,winner"));
}

#[test]
fn compare_dump_networks_embeds_both_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen(dir.path(), 7, 100, 40);
    let o = run(&[
        "compare",
        "--dataset",
        path.to_str().unwrap(),
        "--root",
        "u00000",
        "--format",
        "json",
        "--dump-networks",
    ]);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid(&schema("compare.schema.json"), &doc);
    let nets = &doc["blocks"][0]["networks"];
    for key in ["by_influence", "by_followers"] {
        let dump = nets[key].as_array().unwrap();
        assert_eq!(dump[0]["kind"], "network");
        assert_eq!(dump[0]["category"], key);
    }
}

#[test]
fn compare_isolated_root_is_a_tie_with_warning() {
    let o = run(&[
        "compare",
        "--dataset",
        fixture().to_str().unwrap(),
        "--root",
        "skaigr",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["blocks"][0]["by_influence"], 0.0);
    assert_eq!(doc["blocks"][0]["by_followers"], 0.0);
    assert_eq!(doc["blocks"][0]["winner"], "tie");
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

#[test]
fn score_json_validates_and_env_sets_format() {
    let o = bin()
        .env("INFLUENCE_TRACKER_FORMAT", "json")
        .args([
            "score",
            "--dataset",
            fixture().to_str().unwrap(),
            "skaigr",
            "youranonnews",
        ])
        .output()
        .unwrap();
    assert!(o.status.success());
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid(&schema("score.schema.json"), &doc);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);

    let dir = tempfile::tempdir().unwrap();
    let path = gen(dir.path(), 4, 60, 20);
    let handles: Vec<String> = (0..60).map(|i| format!("@user{i}")).collect();
    let mut args = vec![
        "score".to_string(),
        "--dataset".into(),
        path.to_str().unwrap().into(),
        "--format".into(),
        "json".into(),
    ];
    args.extend(handles);
    let doc: Value = serde_json::from_str(&stdout(&bin().args(&args).output().unwrap())).unwrap();
    assert_valid(&schema("score.schema.json"), &doc);
}

#[test]
fn clamp_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("burst.jsonl");
    std::fs::write(
        &path,
        concat!(
            r#"{"kind":"account","id":"a","handle":"@burst","followers_count":10,"following_count":1,"follower_ids":[],"captured_at":"2014-01-01T00:00:00Z"}"#,
            "\n",
            r#"{"kind":"tweet","id":"t","author_id":"a","created_at":"2014-01-01T00:00:00Z","retweet_count":1,"favorite_count":1,"is_retweet":false}"#,
            "\n"
        ),
    )
    .unwrap();
    let o = run(&["score", "--dataset", path.to_str().unwrap(), "--format", "csv", "burst"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("one second"));
    assert!(stdout(&o).contains("86400.000"));
}
