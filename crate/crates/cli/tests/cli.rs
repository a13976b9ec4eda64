use std::path::Path;
use std::process::{Command, Output};

use luce_cli::manifest::RunManifest;
use luce_cli::output::{read_csv, read_json_lines};
use serde_json::json;
use tempfile::TempDir;

fn luce(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_luce"))
        .args(args)
        .current_dir(dir)
        .env("LUCE_OUTPUT_DIR", dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn pmf_of_reversed_deck() {
    let dir = TempDir::new().unwrap();
    let o = luce(dir.path(), &["pmf", "--weights", "[1,2,3]", "--sigma", "3,2,1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = read_json_lines(&stdout(&o)).unwrap();
    assert_eq!(v, vec![json!({"pmf": 0.333333333})]);
}

#[test]
fn bottom_table_csv() {
    let dir = TempDir::new().unwrap();
    let o = luce(dir.path(), &["bottom-table", "--family", "linear", "--max-label", "10", "--tol", "1e-6", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t = read_csv(&stdout(&o)).unwrap();
    assert_eq!(t.header, vec!["label", "probability"]);
    let labels = t.numbers("label").unwrap().unwrap();
    assert_eq!(labels, (1..=10).map(f64::from).collect::<Vec<_>>());
    let p = t.numbers("probability").unwrap().unwrap();
    let expected = [
        0.516094, 0.213212, 0.107310, 0.0597505, 0.0354888, 0.0220716, 0.0142167, 0.00941619, 0.00638121, 0.00440862,
    ];
    for (got, want) in p.iter().zip(expected) {
        assert!((got - want).abs() < 1e-5, "{got} vs {want}");
    }
}

#[test]
fn zero_samples_is_empty() {
    let dir = TempDir::new().unwrap();
    for format in ["json", "csv"] {
        let o = luce(dir.path(), &["sample", "--weights", "[1,1]", "--n-samples", "0", "--format", format]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o), "");
    }
}

#[test]
fn same_seed_same_bytes() {
    let dir = TempDir::new().unwrap();
    let args = ["sample", "--weights", "zipf:n=6,s=1", "--n-samples", "40000", "--seed", "17", "--format", "csv"];
    let a = luce(dir.path(), &args);
    let b = luce(dir.path(), &args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let mut seq = args.to_vec();
    seq.push("--sequential");
    let c = luce(dir.path(), &seq);
    assert_eq!(a.stdout, c.stdout, "execution mode changed the draws");
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "3"]);
    assert_eq!(a.stdout, luce(dir.path(), &threaded).stdout);
    let t = read_csv(&stdout(&a)).unwrap();
    assert_eq!(t.rows.len(), 40000);
    assert!(t.column("permutation").unwrap().iter().all(|p| p.parse::<luce::Permutation>().is_ok()));
}

#[test]
fn manifest_replays() {
    let dir = TempDir::new().unwrap();
    let manifest = dir.path().join("m.json");
    let m = manifest.to_str().unwrap();
    let first = luce(dir.path(), &["arrangement", "sample-bd", "--model", "riffle", "--n", "4", "--samples", "50", "--manifest", m]);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let record = RunManifest::read(&manifest).unwrap();
    assert_eq!(record.command, "arrangement-sample-bd");
    assert_eq!(record.exit_code, 0);
    assert!(stderr(&first).contains(&format!("seed = {}", record.seed)));
    let replay: Vec<&str> = record.replay[1..].iter().map(String::as_str).collect();
    let second = luce(dir.path(), &replay);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn default_manifest_location() {
    let dir = TempDir::new().unwrap();
    let o = luce(dir.path(), &["pmf", "--weights", "[1,1]", "--sigma", "1 2", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("luce-pmf-5.manifest.json").is_file());
    let none = TempDir::new().unwrap();
    luce(none.path(), &["pmf", "--weights", "[1,1]", "--sigma", "1 2", "--no-manifest"]);
    assert_eq!(std::fs::read_dir(none.path()).unwrap().count(), 0);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let code = |args: &[&str]| luce(dir.path(), args).status.code();
    assert_eq!(code(&["frobnicate"]), Some(1));
    assert_eq!(code(&["pmf", "--weights", "[1,2]", "--sigma", "1,2", "--bogus"]), Some(1));
    assert_eq!(code(&["topk", "--weights", "[0.6,0.3,0.1]", "--k", "2", "--report"]), Some(3));
    assert_eq!(code(&["topk", "--weights", "[1,2,3]", "--k", "2"]), Some(3));
    assert_eq!(code(&["topk", "--weights", "[1,2,3]", "--normalize", "--k", "2"]), Some(0));
    assert_eq!(code(&["bottom-table", "--family", "linear", "--max-label", "3", "--tol", "1e-300"]), Some(2));
    assert_eq!(code(&["arrangement", "stationary", "--exact", "--model", "riffle", "--n", "8"]), Some(3));
    assert_eq!(code(&["--help"]), Some(0));
}

#[test]
fn weight_diagnostics_name_the_field() {
    let dir = TempDir::new().unwrap();
    let o = luce(dir.path(), &["pmf", "--weights", "[1,-2,3]", "--sigma", "1,2,3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("weights[1]"), "{}", stderr(&o));
    let o = luce(dir.path(), &["pmf", "--weights", r#"{"family":"uniform"}"#, "--sigma", "1"]);
    assert!(stderr(&o).contains("`n`"), "{}", stderr(&o));
}

#[test]
fn topk_report_fields() {
    let dir = TempDir::new().unwrap();
    let o = luce(dir.path(), &["topk", "--weights", "[0.4,0.3,0.2,0.1]", "--k", "3", "--report"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = &read_json_lines(&stdout(&o)).unwrap()[0];
    for key in ["n", "k", "d_inf_exact", "d_inf_bound", "tv_exact", "lambda", "tv_poisson"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["d_inf_exact"], json!(0.82));
}

#[test]
fn converge_test_families() {
    let dir = TempDir::new().unwrap();
    for (family, converges) in [("linear", true), ("constant", false), ("log", true), ("log-loglog", false)] {
        let o = luce(dir.path(), &["converge-test", "--family", family]);
        assert_eq!(o.status.code(), Some(0));
        let v = &read_json_lines(&stdout(&o)).unwrap()[0];
        assert_eq!(v["converges"], json!(converges), "{family}");
    }
    let o = luce(dir.path(), &["converge-test", "--family", "constant"]);
    assert_eq!(read_json_lines(&stdout(&o)).unwrap()[0]["x0"], json!("inf"));
    assert_eq!(luce(dir.path(), &["converge-test", "--family", "linear", "--beta", "2"]).status.code(), Some(1));
}

#[test]
fn stationary_outputs_parse_back() {
    let dir = TempDir::new().unwrap();
    let o = luce(dir.path(), &["arrangement", "stationary", "--exact", "--kind", "braid", "--model", "riffle", "--n", "4", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t = read_csv(&stdout(&o)).unwrap();
    let p = t.numbers("probability").unwrap().unwrap();
    assert_eq!(p.len(), 24);
    assert!(p.iter().all(|x| (x - 1.0 / 24.0).abs() < 1e-9));
    assert!(t.column("chamber").unwrap().iter().all(|c| c.parse::<luce::Permutation>().is_ok()));

    let o = luce(dir.path(), &["arrangement", "stationary", "--model", "ehrenfest", "--d", "2", "--samples", "20000", "--seed", "3"]);
    let rows = read_json_lines(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| (r["probability"].as_f64().unwrap() - 0.25).abs() < 0.02));

    assert_eq!(
        luce(dir.path(), &["arrangement", "stationary", "--exact", "--kind", "boolean", "--model", "riffle", "--n", "3"]).status.code(),
        Some(1)
    );
}

#[test]
fn coloring_and_face_tables_from_files() {
    let dir = TempDir::new().unwrap();
    let graph = dir.path().join("path4.txt");
    std::fs::write(&graph, "1 2\n2 3\n3 4\n").unwrap();
    let o = luce(dir.path(), &["arrangement", "stationary", "--exact", "--model", "coloring", "--graph", graph.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = read_json_lines(&stdout(&o)).unwrap();
    let p = |c: &str| rows.iter().find(|r| r["chamber"] == json!(c)).unwrap()["probability"].as_f64().unwrap();
    assert_eq!(rows.len(), 16);
    assert!(p("+-+-") <= 1e-12 && p("-+-+") <= 1e-12);
    assert!((p("++++") - p("----")).abs() < 1e-9);

    let faces = dir.path().join("faces.json");
    std::fs::write(
        &faces,
        r#"{"kind":"braid","n":3,"faces":[{"face":"1/2 3","weight":0.5},{"face":"2/1 3","weight":0.25},{"face":"3/1 2","weight":0.25}]}"#,
    )
    .unwrap();
    let o = luce(dir.path(), &["arrangement", "sim", "--model", "table", "--faces", faces.to_str().unwrap(), "--steps", "5", "--start", "3 2 1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = read_json_lines(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0]["chamber"], json!("3 2 1"));

    std::fs::write(&faces, r#"{"kind":"braid","n":3,"faces":[{"face":"1/2 3","weight":0.5}]}"#).unwrap();
    let o = luce(dir.path(), &["arrangement", "sim", "--model", "table", "--faces", faces.to_str().unwrap(), "--steps", "1"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn non_separating_walks_are_rejected() {
    let dir = TempDir::new().unwrap();
    let faces = dir.path().join("faces.json");
    std::fs::write(&faces, r#"{"kind":"boolean","d":2,"faces":[{"face":"+0","weight":0.5},{"face":"-0","weight":0.5}]}"#).unwrap();
    let f = faces.to_str().unwrap();
    assert_eq!(luce(dir.path(), &["arrangement", "stationary", "--exact", "--model", "table", "--faces", f]).status.code(), Some(2));
    assert_eq!(luce(dir.path(), &["arrangement", "sample-bd", "--model", "table", "--faces", f, "--samples", "3"]).status.code(), Some(3));
}
