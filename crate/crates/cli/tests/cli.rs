use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hoeffding::{
    generate_clusters, load_csv, ColumnRef, CsvSchema, DatasetSpec, HoeffdingTree,
    PrequentialReport,
};

fn htree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_htree"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = htree(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_writes_rows_and_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.csv");
    ok(&[
        "gen",
        "--clusters",
        "2",
        "--dims",
        "2",
        "--samples",
        "10",
        "--out",
        p(&out),
    ]);
    let text = fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r.split(',').count() == 3));
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for path in [&a, &b] {
        ok(&["gen", "--samples", "500", "--seed", "7", "--out", p(path)]);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn gen_output_reloads_to_the_same_samples() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("big.csv");
    ok(&[
        "gen",
        "--clusters",
        "5",
        "--dims",
        "3",
        "--samples",
        "40000",
        "--seed",
        "11",
        "--out",
        p(&out),
    ]);
    let expected = generate_clusters::<f32>(&DatasetSpec::new(5, 3, 40_000, 11)).unwrap();
    let mut schema = CsvSchema::new(ColumnRef::Index(3));
    schema.numeric_labels = true;
    let loaded = load_csv::<f32>(&out, &schema).unwrap();
    assert_eq!(loaded.samples, expected);
}

#[test]
fn single_sample_run() {
    let json = ok(&["run", "--samples", "1", "--json"]);
    let report: PrequentialReport = serde_json::from_str(&json).unwrap();
    assert_eq!(report.total, 1);
    assert_eq!(report.windowed_accuracy.len(), 1);
}

#[test]
fn snapshot_persists_the_tree() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("tree.bin");
    let first: PrequentialReport = serde_json::from_str(&ok(&[
        "run",
        "--samples",
        "20000",
        "--seed",
        "5",
        "--n-min",
        "50",
        "--json",
        "--snapshot-out",
        p(&snap),
    ]))
    .unwrap();
    assert!(first.final_node_count > 1);
    let tree = HoeffdingTree::deserialize(&fs::read(&snap).unwrap()).unwrap();
    assert_eq!(tree.node_count(), first.final_node_count);

    let second: PrequentialReport = serde_json::from_str(&ok(&[
        "run",
        "--samples",
        "0",
        "--json",
        "--snapshot-in",
        p(&snap),
    ]))
    .unwrap();
    assert_eq!(second.total, 0);
    assert_eq!(second.final_node_count, first.final_node_count);
}

#[test]
fn report_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let stdout = ok(&[
        "run",
        "--samples",
        "3000",
        "--window",
        "700",
        "--json",
        "--report",
        p(&path),
    ]);
    let from_file: PrequentialReport =
        serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let from_stdout: PrequentialReport = serde_json::from_str(&stdout).unwrap();
    assert_eq!(from_file, from_stdout);
    let again: PrequentialReport =
        serde_json::from_str(&serde_json::to_string(&from_file).unwrap()).unwrap();
    assert_eq!(again, from_file);
    assert_eq!(from_file.windowed_accuracy.len(), 5);
}

#[test]
fn csv_run_matches_synthetic_run() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    ok(&["gen", "--samples", "6000", "--seed", "9", "--out", p(&data)]);
    let synth: PrequentialReport =
        serde_json::from_str(&ok(&["run", "--samples", "6000", "--seed", "9", "--json"])).unwrap();
    let csv: PrequentialReport = serde_json::from_str(&ok(&[
        "run",
        "--csv",
        p(&data),
        "--numeric-labels",
        "--classes",
        "5",
        "--json",
    ]))
    .unwrap();
    assert_eq!((csv.total, csv.correct), (synth.total, synth.correct));
    assert_eq!(csv.windowed_accuracy, synth.windowed_accuracy);
}

#[test]
fn process_infer_leaves_snapshot_and_train_updates_it() {
    let dir = tempfile::tempdir().unwrap();
    let (snap, data, after) = (
        dir.path().join("t.bin"),
        dir.path().join("d.csv"),
        dir.path().join("u.bin"),
    );
    ok(&[
        "run",
        "--samples",
        "10000",
        "--n-min",
        "50",
        "--snapshot-out",
        p(&snap),
    ]);
    ok(&["gen", "--samples", "400", "--seed", "1", "--out", p(&data)]);

    let preds = ok(&[
        "process",
        "--csv",
        p(&data),
        "--numeric-labels",
        "--snapshot-in",
        p(&snap),
        "--snapshot-out",
        p(&after),
    ]);
    assert_eq!(preds.lines().count(), 400);
    assert_eq!(fs::read(&snap).unwrap(), fs::read(&after).unwrap());

    let tree = HoeffdingTree::deserialize(&fs::read(&snap).unwrap()).unwrap();
    let mut schema = CsvSchema::new(ColumnRef::Last);
    schema.numeric_labels = true;
    let rows = load_csv::<f32>(&data, &schema).unwrap().samples;
    for (line, s) in preds.lines().zip(&rows) {
        assert_eq!(
            line.parse::<usize>().unwrap(),
            tree.infer(&s.features).unwrap()
        );
    }

    ok(&[
        "process",
        "--csv",
        p(&data),
        "--numeric-labels",
        "--mode",
        "train",
        "--bundle-size",
        "7",
        "--snapshot-in",
        p(&snap),
        "--snapshot-out",
        p(&after),
    ]);
    let mut expected = tree.clone();
    for s in &rows {
        expected.train(s).unwrap();
    }
    assert_eq!(fs::read(&after).unwrap(), expected.serialize());
}

#[test]
fn mem_defaults_cover_the_grid() {
    let rows: Vec<serde_json::Value> =
        serde_json::from_str(&ok(&["mem", "--format", "json"])).unwrap();
    assert_eq!(rows.len(), 8 * 2 * 2);
    for chunk in rows.chunks(8) {
        let nd: Vec<u64> = chunk
            .iter()
            .map(|r| r["max_nodes"].as_u64().unwrap())
            .collect();
        assert_eq!(nd, vec![1, 2, 4, 8, 16, 32, 64, 128]);
        let bytes: Vec<u64> = chunk.iter().map(|r| r["bytes"].as_u64().unwrap()).collect();
        assert!(bytes.windows(2).all(|w| w[0] < w[1]), "{bytes:?}");
    }
}

#[test]
fn mem_single_cell() {
    let csv = ok(&[
        "mem",
        "--max-nodes",
        "7",
        "--dims",
        "3",
        "--classes",
        "5",
        "--format",
        "csv",
    ]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    let tree = HoeffdingTree::new(hoeffding::Params::new(3, 5).with_max_nodes(7)).unwrap();
    assert_eq!(lines[1], format!("7,3,5,{}", tree.serialize().len()));
}

#[test]
fn exit_codes() {
    assert_eq!(htree(&[]).status.code(), Some(1));
    assert_eq!(htree(&["run", "--bogus"]).status.code(), Some(1));
    assert_eq!(
        htree(&["run", "--delta", "2", "--samples", "5"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        htree(&["run", "--csv", "x.csv", "--dims", "3"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(htree(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    assert_eq!(htree(&["run", "--csv", p(&missing)]).status.code(), Some(2));
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "1,2,0\n1,oops,1\n").unwrap();
    let out = htree(&["run", "--csv", p(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.csv:2:"));
    let junk = dir.path().join("junk.bin");
    fs::write(&junk, b"not a tree").unwrap();
    assert_eq!(
        htree(&["run", "--samples", "0", "--snapshot-in", p(&junk)])
            .status
            .code(),
        Some(2)
    );
}
