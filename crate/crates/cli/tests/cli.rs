use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gsmote(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gsmote"))
        .args(args)
        .current_dir(dir)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

#[test]
fn fixture_counts_and_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["fixture", "--kind", "two_gaussians", "--ir", "9", "--n", "200", "--seed", "4", "--out", "a.csv"];
    ok(&gsmote(&args, dir.path()));
    let mut args2 = args;
    args2[10] = "b.csv";
    ok(&gsmote(&args2, dir.path()));
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.csv")).unwrap());

    let data = rows(&dir.path().join("a.csv"));
    let minority = data.iter().filter(|r| r[2] == "1").count();
    assert_eq!((data.len() - minority, minority), (180, 20));

    let bad = gsmote(&["fixture", "--kind", "spirals", "--ir", "2", "--n", "10", "--out", "c.csv"], dir.path());
    assert!(!bad.status.success());
}

#[test]
fn oversample_balances_and_flags_rows() {
    let dir = tempfile::tempdir().unwrap();
    ok(&gsmote(&["fixture", "--kind", "noisy_moons", "--ir", "9", "--n", "100", "--seed", "1", "--out", "d.csv"], dir.path()));
    for method in ["gsmote", "smote", "borderline1", "borderline2", "adasyn", "random"] {
        ok(&gsmote(&["oversample", "--data", "d.csv", "--method", method, "--k", "3", "--out", "o.csv"], dir.path()));
        let out = rows(&dir.path().join("o.csv"));
        assert_eq!(out.len(), 180, "{method}");
        let synthetic: Vec<_> = out.iter().filter(|r| r[3] == "1").collect();
        assert_eq!(synthetic.len(), 80, "{method}");
        assert!(synthetic.iter().all(|r| r[2] == "1"));
    }
    ok(&gsmote(
        &["oversample", "--data", "d.csv", "--method", "gsmote", "--selection", "majority", "--truncation", "-0.5",
          "--deformation", "0.3", "--out", "g.csv"],
        dir.path(),
    ));

    let err = gsmote(&["oversample", "--data", "d.csv", "--method", "tomek", "--out", "x.csv"], dir.path());
    assert!(!err.status.success());
    let msg = String::from_utf8_lossy(&err.stderr);
    assert!(msg.contains("none, random, smote, borderline1, borderline2, adasyn, gsmote"), "{msg}");
}

#[test]
fn oversample_balanced_input_is_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    ok(&gsmote(&["fixture", "--kind", "two_gaussians", "--ir", "1", "--n", "40", "--out", "b.csv"], dir.path()));
    ok(&gsmote(&["oversample", "--data", "b.csv", "--method", "gsmote", "--out", "o.csv"], dir.path()));
    let input = rows(&dir.path().join("b.csv"));
    let out = rows(&dir.path().join("o.csv"));
    assert_eq!(out.len(), input.len());
    for (a, b) in input.iter().zip(&out) {
        assert_eq!(&b[..3], &a[..]);
        assert_eq!(b[3], "0");
    }
}

const SMALL_RUN: &str = r#"
seed = 11
folds = 3
repeats = 2
output_dir = "results"

[[datasets]]
path = "tiny.csv"

[oversamplers.none]
[oversamplers.smote]
k = [3]

[classifiers.lr]
max_iter = 200
[classifiers.gbc]
max_depth = [2]
n_estimators = [5]
"#;

fn small_run_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    ok(&gsmote(&["fixture", "--kind", "sparse_clusters", "--ir", "4", "--n", "60", "--seed", "2", "--out", "tiny.csv"], dir.path()));
    fs::write(dir.path().join("run.toml"), SMALL_RUN).unwrap();
    dir
}

#[test]
fn run_writes_tables() {
    let dir = small_run_dir();
    ok(&gsmote(&["run", "--config", "run.toml"], dir.path()));
    let res = dir.path().join("results");
    let scores = rows(&res.join("cv_scores.csv"));
    // 1 dataset x 2 oversamplers x 2 classifiers x 3 metrics per repeat
    assert_eq!(scores.len(), 12 * 2);
    let header = csv::Reader::from_path(res.join("cv_table.csv")).unwrap().headers().unwrap().clone();
    assert_eq!(header.iter().collect::<Vec<_>>(), ["dataset", "classifier", "metric", "none", "smote"]);
    let ranking = rows(&res.join("mean_ranking.csv"));
    assert_eq!(ranking.len(), 2 * 3);
    for r in &ranking {
        let a: f64 = r[2].parse().unwrap();
        let b: f64 = r[3].parse().unwrap();
        assert_eq!(a + b, 3.0);
    }
    // a single dataset cannot be Friedman-tested
    assert!(rows(&res.join("friedman.csv")).iter().all(|r| r[2] == "NA"));
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(res.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 11);
    assert!(manifest["fallbacks"].is_array());
}

#[test]
fn run_is_byte_identical_across_workers_and_resume() {
    let dir = small_run_dir();
    let read_all = |d: &Path| -> Vec<Vec<u8>> {
        gsmote_cli::bench::OUTPUT_FILES.iter().map(|f| fs::read(d.join("results").join(f)).unwrap()).collect()
    };
    ok(&gsmote(&["run", "--config", "run.toml", "--workers", "1"], dir.path()));
    let first = read_all(dir.path());
    ok(&gsmote(&["run", "--config", "run.toml", "--workers", "3"], dir.path()));
    assert_eq!(first, read_all(dir.path()));

    // drop the last two journal lines and resume
    let journal = dir.path().join("results").join("cells.jsonl");
    let text = fs::read_to_string(&journal).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    fs::write(&journal, lines[..2].join("\n") + "\n").unwrap();
    let out = gsmote(&["run", "--config", "run.toml", "--resume"], dir.path());
    ok(&out);
    assert_eq!(first, read_all(dir.path()));
    assert_eq!(fs::read_to_string(&journal).unwrap().lines().count(), 4);
}

#[test]
fn invalid_config_fails_before_work() {
    let dir = small_run_dir();
    fs::write(dir.path().join("bad.toml"), SMALL_RUN.replace("[oversamplers.smote]\nk = [3]", "[oversamplers.gsmote]\ntruncation = [2.0]")).unwrap();
    let out = gsmote(&["run", "--config", "bad.toml"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("truncation"));
    assert!(!dir.path().join("results").exists());
}

#[test]
fn failing_cell_is_named_and_journal_kept() {
    let dir = small_run_dir();
    // 12 minority rows, 8 per training fold: k = 30 neighbours cannot exist
    fs::write(dir.path().join("fail.toml"), SMALL_RUN.replace("k = [3]", "k = [30]")).unwrap();
    let out = gsmote(&["run", "--config", "fail.toml", "--workers", "1"], dir.path());
    assert!(!out.status.success());
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("dataset=tiny oversampler=smote classifier=lr"), "{msg}");
    let journal = fs::read_to_string(dir.path().join("results").join("cells.jsonl")).unwrap();
    assert!(journal.contains("oversampler=none classifier=gbc"));
}
