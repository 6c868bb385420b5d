//! Benchmark runner: a work queue of (dataset, oversampler, classifier)
//! cells, a journal of completed cells for resuming, and the result tables.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;

use anyhow::{anyhow, Context, Result};
use gsmote::evaluation::{rank_table, run_cell, CellOutcome, CellSpec, CvCellResult, FallbackEvent, Metric, RankTable};
use gsmote::Dataset;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{Plan, RunConfig};

pub const JOURNAL: &str = "cells.jsonl";
pub const CV_SCORES: &str = "cv_scores.csv";
pub const CV_TABLE: &str = "cv_table.csv";
pub const MEAN_RANKING: &str = "mean_ranking.csv";
pub const FRIEDMAN: &str = "friedman.csv";
pub const MANIFEST: &str = "manifest.json";

/// The result tables, in the order they are written.
pub const OUTPUT_FILES: [&str; 5] = [CV_SCORES, CV_TABLE, MEAN_RANKING, FRIEDMAN, MANIFEST];

#[derive(Debug, Clone, Copy)]
struct Task {
    dataset: usize,
    method: usize,
    classifier: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct JournalEntry {
    fingerprint: String,
    cell: String,
    results: Vec<CvCellResult>,
    fallbacks: Vec<FallbackEvent>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub cells_total: usize,
    pub cells_run: usize,
    pub cells_resumed: usize,
    pub fallbacks: usize,
}

/// Load, validate and run a config file. `workers` overrides the config.
pub fn run_config_file(path: &Path, workers: Option<usize>, resume: bool) -> Result<RunSummary> {
    let config = RunConfig::load(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let plan = config.plan(base)?;
    run_plan(&plan, workers.unwrap_or(plan.config.workers), resume)
}

pub fn run_plan(plan: &Plan, workers: usize, resume: bool) -> Result<RunSummary> {
    anyhow::ensure!(workers >= 1, "workers must be at least 1");
    let datasets = load_datasets(plan)?;
    for d in &datasets {
        anyhow::ensure!(
            d.minority_count() >= plan.config.folds,
            "dataset {}: minority class has {} rows, fewer than {} folds",
            d.name(),
            d.minority_count(),
            plan.config.folds
        );
    }
    let fingerprint = fingerprint(plan)?;
    fs::create_dir_all(&plan.output_dir)
        .with_context(|| format!("cannot create output directory {}", plan.output_dir.display()))?;

    let mut tasks = Vec::new();
    for dataset in 0..datasets.len() {
        for method in 0..plan.methods.len() {
            for classifier in 0..plan.classifiers.len() {
                tasks.push(Task { dataset, method, classifier });
            }
        }
    }
    let key = |t: &Task| {
        format!(
            "dataset={} oversampler={} classifier={}",
            datasets[t.dataset].name(),
            plan.methods[t.method].id,
            plan.classifiers[t.classifier].id
        )
    };

    let journal_path = plan.output_dir.join(JOURNAL);
    let mut done: BTreeMap<String, CellOutcome> = if resume { read_journal(&journal_path, &fingerprint)? } else { BTreeMap::new() };
    let mut outcomes: Vec<Option<CellOutcome>> = tasks.iter().map(|t| done.remove(&key(t))).collect();
    let cells_resumed = outcomes.iter().filter(|o| o.is_some()).count();
    let pending: Vec<usize> = (0..tasks.len()).filter(|&i| outcomes[i].is_none()).collect();
    log::info!(
        "{} cells: {} resumed, {} to run on {} worker(s)",
        tasks.len(),
        cells_resumed,
        pending.len(),
        workers
    );

    // Rewrite the journal with the kept entries so stale lines never linger.
    let mut journal = BufWriter::new(File::create(&journal_path).with_context(|| format!("cannot write {}", journal_path.display()))?);
    for (i, o) in outcomes.iter().enumerate() {
        if let Some(o) = o {
            write_entry(&mut journal, &fingerprint, &key(&tasks[i]), o)?;
        }
    }
    journal.flush()?;

    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let mut failure: Option<(usize, anyhow::Error)> = None;
    std::thread::scope(|scope| -> Result<()> {
        let (tx, rx) = mpsc::channel();
        for _ in 0..workers.min(pending.len()) {
            let tx = tx.clone();
            let (next, stop, pending, tasks, datasets) = (&next, &stop, &pending, &tasks, &datasets);
            scope.spawn(move || loop {
                if stop.load(Ordering::SeqCst) {
                    break;
                }
                let slot = next.fetch_add(1, Ordering::SeqCst);
                let Some(&i) = pending.get(slot) else { break };
                let t = tasks[i];
                let spec = CellSpec {
                    dataset: &datasets[t.dataset],
                    oversamplers: &plan.methods[t.method].grid,
                    classifiers: &plan.classifiers[t.classifier].grid,
                    n_folds: plan.config.folds,
                    repeats: plan.config.repeats,
                    seed: plan.config.seed,
                };
                let outcome = run_cell(&spec);
                if tx.send((i, outcome)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        // single collector: all journal writes happen here
        for (i, outcome) in rx {
            match outcome {
                Ok(o) => {
                    write_entry(&mut journal, &fingerprint, &key(&tasks[i]), &o)?;
                    journal.flush()?;
                    log::info!("finished {}", key(&tasks[i]));
                    outcomes[i] = Some(o);
                }
                Err(e) => {
                    stop.store(true, Ordering::SeqCst);
                    if failure.as_ref().is_none_or(|(j, _)| i < *j) {
                        failure = Some((i, anyhow!(e)));
                    }
                }
            }
        }
        Ok(())
    })?;

    if let Some((i, e)) = failure {
        return Err(e.context(format!(
            "cell {} failed; completed cells are kept in {} (rerun with --resume)",
            key(&tasks[i]),
            journal_path.display()
        )));
    }

    let outcomes: Vec<CellOutcome> = outcomes.into_iter().map(|o| o.expect("every cell completed")).collect();
    let fallbacks = write_outputs(plan, &datasets, &fingerprint, &outcomes)?;
    Ok(RunSummary {
        output_dir: plan.output_dir.clone(),
        cells_total: tasks.len(),
        cells_run: pending.len(),
        cells_resumed,
        fallbacks,
    })
}

fn load_datasets(plan: &Plan) -> Result<Vec<Dataset>> {
    plan.datasets
        .iter()
        .map(|d| {
            let data = Dataset::load_csv(&d.path, d.label_column.as_deref())
                .with_context(|| format!("cannot load dataset {}", d.path.display()))?;
            Ok(match &d.name {
                Some(name) => data.with_name(name.clone()),
                None => data,
            })
        })
        .collect()
}

/// Hash of everything that determines the results: seeds, protocol sizes,
/// grids and the dataset bytes. The worker count and paths are excluded.
fn fingerprint(plan: &Plan) -> Result<String> {
    let mut h = Sha256::new();
    let c = &plan.config;
    h.update(format!("seed={};folds={};repeats={}\n", c.seed, c.folds, c.repeats));
    for m in &plan.methods {
        for o in &m.grid {
            h.update(format!("method {} {}\n", m.id, o.params()));
        }
    }
    for g in &plan.classifiers {
        for cfg in &g.grid {
            h.update(format!("classifier {} {}\n", g.id, cfg.params()));
        }
    }
    for d in &plan.datasets {
        let bytes = fs::read(&d.path).with_context(|| format!("cannot read dataset {}", d.path.display()))?;
        h.update(format!("dataset {} {:?} {}\n", d.name.as_deref().unwrap_or(""), d.label_column, bytes.len()));
        h.update(&bytes);
    }
    Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

fn write_entry<W: Write>(w: &mut W, fingerprint: &str, cell: &str, o: &CellOutcome) -> Result<()> {
    let entry = JournalEntry {
        fingerprint: fingerprint.to_string(),
        cell: cell.to_string(),
        results: o.results.clone(),
        fallbacks: o.fallbacks.clone(),
    };
    serde_json::to_writer(&mut *w, &entry)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Completed cells with a matching fingerprint. A torn last line from an
/// interrupted run is skipped.
fn read_journal(path: &Path, fingerprint: &str) -> Result<BTreeMap<String, CellOutcome>> {
    let mut out = BTreeMap::new();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(out),
        Err(e) => return Err(e).with_context(|| format!("cannot read {}", path.display())),
    };
    let mut stale = 0;
    for line in BufReader::new(file).lines() {
        let line = line?;
        let Ok(entry) = serde_json::from_str::<JournalEntry>(&line) else {
            log::warn!("skipping unreadable journal line in {}", path.display());
            continue;
        };
        if entry.fingerprint != fingerprint {
            stale += 1;
            continue;
        }
        out.insert(entry.cell, CellOutcome { results: entry.results, fallbacks: entry.fallbacks });
    }
    if stale > 0 {
        log::warn!("ignoring {stale} journal entries from a different configuration");
    }
    Ok(out)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let f = OpenOptions::new()
        .write(true)
        .create(true)
        .truncate(true)
        .open(&path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_outputs(plan: &Plan, datasets: &[Dataset], fingerprint: &str, outcomes: &[CellOutcome]) -> Result<usize> {
    let dataset_names: Vec<String> = datasets.iter().map(|d| d.name().to_string()).collect();
    let methods: Vec<String> = plan.methods.iter().map(|m| m.id.to_string()).collect();
    let classifiers: Vec<String> = plan.classifiers.iter().map(|c| c.id.to_string()).collect();
    let pos = |v: &[String], s: &str| v.iter().position(|x| x == s).unwrap_or(usize::MAX);

    let mut results: Vec<CvCellResult> = outcomes.iter().flat_map(|o| o.results.iter().cloned()).collect();
    results.sort_by_key(|r| {
        (
            pos(&dataset_names, &r.dataset),
            pos(&classifiers, &r.classifier),
            r.metric,
            pos(&methods, &r.oversampler),
            r.repeat,
        )
    });
    let mut fallbacks: Vec<FallbackEvent> = outcomes.iter().flat_map(|o| o.fallbacks.iter().cloned()).collect();
    fallbacks.sort();
    for f in &fallbacks {
        log::warn!(
            "fallback {} in dataset={} oversampler={} {} repeat={} fold={}",
            f.kind,
            f.dataset,
            f.oversampler,
            f.params,
            f.repeat,
            f.fold
        );
    }

    let dir = &plan.output_dir;
    let mut w = csv::Writer::from_writer(create(dir, CV_SCORES)?);
    w.write_record(["dataset", "classifier", "metric", "oversampler", "repeat", "score", "best_params"])?;
    for r in &results {
        w.write_record([
            r.dataset.as_str(),
            r.classifier.as_str(),
            r.metric.as_str(),
            r.oversampler.as_str(),
            &r.repeat.to_string(),
            &r.score.to_string(),
            r.best_params.as_str(),
        ])?;
    }
    w.flush()?;

    let table = rank_table(&results, &dataset_names, &classifiers, &methods)?;
    write_tables(dir, &table)?;

    let manifest = serde_json::json!({
        "version": env!("CARGO_PKG_VERSION"),
        "fingerprint": fingerprint,
        "seed": plan.config.seed,
        "folds": plan.config.folds,
        "repeats": plan.config.repeats,
        "datasets": datasets.iter().zip(&plan.config.datasets).map(|(d, entry)| serde_json::json!({
            "name": d.name(),
            "path": entry.path,
            "rows": d.n_rows(),
            "features": d.n_features(),
            "minority_label": d.minority_label(),
            "minority": d.minority_count(),
            "majority": d.majority_count(),
        })).collect::<Vec<_>>(),
        "oversamplers": plan.methods.iter().map(|m| serde_json::json!({
            "id": m.id,
            "grid": m.grid.iter().map(|o| o.params()).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "classifiers": plan.classifiers.iter().map(|c| serde_json::json!({
            "id": c.id,
            "grid": c.grid.iter().map(|g| g.params()).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "fallbacks": fallbacks,
    });
    let mut m = create(dir, MANIFEST)?;
    serde_json::to_writer_pretty(&mut m, &manifest)?;
    m.write_all(b"\n")?;
    m.flush()?;
    Ok(fallbacks.len())
}

fn write_tables(dir: &Path, table: &RankTable) -> Result<()> {
    let mut header = vec!["dataset".to_string(), "classifier".into(), "metric".into()];
    header.extend(table.methods.iter().cloned());
    let mut w = csv::Writer::from_writer(create(dir, CV_TABLE)?);
    w.write_record(&header)?;
    for row in &table.rows {
        let mut rec = vec![row.dataset.clone(), row.classifier.clone(), row.metric.as_str().to_string()];
        rec.extend(row.scores.iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_writer(create(dir, MEAN_RANKING)?);
    w.write_record(&header[1..])?;
    for row in &table.mean_ranks {
        let mut rec = vec![row.classifier.clone(), row.metric.as_str().to_string()];
        rec.extend(row.mean_ranks.iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_writer(create(dir, FRIEDMAN)?);
    w.write_record(["classifier", "metric", "statistic", "df", "p_value", "significant"])?;
    for row in &table.friedman {
        let metric: &str = Metric::as_str(row.metric);
        let rec = match &row.result {
            Some(f) => [
                row.classifier.clone(),
                metric.to_string(),
                f.statistic.to_string(),
                f.df.to_string(),
                f.p_value.to_string(),
                f.significant.to_string(),
            ],
            None => [row.classifier.clone(), metric.to_string(), "NA".into(), "NA".into(), "NA".into(), "NA".into()],
        };
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
