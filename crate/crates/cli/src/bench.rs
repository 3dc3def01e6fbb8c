//! Benchmark harness over directories of train/test dataset pairs.
//!
//! Datasets are discovered as `<name>_TRAIN.<ext>` / `<name>_TEST.<ext>`
//! file pairs. Every dataset is fitted and evaluated for each requested
//! pooling mode, timings are captured per stage, and per-dataset failures
//! are recorded in the report instead of aborting the run.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use rockhd_core::{load_ucr_tsv, PoolMode, TimeSeriesDataset};

use crate::pipeline::fit_pipeline;

/// What to run: which modes, and which timestamp scales HDC uses.
/// PPV ignores the scale list and always runs once; HDC runs once per scale.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub modes: Vec<PoolMode>,
    pub scales: Vec<f64>,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            modes: vec![PoolMode::Ppv, PoolMode::Hdc],
            scales: vec![1.0],
            seed: 42,
        }
    }
}

/// One dataset/mode measurement.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub dataset: String,
    pub mode: String,
    pub scale: f64,
    pub accuracy: f64,
    pub fit_s: f64,
    pub transform_s: f64,
    pub predict_s: f64,
}

/// Mean/best/worst accuracy for one (mode, scale) group, recomputable from
/// the rows.
#[derive(Debug, Clone, Serialize)]
pub struct BenchAggregate {
    pub mode: String,
    pub scale: f64,
    pub datasets: usize,
    pub mean_accuracy: f64,
    pub best_accuracy: f64,
    pub worst_accuracy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchFailure {
    pub dataset: String,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkReport {
    pub rows: Vec<BenchRow>,
    pub aggregates: Vec<BenchAggregate>,
    pub failures: Vec<BenchFailure>,
}

pub fn mode_name(mode: PoolMode) -> &'static str {
    match mode {
        PoolMode::Ppv => "ppv",
        PoolMode::Hdc => "hdc",
    }
}

/// Find `<name>_TRAIN*` / `<name>_TEST*` pairs directly under `dir`,
/// sorted by dataset name.
pub fn discover_pairs(dir: &Path) -> std::io::Result<Vec<(String, PathBuf, PathBuf)>> {
    let mut trains: BTreeMap<String, PathBuf> = BTreeMap::new();
    let mut tests: BTreeMap<String, PathBuf> = BTreeMap::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if !path.is_file() {
            continue;
        }
        let stem = match path.file_stem().and_then(|s| s.to_str()) {
            Some(s) => s.to_string(),
            None => continue,
        };
        if let Some(name) = stem.strip_suffix("_TRAIN") {
            trains.insert(name.to_string(), path);
        } else if let Some(name) = stem.strip_suffix("_TEST") {
            tests.insert(name.to_string(), path);
        }
    }
    Ok(trains
        .into_iter()
        .filter_map(|(name, train)| tests.get(&name).map(|t| (name, train, t.clone())))
        .collect())
}

fn bench_dataset(
    name: &str,
    train: &TimeSeriesDataset,
    test: &TimeSeriesDataset,
    cfg: &BenchConfig,
) -> rockhd_core::Result<Vec<BenchRow>> {
    let mut runs = Vec::new();
    for &mode in &cfg.modes {
        match mode {
            PoolMode::Ppv => runs.push((mode, 0.0)),
            PoolMode::Hdc => runs.extend(cfg.scales.iter().map(|&s| (mode, s))),
        }
    }
    let mut rows = Vec::new();
    for (mode, scale) in runs {
        let t0 = Instant::now();
        let model = fit_pipeline(train, scale, cfg.seed, mode)?;
        let fit_s = t0.elapsed().as_secs_f64();

        let t1 = Instant::now();
        let descriptors = model.transform_dataset(test)?;
        let transform_s = t1.elapsed().as_secs_f64();

        let t2 = Instant::now();
        let predictions = model.classify(&descriptors)?;
        let predict_s = t2.elapsed().as_secs_f64();

        let mapping: Vec<usize> = test
            .class_names()
            .iter()
            .map(|n| {
                model
                    .classes()
                    .iter()
                    .position(|c| c == n)
                    .ok_or_else(|| rockhd_core::Error::UnknownClass(n.clone()))
            })
            .collect::<rockhd_core::Result<_>>()?;
        let correct = predictions
            .iter()
            .enumerate()
            .filter(|&(i, &p)| mapping[test.label(i)] == p)
            .count();
        rows.push(BenchRow {
            dataset: name.to_string(),
            mode: mode_name(mode).to_string(),
            scale,
            accuracy: correct as f64 / test.len() as f64,
            fit_s,
            transform_s,
            predict_s,
        });
    }
    Ok(rows)
}

fn aggregate(rows: &[BenchRow]) -> Vec<BenchAggregate> {
    let mut groups: BTreeMap<(String, u64), Vec<f64>> = BTreeMap::new();
    for row in rows {
        groups
            .entry((row.mode.clone(), row.scale.to_bits()))
            .or_default()
            .push(row.accuracy);
    }
    groups
        .into_iter()
        .map(|((mode, scale_bits), accs)| BenchAggregate {
            mode,
            scale: f64::from_bits(scale_bits),
            datasets: accs.len(),
            mean_accuracy: accs.iter().sum::<f64>() / accs.len() as f64,
            best_accuracy: accs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            worst_accuracy: accs.iter().copied().fold(f64::INFINITY, f64::min),
        })
        .collect()
}

/// Run the benchmark over every dataset pair found in `dir`.
pub fn run_benchmark(dir: &Path, cfg: &BenchConfig) -> std::io::Result<BenchmarkReport> {
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (name, train_path, test_path) in discover_pairs(dir)? {
        let loaded = load_ucr_tsv(&train_path)
            .and_then(|train| load_ucr_tsv(&test_path).map(|test| (train, test)));
        let result = loaded.and_then(|(train, test)| bench_dataset(&name, &train, &test, cfg));
        match result {
            Ok(mut r) => rows.append(&mut r),
            Err(e) => failures.push(BenchFailure {
                dataset: name,
                error: e.to_string(),
            }),
        }
    }
    let aggregates = aggregate(&rows);
    Ok(BenchmarkReport {
        rows,
        aggregates,
        failures,
    })
}

/// Write the per-dataset rows as CSV.
pub fn write_csv(report: &BenchmarkReport, path: &Path) -> std::io::Result<()> {
    use std::io::Write;
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "dataset,mode,scale,accuracy,fit_s,transform_s,predict_s")?;
    for r in &report.rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.dataset, r.mode, r.scale, r.accuracy, r.fit_s, r.transform_s, r.predict_s
        )?;
    }
    w.flush()
}

/// Write the whole report (rows, aggregates, failures) as pretty JSON.
pub fn write_json(report: &BenchmarkReport, path: &Path) -> std::io::Result<()> {
    let json = serde_json::to_string_pretty(report).expect("report serialization");
    std::fs::write(path, json + "\n")
}
