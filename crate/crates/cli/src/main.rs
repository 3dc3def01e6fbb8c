//! `rockhd` command-line interface.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use rockhd_cli::bench::{mode_name, run_benchmark, write_csv, write_json, BenchConfig};
use rockhd_cli::pipeline::{evaluate, fit_pipeline, oracle_eval, select_scale};
use rockhd_cli::{load_model, save_model};
use rockhd_core::{
    generate_synthetic, load_ucr_tsv, save_ucr_tsv, select_challenging_subset, transform_batch,
    PoolMode, SyntheticConfig, TimeSeriesDataset, TransformPlan,
};

const DEFAULT_SCALES: [f64; 7] = [0.0, 0.5, 1.0, 1.5, 2.0, 4.0, 6.0];

#[derive(Parser)]
#[command(name = "rockhd", version, about = "Time series classification with dilated random kernels and hyperdimensional timestamp encoding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Ppv,
    Hdc,
}

impl From<ModeArg> for PoolMode {
    fn from(m: ModeArg) -> PoolMode {
        match m {
            ModeArg::Ppv => PoolMode::Ppv,
            ModeArg::Hdc => PoolMode::Hdc,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic peak-position dataset (and optionally its
    /// challenging subset) as tab-separated files.
    Synth {
        /// Output file for the full dataset.
        #[arg(long)]
        out: PathBuf,
        /// Series length (one sample is generated per peak position).
        #[arg(long, default_value_t = 500)]
        length: usize,
        /// Peak sharpness parameter.
        #[arg(long, default_value_t = 0.03)]
        a: f64,
        /// Noise standard deviation.
        #[arg(long, default_value_t = 0.23)]
        noise_std: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Also write the hardest cross-class pairs to this file.
        #[arg(long)]
        challenging: Option<PathBuf>,
        /// Number of cross-class pairs for the challenging subset.
        #[arg(long, default_value_t = 125)]
        pairs: usize,
    },
    /// Fit a pipeline on a training file and save the model.
    Fit {
        #[arg(long)]
        train: PathBuf,
        /// Timestamp scale (HDC mode only; 0 disables time encoding).
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, value_enum, default_value_t = ModeArg::Hdc)]
        mode: ModeArg,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Model output path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Predict labels for a dataset with a saved model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Write one predicted label per line here (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit on a train file and report accuracy on a test file.
    Eval {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// Fixed timestamp scale.
        #[arg(long, conflicts_with_all = ["auto_scale", "oracle"])]
        scale: Option<f64>,
        /// Choose the scale by 10-fold cross-validation on the train set.
        #[arg(long, conflicts_with = "oracle")]
        auto_scale: bool,
        /// Report the best test accuracy over all candidate scales
        /// (upper-bound diagnostic).
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_enum, default_value_t = ModeArg::Hdc)]
        mode: ModeArg,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Benchmark every <name>_TRAIN/<name>_TEST pair in a directory.
    Bench {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [ModeArg::Ppv, ModeArg::Hdc])]
        modes: Vec<ModeArg>,
        /// Timestamp scales for the HDC runs.
        #[arg(long, value_delimiter = ',', default_values_t = [1.0])]
        scales: Vec<f64>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Per-row CSV output path.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Full JSON report output path.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Cross-validate candidate scales on a training file.
    SelectScale {
        #[arg(long)]
        train: PathBuf,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[arg(long, value_delimiter = ',')]
        scales: Option<Vec<f64>>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn main() {
    if let Err(err) = run() {
        let payload = serde_json::json!({ "error": err.to_string() });
        eprintln!("{payload}");
        std::process::exit(1);
    }
}

fn load(path: &PathBuf) -> anyhow::Result<TimeSeriesDataset> {
    load_ucr_tsv(path).with_context(|| format!("loading {}", path.display()))
}

fn run() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Synth {
            out,
            length,
            a,
            noise_std,
            seed,
            challenging,
            pairs,
        } => {
            let cfg = SyntheticConfig {
                length,
                peak_shape: a,
                noise_std,
                seed,
                ..SyntheticConfig::default()
            };
            let ds = generate_synthetic(&cfg);
            save_ucr_tsv(&ds, &out)?;
            println!(
                "wrote {} samples of length {} to {}",
                ds.len(),
                ds.series_len(),
                out.display()
            );
            if let Some(path) = challenging {
                let plan = TransformPlan::fit(&ds, seed)?;
                let descriptors = transform_batch(&ds, &plan, None, PoolMode::Ppv)?;
                let subset = select_challenging_subset(&ds, &descriptors, pairs)?;
                save_ucr_tsv(&subset, &path)?;
                println!("wrote {} challenging samples to {}", subset.len(), path.display());
            }
        }
        Command::Fit {
            train,
            scale,
            mode,
            seed,
            out,
        } => {
            let ds = load(&train)?;
            let model = fit_pipeline(&ds, scale, seed, mode.into())?;
            save_model(&model, &out)?;
            println!(
                "fitted {} model (scale {}, alpha {}) on {} samples; saved to {}",
                mode_name(model.mode),
                model.scale,
                model.ridge.alpha,
                ds.len(),
                out.display()
            );
        }
        Command::Predict { model, data, out } => {
            let model = load_model(&model)?;
            let ds = load(&data)?;
            let predictions = model.predict_dataset(&ds)?;
            let lines: Vec<&str> = predictions
                .iter()
                .map(|&p| model.classes()[p].as_str())
                .collect();
            let text = lines.join("\n") + "\n";
            match out {
                Some(path) => std::fs::write(&path, text)?,
                None => print!("{text}"),
            }
        }
        Command::Eval {
            train,
            test,
            scale,
            auto_scale,
            oracle,
            mode,
            seed,
        } => {
            let train_ds = load(&train)?;
            let test_ds = load(&test)?;
            if oracle {
                let report = oracle_eval(&train_ds, &test_ds, &DEFAULT_SCALES, seed)?;
                for (s, acc) in &report.accuracies {
                    println!("scale {s}: accuracy {acc:.4}");
                }
                println!(
                    "oracle best: scale {} accuracy {:.4}",
                    report.best_scale, report.best_accuracy
                );
                return Ok(());
            }
            let scale = if auto_scale {
                let sel = select_scale(&train_ds, &DEFAULT_SCALES, 10, seed)?;
                println!("auto-selected scale {}", sel.chosen);
                sel.chosen
            } else {
                scale.unwrap_or(1.0)
            };
            let model = fit_pipeline(&train_ds, scale, seed, mode.into())?;
            let eval = evaluate(&model, &test_ds)?;
            println!(
                "mode {} scale {}: accuracy {:.4} ({}/{})",
                mode_name(model.mode),
                model.scale,
                eval.accuracy,
                eval.correct,
                eval.total
            );
        }
        Command::Bench {
            dir,
            modes,
            scales,
            seed,
            csv,
            json,
        } => {
            let cfg = BenchConfig {
                modes: modes.into_iter().map(PoolMode::from).collect(),
                scales,
                seed,
            };
            let report = run_benchmark(&dir, &cfg)?;
            for row in &report.rows {
                println!(
                    "{} {} s={}: accuracy {:.4} (fit {:.2}s, transform {:.2}s, predict {:.2}s)",
                    row.dataset, row.mode, row.scale, row.accuracy, row.fit_s, row.transform_s,
                    row.predict_s
                );
            }
            for agg in &report.aggregates {
                println!(
                    "aggregate {} s={}: mean {:.4} best {:.4} worst {:.4} over {} datasets",
                    agg.mode,
                    agg.scale,
                    agg.mean_accuracy,
                    agg.best_accuracy,
                    agg.worst_accuracy,
                    agg.datasets
                );
            }
            for f in &report.failures {
                eprintln!("failed {}: {}", f.dataset, f.error);
            }
            if let Some(path) = csv {
                write_csv(&report, &path)?;
            }
            if let Some(path) = json {
                write_json(&report, &path)?;
            }
            if report.rows.is_empty() && report.failures.is_empty() {
                bail!("no <name>_TRAIN/<name>_TEST pairs found in {}", dir.display());
            }
        }
        Command::SelectScale {
            train,
            folds,
            scales,
            seed,
        } => {
            let ds = load(&train)?;
            let candidates = scales.unwrap_or_else(|| DEFAULT_SCALES.to_vec());
            let sel = select_scale(&ds, &candidates, folds, seed)?;
            for (s, wins) in &sel.fold_wins {
                println!("scale {s}: {wins} fold wins");
            }
            println!("selected scale {}", sel.chosen);
        }
    }
    Ok(())
}
