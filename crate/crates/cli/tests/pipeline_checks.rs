//! End-to-end pipeline behavior: determinism, the scale-0 equivalence with
//! plain PPV pooling, and the benchmark harness bookkeeping.

use rockhd_cli::bench::{discover_pairs, run_benchmark, write_csv, BenchConfig};
use rockhd_cli::{evaluate, fit_pipeline};
use rockhd_core::{
    generate_synthetic, save_ucr_tsv, train_test_split, PoolMode, SyntheticConfig,
    TimeSeriesDataset,
};

fn small_dataset() -> TimeSeriesDataset {
    generate_synthetic(&SyntheticConfig {
        length: 60,
        seed: 11,
        ..SyntheticConfig::default()
    })
}

fn split(
    ds: &TimeSeriesDataset,
    test_fraction: f64,
    seed: u64,
) -> (TimeSeriesDataset, TimeSeriesDataset) {
    let (train_idx, test_idx) = train_test_split(ds, test_fraction, seed);
    (ds.subset(&train_idx, "train"), ds.subset(&test_idx, "test"))
}

#[test]
fn fitting_twice_is_bit_identical() {
    let ds = small_dataset();
    let a = fit_pipeline(&ds, 1.0, 5, PoolMode::Hdc).unwrap();
    let b = fit_pipeline(&ds, 1.0, 5, PoolMode::Hdc).unwrap();
    assert_eq!(a.ridge.weights, b.ridge.weights);
    assert_eq!(a.ridge.intercepts, b.ridge.intercepts);
    assert_eq!(a.phases.theta(), b.phases.theta());
    assert_eq!(
        a.predict_dataset(&ds).unwrap(),
        b.predict_dataset(&ds).unwrap()
    );
}

#[test]
fn scale_zero_hdc_predicts_like_ppv() {
    let ds = small_dataset();
    let (train, test) = split(&ds, 0.25, 3);
    let hdc = fit_pipeline(&train, 0.0, 5, PoolMode::Hdc).unwrap();
    let ppv = fit_pipeline(&train, 0.0, 5, PoolMode::Ppv).unwrap();
    assert_eq!(
        hdc.predict_dataset(&test).unwrap(),
        ppv.predict_dataset(&test).unwrap()
    );
    let eh = evaluate(&hdc, &test).unwrap();
    let ep = evaluate(&ppv, &test).unwrap();
    assert_eq!(eh.confusion, ep.confusion);
}

#[test]
fn evaluation_bookkeeping_is_consistent() {
    let ds = small_dataset();
    let (train, test) = split(&ds, 0.25, 9);
    let model = fit_pipeline(&train, 1.0, 5, PoolMode::Hdc).unwrap();
    let eval = evaluate(&model, &test).unwrap();
    let total: usize = eval.confusion.iter().flatten().sum();
    assert_eq!(total, test.len());
    let diag: usize = (0..eval.confusion.len()).map(|i| eval.confusion[i][i]).sum();
    assert_eq!(diag, eval.correct);
    assert!((eval.accuracy - diag as f64 / total as f64).abs() < 1e-12);
    assert_eq!(eval.per_class_recall.len(), model.classes().len());
}

#[test]
fn benchmark_report_shape_and_aggregates() {
    let dir = tempfile::tempdir().unwrap();
    let ds = small_dataset();
    let (train, test) = split(&ds, 0.3, 1);
    save_ucr_tsv(&train, &dir.path().join("Peaks_TRAIN.tsv")).unwrap();
    save_ucr_tsv(&test, &dir.path().join("Peaks_TEST.tsv")).unwrap();
    // a second dataset, and one unpaired file that must be ignored
    save_ucr_tsv(&train, &dir.path().join("Other_TRAIN.tsv")).unwrap();
    save_ucr_tsv(&test, &dir.path().join("Other_TEST.tsv")).unwrap();
    save_ucr_tsv(&test, &dir.path().join("Orphan_TRAIN.tsv")).unwrap();

    let pairs = discover_pairs(dir.path()).unwrap();
    assert_eq!(
        pairs.iter().map(|(n, _, _)| n.as_str()).collect::<Vec<_>>(),
        ["Other", "Peaks"]
    );

    let cfg = BenchConfig {
        modes: vec![PoolMode::Ppv, PoolMode::Hdc],
        scales: vec![1.0],
        seed: 42,
    };
    let report = run_benchmark(dir.path(), &cfg).unwrap();
    assert_eq!(report.rows.len(), 4); // 2 datasets x 2 modes
    assert!(report.failures.is_empty());
    for agg in &report.aggregates {
        let accs: Vec<f64> = report
            .rows
            .iter()
            .filter(|r| r.mode == agg.mode && r.scale == agg.scale)
            .map(|r| r.accuracy)
            .collect();
        assert_eq!(accs.len(), agg.datasets);
        let mean = accs.iter().sum::<f64>() / accs.len() as f64;
        assert!((mean - agg.mean_accuracy).abs() < 1e-12);
    }

    let csv_path = dir.path().join("rows.csv");
    write_csv(&report, &csv_path).unwrap();
    let text = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "dataset,mode,scale,accuracy,fit_s,transform_s,predict_s"
    );
    assert_eq!(lines.count(), report.rows.len());
}

#[test]
fn benchmark_records_per_dataset_failures() {
    let dir = tempfile::tempdir().unwrap();
    let ds = small_dataset();
    let (train, test) = split(&ds, 0.3, 1);
    save_ucr_tsv(&train, &dir.path().join("Good_TRAIN.tsv")).unwrap();
    save_ucr_tsv(&test, &dir.path().join("Good_TEST.tsv")).unwrap();
    std::fs::write(dir.path().join("Bad_TRAIN.tsv"), "1\tnot-a-number\n").unwrap();
    std::fs::write(dir.path().join("Bad_TEST.tsv"), "1\t0.5\n").unwrap();

    let cfg = BenchConfig {
        modes: vec![PoolMode::Ppv],
        scales: vec![],
        seed: 42,
    };
    let report = run_benchmark(dir.path(), &cfg).unwrap();
    assert_eq!(report.rows.len(), 1);
    assert_eq!(report.failures.len(), 1);
    assert_eq!(report.failures[0].dataset, "Bad");
}

#[test]
fn benchmark_accuracy_columns_are_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let ds = small_dataset();
    let (train, test) = split(&ds, 0.3, 1);
    save_ucr_tsv(&train, &dir.path().join("Peaks_TRAIN.tsv")).unwrap();
    save_ucr_tsv(&test, &dir.path().join("Peaks_TEST.tsv")).unwrap();
    let cfg = BenchConfig::default();
    let a = run_benchmark(dir.path(), &cfg).unwrap();
    let b = run_benchmark(dir.path(), &cfg).unwrap();
    let accs = |r: &rockhd_cli::bench::BenchmarkReport| {
        r.rows
            .iter()
            .map(|row| (row.dataset.clone(), row.mode.clone(), row.accuracy.to_bits()))
            .collect::<Vec<_>>()
    };
    assert_eq!(accs(&a), accs(&b));
}
