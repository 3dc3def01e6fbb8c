//! Round-trip and corruption handling for the model container format.

use std::fs;

use rockhd_cli::persist::PersistError;
use rockhd_cli::{fit_pipeline, load_model, save_model};
use rockhd_core::{generate_synthetic, PoolMode, SyntheticConfig, TimeSeriesDataset};

fn small_dataset() -> TimeSeriesDataset {
    generate_synthetic(&SyntheticConfig {
        length: 60,
        seed: 7,
        ..SyntheticConfig::default()
    })
}

#[test]
fn round_trip_is_bit_exact() {
    let ds = small_dataset();
    let model = fit_pipeline(&ds, 1.5, 99, PoolMode::Hdc).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.rhdm");
    save_model(&model, &path).unwrap();
    let loaded = load_model(&path).unwrap();

    assert_eq!(loaded.scale.to_bits(), model.scale.to_bits());
    assert_eq!(loaded.seed, model.seed);
    assert_eq!(loaded.mode, model.mode);
    assert_eq!(loaded.classes(), model.classes());
    assert_eq!(loaded.ridge.alpha.to_bits(), model.ridge.alpha.to_bits());
    assert_eq!(loaded.ridge.weights, model.ridge.weights);
    assert_eq!(loaded.ridge.intercepts, model.ridge.intercepts);
    assert_eq!(loaded.standardizer.mean, model.standardizer.mean);
    assert_eq!(loaded.standardizer.scale, model.standardizer.scale);
    assert_eq!(loaded.phases.theta(), model.phases.theta());
    let sched = model.plan.schedule();
    assert_eq!(loaded.plan.schedule(), sched);
    for k in 0..84 {
        for j in 0..sched.dilations.len() {
            assert_eq!(loaded.plan.group_biases(k, j), model.plan.group_biases(k, j));
        }
    }

    // Bit-exact parts imply identical predictions.
    let original = model.predict_dataset(&ds).unwrap();
    let reloaded = loaded.predict_dataset(&ds).unwrap();
    assert_eq!(original, reloaded);
}

#[test]
fn ppv_model_round_trips_without_encoding() {
    let ds = small_dataset();
    let model = fit_pipeline(&ds, 0.0, 5, PoolMode::Ppv).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.rhdm");
    save_model(&model, &path).unwrap();
    let loaded = load_model(&path).unwrap();
    assert!(loaded.encoding().is_none());
    assert_eq!(
        model.predict_dataset(&ds).unwrap(),
        loaded.predict_dataset(&ds).unwrap()
    );
}

#[test]
fn truncated_file_is_corrupt() {
    let ds = small_dataset();
    let model = fit_pipeline(&ds, 1.0, 3, PoolMode::Hdc).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.rhdm");
    save_model(&model, &path).unwrap();
    let bytes = fs::read(&path).unwrap();
    // cut in the middle of the payload
    fs::write(&path, &bytes[..bytes.len() - 4096]).unwrap();
    match load_model(&path) {
        Err(PersistError::CorruptFile(_)) => {}
        other => panic!("expected CorruptFile, got {other:?}"),
    }
}

#[test]
fn bad_magic_is_corrupt() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.rhdm");
    fs::write(&path, b"NOPE....junk").unwrap();
    assert!(matches!(load_model(&path), Err(PersistError::CorruptFile(_))));
}

#[test]
fn future_version_is_rejected() {
    let ds = small_dataset();
    let model = fit_pipeline(&ds, 1.0, 3, PoolMode::Hdc).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.rhdm");
    save_model(&model, &path).unwrap();
    let mut bytes = fs::read(&path).unwrap();
    let manifest_len = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let manifest = String::from_utf8(bytes[8..8 + manifest_len].to_vec()).unwrap();
    let bumped = manifest.replace("\"format_version\":1", "\"format_version\":9");
    assert_ne!(manifest, bumped);
    assert_eq!(manifest.len(), bumped.len());
    bytes[8..8 + manifest_len].copy_from_slice(bumped.as_bytes());
    fs::write(&path, &bytes).unwrap();
    match load_model(&path) {
        Err(PersistError::VersionMismatch(9)) => {}
        other => panic!("expected VersionMismatch(9), got {other:?}"),
    }
}

#[test]
fn manifest_array_length_mismatch_is_corrupt() {
    let ds = small_dataset();
    let model = fit_pipeline(&ds, 1.0, 3, PoolMode::Hdc).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.rhdm");
    save_model(&model, &path).unwrap();
    let mut bytes = fs::read(&path).unwrap();
    let manifest_len = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let manifest = String::from_utf8(bytes[8..8 + manifest_len].to_vec()).unwrap();
    // shrink theta's declared length; total payload no longer matches
    let altered = manifest.replace("{\"name\":\"theta\",\"len\":9996}", "{\"name\":\"theta\",\"len\":9995}");
    assert_ne!(manifest, altered);
    let mut out = bytes[..4].to_vec();
    out.extend_from_slice(&(altered.len() as u32).to_le_bytes());
    out.extend_from_slice(altered.as_bytes());
    out.extend_from_slice(&bytes.split_off(8 + manifest_len));
    fs::write(&path, &out).unwrap();
    match load_model(&path) {
        Err(PersistError::CorruptFile(msg)) => {
            assert!(msg.contains("payload") || msg.contains("length"), "{msg}")
        }
        other => panic!("expected CorruptFile, got {other:?}"),
    }
}
