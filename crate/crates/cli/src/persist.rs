//! Versioned on-disk model container.
//!
//! Layout: 4 magic bytes, a little-endian u32 manifest length, the JSON
//! manifest, then the declared arrays as raw little-endian f64 in manifest
//! order. Loading rejects unknown versions and any size or shape mismatch;
//! a save/load round trip is bit-exact.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rockhd_core::{
    DilationSchedule, PhaseVector, PoolMode, RidgeModel, Standardizer, TransformPlan,
    NUM_FEATURES, NUM_KERNELS,
};

use crate::pipeline::{subseed, PipelineModel};

const MAGIC: &[u8; 4] = b"RHDM";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("unsupported model format version {0}")]
    VersionMismatch(u32),
    #[error("corrupt model file: {0}")]
    CorruptFile(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Serialize, Deserialize)]
struct ArrayEntry {
    name: String,
    len: usize,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    format_version: u32,
    mode: String,
    scale: f64,
    seed: u64,
    input_length: usize,
    dim: usize,
    alpha: f64,
    alpha_grid: Vec<f64>,
    classes: Vec<String>,
    dilations: Vec<usize>,
    features_per_dilation: Vec<usize>,
    arrays: Vec<ArrayEntry>,
}

fn corrupt(msg: impl Into<String>) -> PersistError {
    PersistError::CorruptFile(msg.into())
}

/// Serialize a fitted pipeline to `path`.
pub fn save_model(model: &PipelineModel, path: &Path) -> Result<(), PersistError> {
    let schedule = model.plan.schedule();
    let num_dilations = schedule.dilations.len();
    let mut biases = Vec::with_capacity(NUM_FEATURES);
    for k in 0..NUM_KERNELS {
        for j in 0..num_dilations {
            biases.extend_from_slice(model.plan.group_biases(k, j));
        }
    }
    let classes = model.classes().to_vec();
    let weights: Vec<f64> = model.ridge.weights.transpose().iter().copied().collect();
    // DMatrix iteration is column-major; transposing first yields the
    // class-major (row-major C x D) order declared by the format.
    let arrays: Vec<(&str, Vec<f64>)> = vec![
        ("biases", biases),
        ("theta", model.phases.theta().to_vec()),
        ("feature_mean", model.standardizer.mean.clone()),
        ("feature_scale", model.standardizer.scale.clone()),
        ("weights", weights),
        ("intercepts", model.ridge.intercepts.clone()),
    ];
    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        mode: match model.mode {
            PoolMode::Ppv => "ppv".into(),
            PoolMode::Hdc => "hdc".into(),
        },
        scale: model.scale,
        seed: model.seed,
        input_length: model.plan.input_length(),
        dim: NUM_FEATURES,
        alpha: model.ridge.alpha,
        alpha_grid: rockhd_core::default_alpha_grid(),
        classes,
        dilations: schedule.dilations.clone(),
        features_per_dilation: schedule.features_per_dilation.clone(),
        arrays: arrays
            .iter()
            .map(|(name, data)| ArrayEntry {
                name: name.to_string(),
                len: data.len(),
            })
            .collect(),
    };
    let manifest_bytes = serde_json::to_vec(&manifest).expect("manifest serialization");
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&(manifest_bytes.len() as u32).to_le_bytes())?;
    w.write_all(&manifest_bytes)?;
    for (_, data) in &arrays {
        for v in data {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Load a pipeline saved by [`save_model`].
pub fn load_model(path: &Path) -> Result<PipelineModel, PersistError> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 8 || &bytes[..4] != MAGIC {
        return Err(corrupt("bad magic"));
    }
    let manifest_len = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    if bytes.len() < 8 + manifest_len {
        return Err(corrupt("truncated manifest"));
    }
    let manifest: Manifest = serde_json::from_slice(&bytes[8..8 + manifest_len])
        .map_err(|e| corrupt(format!("bad manifest: {e}")))?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(PersistError::VersionMismatch(manifest.format_version));
    }
    if manifest.dim != NUM_FEATURES {
        return Err(corrupt(format!("unexpected dimensionality {}", manifest.dim)));
    }
    let payload = &bytes[8 + manifest_len..];
    let declared: usize = manifest.arrays.iter().map(|a| a.len).sum();
    if payload.len() != declared * 8 {
        return Err(corrupt(format!(
            "payload holds {} bytes, manifest declares {}",
            payload.len(),
            declared * 8
        )));
    }
    let mut arrays = std::collections::HashMap::new();
    let mut offset = 0;
    for entry in &manifest.arrays {
        let data: Vec<f64> = payload[offset..offset + entry.len * 8]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        offset += entry.len * 8;
        arrays.insert(entry.name.clone(), data);
    }
    let mut take = |name: &str, len: usize| -> Result<Vec<f64>, PersistError> {
        let data = arrays
            .remove(name)
            .ok_or_else(|| corrupt(format!("missing array {name:?}")))?;
        if data.len() != len {
            return Err(corrupt(format!(
                "array {name:?} has length {}, expected {len}",
                data.len()
            )));
        }
        Ok(data)
    };

    let num_classes = manifest.classes.len();
    if manifest.features_per_dilation.len() != manifest.dilations.len() {
        return Err(corrupt("schedule shape mismatch"));
    }
    let per_kernel: usize = manifest.features_per_dilation.iter().sum();
    if per_kernel * NUM_KERNELS != NUM_FEATURES {
        return Err(corrupt("feature layout does not total 9996"));
    }
    let flat_biases = take("biases", NUM_FEATURES)?;
    let theta = take("theta", NUM_FEATURES)?;
    let mean = take("feature_mean", NUM_FEATURES)?;
    let scale = take("feature_scale", NUM_FEATURES)?;
    let weights = take("weights", num_classes * NUM_FEATURES)?;
    let intercepts = take("intercepts", num_classes)?;

    let mut biases = Vec::with_capacity(NUM_KERNELS * manifest.dilations.len());
    let mut cursor = 0;
    for _k in 0..NUM_KERNELS {
        for &fpd in &manifest.features_per_dilation {
            biases.push(flat_biases[cursor..cursor + fpd].to_vec());
            cursor += fpd;
        }
    }
    let schedule = DilationSchedule {
        dilations: manifest.dilations.clone(),
        features_per_dilation: manifest.features_per_dilation.clone(),
    };
    let plan = TransformPlan::from_parts(manifest.input_length, schedule, biases);
    let phases = PhaseVector::from_parts(theta, subseed(manifest.seed, 1));
    let mode = match manifest.mode.as_str() {
        "ppv" => PoolMode::Ppv,
        "hdc" => PoolMode::Hdc,
        other => return Err(corrupt(format!("unknown mode {other:?}"))),
    };
    let ridge = RidgeModel {
        weights: nalgebra::DMatrix::from_row_slice(num_classes, NUM_FEATURES, &weights),
        intercepts,
        alpha: manifest.alpha,
        classes: manifest.classes,
    };
    Ok(PipelineModel::from_parts(
        plan,
        phases,
        manifest.scale,
        mode,
        Standardizer { mean, scale },
        ridge,
        manifest.seed,
    ))
}
