//! Fitted end-to-end pipelines: transform plan, timestamp encoding,
//! standardizer and ridge head, plus scale selection.

use nalgebra::DMatrix;

use rockhd_core::{
    build_time_encoding, default_alpha_grid, make_phases, predict, ridge_fit, standardize_apply,
    standardize_fit, stratified_folds, transform_batch, Descriptor, Error, PhaseVector, PoolMode,
    Result, RidgeModel, Standardizer, TimeEncodingTable, TimeSeriesDataset, TransformPlan,
    NUM_FEATURES,
};

/// Derive independent sub-seeds from one pipeline seed.
pub fn subseed(seed: u64, stream: u64) -> u64 {
    // splitmix64 step
    let mut z = seed
        .wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9e3779b97f4a7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// A fully fitted classification pipeline.
#[derive(Debug, Clone)]
pub struct PipelineModel {
    pub plan: TransformPlan,
    pub phases: PhaseVector,
    pub scale: f64,
    pub mode: PoolMode,
    pub standardizer: Standardizer,
    pub ridge: RidgeModel,
    pub seed: u64,
    encoding: Option<TimeEncodingTable>,
}

impl PipelineModel {
    pub fn input_length(&self) -> usize {
        self.plan.input_length()
    }

    pub fn classes(&self) -> &[String] {
        &self.ridge.classes
    }

    pub fn encoding(&self) -> Option<&TimeEncodingTable> {
        self.encoding.as_ref()
    }

    /// Reassemble a pipeline from persisted parts, rebuilding the timestamp
    /// encoding deterministically.
    pub fn from_parts(
        plan: TransformPlan,
        phases: PhaseVector,
        scale: f64,
        mode: PoolMode,
        standardizer: Standardizer,
        ridge: RidgeModel,
        seed: u64,
    ) -> Self {
        let encoding = match mode {
            PoolMode::Hdc => Some(build_time_encoding(plan.input_length(), scale, &phases)),
            PoolMode::Ppv => None,
        };
        PipelineModel {
            plan,
            phases,
            scale,
            mode,
            standardizer,
            ridge,
            seed,
            encoding,
        }
    }

    /// Pooled descriptors for every series of `ds`.
    pub fn transform_dataset(&self, ds: &TimeSeriesDataset) -> Result<Vec<Descriptor>> {
        transform_batch(ds, &self.plan, self.encoding.as_ref(), self.mode)
    }

    /// Standardize descriptors and run the ridge head; returns class indices
    /// into `classes()`.
    pub fn classify(&self, descriptors: &[Descriptor]) -> Result<Vec<usize>> {
        let x = descriptor_matrix(descriptors);
        let z = standardize_apply(&self.standardizer, &x);
        Ok(predict(&self.ridge, &z)?.0)
    }

    pub fn predict_dataset(&self, ds: &TimeSeriesDataset) -> Result<Vec<usize>> {
        self.classify(&self.transform_dataset(ds)?)
    }
}

pub(crate) fn descriptor_matrix(descriptors: &[Descriptor]) -> DMatrix<f64> {
    let rows = descriptors.len();
    DMatrix::from_fn(rows, NUM_FEATURES, |r, c| descriptors[r].values[c])
}

/// Fit the whole pipeline on a training set.
///
/// All randomness (bias sampling, phase drawing) derives from `seed`; two
/// fits with the same inputs are bit-identical. The scale only matters in
/// HDC mode.
pub fn fit_pipeline(
    train: &TimeSeriesDataset,
    scale: f64,
    seed: u64,
    mode: PoolMode,
) -> Result<PipelineModel> {
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let plan = TransformPlan::fit(train, subseed(seed, 0))?;
    let phases = make_phases(NUM_FEATURES, subseed(seed, 1));
    let encoding = match mode {
        PoolMode::Hdc => Some(build_time_encoding(train.series_len(), scale, &phases)),
        PoolMode::Ppv => None,
    };
    let descriptors = transform_batch(train, &plan, encoding.as_ref(), mode)?;
    let x = descriptor_matrix(&descriptors);
    let standardizer = standardize_fit(&x);
    let z = standardize_apply(&standardizer, &x);
    let ridge = ridge_fit(&z, train.labels(), train.class_names(), &default_alpha_grid())?;
    Ok(PipelineModel {
        plan,
        phases,
        scale,
        mode,
        standardizer,
        ridge,
        seed,
        encoding,
    })
}

/// Test-set evaluation summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub accuracy: f64,
    pub correct: usize,
    pub total: usize,
    /// confusion[actual][predicted], indexed by the model's class order.
    pub confusion: Vec<Vec<usize>>,
    pub per_class_recall: Vec<f64>,
}

/// Evaluate a fitted pipeline on a test set. Test labels are matched to the
/// model's class vocabulary by name.
pub fn evaluate(model: &PipelineModel, test: &TimeSeriesDataset) -> Result<Evaluation> {
    if test.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mapping: Vec<usize> = test
        .class_names()
        .iter()
        .map(|name| {
            model
                .classes()
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| Error::UnknownClass(name.clone()))
        })
        .collect::<Result<_>>()?;
    let predictions = model.predict_dataset(test)?;
    let c = model.classes().len();
    let mut confusion = vec![vec![0usize; c]; c];
    let mut correct = 0;
    for (i, &pred) in predictions.iter().enumerate() {
        let actual = mapping[test.label(i)];
        confusion[actual][pred] += 1;
        if actual == pred {
            correct += 1;
        }
    }
    let per_class_recall = confusion
        .iter()
        .enumerate()
        .map(|(a, row)| {
            let total: usize = row.iter().sum();
            if total == 0 {
                0.0
            } else {
                row[a] as f64 / total as f64
            }
        })
        .collect();
    Ok(Evaluation {
        accuracy: correct as f64 / test.len() as f64,
        correct,
        total: test.len(),
        confusion,
        per_class_recall,
    })
}

/// Outcome of k-fold scale selection.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleSelection {
    pub chosen: f64,
    /// (candidate scale, number of folds it won).
    pub fold_wins: Vec<(f64, usize)>,
}

/// Pick a scale by stratified k-fold cross-validation on the training set.
///
/// Every fold is evaluated for every candidate; the fold winner is the most
/// accurate candidate (ties toward the smaller scale), and the overall
/// choice is the candidate with the most fold wins (ties again toward the
/// smaller scale).
pub fn select_scale(
    train: &TimeSeriesDataset,
    candidates: &[f64],
    k: usize,
    seed: u64,
) -> Result<ScaleSelection> {
    let mut scales: Vec<f64> = candidates.to_vec();
    scales.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let folds = stratified_folds(train, k, seed)?;
    let mut wins = vec![0usize; scales.len()];
    for fold in &folds {
        let held: std::collections::HashSet<usize> = fold.iter().copied().collect();
        let fit_idx: Vec<usize> = (0..train.len()).filter(|i| !held.contains(i)).collect();
        let fit_ds = train.subset(&fit_idx, "cv-train");
        let eval_ds = train.subset(fold, "cv-val");
        let mut best: Option<(usize, f64)> = None;
        for (si, &s) in scales.iter().enumerate() {
            let model = fit_pipeline(&fit_ds, s, seed, PoolMode::Hdc)?;
            let acc = evaluate(&model, &eval_ds)?.accuracy;
            if best.map_or(true, |(_, b)| acc > b) {
                best = Some((si, acc));
            }
        }
        wins[best.unwrap().0] += 1;
    }
    let mut chosen = 0;
    for (si, &w) in wins.iter().enumerate() {
        if w > wins[chosen] {
            chosen = si;
        }
    }
    Ok(ScaleSelection {
        chosen: scales[chosen],
        fold_wins: scales.into_iter().zip(wins).collect(),
    })
}

/// Per-scale test accuracies with the best one highlighted.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub best_scale: f64,
    pub best_accuracy: f64,
    /// (scale, test accuracy) for every candidate.
    pub accuracies: Vec<(f64, f64)>,
}

/// Upper-bound diagnostic: fit once per candidate scale and evaluate each on
/// the test set, returning the best. Ties go to the smaller scale.
pub fn oracle_eval(
    train: &TimeSeriesDataset,
    test: &TimeSeriesDataset,
    candidates: &[f64],
    seed: u64,
) -> Result<OracleReport> {
    let mut scales: Vec<f64> = candidates.to_vec();
    scales.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut accuracies = Vec::with_capacity(scales.len());
    for &s in &scales {
        let model = fit_pipeline(train, s, seed, PoolMode::Hdc)?;
        accuracies.push((s, evaluate(&model, test)?.accuracy));
    }
    let (best_scale, best_accuracy) = accuracies
        .iter()
        .copied()
        .fold(None::<(f64, f64)>, |best, (s, a)| match best {
            Some((_, ba)) if a <= ba => best,
            _ => Some((s, a)),
        })
        .unwrap();
    Ok(OracleReport {
        best_scale,
        best_accuracy,
        accuracies,
    })
}
