//! Labeled univariate time series: synthetic peak data, UCR-style files,
//! and seeded stratified splitting.

use std::collections::BTreeSet;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::transform::Descriptor;

/// Labeled univariate series of uniform length.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesDataset {
    name: String,
    values: Vec<f64>,
    series_len: usize,
    labels: Vec<usize>,
    class_names: Vec<String>,
}

impl TimeSeriesDataset {
    /// Build a dataset from rows. All rows must share one length and every
    /// label must index `class_names`.
    pub fn from_rows(
        name: &str,
        rows: Vec<Vec<f64>>,
        labels: Vec<usize>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        assert_eq!(rows.len(), labels.len());
        let series_len = rows.first().map_or(0, |r| r.len());
        let mut values = Vec::with_capacity(rows.len() * series_len);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != series_len {
                return Err(Error::RaggedRows {
                    row: r,
                    expected: series_len,
                    got: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        for &l in &labels {
            assert!(l < class_names.len());
        }
        Ok(TimeSeriesDataset {
            name: name.to_string(),
            values,
            series_len,
            labels,
            class_names,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Shared series length.
    pub fn series_len(&self) -> usize {
        self.series_len
    }

    pub fn series(&self, i: usize) -> &[f64] {
        &self.values[i * self.series_len..(i + 1) * self.series_len]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    /// New dataset holding the given sample indices, in order.
    pub fn subset(&self, indices: &[usize], name: &str) -> Self {
        let mut values = Vec::with_capacity(indices.len() * self.series_len);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            values.extend_from_slice(self.series(i));
            labels.push(self.labels[i]);
        }
        TimeSeriesDataset {
            name: name.to_string(),
            values,
            series_len: self.series_len,
            labels,
            class_names: self.class_names.clone(),
        }
    }

    /// Sample counts per class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.class_names.len()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }
}

/// Parameters of the synthetic peak-position dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticConfig {
    /// Series length (and sample count: one sample per peak position).
    pub length: usize,
    /// Peak shape parameter of the approximate delta function.
    pub peak_shape: f64,
    pub noise_mean: f64,
    /// Noise standard deviation. The default keeps the peak (height ~2.30
    /// for the default shape) about ten times the noise level: strong enough
    /// that the convolution features register the peak reliably, while the
    /// position-blind pooled counts still cannot separate the classes. At
    /// noise_std = 1.0 the single-step peak drowns in the noise and every
    /// classifier drops to chance.
    pub noise_std: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            length: 500,
            peak_shape: 0.03,
            noise_mean: 0.0,
            noise_std: 0.23,
            seed: 0,
        }
    }
}

/// The approximate delta function `exp(-u^2 / 2a) / sqrt(2 pi a)`.
pub fn peak_delta(u: f64, a: f64) -> f64 {
    (-u * u / (2.0 * a)).exp() / (2.0 * std::f64::consts::PI * a).sqrt()
}

/// Generate the synthetic two-class peak dataset.
///
/// For every center `c` in `1..=length` one sample is emitted:
/// `x[t] = noise + delta(t - c)` over `t = 1..=length`. Peaks in the first
/// half of the series belong to class 1, the rest to class 2.
pub fn generate_synthetic(cfg: &SyntheticConfig) -> TimeSeriesDataset {
    assert!(cfg.length >= 2);
    assert!(cfg.peak_shape > 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let normal = Normal::new(cfg.noise_mean, cfg.noise_std).unwrap();
    let t = cfg.length;
    let mut rows = Vec::with_capacity(t);
    let mut labels = Vec::with_capacity(t);
    for c in 1..=t {
        let row: Vec<f64> = (1..=t)
            .map(|step| normal.sample(&mut rng) + peak_delta(step as f64 - c as f64, cfg.peak_shape))
            .collect();
        rows.push(row);
        labels.push(if c <= t / 2 { 0 } else { 1 });
    }
    TimeSeriesDataset::from_rows("synthetic", rows, labels, vec!["1".into(), "2".into()]).unwrap()
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na.sqrt() * nb.sqrt())
    }
}

/// Select the hardest cross-class samples by greedy maximum-similarity
/// matching over descriptor cosine similarity.
///
/// Repeatedly takes the globally most similar (class-1, class-2) descriptor
/// pair (ties resolve to the lexicographically smallest index pair), removes
/// both samples, and stops after `num_pairs` pairs. The result keeps original
/// sample order.
pub fn select_challenging_subset(
    ds: &TimeSeriesDataset,
    descriptors: &[Descriptor],
    num_pairs: usize,
) -> Result<TimeSeriesDataset> {
    assert_eq!(descriptors.len(), ds.len());
    let class_a: Vec<usize> = (0..ds.len()).filter(|&i| ds.label(i) == 0).collect();
    let class_b: Vec<usize> = (0..ds.len()).filter(|&i| ds.label(i) == 1).collect();
    for (name, members) in [("1", &class_a), ("2", &class_b)] {
        if members.len() < num_pairs {
            return Err(Error::InsufficientSamples {
                class: name.to_string(),
                needed: num_pairs,
                got: members.len(),
            });
        }
    }
    let mut sims: Vec<(f64, usize, usize)> = Vec::with_capacity(class_a.len() * class_b.len());
    for &i in &class_a {
        for &j in &class_b {
            sims.push((cosine(&descriptors[i].values, &descriptors[j].values), i, j));
        }
    }
    // Descending similarity; ties toward lower (i, j).
    sims.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap()
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    let mut taken = vec![false; ds.len()];
    let mut selected = BTreeSet::new();
    let mut pairs = 0;
    for &(_, i, j) in &sims {
        if pairs == num_pairs {
            break;
        }
        if !taken[i] && !taken[j] {
            taken[i] = true;
            taken[j] = true;
            selected.insert(i);
            selected.insert(j);
            pairs += 1;
        }
    }
    let indices: Vec<usize> = selected.into_iter().collect();
    Ok(ds.subset(&indices, &format!("{}-challenging", ds.name())))
}

/// Load a UCR-style file: one sample per line, first field the class label,
/// then the values, tab- or comma-separated, no header.
pub fn load_ucr_tsv(path: &Path) -> Result<TimeSeriesDataset> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut label_tokens: Vec<String> = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (r, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(|c| c == '\t' || c == ',');
        let label = fields.next().unwrap().trim().to_string();
        let mut row = Vec::new();
        for token in fields {
            let token = token.trim();
            let value: f64 = token.parse().map_err(|_| Error::UnparseableValue {
                row: r,
                token: token.to_string(),
            })?;
            if value.is_nan() {
                return Err(Error::UnparseableValue {
                    row: r,
                    token: token.to_string(),
                });
            }
            row.push(value);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::RaggedRows {
                    row: r,
                    expected: first.len(),
                    got: row.len(),
                });
            }
        }
        label_tokens.push(label);
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyFile);
    }
    let mut class_names: Vec<String> = label_tokens.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    class_names.sort();
    let labels: Vec<usize> = label_tokens
        .iter()
        .map(|t| class_names.iter().position(|c| c == t).unwrap())
        .collect();
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    TimeSeriesDataset::from_rows(&name, rows, labels, class_names)
}

/// Write a dataset in the UCR tab-separated format. Values round-trip
/// exactly through [`load_ucr_tsv`].
pub fn save_ucr_tsv(ds: &TimeSeriesDataset, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    for i in 0..ds.len() {
        write!(w, "{}", ds.class_names()[ds.label(i)])?;
        for v in ds.series(i) {
            write!(w, "\t{}", v)?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

fn shuffled_class_indices(ds: &TimeSeriesDataset, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut per_class: Vec<Vec<usize>> = vec![Vec::new(); ds.num_classes()];
    for i in 0..ds.len() {
        per_class[ds.label(i)].push(i);
    }
    for members in per_class.iter_mut() {
        members.shuffle(rng);
    }
    per_class
}

/// Seeded stratified train/test split. Returns (train indices, test indices),
/// each sorted ascending.
pub fn train_test_split(
    ds: &TimeSeriesDataset,
    test_fraction: f64,
    seed: u64,
) -> (Vec<usize>, Vec<usize>) {
    assert!((0.0..1.0).contains(&test_fraction));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for members in shuffled_class_indices(ds, &mut rng) {
        let n_test = (members.len() as f64 * test_fraction).round() as usize;
        test.extend_from_slice(&members[..n_test]);
        train.extend_from_slice(&members[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Seeded stratified k-fold partition. Returns k disjoint index sets covering
/// all samples; every class needs at least k members.
pub fn stratified_folds(ds: &TimeSeriesDataset, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    assert!(k >= 2);
    for (c, &count) in ds.class_counts().iter().enumerate() {
        if count < k {
            return Err(Error::StratificationImpossible {
                class: ds.class_names()[c].clone(),
                folds: k,
                got: count,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    for members in shuffled_class_indices(ds, &mut rng) {
        for (pos, &i) in members.iter().enumerate() {
            folds[pos % k].push(i);
        }
    }
    for fold in folds.iter_mut() {
        fold.sort_unstable();
    }
    Ok(folds)
}
