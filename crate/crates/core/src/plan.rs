//! Dilation scheduling and bias fitting for the feature transform.
//!
//! A fitted [`TransformPlan`] pins everything the transform needs: the kernel
//! set, which dilations are used for a given input length, how many features
//! each dilation contributes, the padding parity convention, and the bias
//! values each (kernel, dilation) group thresholds against.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conv::dilated_convolve;
use crate::dataset::TimeSeriesDataset;
use crate::error::{Error, Result};
use crate::kernels::{enumerate_kernels, Kernel, KERNEL_LEN, NUM_KERNELS};

/// Features per kernel (dilation/bias combinations).
pub const FEATURES_PER_KERNEL: usize = 119;
/// Total descriptor dimensionality: 84 * 119.
pub const NUM_FEATURES: usize = NUM_KERNELS * FEATURES_PER_KERNEL;

const EXPONENT_GRID: usize = 32;

/// Which dilations are used and how many features each contributes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DilationSchedule {
    pub dilations: Vec<usize>,
    pub features_per_dilation: Vec<usize>,
}

impl DilationSchedule {
    /// Feature offset of dilation index `j` within a kernel's 119 features.
    pub fn feature_offset(&self, j: usize) -> usize {
        self.features_per_dilation[..j].iter().sum()
    }
}

/// Choose dilations for `input_length` from an exponential grid.
///
/// Candidate exponents are 32 evenly spaced values in `[0, log2((L-1)/8)]`;
/// each candidate contributes dilation `floor(2^e)`. Duplicate dilations are
/// merged with multiplicity, counts are scaled by 119/32 (floored), and the
/// remaining features are handed out round-robin starting at the smallest
/// dilation. Smaller dilations therefore receive exponentially more features.
pub fn plan_dilations(input_length: usize) -> Result<DilationSchedule> {
    if input_length < KERNEL_LEN {
        return Err(Error::InputTooShort(input_length));
    }
    let max_exponent = ((input_length - 1) as f64 / 8.0).log2();
    let mut dilations: Vec<usize> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for i in 0..EXPONENT_GRID {
        let e = max_exponent * i as f64 / (EXPONENT_GRID - 1) as f64;
        let d = (2f64.powf(e)).floor() as usize;
        match dilations.last() {
            Some(&last) if last == d => *counts.last_mut().unwrap() += 1,
            _ => {
                dilations.push(d);
                counts.push(1);
            }
        }
    }
    let mut features: Vec<usize> = counts
        .iter()
        .map(|&c| c * FEATURES_PER_KERNEL / EXPONENT_GRID)
        .collect();
    let mut remaining = FEATURES_PER_KERNEL - features.iter().sum::<usize>();
    let num_dilations = features.len();
    let mut j = 0;
    while remaining > 0 {
        features[j % num_dilations] += 1;
        j += 1;
        remaining -= 1;
    }
    Ok(DilationSchedule {
        dilations,
        features_per_dilation: features,
    })
}

/// Low-discrepancy quantile positions: `(m * phi) mod 1` for `m = 1..=n`,
/// with `phi` the golden ratio. All values lie strictly in (0, 1).
pub fn quantile_positions(n: usize) -> Vec<f64> {
    let phi = (5f64.sqrt() + 1.0) / 2.0;
    (1..=n).map(|m| (m as f64 * phi).fract()).collect()
}

/// Empirical quantile with linear interpolation between order statistics.
/// `sorted` must be ascending and non-empty.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = q * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Fully fitted transform state.
#[derive(Debug, Clone)]
pub struct TransformPlan {
    input_length: usize,
    kernels: Vec<Kernel>,
    schedule: DilationSchedule,
    /// Bias values per (kernel, dilation) group, ascending within each group.
    /// Group index is `kernel_index * num_dilations + dilation_index`.
    biases: Vec<Vec<f64>>,
}

impl TransformPlan {
    pub fn input_length(&self) -> usize {
        self.input_length
    }

    pub fn kernels(&self) -> &[Kernel] {
        &self.kernels
    }

    pub fn schedule(&self) -> &DilationSchedule {
        &self.schedule
    }

    pub fn group_biases(&self, kernel_index: usize, dilation_index: usize) -> &[f64] {
        &self.biases[kernel_index * self.schedule.dilations.len() + dilation_index]
    }

    /// Padding parity: group (k, j) pools over the full zero-padded response
    /// iff `k + j` is even; otherwise only unpadded positions contribute.
    pub fn is_padded(kernel_index: usize, dilation_index: usize) -> bool {
        (kernel_index + dilation_index) % 2 == 0
    }

    /// Global index of feature (kernel k, dilation j, bias b):
    /// kernel-major, then dilation, then bias.
    pub fn feature_index(&self, kernel_index: usize, dilation_index: usize, bias_index: usize) -> usize {
        kernel_index * FEATURES_PER_KERNEL
            + self.schedule.feature_offset(dilation_index)
            + bias_index
    }

    /// Rebuild a plan from its serialized parts. The bias layout must match
    /// the group layout implied by the schedule.
    pub fn from_parts(
        input_length: usize,
        schedule: DilationSchedule,
        biases: Vec<Vec<f64>>,
    ) -> Self {
        TransformPlan {
            input_length,
            kernels: enumerate_kernels(),
            schedule,
            biases,
        }
    }

    /// Plan and fit biases from training data; see [`fit_biases`].
    pub fn fit(train: &TimeSeriesDataset, seed: u64) -> Result<Self> {
        if train.len() == 0 {
            return Err(Error::EmptyDataset);
        }
        let schedule = plan_dilations(train.series_len())?;
        fit_biases(train, enumerate_kernels(), schedule, seed)
    }
}

/// Fit bias values from training data.
///
/// For each (kernel, dilation) group, one training example is drawn uniformly
/// from a single seeded RNG stream in fixed group order (kernel-major, then
/// dilation); the group's biases are the empirical quantiles of that example's
/// dilated convolution response at [`quantile_positions`], sorted ascending.
pub fn fit_biases(
    train: &TimeSeriesDataset,
    kernels: Vec<Kernel>,
    schedule: DilationSchedule,
    seed: u64,
) -> Result<TransformPlan> {
    if train.len() == 0 {
        return Err(Error::EmptyDataset);
    }
    let input_length = train.series_len();
    if input_length < KERNEL_LEN {
        return Err(Error::InputTooShort(input_length));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let num_dilations = schedule.dilations.len();
    let mut biases = Vec::with_capacity(kernels.len() * num_dilations);
    for kernel in &kernels {
        for (j, &d) in schedule.dilations.iter().enumerate() {
            let sample = rng.random_range(0..train.len());
            let response = dilated_convolve(train.series(sample), kernel, d)?;
            let mut sorted = response.values;
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut group: Vec<f64> = quantile_positions(schedule.features_per_dilation[j])
                .into_iter()
                .map(|q| quantile_sorted(&sorted, q))
                .collect();
            group.sort_by(|a, b| a.partial_cmp(b).unwrap());
            biases.push(group);
        }
    }
    Ok(TransformPlan {
        input_length,
        kernels,
        schedule,
        biases,
    })
}
