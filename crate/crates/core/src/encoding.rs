//! Timestamp hypervectors via fractional power encoding.
//!
//! A seed vector is defined through its DFT phases: unit-magnitude spectral
//! coefficients `e^{i*theta_j}` with conjugate symmetry so the vector is real.
//! Raising the coefficients to a real power `p` encodes the scalar `p` as a
//! hypervector whose similarity to other encodings decays with the scalar
//! distance: `<v^p1, v^p2> = (1/D) sum_j cos((p1-p2) * theta_j)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// DFT phases of a real seed hypervector.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector {
    theta: Vec<f64>,
    seed: u64,
}

impl PhaseVector {
    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Rebuild from serialized phases.
    pub fn from_parts(theta: Vec<f64>, seed: u64) -> Self {
        PhaseVector { theta, seed }
    }

    /// Encode the scalar `p`: inverse DFT of the spectrum `e^{i*p*theta_j}`.
    /// The result is real (conjugate symmetry) and has unit norm.
    pub fn fractional_power(&self, p: f64) -> Vec<f64> {
        let d = self.theta.len();
        let mut buf: Vec<Complex<f64>> = self
            .theta
            .iter()
            .map(|&th| Complex::from_polar(1.0, p * th))
            .collect();
        FftPlanner::new().plan_fft_inverse(d).process(&mut buf);
        buf.iter().map(|c| c.re / d as f64).collect()
    }
}

/// Draw conjugate-symmetric phases from a seeded RNG.
///
/// Free phases are i.i.d. uniform on (-pi, pi]; `theta[0] = 0`,
/// `theta[D-j] = -theta[j]`, and for even D the Nyquist phase is 0 so that
/// fractional powers stay real.
pub fn make_phases(dim: usize, seed: u64) -> PhaseVector {
    assert!(dim >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut theta = vec![0.0; dim];
    let half = if dim % 2 == 0 { dim / 2 } else { dim / 2 + 1 };
    for j in 1..half {
        // (-pi, pi]
        let u: f64 = rng.random();
        let phase = std::f64::consts::PI * (1.0 - 2.0 * u);
        theta[j] = phase;
        theta[dim - j] = -phase;
    }
    PhaseVector { theta, seed }
}

/// Precomputed timestamp encodings for one (length, scale) pair.
///
/// Row `t` (1-based time step) encodes `p_t = scale * t / length`. Rows are
/// stored feature-major so pooling can stream one feature's column of
/// timestamps contiguously; per-column prefix sums support O(1) range sums.
#[derive(Debug, Clone)]
pub struct TimeEncodingTable {
    scale: f64,
    length: usize,
    dim: usize,
    /// dim x length, feature-major: `cols[i * length + (t-1)]` is P_{t,i}.
    cols: Vec<f64>,
    /// dim x (length + 1) prefix sums along time per feature.
    prefix: Vec<f64>,
}

impl TimeEncodingTable {
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Timestamps of feature `i`, indexed by 0-based time position.
    pub fn column(&self, i: usize) -> &[f64] {
        &self.cols[i * self.length..(i + 1) * self.length]
    }

    /// Sum of feature `i`'s column over 0-based positions `[t0, t1)`.
    pub fn column_range_sum(&self, i: usize, t0: usize, t1: usize) -> f64 {
        let base = i * (self.length + 1);
        self.prefix[base + t1] - self.prefix[base + t0]
    }

    /// The encoding of 0-based time position `t` as an owned row.
    pub fn row(&self, t: usize) -> Vec<f64> {
        (0..self.dim).map(|i| self.cols[i * self.length + t]).collect()
    }
}

/// Build the timestamp table for `length` steps at the given scale.
///
/// Scale 0 yields all-ones rows (the identity of element-wise binding), which
/// makes HDC pooling coincide with bipolar PPV pooling. For positive scales
/// row `t` is `phases.fractional_power(scale * t / length)`.
pub fn build_time_encoding(length: usize, scale: f64, phases: &PhaseVector) -> TimeEncodingTable {
    assert!(length >= 1);
    assert!(scale >= 0.0);
    let dim = phases.dim();
    let mut cols = vec![0.0; dim * length];
    if scale == 0.0 {
        cols.fill(1.0);
    } else {
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_inverse(dim);
        let mut buf = vec![Complex::new(0.0, 0.0); dim];
        for t in 1..=length {
            let p = scale * t as f64 / length as f64;
            for (slot, &th) in buf.iter_mut().zip(phases.theta.iter()) {
                *slot = Complex::from_polar(1.0, p * th);
            }
            fft.process(&mut buf);
            for (i, c) in buf.iter().enumerate() {
                cols[i * length + (t - 1)] = c.re / dim as f64;
            }
        }
    }
    let mut prefix = vec![0.0; dim * (length + 1)];
    for i in 0..dim {
        let base = i * (length + 1);
        let mut acc = 0.0;
        for t in 0..length {
            acc += cols[i * length + t];
            prefix[base + t + 1] = acc;
        }
    }
    TimeEncodingTable {
        scale,
        length,
        dim,
        cols,
        prefix,
    }
}
