//! Pooling of thresholded convolution responses into descriptors.
//!
//! For each (kernel, dilation) group the response is computed once; every
//! bias in the group contributes one feature. Groups with even kernel+dilation
//! parity pool over the full zero-padded response, the others only over
//! positions where the kernel fits without padding.
//!
//! PPV pooling records the fraction of positions whose response exceeds the
//! bias. HDC pooling accumulates the timestamp encoding with a sign chosen by
//! the threshold outcome (`+P_t` if the response exceeds the bias, `-P_t`
//! otherwise, ties negative), evaluated as `2 * sum_{c > B} P_t - sum P_t`
//! so a column's range sum is reused across outcomes.

use crate::conv::{decompose_taps, kernel_response_from_taps};
use crate::dataset::TimeSeriesDataset;
use crate::encoding::TimeEncodingTable;
use crate::error::{Error, Result};
use crate::kernels::NUM_KERNELS;
use crate::plan::{TransformPlan, NUM_FEATURES};

/// How threshold outcomes are pooled over time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolMode {
    /// Proportion of positive threshold outcomes.
    Ppv,
    /// Sign-selected accumulation of timestamp encodings.
    Hdc,
}

/// A pooled feature vector for one series.
#[derive(Debug, Clone, PartialEq)]
pub struct Descriptor {
    pub values: Vec<f64>,
    pub mode: PoolMode,
}

fn check_inputs(
    len: usize,
    plan: &TransformPlan,
    enc: Option<&TimeEncodingTable>,
    mode: PoolMode,
) -> Result<()> {
    if len != plan.input_length() {
        return Err(Error::LengthMismatch {
            expected: plan.input_length(),
            got: len,
        });
    }
    if mode == PoolMode::Hdc {
        let enc = enc.ok_or(Error::MissingEncoding)?;
        if enc.length() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                got: enc.length(),
            });
        }
        if enc.dim() != NUM_FEATURES {
            return Err(Error::DimensionMismatch {
                expected: NUM_FEATURES,
                got: enc.dim(),
            });
        }
    }
    Ok(())
}

#[inline]
fn pool_ppv(response: &[f64], bias: f64, t0: usize, t1: usize) -> f64 {
    let count = response[t0..t1].iter().filter(|&&c| c > bias).count();
    count as f64 / (t1 - t0) as f64
}

/// Pool one bias of an HDC group: `2 * sum_{c > bias} col[t] - range_sum`.
///
/// Eight independent accumulators with a branchless bit-mask select keep the
/// loop vectorizable; a strict sequential float reduction would forbid that.
#[inline]
fn pool_hdc(response: &[f64], bias: f64, col: &[f64], range_sum: f64, t0: usize, t1: usize) -> f64 {
    let resp = &response[t0..t1];
    let col = &col[t0..t1];
    let mut acc = [0.0f64; 8];
    for (r8, p8) in resp.chunks_exact(8).zip(col.chunks_exact(8)) {
        let r8: &[f64; 8] = r8.try_into().unwrap();
        let p8: &[f64; 8] = p8.try_into().unwrap();
        for l in 0..8 {
            let mask = ((r8[l] > bias) as u64).wrapping_neg();
            acc[l] += f64::from_bits(p8[l].to_bits() & mask);
        }
    }
    let tail = resp.len() - resp.len() % 8;
    for (&c, &p) in resp[tail..].iter().zip(&col[tail..]) {
        let mask = ((c > bias) as u64).wrapping_neg();
        acc[0] += f64::from_bits(p.to_bits() & mask);
    }
    let pos = acc.iter().sum::<f64>();
    2.0 * pos - range_sum
}

/// Transform one series into its descriptor.
pub fn transform(
    x: &[f64],
    plan: &TransformPlan,
    enc: Option<&TimeEncodingTable>,
    mode: PoolMode,
) -> Result<Descriptor> {
    check_inputs(x.len(), plan, enc, mode)?;
    let len = x.len();
    let mut values = vec![0.0; NUM_FEATURES];
    let mut response = vec![0.0; len];
    for (j, &d) in plan.schedule().dilations.iter().enumerate() {
        let decomp = decompose_taps(x, d)?;
        for k in 0..NUM_KERNELS {
            kernel_response_from_taps(&decomp, &plan.kernels()[k], &mut response);
            let (t0, t1) = pooling_range(TransformPlan::is_padded(k, j), d, len);
            let biases = plan.group_biases(k, j);
            let base = plan.feature_index(k, j, 0);
            match mode {
                PoolMode::Ppv => {
                    for (b, &bias) in biases.iter().enumerate() {
                        values[base + b] = pool_ppv(&response, bias, t0, t1);
                    }
                }
                PoolMode::Hdc => {
                    let table = enc.unwrap();
                    for (b, &bias) in biases.iter().enumerate() {
                        let col = table.column(base + b);
                        let sum = table.column_range_sum(base + b, t0, t1);
                        values[base + b] = pool_hdc(&response, bias, col, sum, t0, t1);
                    }
                }
            }
        }
    }
    Ok(Descriptor { values, mode })
}

/// Valid pooling positions `[t0, t1)` for one group.
fn pooling_range(padded: bool, d: usize, len: usize) -> (usize, usize) {
    if padded {
        (0, len)
    } else {
        (4 * d, len - 4 * d)
    }
}

/// Number of time steps feature (k, j) pools over.
pub fn effective_length(kernel_index: usize, dilation: usize, dilation_index: usize, len: usize) -> usize {
    let (t0, t1) = pooling_range(
        TransformPlan::is_padded(kernel_index, dilation_index),
        dilation,
        len,
    );
    t1 - t0
}

const BATCH_CHUNK: usize = 64;

/// Transform every series of a dataset; row `r` equals `transform` of
/// sample `r` bit-for-bit.
///
/// Samples are processed in small blocks so that in HDC mode each encoding
/// column is fetched once per block instead of once per sample.
pub fn transform_batch(
    ds: &TimeSeriesDataset,
    plan: &TransformPlan,
    enc: Option<&TimeEncodingTable>,
    mode: PoolMode,
) -> Result<Vec<Descriptor>> {
    let len = plan.input_length();
    for r in 0..ds.len() {
        check_inputs(ds.series(r).len(), plan, enc, mode)?;
    }
    let mut out: Vec<Descriptor> = (0..ds.len())
        .map(|_| Descriptor {
            values: vec![0.0; NUM_FEATURES],
            mode,
        })
        .collect();
    let mut buf = vec![0.0; BATCH_CHUNK * NUM_KERNELS * len.max(1)];
    let mut start = 0;
    while start < ds.len() {
        let chunk = (ds.len() - start).min(BATCH_CHUNK);
        for (j, &d) in plan.schedule().dilations.iter().enumerate() {
            for s in 0..chunk {
                let decomp = decompose_taps(ds.series(start + s), d)?;
                for k in 0..NUM_KERNELS {
                    let slot = &mut buf[(s * NUM_KERNELS + k) * len..(s * NUM_KERNELS + k + 1) * len];
                    kernel_response_from_taps(&decomp, &plan.kernels()[k], slot);
                }
            }
            for k in 0..NUM_KERNELS {
                let (t0, t1) = pooling_range(TransformPlan::is_padded(k, j), d, len);
                let biases = plan.group_biases(k, j);
                let base = plan.feature_index(k, j, 0);
                match mode {
                    PoolMode::Ppv => {
                        for (b, &bias) in biases.iter().enumerate() {
                            for s in 0..chunk {
                                let response = &buf
                                    [(s * NUM_KERNELS + k) * len..(s * NUM_KERNELS + k + 1) * len];
                                out[start + s].values[base + b] = pool_ppv(response, bias, t0, t1);
                            }
                        }
                    }
                    PoolMode::Hdc => {
                        let table = enc.unwrap();
                        for (b, &bias) in biases.iter().enumerate() {
                            let col = table.column(base + b);
                            let sum = table.column_range_sum(base + b, t0, t1);
                            for s in 0..chunk {
                                let response = &buf
                                    [(s * NUM_KERNELS + k) * len..(s * NUM_KERNELS + k + 1) * len];
                                out[start + s].values[base + b] =
                                    pool_hdc(response, bias, col, sum, t0, t1);
                            }
                        }
                    }
                }
            }
        }
        start += chunk;
    }
    Ok(out)
}
