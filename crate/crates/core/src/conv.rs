//! Dilated convolution of a series with the nine-tap kernel set.
//!
//! Responses are always materialized in centered, zero-padded alignment with
//! the same length as the input; unpadded pooling just restricts the range of
//! valid positions later. The fast path exploits the {-1, 2} weight structure:
//! with 2 = -1 + 3, every kernel response is the shared all-negative
//! accumulation plus three times the taps at its weight-2 positions.

use crate::error::{Error, Result};
use crate::kernels::{Kernel, KERNEL_LEN, NUM_KERNELS};

const CENTER: usize = KERNEL_LEN / 2; // tap index 4

/// One convolution response in centered alignment.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseSeries {
    pub values: Vec<f64>,
    pub dilation: usize,
    pub kernel_index: usize,
}

fn check_dilation(len: usize, d: usize) -> Result<()> {
    if len == 0 || (KERNEL_LEN - 1) * d > len - 1 {
        return Err(Error::DilationExceedsLength {
            dilation: d,
            input_length: len,
        });
    }
    Ok(())
}

/// Direct dilated convolution:
/// `values[t] = sum_j kernel[j] * x[t + (j-4)*d]`, with x zero outside its
/// support.
pub fn dilated_convolve(x: &[f64], kernel: &Kernel, d: usize) -> Result<ResponseSeries> {
    check_dilation(x.len(), d)?;
    let len = x.len();
    let mut values = vec![0.0; len];
    for t in 0..len {
        let mut acc = 0.0;
        for (j, &w) in kernel.weights().iter().enumerate() {
            let src = t as isize + (j as isize - CENTER as isize) * d as isize;
            if src >= 0 && (src as usize) < len {
                acc += w as f64 * x[src as usize];
            }
        }
        values[t] = acc;
    }
    Ok(ResponseSeries {
        values,
        dilation: d,
        kernel_index: usize::MAX,
    })
}

/// Shared intermediates for one (series, dilation) pair: the nine shifted
/// tap series and the all-negative accumulation.
pub(crate) struct TapDecomposition {
    pub taps: [Vec<f64>; KERNEL_LEN],
    pub base: Vec<f64>,
}

pub(crate) fn decompose_taps(x: &[f64], d: usize) -> Result<TapDecomposition> {
    check_dilation(x.len(), d)?;
    let len = x.len();
    let mut taps: [Vec<f64>; KERNEL_LEN] = std::array::from_fn(|_| vec![0.0; len]);
    for (j, tap) in taps.iter_mut().enumerate() {
        let shift = (j as isize - CENTER as isize) * d as isize;
        for (t, slot) in tap.iter_mut().enumerate() {
            let src = t as isize + shift;
            if src >= 0 && (src as usize) < len {
                *slot = x[src as usize];
            }
        }
    }
    let mut base = vec![0.0; len];
    for tap in &taps {
        for (b, &v) in base.iter_mut().zip(tap.iter()) {
            *b -= v;
        }
    }
    Ok(TapDecomposition { taps, base })
}

pub(crate) fn kernel_response_from_taps(
    decomp: &TapDecomposition,
    kernel: &Kernel,
    out: &mut [f64],
) {
    let [a, b, c] = kernel.positive_positions();
    let (ta, tb, tc) = (&decomp.taps[a], &decomp.taps[b], &decomp.taps[c]);
    for t in 0..out.len() {
        out[t] = decomp.base[t] + 3.0 * (ta[t] + tb[t] + tc[t]);
    }
}

/// Compute all 84 kernel responses for one dilation in a single pass.
///
/// Agrees with [`dilated_convolve`] within 1e-9 relative tolerance; the only
/// difference is floating-point associativity of the decomposed accumulation.
pub fn convolve_group_fast(
    x: &[f64],
    d: usize,
    kernels: &[Kernel],
) -> Result<Vec<ResponseSeries>> {
    let decomp = decompose_taps(x, d)?;
    let mut out = Vec::with_capacity(NUM_KERNELS);
    for (k, kernel) in kernels.iter().enumerate() {
        let mut values = vec![0.0; x.len()];
        kernel_response_from_taps(&decomp, kernel, &mut values);
        out.push(ResponseSeries {
            values,
            dilation: d,
            kernel_index: k,
        });
    }
    Ok(out)
}
