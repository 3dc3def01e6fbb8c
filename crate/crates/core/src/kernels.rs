//! The fixed convolution kernel set.
//!
//! Every kernel has nine taps, six with weight -1 and three with weight 2,
//! so each kernel sums to zero. There are C(9,3) = 84 of them.

/// Number of taps per kernel.
pub const KERNEL_LEN: usize = 9;
/// Number of distinct kernels.
pub const NUM_KERNELS: usize = 84;

/// A nine-tap kernel with weights in {-1, 2}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Kernel {
    weights: [i8; KERNEL_LEN],
    positive: [usize; 3],
}

impl Kernel {
    /// Build a kernel from the three tap positions holding weight 2.
    ///
    /// Panics if the positions are not strictly increasing or out of range.
    pub fn from_positive_positions(positions: [usize; 3]) -> Self {
        assert!(positions[0] < positions[1] && positions[1] < positions[2]);
        assert!(positions[2] < KERNEL_LEN);
        let mut weights = [-1i8; KERNEL_LEN];
        for &p in &positions {
            weights[p] = 2;
        }
        Kernel {
            weights,
            positive: positions,
        }
    }

    /// Tap weights, length 9.
    pub fn weights(&self) -> &[i8; KERNEL_LEN] {
        &self.weights
    }

    /// The three tap positions with weight 2, ascending.
    pub fn positive_positions(&self) -> [usize; 3] {
        self.positive
    }
}

/// Enumerate all 84 kernels in lexicographic order of their weight-2 positions.
pub fn enumerate_kernels() -> Vec<Kernel> {
    let mut kernels = Vec::with_capacity(NUM_KERNELS);
    for a in 0..KERNEL_LEN {
        for b in (a + 1)..KERNEL_LEN {
            for c in (b + 1)..KERNEL_LEN {
                kernels.push(Kernel::from_positive_positions([a, b, c]));
            }
        }
    }
    debug_assert_eq!(kernels.len(), NUM_KERNELS);
    kernels
}
