//! Time series classification with random convolutional kernel features.
//!
//! The feature transform convolves a univariate series with a fixed set of 84
//! nine-tap kernels at several dilations, thresholds each response against
//! fitted bias values, and pools the outcomes into a 9,996-dimensional
//! descriptor. Two pooling modes are provided:
//!
//! - **PPV**: the proportion of time steps whose response exceeds the bias.
//! - **HDC**: each threshold outcome selects a positive or negative timestamp
//!   hypervector built by fractional power encoding, and the selected vectors
//!   are accumulated. A scale parameter controls how fast timestamp similarity
//!   decays; scale 0 degenerates to (an affine map of) PPV pooling.
//!
//! Descriptors feed a one-vs-rest ridge classifier with leave-one-out
//! regularization selection. The [`dataset`] module covers synthetic peak
//! data, UCR-style tab/comma files, and stratified splitting.

pub mod conv;
pub mod dataset;
pub mod encoding;
pub mod error;
pub mod kernels;
pub mod plan;
pub mod ridge;
pub mod transform;

pub use conv::{convolve_group_fast, dilated_convolve, ResponseSeries};
pub use dataset::{
    generate_synthetic, load_ucr_tsv, save_ucr_tsv, select_challenging_subset, stratified_folds,
    train_test_split, SyntheticConfig, TimeSeriesDataset,
};
pub use encoding::{build_time_encoding, make_phases, PhaseVector, TimeEncodingTable};
pub use error::{Error, Result};
pub use kernels::{enumerate_kernels, Kernel, KERNEL_LEN, NUM_KERNELS};
pub use plan::{
    fit_biases, plan_dilations, quantile_positions, DilationSchedule, TransformPlan,
    FEATURES_PER_KERNEL, NUM_FEATURES,
};
pub use ridge::{
    default_alpha_grid, predict, ridge_fit, standardize_apply, standardize_fit, RidgeModel,
    Standardizer,
};
pub use transform::{transform, transform_batch, Descriptor, PoolMode};
