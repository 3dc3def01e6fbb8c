use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the transform, classifier and dataset layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input length {0} is below the minimum of 9")]
    InputTooShort(usize),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dilation {dilation} exceeds input length {input_length}")]
    DilationExceedsLength { dilation: usize, input_length: usize },
    #[error("series length {got} does not match expected length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("HDC pooling requires a time encoding table")]
    MissingEncoding,
    #[error("classifier needs at least two distinct classes")]
    DegenerateLabels,
    #[error("feature count {got} does not match model dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("class {class:?} has {got} samples, need at least {needed}")]
    InsufficientSamples { class: String, needed: usize, got: usize },
    #[error("row {row} has {got} values, expected {expected}")]
    RaggedRows { row: usize, expected: usize, got: usize },
    #[error("unparseable value {token:?} at row {row}")]
    UnparseableValue { row: usize, token: String },
    #[error("file contains no data rows")]
    EmptyFile,
    #[error("class {class:?} has {got} samples, cannot stratify into {folds} folds")]
    StratificationImpossible { class: String, folds: usize, got: usize },
    #[error("unknown class label {0:?}")]
    UnknownClass(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
