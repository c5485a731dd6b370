//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by construction, validation, file IO and the retrieval
/// operations.
#[derive(Debug, Error)]
pub enum Error {
    /// An item id failed validation (empty or contains whitespace).
    #[error("item id must be a non-empty token without whitespace, got {0:?}")]
    InvalidItemId(String),

    /// Duplicate id within one split (query set, gallery set, or truth file).
    #[error("duplicate item id {0:?}")]
    DuplicateId(String),

    /// Vector dimensionality disagreement.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A vector component or matrix value is NaN or infinite.
    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    /// Cosine distance is undefined for zero-norm vectors.
    #[error("zero-norm vector {id:?}")]
    ZeroNorm { id: String },

    /// Matrix values/shape violate the distance-matrix invariants.
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    /// Two inputs that must share shape or labels do not.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Label sets that must be identical (and identically ordered) differ.
    #[error("label mismatch: {0}")]
    LabelMismatch(String),

    /// Operations over the gallery need at least one gallery item.
    #[error("gallery is empty")]
    EmptyGallery,

    /// Invalid configuration parameter.
    #[error("{0}")]
    BadConfig(String),

    /// A ranking is not a permutation of the gallery.
    #[error("ranking is not a permutation: {0}")]
    NotPermutation(String),

    /// Average precision is undefined for a query with no relevant item.
    #[error("query {query:?} has no relevant gallery item")]
    NoRelevant { query: String },

    /// An evaluated item is missing from the ground truth.
    #[error("item {id:?} has no identity in the ground truth")]
    MissingIdentity { id: String },

    /// Frame-order metrics need a frame index for every same-identity item.
    #[error("item {id:?} has no frame index in the ground truth")]
    MissingFrame { id: String },

    /// Ground truth contains duplicate frame indices within one identity.
    #[error("identity {identity:?} has duplicate frame index {frame}")]
    DuplicateFrame { identity: String, frame: u64 },

    /// A file could not be parsed in the expected format.
    #[error("{path}: {message}")]
    Format { path: String, message: String },

    /// A file could not be opened or created.
    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Csv(#[from] csv::Error),

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable code, used by the CLI diagnostic line and the
    /// C API status mapping.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidItemId(_) | Error::DuplicateId(_) => "bad-id",
            Error::DimensionMismatch { .. } => "dim-mismatch",
            Error::NonFinite { .. } => "non-finite",
            Error::ZeroNorm { .. } => "zero-norm",
            Error::InvalidMatrix(_) => "bad-matrix",
            Error::ShapeMismatch(_) => "shape-mismatch",
            Error::LabelMismatch(_) => "label-mismatch",
            Error::EmptyGallery => "empty-gallery",
            Error::BadConfig(_) => "bad-config",
            Error::NotPermutation(_) => "not-permutation",
            Error::NoRelevant { .. } => "no-relevant",
            Error::MissingIdentity { .. } | Error::MissingFrame { .. } => "missing-truth",
            Error::DuplicateFrame { .. } => "bad-truth",
            Error::Format { .. } => "format",
            Error::File { .. } => "io",
            Error::Csv(_) => "format",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
