use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unsupported NIfTI datatype code {0}")]
    UnsupportedDatatype(i16),

    #[error("malformed NIfTI header: {0}")]
    MalformedHeader(String),

    #[error("non-finite voxel value at flat index {index}")]
    NonFiniteVoxel { index: usize },

    #[error("invalid volume: {0}")]
    InvalidVolume(String),

    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimsMismatch {
        expected: [usize; 3],
        found: [usize; 3],
    },

    #[error("region of interest is empty")]
    EmptyMask,

    #[error("crop window does not contain any ROI voxel")]
    CropLosesRoi,

    #[error("invalid discretization scheme: {0}")]
    InvalidScheme(String),

    #[error("volume {dims:?} is smaller than the SSIM window ({window} voxels per axis)")]
    VolumeTooSmall { dims: [usize; 3], window: usize },

    #[error("duplicate manifest entry for patient {patient:?}, source {source_name:?}")]
    DuplicateEntry { patient: String, source_name: String },

    #[error("patient {0:?} has no original_mri source")]
    MissingOriginal(String),

    #[error("patient {0:?} has no mask")]
    MissingMask(String),

    #[error("patient {0:?} has no synthetic source")]
    MissingSynthetic(String),

    #[error("csv error in {path}: {message}")]
    Csv { path: PathBuf, message: String },

    #[error("empty input")]
    EmptyInput,

    #[error("at least 2 samples required, got {0}")]
    TooFewSamples(usize),

    #[error("cohort has {0} usable patients, at least 2 required")]
    CohortTooSmall(usize),

    #[error("top network {0:?} is not among the concordance networks")]
    UnknownTopNetwork(String),

    #[error("unknown network {0:?}")]
    UnknownNetwork(String),

    #[error("unknown metric {0:?}")]
    UnknownMetric(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Csv {
            path: path.into(),
            message: message.to_string(),
        }
    }
}
