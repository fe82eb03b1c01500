//! Fidelity evaluation for image-to-image translation of 3D volumes.
//!
//! Loads paired original/synthetic volumes with an ROI, computes image
//! quality metrics (MAE, MSE, SSIM, PSNR) and 186 radiomic features, and
//! measures per-feature rank concordance between original and synthetic
//! images across a cohort to classify which features each network preserves.

pub mod analysis;
pub mod config;
pub mod error;
pub mod iqa;
pub mod manifest;
pub mod nifti;
pub mod numeric;
pub mod phantom;
pub mod preprocess;
pub mod radiomics;
pub mod report;
pub mod selftest;
pub mod stats;
pub mod volume;

pub use analysis::{CohortTable, ConcordanceRecord, Group, GroupAssignment};
pub use config::RunConfig;
pub use error::{Error, Result};
pub use iqa::{MetricSet, SsimParams};
pub use manifest::PatientRecord;
pub use preprocess::{DiscretizationScheme, DiscretizedVolume};
pub use radiomics::{ExtractionConfig, Feature, FeatureId, FeatureVector};
pub use stats::{PairedSample, TestResult};
pub use volume::{RoiMask, Volume3D};
