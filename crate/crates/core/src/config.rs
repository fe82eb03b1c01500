//! Run configuration, read from JSON. Unknown keys are rejected.
//!
//! ```json
//! {
//!   "preprocess": { "normalize": true, "crop": [128, 128, 64], "normalize_before_crop": false },
//!   "discretize": { "mode": "FBN", "bins": 32 },
//!   "ssim": { "half_width": 5, "sigma": 1.5, "k1": 0.01, "k2": 0.03, "dynamic_range": 1.0 },
//!   "metrics": { "peak": 1.0, "roi_only": false },
//!   "radiomics": { "ivh_bins": 1000, "ngldm_alpha": 0 },
//!   "analysis": { "threshold": 0.5 },
//!   "jobs": 0
//! }
//! ```
//!
//! Every section and key is optional.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iqa::{MetricOptions, SsimParams};
use crate::preprocess::{DiscretizationScheme, PreprocessOptions};
use crate::radiomics::ExtractionConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiscretizeMode {
    #[serde(rename = "FBN")]
    FixedBinNumber,
    #[serde(rename = "FBS")]
    FixedBinSize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiscretizeConfig {
    pub mode: DiscretizeMode,
    pub bins: u32,
    pub bin_width: f64,
    pub origin: f64,
}

impl Default for DiscretizeConfig {
    fn default() -> Self {
        Self {
            mode: DiscretizeMode::FixedBinNumber,
            bins: 32,
            bin_width: 0.05,
            origin: 0.0,
        }
    }
}

impl DiscretizeConfig {
    pub fn scheme(&self) -> DiscretizationScheme {
        match self.mode {
            DiscretizeMode::FixedBinNumber => DiscretizationScheme::FixedBinNumber { bins: self.bins },
            DiscretizeMode::FixedBinSize => DiscretizationScheme::FixedBinSize {
                width: self.bin_width,
                origin: self.origin,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricsConfig {
    pub peak: f64,
    pub roi_only: bool,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            peak: 1.0,
            roi_only: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadiomicsConfig {
    pub ivh_bins: usize,
    pub ngldm_alpha: u32,
}

impl Default for RadiomicsConfig {
    fn default() -> Self {
        let e = ExtractionConfig::default();
        Self {
            ivh_bins: e.ivh_bins,
            ngldm_alpha: e.ngldm_alpha,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    /// A feature is discovered by a network when its rho is strictly above this.
    pub threshold: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self { threshold: 0.5 }
    }
}

/// Default output locations, used when the matching CLI flag is absent.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub features: Option<PathBuf>,
    pub metrics: Option<PathBuf>,
    pub groups: Option<PathBuf>,
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub preprocess: PreprocessOptions,
    pub discretize: DiscretizeConfig,
    pub ssim: SsimParams,
    pub metrics: MetricsConfig,
    pub radiomics: RadiomicsConfig,
    pub analysis: AnalysisConfig,
    pub outputs: OutputConfig,
    /// Worker threads; 0 picks the number of CPUs.
    pub jobs: usize,
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(c) = self.preprocess.crop {
            if c.contains(&0) {
                return Err(Error::Config(format!("crop target must be positive, got {c:?}")));
            }
        }
        self.ssim.validate()?;
        if !(self.metrics.peak > 0.0 && self.metrics.peak.is_finite()) {
            return Err(Error::Config(format!("peak must be positive, got {}", self.metrics.peak)));
        }
        let t = self.analysis.threshold;
        if !(-1.0..=1.0).contains(&t) {
            return Err(Error::Config(format!("threshold must lie in [-1, 1], got {t}")));
        }
        self.extraction().validate()
    }

    pub fn extraction(&self) -> ExtractionConfig {
        ExtractionConfig {
            discretization: self.discretize.scheme(),
            ivh_bins: self.radiomics.ivh_bins,
            ngldm_alpha: self.radiomics.ngldm_alpha,
        }
    }

    pub fn metric_options(&self) -> MetricOptions {
        MetricOptions {
            ssim: self.ssim,
            peak: self.metrics.peak,
            roi_only: self.metrics.roi_only,
        }
    }
}
