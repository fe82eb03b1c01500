//! Radiomic feature extraction: 186 features over ten families.
//!
//! | family | count | computed on |
//! |--------|-------|-------------|
//! | local intensity (`li`) | 2 | continuous intensities |
//! | intensity statistics (`is`) | 18 | continuous intensities |
//! | intensity histogram (`ih`) | 23 | gray levels |
//! | intensity-volume histogram (`ivh`) | 7 | continuous intensities |
//! | co-occurrence (`glcm`) | 25 x 2 aggregations | gray levels |
//! | run length (`glrlm`) | 16 x 2 aggregations | gray levels |
//! | size zone (`glszm`) | 16 | gray levels |
//! | distance zone (`gldzm`) | 16 | gray levels |
//! | neighbourhood gray-tone difference (`ngtdm`) | 5 | gray levels |
//! | neighbouring gray-level dependence (`ngldm`) | 17 | gray levels |
//!
//! Directional families use the 13 unique 3D offsets at Chebyshev distance 1
//! and are reported both averaged over directions (`dir_avg`) and computed
//! on the merged matrix (`dir_merged`). Zones and neighbourhoods use
//! 26-connectivity. Entropies are base 2.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::preprocess::{discretize, DiscretizationScheme};
use crate::volume::{RoiMask, Volume3D};

pub mod glcm;
pub mod gldzm;
pub mod glrlm;
pub mod glszm;
pub mod histogram;
pub mod intensity;
pub mod ivh;
pub mod matrix;
pub mod neighborhood;
pub mod ngldm;
pub mod ngtdm;

pub use glcm::glcm_features;
pub use gldzm::gldzm_features;
pub use glrlm::glrlm_features;
pub use glszm::glszm_features;
pub use histogram::intensity_histogram_features;
pub use intensity::{intensity_statistics, local_intensity};
pub use ivh::ivh_features;
pub use matrix::{CooccurrenceMatrix, MatrixKind, NgtdmRow, ZoneMatrix};
pub use ngldm::ngldm_features;
pub use ngtdm::ngtdm_features;

pub const FEATURE_COUNT: usize = 186;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    LocalIntensity,
    IntensityStatistics,
    IntensityHistogram,
    IntensityVolumeHistogram,
    Glcm,
    Glrlm,
    Glszm,
    Gldzm,
    Ngtdm,
    Ngldm,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::LocalIntensity,
        Family::IntensityStatistics,
        Family::IntensityHistogram,
        Family::IntensityVolumeHistogram,
        Family::Glcm,
        Family::Glrlm,
        Family::Glszm,
        Family::Gldzm,
        Family::Ngtdm,
        Family::Ngldm,
    ];

    pub fn prefix(self) -> &'static str {
        match self {
            Family::LocalIntensity => "li",
            Family::IntensityStatistics => "is",
            Family::IntensityHistogram => "ih",
            Family::IntensityVolumeHistogram => "ivh",
            Family::Glcm => "glcm",
            Family::Glrlm => "glrlm",
            Family::Glszm => "glszm",
            Family::Gldzm => "gldzm",
            Family::Ngtdm => "ngtdm",
            Family::Ngldm => "ngldm",
        }
    }

    pub fn is_directional(self) -> bool {
        matches!(self, Family::Glcm | Family::Glrlm)
    }

    /// Base feature names (before aggregation).
    pub fn base_names(self) -> &'static [&'static str] {
        match self {
            Family::LocalIntensity => &intensity::LI_NAMES,
            Family::IntensityStatistics => &intensity::IS_NAMES,
            Family::IntensityHistogram => &histogram::NAMES,
            Family::IntensityVolumeHistogram => &ivh::NAMES,
            Family::Glcm => &glcm::NAMES,
            Family::Glrlm => &glrlm::NAMES,
            Family::Glszm => &glszm::NAMES,
            Family::Gldzm => &gldzm::NAMES,
            Family::Ngtdm => &ngtdm::NAMES,
            Family::Ngldm => &ngldm::NAMES,
        }
    }

    /// Number of entries this family contributes to a feature vector.
    pub fn feature_count(self) -> usize {
        let n = self.base_names().len();
        if self.is_directional() {
            2 * n
        } else {
            n
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Aggregation {
    None,
    DirAvg,
    DirMerged,
}

impl Aggregation {
    pub fn as_str(self) -> Option<&'static str> {
        match self {
            Aggregation::None => None,
            Aggregation::DirAvg => Some("dir_avg"),
            Aggregation::DirMerged => Some("dir_merged"),
        }
    }
}

/// Canonical feature identifier, displayed as `family[.aggregation].name`
/// (for example `is.mean` or `glcm.dir_avg.contrast`).
///
/// Ordering is family, then aggregation, then name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureId {
    pub family: Family,
    pub aggregation: Aggregation,
    pub name: &'static str,
}

impl FeatureId {
    pub fn new(family: Family, aggregation: Aggregation, name: &'static str) -> Self {
        debug_assert_eq!(family.is_directional(), aggregation != Aggregation::None);
        Self {
            family,
            aggregation,
            name,
        }
    }

    pub fn parse(s: &str) -> Option<FeatureId> {
        catalog().iter().copied().find(|id| id.to_string() == s)
    }
}

impl fmt::Display for FeatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.aggregation.as_str() {
            Some(agg) => write!(f, "{}.{}.{}", self.family.prefix(), agg, self.name),
            None => write!(f, "{}.{}", self.family.prefix(), self.name),
        }
    }
}

/// All 186 identifiers in canonical order.
pub fn catalog() -> &'static [FeatureId] {
    static CATALOG: OnceLock<Vec<FeatureId>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        let mut ids = Vec::with_capacity(FEATURE_COUNT);
        for family in Family::ALL {
            let aggs: &[Aggregation] = if family.is_directional() {
                &[Aggregation::DirAvg, Aggregation::DirMerged]
            } else {
                &[Aggregation::None]
            };
            for &agg in aggs {
                for &name in family.base_names() {
                    ids.push(FeatureId::new(family, agg, name));
                }
            }
        }
        ids.sort();
        assert_eq!(ids.len(), FEATURE_COUNT);
        ids
    })
}

/// A feature value. `degenerate` marks values that are undefined (NaN) or
/// fixed by convention because the ROI is degenerate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feature {
    pub value: f64,
    pub degenerate: bool,
}

impl Feature {
    pub fn ok(value: f64) -> Self {
        Self {
            value,
            degenerate: false,
        }
    }

    pub fn flagged(value: f64) -> Self {
        Self {
            value,
            degenerate: true,
        }
    }

    pub fn nan() -> Self {
        Self::flagged(f64::NAN)
    }

    /// NaN values are always flagged.
    pub fn checked(value: f64) -> Self {
        Self {
            value,
            degenerate: !value.is_finite(),
        }
    }
}

/// Features from one family, in no particular order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FamilyFeatures(pub Vec<(FeatureId, Feature)>);

impl FamilyFeatures {
    pub(crate) fn from_named(family: Family, aggregation: Aggregation, named: &[(&'static str, Feature)]) -> Self {
        Self(
            named
                .iter()
                .map(|&(n, f)| (FeatureId::new(family, aggregation, n), f))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Look up a non-directional feature by base name.
    pub fn get(&self, name: &str) -> Option<Feature> {
        self.0
            .iter()
            .find(|(id, _)| id.name == name && id.aggregation == Aggregation::None)
            .map(|&(_, f)| f)
    }

    pub fn get_agg(&self, aggregation: Aggregation, name: &str) -> Option<Feature> {
        self.0
            .iter()
            .find(|(id, _)| id.name == name && id.aggregation == aggregation)
            .map(|&(_, f)| f)
    }

    /// Value of a non-directional feature; panics if absent.
    pub fn value(&self, name: &str) -> f64 {
        self.get(name)
            .unwrap_or_else(|| panic!("no feature named {name}"))
            .value
    }

    pub fn value_agg(&self, aggregation: Aggregation, name: &str) -> f64 {
        self.get_agg(aggregation, name)
            .unwrap_or_else(|| panic!("no feature named {name} ({aggregation:?})"))
            .value
    }

    pub fn iter(&self) -> impl Iterator<Item = &(FeatureId, Feature)> {
        self.0.iter()
    }

    pub(crate) fn extend(&mut self, other: FamilyFeatures) {
        self.0.extend(other.0);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExtractionConfig {
    pub discretization: DiscretizationScheme,
    pub ivh_bins: usize,
    pub ngldm_alpha: u32,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            discretization: DiscretizationScheme::default(),
            ivh_bins: 1000,
            ngldm_alpha: 0,
        }
    }
}

impl ExtractionConfig {
    pub fn validate(&self) -> Result<()> {
        self.discretization.validate()?;
        if self.ivh_bins == 0 {
            return Err(Error::Config("ivh_bins must be positive".into()));
        }
        Ok(())
    }

    /// Short stable hash of the configuration.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(&Sha256::digest(&json)[..8])
    }
}

/// Where a vector came from. Both fields are `None` for vectors read back
/// from a report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Provenance {
    pub scheme: Option<DiscretizationScheme>,
    pub config_hash: Option<String>,
}

/// Exactly 186 features in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    entries: Vec<(FeatureId, Feature)>,
    provenance: Provenance,
}

impl FeatureVector {
    /// Assemble a vector from family outputs, enforcing the count law.
    pub fn assemble(features: FamilyFeatures, provenance: Provenance) -> Result<Self> {
        let mut map: BTreeMap<FeatureId, Feature> = BTreeMap::new();
        for (id, f) in features.0 {
            if map.insert(id, f).is_some() {
                return Err(Error::Config(format!("feature {id} produced twice")));
            }
        }
        let entries: Vec<(FeatureId, Feature)> = map.into_iter().collect();
        let ids: Vec<FeatureId> = entries.iter().map(|(id, _)| *id).collect();
        if ids != catalog() {
            return Err(Error::Config(format!(
                "feature set does not match the catalog ({} entries)",
                ids.len()
            )));
        }
        Ok(Self {
            entries,
            provenance,
        })
    }

    /// Build from raw values in catalog order (e.g. read back from CSV).
    pub fn from_values(values: Vec<Feature>, provenance: Provenance) -> Result<Self> {
        if values.len() != FEATURE_COUNT {
            return Err(Error::Config(format!(
                "expected {FEATURE_COUNT} features, got {}",
                values.len()
            )));
        }
        Ok(Self {
            entries: catalog().iter().copied().zip(values).collect(),
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(FeatureId, Feature)] {
        &self.entries
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn get(&self, id: &FeatureId) -> Option<Feature> {
        self.entries
            .binary_search_by(|(k, _)| k.cmp(id))
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn get_str(&self, id: &str) -> Option<Feature> {
        FeatureId::parse(id).and_then(|id| self.get(&id))
    }

    pub fn value_at(&self, position: usize) -> f64 {
        self.entries[position].1.value
    }

    pub fn family_counts(&self) -> BTreeMap<Family, usize> {
        let mut counts = BTreeMap::new();
        for (id, _) in &self.entries {
            *counts.entry(id.family).or_insert(0) += 1;
        }
        counts
    }
}

/// Compute all 186 features for one volume/ROI pair.
///
/// Local intensity, intensity statistics and the intensity-volume histogram
/// use continuous intensities; the remaining families use the discretized ROI.
/// Family-level degeneracies become flagged NaN entries; only an unusable
/// mask aborts.
pub fn extract_all(v: &Volume3D, mask: &RoiMask, cfg: &ExtractionConfig) -> Result<FeatureVector> {
    mask.check_aligned(v)?;
    cfg.validate()?;
    let d = discretize(v, mask, cfg.discretization)?;

    let mut all = FamilyFeatures::default();
    all.extend(local_intensity(v, mask)?);
    all.extend(intensity_statistics(v, mask)?);
    all.extend(intensity_histogram_features(&d));
    all.extend(ivh_features(v, mask, cfg.ivh_bins)?);
    all.extend(glcm_features(&d));
    all.extend(glrlm_features(&d));
    all.extend(glszm_features(&d));
    all.extend(gldzm_features(&d));
    all.extend(ngtdm_features(&d));
    all.extend(ngldm_features(&d, cfg.ngldm_alpha));

    FeatureVector::assemble(
        all,
        Provenance {
            scheme: Some(cfg.discretization),
            config_hash: Some(cfg.hash()),
        },
    )
}
