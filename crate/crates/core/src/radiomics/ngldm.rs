//! Neighbouring gray-level dependence matrix features.

use crate::preprocess::DiscretizedVolume;
use crate::volume::{coords, offset};

use super::matrix::{arrange, EmphasisStats, MatrixKind, ZoneMatrix};
use super::neighborhood::NEIGHBORS_26;
use super::{Aggregation, Family, FamilyFeatures, Feature};

pub const NAMES: [&str; 17] = [
    "dependence_count_energy",
    "dependence_count_entropy",
    "dependence_count_non_uniformity",
    "dependence_count_non_uniformity_normalised",
    "dependence_count_percentage",
    "dependence_count_variance",
    "grey_level_non_uniformity",
    "grey_level_non_uniformity_normalised",
    "grey_level_variance",
    "high_dependence_emphasis",
    "high_dependence_high_grey_level_emphasis",
    "high_dependence_low_grey_level_emphasis",
    "high_grey_level_count_emphasis",
    "low_dependence_emphasis",
    "low_dependence_high_grey_level_emphasis",
    "low_dependence_low_grey_level_emphasis",
    "low_grey_level_count_emphasis",
];

const SLOT_NAMES: [&str; 17] = [
    "low_dependence_emphasis",
    "high_dependence_emphasis",
    "low_grey_level_count_emphasis",
    "high_grey_level_count_emphasis",
    "low_dependence_low_grey_level_emphasis",
    "low_dependence_high_grey_level_emphasis",
    "high_dependence_low_grey_level_emphasis",
    "high_dependence_high_grey_level_emphasis",
    "grey_level_non_uniformity",
    "grey_level_non_uniformity_normalised",
    "dependence_count_non_uniformity",
    "dependence_count_non_uniformity_normalised",
    "dependence_count_percentage",
    "grey_level_variance",
    "dependence_count_variance",
    "dependence_count_entropy",
    "dependence_count_energy",
];

/// Rows are levels, columns are `k + 1` where `k` counts in-mask neighbours
/// whose level is within `alpha` of the centre.
pub fn dependence_matrix(d: &DiscretizedVolume, alpha: u32) -> ZoneMatrix {
    let dims = d.dims();
    let mut m = ZoneMatrix::new(MatrixKind::Dependence, None);
    for i in d.mask().indices() {
        let level = d.level(i);
        let c = coords(dims, i);
        let mut k = 0u32;
        for off in NEIGHBORS_26 {
            if let Some(p) = offset(dims, c, off) {
                let j = p[0] + dims[0] * (p[1] + dims[1] * p[2]);
                if d.mask().contains(j) && d.level(j).abs_diff(level) <= alpha {
                    k += 1;
                }
            }
        }
        m.add(level, k + 1, 1.0);
    }
    m
}

pub fn ngldm_features(d: &DiscretizedVolume, alpha: u32) -> FamilyFeatures {
    let m = dependence_matrix(d, alpha);
    let values = match EmphasisStats::compute(&m, d.mask().count() as f64) {
        Some(s) => {
            let mut slots = [0.0; 17];
            slots[..16].copy_from_slice(&s.sixteen());
            slots[16] = s.energy;
            arrange(&NAMES, &SLOT_NAMES, &slots)
        }
        None => [Feature::nan(); 17],
    };
    let named: Vec<(&'static str, Feature)> = NAMES.iter().copied().zip(values).collect();
    FamilyFeatures::from_named(Family::Ngldm, Aggregation::None, &named)
}
