//! Gray-level size-zone matrix features. Zones are 26-connected sets of
//! in-mask voxels sharing a gray level.

use crate::preprocess::DiscretizedVolume;
use crate::volume::{coords, offset};

use super::matrix::{arrange, EmphasisStats, MatrixKind, ZoneMatrix};
use super::neighborhood::NEIGHBORS_26;
use super::{Aggregation, Family, FamilyFeatures, Feature};

pub const NAMES: [&str; 16] = [
    "grey_level_non_uniformity",
    "grey_level_non_uniformity_normalised",
    "grey_level_variance",
    "high_grey_level_zone_emphasis",
    "large_zone_emphasis",
    "large_zone_high_grey_level_emphasis",
    "large_zone_low_grey_level_emphasis",
    "low_grey_level_zone_emphasis",
    "small_zone_emphasis",
    "small_zone_high_grey_level_emphasis",
    "small_zone_low_grey_level_emphasis",
    "zone_percentage",
    "zone_size_entropy",
    "zone_size_non_uniformity",
    "zone_size_non_uniformity_normalised",
    "zone_size_variance",
];

const SLOT_NAMES: [&str; 16] = [
    "small_zone_emphasis",
    "large_zone_emphasis",
    "low_grey_level_zone_emphasis",
    "high_grey_level_zone_emphasis",
    "small_zone_low_grey_level_emphasis",
    "small_zone_high_grey_level_emphasis",
    "large_zone_low_grey_level_emphasis",
    "large_zone_high_grey_level_emphasis",
    "grey_level_non_uniformity",
    "grey_level_non_uniformity_normalised",
    "zone_size_non_uniformity",
    "zone_size_non_uniformity_normalised",
    "zone_percentage",
    "grey_level_variance",
    "zone_size_variance",
    "zone_size_entropy",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Zone {
    pub level: u32,
    /// Flat indices of member voxels, in discovery order.
    pub voxels: Vec<usize>,
}

/// Label zones by breadth-first flood fill. Zones are numbered in order of
/// their lowest flat index.
pub fn label_zones(d: &DiscretizedVolume) -> Vec<Zone> {
    let dims = d.dims();
    let mut seen = vec![false; d.levels().len()];
    let mut zones = Vec::new();
    let mut queue = std::collections::VecDeque::new();
    for start in d.mask().indices() {
        if seen[start] {
            continue;
        }
        let level = d.level(start);
        seen[start] = true;
        queue.push_back(start);
        let mut voxels = Vec::new();
        while let Some(i) = queue.pop_front() {
            voxels.push(i);
            let c = coords(dims, i);
            for n in NEIGHBORS_26 {
                if let Some(p) = offset(dims, c, n) {
                    let j = p[0] + dims[0] * (p[1] + dims[1] * p[2]);
                    if !seen[j] && d.level(j) == level {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        zones.push(Zone { level, voxels });
    }
    zones
}

pub fn size_zone_matrix(zones: &[Zone]) -> ZoneMatrix {
    let mut m = ZoneMatrix::new(MatrixKind::SizeZone, None);
    for z in zones {
        m.add(z.level, z.voxels.len() as u32, 1.0);
    }
    m
}

pub fn glszm_features(d: &DiscretizedVolume) -> FamilyFeatures {
    let zones = label_zones(d);
    let m = size_zone_matrix(&zones);
    let values = match EmphasisStats::compute(&m, d.mask().count() as f64) {
        Some(s) => arrange(&NAMES, &SLOT_NAMES, &s.sixteen()),
        None => [Feature::nan(); 16],
    };
    let named: Vec<(&'static str, Feature)> = NAMES.iter().copied().zip(values).collect();
    FamilyFeatures::from_named(Family::Glszm, Aggregation::None, &named)
}
