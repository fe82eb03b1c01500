//! Gray-level distance-zone matrix features.
//!
//! The distance of a voxel is its city-block distance to the nearest voxel
//! outside the ROI, where the region beyond the volume border counts as
//! outside; ROI voxels touching the outside have distance 1. A zone's
//! distance is the minimum over its voxels.

use std::collections::VecDeque;

use crate::preprocess::DiscretizedVolume;
use crate::volume::{coords, offset};

use super::glszm::label_zones;
use super::matrix::{arrange, EmphasisStats, MatrixKind, ZoneMatrix};
use super::neighborhood::NEIGHBORS_6;
use super::{Aggregation, Family, FamilyFeatures, Feature};

pub const NAMES: [&str; 16] = [
    "grey_level_non_uniformity",
    "grey_level_non_uniformity_normalised",
    "grey_level_variance",
    "high_grey_level_zone_emphasis",
    "large_distance_emphasis",
    "large_distance_high_grey_level_emphasis",
    "large_distance_low_grey_level_emphasis",
    "low_grey_level_zone_emphasis",
    "small_distance_emphasis",
    "small_distance_high_grey_level_emphasis",
    "small_distance_low_grey_level_emphasis",
    "zone_distance_entropy",
    "zone_distance_non_uniformity",
    "zone_distance_non_uniformity_normalised",
    "zone_distance_variance",
    "zone_percentage",
];

const SLOT_NAMES: [&str; 16] = [
    "small_distance_emphasis",
    "large_distance_emphasis",
    "low_grey_level_zone_emphasis",
    "high_grey_level_zone_emphasis",
    "small_distance_low_grey_level_emphasis",
    "small_distance_high_grey_level_emphasis",
    "large_distance_low_grey_level_emphasis",
    "large_distance_high_grey_level_emphasis",
    "grey_level_non_uniformity",
    "grey_level_non_uniformity_normalised",
    "zone_distance_non_uniformity",
    "zone_distance_non_uniformity_normalised",
    "zone_percentage",
    "grey_level_variance",
    "zone_distance_variance",
    "zone_distance_entropy",
];

/// Distance map on the full grid (0 outside the ROI), by multi-source
/// breadth-first search over face neighbours.
pub fn distance_map(d: &DiscretizedVolume) -> Vec<u32> {
    let dims = d.dims();
    let mask = d.mask();
    let mut dist = vec![0u32; d.levels().len()];
    let mut queue = VecDeque::new();
    for i in mask.indices() {
        let c = coords(dims, i);
        let on_edge = NEIGHBORS_6.iter().any(|&n| match offset(dims, c, n) {
            None => true,
            Some(p) => !mask.contains(p[0] + dims[0] * (p[1] + dims[1] * p[2])),
        });
        if on_edge {
            dist[i] = 1;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let c = coords(dims, i);
        for n in NEIGHBORS_6 {
            if let Some(p) = offset(dims, c, n) {
                let j = p[0] + dims[0] * (p[1] + dims[1] * p[2]);
                if mask.contains(j) && dist[j] == 0 {
                    dist[j] = dist[i] + 1;
                    queue.push_back(j);
                }
            }
        }
    }
    dist
}

pub fn distance_zone_matrix(d: &DiscretizedVolume) -> ZoneMatrix {
    let dist = distance_map(d);
    let mut m = ZoneMatrix::new(MatrixKind::DistanceZone, None);
    for z in label_zones(d) {
        let zd = z.voxels.iter().map(|&i| dist[i]).min().expect("zones are non-empty");
        m.add(z.level, zd, 1.0);
    }
    m
}

pub fn gldzm_features(d: &DiscretizedVolume) -> FamilyFeatures {
    let m = distance_zone_matrix(d);
    let values = match EmphasisStats::compute(&m, d.mask().count() as f64) {
        Some(s) => arrange(&NAMES, &SLOT_NAMES, &s.sixteen()),
        None => [Feature::nan(); 16],
    };
    let named: Vec<(&'static str, Feature)> = NAMES.iter().copied().zip(values).collect();
    FamilyFeatures::from_named(Family::Gldzm, Aggregation::None, &named)
}
