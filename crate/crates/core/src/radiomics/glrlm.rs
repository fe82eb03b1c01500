//! Gray-level run-length matrix features.

use crate::preprocess::DiscretizedVolume;
use crate::volume::{coords, offset};

use super::glcm::{average_directions, directional_features};
use super::matrix::{arrange, EmphasisStats, MatrixKind, ZoneMatrix};
use super::neighborhood::DIRECTIONS;
use super::{Family, FamilyFeatures, Feature};

pub const NAMES: [&str; 16] = [
    "grey_level_non_uniformity",
    "grey_level_non_uniformity_normalised",
    "grey_level_variance",
    "high_grey_level_run_emphasis",
    "long_run_high_grey_level_emphasis",
    "long_run_low_grey_level_emphasis",
    "long_runs_emphasis",
    "low_grey_level_run_emphasis",
    "run_entropy",
    "run_length_non_uniformity",
    "run_length_non_uniformity_normalised",
    "run_length_variance",
    "run_percentage",
    "short_run_high_grey_level_emphasis",
    "short_run_low_grey_level_emphasis",
    "short_runs_emphasis",
];

/// Map [`EmphasisStats::sixteen`] slots onto run-length feature names.
const SLOT_NAMES: [&str; 16] = [
    "short_runs_emphasis",
    "long_runs_emphasis",
    "low_grey_level_run_emphasis",
    "high_grey_level_run_emphasis",
    "short_run_low_grey_level_emphasis",
    "short_run_high_grey_level_emphasis",
    "long_run_low_grey_level_emphasis",
    "long_run_high_grey_level_emphasis",
    "grey_level_non_uniformity",
    "grey_level_non_uniformity_normalised",
    "run_length_non_uniformity",
    "run_length_non_uniformity_normalised",
    "run_percentage",
    "grey_level_variance",
    "run_length_variance",
    "run_entropy",
];

/// Maximal runs along `direction`: a run starts at an in-mask voxel whose
/// predecessor is outside the grid, outside the mask or of another level.
pub fn run_length_matrix(d: &DiscretizedVolume, direction: [i64; 3]) -> ZoneMatrix {
    let dims = d.dims();
    let back = [-direction[0], -direction[1], -direction[2]];
    let idx = |c: [usize; 3]| c[0] + dims[0] * (c[1] + dims[1] * c[2]);
    let mut m = ZoneMatrix::new(MatrixKind::RunLength, Some(direction));
    for i in d.mask().indices() {
        let level = d.level(i);
        let c = coords(dims, i);
        if let Some(p) = offset(dims, c, back) {
            if d.level(idx(p)) == level {
                continue;
            }
        }
        let mut len = 1u32;
        let mut cur = c;
        while let Some(n) = offset(dims, cur, direction) {
            if d.level(idx(n)) != level {
                break;
            }
            len += 1;
            cur = n;
        }
        m.add(level, len, 1.0);
    }
    m
}

pub fn glrlm_features(d: &DiscretizedVolume) -> FamilyFeatures {
    let n_voxels = d.mask().count() as f64;
    let mut merged = ZoneMatrix::new(MatrixKind::RunLength, None);
    let mut per_dir = Vec::new();
    for &dir in &DIRECTIONS {
        let m = run_length_matrix(d, dir);
        if let Some(s) = EmphasisStats::compute(&m, n_voxels) {
            per_dir.push(arrange(&NAMES, &SLOT_NAMES, &s.sixteen()));
        }
        merged.merge(&m);
    }
    let avg = average_directions(&per_dir);
    let merged = match EmphasisStats::compute(&merged, n_voxels * DIRECTIONS.len() as f64) {
        Some(s) => arrange(&NAMES, &SLOT_NAMES, &s.sixteen()),
        None => [Feature::nan(); 16],
    };
    directional_features(Family::Glrlm, &NAMES, avg, merged)
}
