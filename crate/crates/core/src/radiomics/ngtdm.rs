//! Neighbourhood gray-tone difference matrix features.

use crate::preprocess::DiscretizedVolume;
use crate::volume::{coords, offset};

use super::matrix::NgtdmRow;
use super::neighborhood::NEIGHBORS_26;
use super::{Aggregation, Family, FamilyFeatures, Feature};

pub const NAMES: [&str; 5] = ["busyness", "coarseness", "complexity", "contrast", "strength"];

/// Lower bound on the coarseness denominator.
pub const COARSENESS_GUARD: f64 = 1e-6;

/// One row per level present among voxels with at least one in-mask
/// neighbour, ordered by level.
pub fn ngtdm_rows(d: &DiscretizedVolume) -> Vec<NgtdmRow> {
    let dims = d.dims();
    let ng = d.num_levels() as usize;
    let mut count = vec![0u64; ng];
    let mut s = vec![0.0f64; ng];
    for i in d.mask().indices() {
        let c = coords(dims, i);
        let mut sum = 0u64;
        let mut n = 0u64;
        for off in NEIGHBORS_26 {
            if let Some(p) = offset(dims, c, off) {
                let j = p[0] + dims[0] * (p[1] + dims[1] * p[2]);
                if d.mask().contains(j) {
                    sum += d.level(j) as u64;
                    n += 1;
                }
            }
        }
        if n == 0 {
            continue;
        }
        let level = d.level(i);
        let avg = sum as f64 / n as f64;
        count[level as usize - 1] += 1;
        s[level as usize - 1] += (level as f64 - avg).abs();
    }
    (0..ng)
        .filter(|&k| count[k] > 0)
        .map(|k| NgtdmRow {
            level: k as u32 + 1,
            count: count[k],
            s: s[k],
        })
        .collect()
}

pub fn ngtdm_features(d: &DiscretizedVolume) -> FamilyFeatures {
    let values = features_from_rows(&ngtdm_rows(d));
    let named: Vec<(&'static str, Feature)> = NAMES.iter().copied().zip(values).collect();
    FamilyFeatures::from_named(Family::Ngtdm, Aggregation::None, &named)
}

/// Features in [`NAMES`] order. Contrast and busyness are 0 when only one
/// level is present, strength is 0 when every difference is 0; these cases
/// are flagged.
pub fn features_from_rows(rows: &[NgtdmRow]) -> [Feature; 5] {
    let nvc: u64 = rows.iter().map(|r| r.count).sum();
    if nvc == 0 {
        return [Feature::nan(); 5];
    }
    let nvc = nvc as f64;
    let p: Vec<f64> = rows.iter().map(|r| r.count as f64 / nvc).collect();
    let lv: Vec<f64> = rows.iter().map(|r| r.level as f64).collect();
    let ngp = rows.len() as f64;
    let s_total: f64 = rows.iter().map(|r| r.s).sum();
    let ps: f64 = rows.iter().zip(&p).map(|(r, pi)| pi * r.s).sum();

    let coarseness = 1.0 / ps.max(COARSENESS_GUARD);

    let mut sq = 0.0;
    let mut busy_den = 0.0;
    let mut complexity = 0.0;
    let mut strength_num = 0.0;
    for a in 0..rows.len() {
        for b in 0..rows.len() {
            let diff = lv[a] - lv[b];
            sq += p[a] * p[b] * diff * diff;
            busy_den += (lv[a] * p[a] - lv[b] * p[b]).abs();
            complexity += diff.abs() * (p[a] * rows[a].s + p[b] * rows[b].s) / (p[a] + p[b]);
            strength_num += (p[a] + p[b]) * diff * diff;
        }
    }
    complexity /= nvc;

    let single = rows.len() < 2;
    let contrast = if single {
        Feature::flagged(0.0)
    } else {
        Feature::checked(sq / (ngp * (ngp - 1.0)) * s_total / nvc)
    };
    let busyness = if single || busy_den == 0.0 {
        Feature::flagged(0.0)
    } else {
        Feature::checked(ps / busy_den)
    };
    let strength = if s_total == 0.0 {
        Feature::flagged(0.0)
    } else {
        Feature::checked(strength_num / s_total)
    };
    let coarseness = if ps < COARSENESS_GUARD {
        Feature::flagged(coarseness)
    } else {
        Feature::checked(coarseness)
    };
    [busyness, coarseness, Feature::checked(complexity), contrast, strength]
}
