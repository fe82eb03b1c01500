//! Intensity-volume histogram.
//!
//! The curve `nu(gamma)` is the fraction of ROI voxels with intensity at or
//! above `min + gamma * (max - min)`, sampled at `gamma = k / bins` for
//! `k = 0..=bins`.

use crate::error::Result;
use crate::volume::{RoiMask, Volume3D};

use super::{Aggregation, Family, FamilyFeatures, Feature};

pub const NAMES: [&str; 7] = [
    "area_under_curve",
    "i10",
    "i10_minus_i90",
    "i90",
    "v10",
    "v10_minus_v90",
    "v90",
];

/// The sampled curve: `(gamma_k, nu_k)` for `k = 0..=bins`.
#[derive(Debug, Clone, PartialEq)]
pub struct IvhCurve {
    pub gamma: Vec<f64>,
    pub nu: Vec<f64>,
}

fn fraction_at_least(sorted: &[f64], threshold: f64) -> f64 {
    let below = sorted.partition_point(|&x| x < threshold);
    (sorted.len() - below) as f64 / sorted.len() as f64
}

pub fn ivh_curve(sorted: &[f64], bins: usize) -> IvhCurve {
    let lo = sorted[0];
    let range = sorted[sorted.len() - 1] - lo;
    let gamma: Vec<f64> = (0..=bins).map(|k| k as f64 / bins as f64).collect();
    let nu = gamma
        .iter()
        .map(|&g| fraction_at_least(sorted, lo + g * range))
        .collect();
    IvhCurve { gamma, nu }
}

/// Intensity fraction at which the curve first drops to `x` or below,
/// linearly interpolated between samples. 1 if it never does.
fn intensity_fraction_at(curve: &IvhCurve, x: f64) -> f64 {
    for k in 1..curve.nu.len() {
        if curve.nu[k] <= x {
            let (g0, g1) = (curve.gamma[k - 1], curve.gamma[k]);
            let (n0, n1) = (curve.nu[k - 1], curve.nu[k]);
            if n0 <= x {
                return g0;
            }
            return g0 + (n0 - x) / (n0 - n1) * (g1 - g0);
        }
    }
    1.0
}

pub fn ivh_features(v: &Volume3D, mask: &RoiMask, bins: usize) -> Result<FamilyFeatures> {
    mask.check_aligned(v)?;
    let mut sorted = mask.roi_values(v);
    sorted.sort_by(f64::total_cmp);
    let lo = sorted[0];
    let hi = sorted[sorted.len() - 1];

    let named: [(&'static str, Feature); 7] = if lo == hi {
        [
            ("v10", Feature::flagged(1.0)),
            ("v90", Feature::flagged(1.0)),
            ("i10", Feature::flagged(lo)),
            ("i90", Feature::flagged(lo)),
            ("v10_minus_v90", Feature::flagged(0.0)),
            ("i10_minus_i90", Feature::flagged(0.0)),
            ("area_under_curve", Feature::flagged(1.0)),
        ]
    } else {
        let range = hi - lo;
        let curve = ivh_curve(&sorted, bins);
        let v10 = fraction_at_least(&sorted, lo + 0.1 * range);
        let v90 = fraction_at_least(&sorted, lo + 0.9 * range);
        let i10 = lo + intensity_fraction_at(&curve, 0.1) * range;
        let i90 = lo + intensity_fraction_at(&curve, 0.9) * range;
        let step = 1.0 / bins as f64;
        let auc: f64 = curve.nu.windows(2).map(|w| 0.5 * (w[0] + w[1]) * step).sum();
        [
            ("v10", Feature::ok(v10)),
            ("v90", Feature::ok(v90)),
            ("i10", Feature::ok(i10)),
            ("i90", Feature::ok(i90)),
            ("v10_minus_v90", Feature::ok(v10 - v90)),
            ("i10_minus_i90", Feature::ok(i10 - i90)),
            ("area_under_curve", Feature::ok(auc)),
        ]
    };
    Ok(FamilyFeatures::from_named(
        Family::IntensityVolumeHistogram,
        Aggregation::None,
        &named,
    ))
}
