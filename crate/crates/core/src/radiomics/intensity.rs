//! Local intensity peaks and intensity statistics on continuous values.

use crate::error::Result;
use crate::numeric::pairwise_sum;
use crate::volume::{coords, flat_index, RoiMask, Volume3D};

use super::{Aggregation, Family, FamilyFeatures, Feature};

pub const LI_NAMES: [&str; 2] = ["global_peak", "local_peak"];

pub const IS_NAMES: [&str; 18] = [
    "coefficient_of_variation",
    "energy",
    "interquartile_range",
    "kurtosis",
    "maximum",
    "mean",
    "mean_absolute_deviation",
    "median",
    "median_absolute_deviation",
    "minimum",
    "p10",
    "p90",
    "quartile_coefficient_of_dispersion",
    "range",
    "robust_mean_absolute_deviation",
    "root_mean_square",
    "skewness",
    "variance",
];

/// Radius in mm of a sphere with a volume of 1 cm^3.
pub fn peak_sphere_radius_mm() -> f64 {
    10.0 * (3.0 / (4.0 * std::f64::consts::PI)).cbrt()
}

/// Offsets of all voxel centres within the 1 cm^3 sphere.
fn sphere_offsets(spacing: [f64; 3]) -> Vec<[i64; 3]> {
    let r = peak_sphere_radius_mm();
    let r2 = r * r;
    let ext: [i64; 3] = std::array::from_fn(|a| (r / spacing[a]).floor() as i64);
    let mut out = Vec::new();
    for dz in -ext[2]..=ext[2] {
        for dy in -ext[1]..=ext[1] {
            for dx in -ext[0]..=ext[0] {
                let d2 = (dx as f64 * spacing[0]).powi(2)
                    + (dy as f64 * spacing[1]).powi(2)
                    + (dz as f64 * spacing[2]).powi(2);
                if d2 <= r2 {
                    out.push([dx, dy, dz]);
                }
            }
        }
    }
    out
}

fn sphere_mean(v: &Volume3D, offsets: &[[i64; 3]], center: usize) -> f64 {
    let dims = v.dims();
    let c = coords(dims, center);
    let mut sum = 0.0;
    let mut n = 0usize;
    for d in offsets {
        let x = c[0] as i64 + d[0];
        let y = c[1] as i64 + d[1];
        let z = c[2] as i64 + d[2];
        if x >= 0
            && y >= 0
            && z >= 0
            && (x as usize) < dims[0]
            && (y as usize) < dims[1]
            && (z as usize) < dims[2]
        {
            sum += v.values()[flat_index(dims, x as usize, y as usize, z as usize)];
            n += 1;
        }
    }
    sum / n as f64
}

/// Local and global intensity peaks.
///
/// The sphere mean at a centre averages every voxel of the volume (not only
/// ROI voxels) whose centre lies within the 1 cm^3 sphere. The local peak is
/// the sphere mean at the brightest ROI voxel (first in flat order on ties);
/// the global peak is the largest sphere mean over all ROI centres.
pub fn local_intensity(v: &Volume3D, mask: &RoiMask) -> Result<FamilyFeatures> {
    mask.check_aligned(v)?;
    let offsets = sphere_offsets(v.spacing());
    let values = v.values();
    let mut brightest: Option<usize> = None;
    let mut global = f64::NEG_INFINITY;
    for i in mask.indices() {
        if brightest.map_or(true, |b| values[i] > values[b]) {
            brightest = Some(i);
        }
        global = global.max(sphere_mean(v, &offsets, i));
    }
    let local = sphere_mean(v, &offsets, brightest.expect("mask is non-empty"));
    Ok(FamilyFeatures::from_named(
        Family::LocalIntensity,
        Aggregation::None,
        &[("global_peak", Feature::ok(global)), ("local_peak", Feature::ok(local))],
    ))
}

/// Nearest-rank percentile of sorted data: element `ceil(p * n / 100)`
/// (1-based), with `p = 0` giving the minimum.
pub fn nearest_rank(sorted: &[f64], p: u32) -> f64 {
    let n = sorted.len();
    let rank = (p as usize * n).div_ceil(100).max(1);
    sorted[rank - 1]
}

pub fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Descriptive statistics shared by the intensity statistics and the
/// intensity histogram families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Descriptive {
    pub mean: f64,
    /// Population variance.
    pub variance: f64,
    pub skewness: Feature,
    /// Excess kurtosis.
    pub kurtosis: Feature,
    pub median: f64,
    pub minimum: f64,
    pub p10: f64,
    pub p90: f64,
    pub maximum: f64,
    pub interquartile_range: f64,
    pub range: f64,
    pub mean_absolute_deviation: f64,
    pub robust_mean_absolute_deviation: f64,
    pub median_absolute_deviation: f64,
    pub coefficient_of_variation: Feature,
    pub quartile_coefficient_of_dispersion: Feature,
}

impl Descriptive {
    pub fn compute(values: &[f64]) -> Self {
        assert!(!values.is_empty());
        let n = values.len() as f64;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let minimum = sorted[0];
        let maximum = sorted[sorted.len() - 1];
        let constant = minimum == maximum;

        let mean = pairwise_sum(values) / n;
        let dev = |k: i32| -> f64 {
            let t: Vec<f64> = values.iter().map(|&x| (x - mean).powi(k)).collect();
            pairwise_sum(&t) / n
        };
        let (m2, m3, m4) = if constant { (0.0, 0.0, 0.0) } else { (dev(2), dev(3), dev(4)) };

        let (skewness, kurtosis, cov) = if constant || m2 == 0.0 {
            (Feature::nan(), Feature::nan(), Feature::nan())
        } else {
            (
                Feature::ok(m3 / m2.powf(1.5)),
                Feature::ok(m4 / (m2 * m2) - 3.0),
                Feature::checked(m2.sqrt() / mean),
            )
        };

        let median = median_sorted(&sorted);
        let p10 = nearest_rank(&sorted, 10);
        let p90 = nearest_rank(&sorted, 90);
        let p25 = nearest_rank(&sorted, 25);
        let p75 = nearest_rank(&sorted, 75);

        let abs_dev = |data: &[f64], center: f64| -> f64 {
            let t: Vec<f64> = data.iter().map(|&x| (x - center).abs()).collect();
            pairwise_sum(&t) / data.len() as f64
        };
        let robust: Vec<f64> = values
            .iter()
            .copied()
            .filter(|&x| x >= p10 && x <= p90)
            .collect();
        let robust_mean = pairwise_sum(&robust) / robust.len() as f64;

        let qcod = if p75 + p25 == 0.0 {
            Feature::nan()
        } else {
            Feature::ok((p75 - p25) / (p75 + p25))
        };

        Self {
            mean,
            variance: m2,
            skewness,
            kurtosis,
            median,
            minimum,
            p10,
            p90,
            maximum,
            interquartile_range: p75 - p25,
            range: maximum - minimum,
            mean_absolute_deviation: if constant { 0.0 } else { abs_dev(values, mean) },
            robust_mean_absolute_deviation: if constant { 0.0 } else { abs_dev(&robust, robust_mean) },
            median_absolute_deviation: abs_dev(values, median),
            coefficient_of_variation: cov,
            quartile_coefficient_of_dispersion: qcod,
        }
    }

    /// The sixteen features common to both families.
    pub fn named(&self) -> [(&'static str, Feature); 16] {
        [
            ("mean", Feature::ok(self.mean)),
            ("variance", Feature::ok(self.variance)),
            ("skewness", self.skewness),
            ("kurtosis", self.kurtosis),
            ("median", Feature::ok(self.median)),
            ("minimum", Feature::ok(self.minimum)),
            ("p10", Feature::ok(self.p10)),
            ("p90", Feature::ok(self.p90)),
            ("maximum", Feature::ok(self.maximum)),
            ("interquartile_range", Feature::ok(self.interquartile_range)),
            ("range", Feature::ok(self.range)),
            ("mean_absolute_deviation", Feature::ok(self.mean_absolute_deviation)),
            (
                "robust_mean_absolute_deviation",
                Feature::ok(self.robust_mean_absolute_deviation),
            ),
            ("median_absolute_deviation", Feature::ok(self.median_absolute_deviation)),
            ("coefficient_of_variation", self.coefficient_of_variation),
            (
                "quartile_coefficient_of_dispersion",
                self.quartile_coefficient_of_dispersion,
            ),
        ]
    }
}

/// The 18 intensity statistics over ROI intensities.
pub fn intensity_statistics(v: &Volume3D, mask: &RoiMask) -> Result<FamilyFeatures> {
    mask.check_aligned(v)?;
    let values = mask.roi_values(v);
    let d = Descriptive::compute(&values);
    let squares: Vec<f64> = values.iter().map(|x| x * x).collect();
    let energy = pairwise_sum(&squares);
    let rms = (energy / values.len() as f64).sqrt();

    let mut named: Vec<(&'static str, Feature)> = d.named().to_vec();
    named.push(("energy", Feature::ok(energy)));
    named.push(("root_mean_square", Feature::ok(rms)));
    Ok(FamilyFeatures::from_named(
        Family::IntensityStatistics,
        Aggregation::None,
        &named,
    ))
}
