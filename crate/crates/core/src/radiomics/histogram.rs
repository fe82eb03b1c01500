//! Intensity histogram features over discretized gray levels.

use crate::numeric::xlog2x;
use crate::preprocess::DiscretizedVolume;

use super::intensity::Descriptive;
use super::{Aggregation, Family, FamilyFeatures, Feature};

pub const NAMES: [&str; 23] = [
    "coefficient_of_variation",
    "entropy",
    "interquartile_range",
    "kurtosis",
    "max_histogram_gradient",
    "max_histogram_gradient_level",
    "maximum",
    "mean",
    "mean_absolute_deviation",
    "median",
    "median_absolute_deviation",
    "min_histogram_gradient",
    "min_histogram_gradient_level",
    "minimum",
    "mode",
    "p10",
    "p90",
    "quartile_coefficient_of_dispersion",
    "range",
    "robust_mean_absolute_deviation",
    "skewness",
    "uniformity",
    "variance",
];

/// Histogram gradient over levels `1..=ng`: central differences inside,
/// one-sided differences at both ends.
pub fn histogram_gradient(counts: &[u64]) -> Vec<f64> {
    let n = counts.len();
    let h = |k: usize| counts[k] as f64;
    (0..n)
        .map(|k| {
            if n == 1 {
                0.0
            } else if k == 0 {
                h(1) - h(0)
            } else if k == n - 1 {
                h(n - 1) - h(n - 2)
            } else {
                (h(k + 1) - h(k - 1)) / 2.0
            }
        })
        .collect()
}

pub fn intensity_histogram_features(d: &DiscretizedVolume) -> FamilyFeatures {
    let levels: Vec<f64> = d.roi_levels().into_iter().map(f64::from).collect();
    let desc = Descriptive::compute(&levels);
    let counts = d.histogram();
    let total = levels.len() as f64;

    // mode: most frequent level, lowest on ties
    let mut mode = 1usize;
    for (k, &c) in counts.iter().enumerate() {
        if c > counts[mode - 1] {
            mode = k + 1;
        }
    }

    let mut entropy = 0.0;
    let mut uniformity = 0.0;
    for &c in &counts {
        let p = c as f64 / total;
        entropy -= xlog2x(p);
        uniformity += p * p;
    }

    let (max_g, max_gl, min_g, min_gl) = if counts.len() < 2 {
        (Feature::nan(), Feature::nan(), Feature::nan(), Feature::nan())
    } else {
        let g = histogram_gradient(&counts);
        let (mut imax, mut imin) = (0, 0);
        for k in 1..g.len() {
            if g[k] > g[imax] {
                imax = k;
            }
            if g[k] < g[imin] {
                imin = k;
            }
        }
        (
            Feature::ok(g[imax]),
            Feature::ok((imax + 1) as f64),
            Feature::ok(g[imin]),
            Feature::ok((imin + 1) as f64),
        )
    };

    let mut named: Vec<(&'static str, Feature)> = desc.named().to_vec();
    named.extend([
        ("mode", Feature::ok(mode as f64)),
        ("entropy", Feature::ok(entropy)),
        ("uniformity", Feature::ok(uniformity)),
        ("max_histogram_gradient", max_g),
        ("max_histogram_gradient_level", max_gl),
        ("min_histogram_gradient", min_g),
        ("min_histogram_gradient_level", min_gl),
    ]);
    FamilyFeatures::from_named(Family::IntensityHistogram, Aggregation::None, &named)
}
