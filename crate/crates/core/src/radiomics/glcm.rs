//! Gray-level co-occurrence matrix features.

use crate::numeric::xlog2x;
use crate::preprocess::DiscretizedVolume;
use crate::volume::coords;

use super::matrix::CooccurrenceMatrix;
use super::neighborhood::DIRECTIONS;
use super::{Aggregation, Family, FamilyFeatures, Feature};

pub const NAMES: [&str; 25] = [
    "angular_second_moment",
    "autocorrelation",
    "cluster_prominence",
    "cluster_shade",
    "cluster_tendency",
    "contrast",
    "correlation",
    "difference_average",
    "difference_entropy",
    "difference_variance",
    "dissimilarity",
    "information_correlation_1",
    "information_correlation_2",
    "inverse_difference",
    "inverse_difference_moment",
    "inverse_difference_moment_normalised",
    "inverse_difference_normalised",
    "inverse_variance",
    "joint_average",
    "joint_entropy",
    "joint_maximum",
    "joint_variance",
    "sum_average",
    "sum_entropy",
    "sum_variance",
];

/// Symmetrized co-occurrence counts for one offset: every in-mask ordered
/// pair `(v, v + d)` contributes to `(i, j)` and `(j, i)`.
pub fn cooccurrence(d: &DiscretizedVolume, direction: [i64; 3]) -> CooccurrenceMatrix {
    let ng = d.num_levels() as usize;
    let dims = d.dims();
    let mut m = CooccurrenceMatrix::zeros(ng, Some(direction));
    let stride = direction[0] + dims[0] as i64 * (direction[1] + dims[1] as i64 * direction[2]);
    for i in d.mask().indices() {
        let c = coords(dims, i);
        let inside = (0..3).all(|a| {
            let p = c[a] as i64 + direction[a];
            p >= 0 && p < dims[a] as i64
        });
        if !inside {
            continue;
        }
        let j = (i as i64 + stride) as usize;
        let lj = d.level(j);
        if lj == 0 {
            continue;
        }
        let li = d.level(i);
        m.add(li as usize, lj as usize, 1.0);
        m.add(lj as usize, li as usize, 1.0);
    }
    m
}

/// The 25 features of a normalized `ng x ng` joint probability matrix,
/// in [`NAMES`] order.
pub fn features_from_probabilities(p: &[f64], ng: usize) -> [Feature; 25] {
    let at = |i: usize, j: usize| p[(i - 1) * ng + (j - 1)];
    let levels = 1..=ng;

    let mut px = vec![0.0; ng + 1];
    let mut py = vec![0.0; ng + 1];
    let mut p_diff = vec![0.0; ng];
    let mut p_sum = vec![0.0; 2 * ng + 1];
    let mut joint_max = 0.0f64;
    let mut joint_entropy = 0.0;
    let mut asm = 0.0;
    let mut contrast = 0.0;
    let mut dissimilarity = 0.0;
    let mut inv_diff = 0.0;
    let mut inv_diff_norm = 0.0;
    let mut idm = 0.0;
    let mut idm_norm = 0.0;
    let mut autocorr = 0.0;
    let mut joint_avg = 0.0;
    let ngf = ng as f64;
    for i in levels.clone() {
        for j in levels.clone() {
            let v = at(i, j);
            if v == 0.0 {
                continue;
            }
            let (fi, fj) = (i as f64, j as f64);
            let k = i.abs_diff(j);
            let kf = k as f64;
            px[i] += v;
            py[j] += v;
            p_diff[k] += v;
            p_sum[i + j] += v;
            joint_max = joint_max.max(v);
            joint_entropy -= xlog2x(v);
            asm += v * v;
            contrast += kf * kf * v;
            dissimilarity += kf * v;
            inv_diff += v / (1.0 + kf);
            inv_diff_norm += v / (1.0 + kf / ngf);
            idm += v / (1.0 + kf * kf);
            idm_norm += v / (1.0 + kf * kf / (ngf * ngf));
            autocorr += fi * fj * v;
            joint_avg += fi * v;
        }
    }

    let mu_x: f64 = levels.clone().map(|i| i as f64 * px[i]).sum();
    let mu_y: f64 = levels.clone().map(|j| j as f64 * py[j]).sum();
    let var_x: f64 = levels.clone().map(|i| (i as f64 - mu_x).powi(2) * px[i]).sum();
    let var_y: f64 = levels.clone().map(|j| (j as f64 - mu_y).powi(2) * py[j]).sum();

    let mut joint_var = 0.0;
    let mut cov = 0.0;
    let mut tendency = 0.0;
    let mut shade = 0.0;
    let mut prominence = 0.0;
    let mut hxy1 = 0.0;
    let mut hxy2 = 0.0;
    for i in levels.clone() {
        for j in levels.clone() {
            let v = at(i, j);
            let pp = px[i] * py[j];
            if pp > 0.0 {
                hxy2 -= xlog2x(pp);
                if v > 0.0 {
                    hxy1 -= v * pp.log2();
                }
            }
            if v == 0.0 {
                continue;
            }
            let (fi, fj) = (i as f64, j as f64);
            joint_var += (fi - joint_avg).powi(2) * v;
            cov += (fi - mu_x) * (fj - mu_y) * v;
            let s = fi + fj - mu_x - mu_y;
            tendency += s * s * v;
            shade += s * s * s * v;
            prominence += s * s * s * s * v;
        }
    }

    let diff_avg: f64 = p_diff.iter().enumerate().map(|(k, v)| k as f64 * v).sum();
    let diff_var: f64 = p_diff
        .iter()
        .enumerate()
        .map(|(k, v)| (k as f64 - diff_avg).powi(2) * v)
        .sum();
    let diff_entropy: f64 = -p_diff.iter().map(|&v| xlog2x(v)).sum::<f64>();
    let inv_var: f64 = p_diff
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, v)| v / (k * k) as f64)
        .sum();

    let sum_avg: f64 = p_sum.iter().enumerate().map(|(k, v)| k as f64 * v).sum();
    let sum_var: f64 = p_sum
        .iter()
        .enumerate()
        .map(|(k, v)| (k as f64 - sum_avg).powi(2) * v)
        .sum();
    let sum_entropy: f64 = -p_sum.iter().map(|&v| xlog2x(v)).sum::<f64>();

    let hx: f64 = -px.iter().map(|&v| xlog2x(v)).sum::<f64>();

    let correlation = if var_x > 0.0 && var_y > 0.0 {
        Feature::ok(cov / (var_x.sqrt() * var_y.sqrt()))
    } else {
        Feature::nan()
    };
    let info_corr_1 = if hx > 0.0 {
        Feature::ok((joint_entropy - hxy1) / hx)
    } else {
        Feature::nan()
    };
    let info_corr_2 = Feature::ok((1.0 - (-2.0 * (hxy2 - joint_entropy)).exp()).max(0.0).sqrt());

    [
        Feature::ok(asm),
        Feature::ok(autocorr),
        Feature::ok(prominence),
        Feature::ok(shade),
        Feature::ok(tendency),
        Feature::ok(contrast),
        correlation,
        Feature::ok(diff_avg),
        Feature::ok(diff_entropy),
        Feature::ok(diff_var),
        Feature::ok(dissimilarity),
        info_corr_1,
        info_corr_2,
        Feature::ok(inv_diff),
        Feature::ok(idm),
        Feature::ok(idm_norm),
        Feature::ok(inv_diff_norm),
        Feature::ok(inv_var),
        Feature::ok(joint_avg),
        Feature::ok(joint_entropy),
        Feature::ok(joint_max),
        Feature::ok(joint_var),
        Feature::ok(sum_avg),
        Feature::ok(sum_entropy),
        Feature::ok(sum_var),
    ]
}

/// Mean of per-direction feature values. NaN (flagged) if any contributing
/// direction is undefined or no direction has pairs.
pub(crate) fn average_directions<const N: usize>(per_dir: &[[Feature; N]]) -> [Feature; N] {
    std::array::from_fn(|k| {
        if per_dir.is_empty() {
            return Feature::nan();
        }
        let mut sum = 0.0;
        for f in per_dir {
            sum += f[k].value;
        }
        let value = sum / per_dir.len() as f64;
        let degenerate = per_dir.iter().any(|f| f[k].degenerate) || !value.is_finite();
        Feature { value, degenerate }
    })
}

pub(crate) fn directional_features<const N: usize>(
    family: Family,
    names: &[&'static str; N],
    avg: [Feature; N],
    merged: [Feature; N],
) -> FamilyFeatures {
    let mut out = Vec::with_capacity(2 * N);
    for (k, &name) in names.iter().enumerate() {
        out.push((name, avg[k]));
    }
    let mut f = FamilyFeatures::from_named(family, Aggregation::DirAvg, &out);
    out.clear();
    for (k, &name) in names.iter().enumerate() {
        out.push((name, merged[k]));
    }
    f.extend(FamilyFeatures::from_named(family, Aggregation::DirMerged, &out));
    f
}

/// All 13 per-direction matrices, in [`DIRECTIONS`] order.
pub fn direction_matrices(d: &DiscretizedVolume) -> Vec<CooccurrenceMatrix> {
    DIRECTIONS.iter().map(|&dir| cooccurrence(d, dir)).collect()
}

pub fn glcm_features(d: &DiscretizedVolume) -> FamilyFeatures {
    let ng = d.num_levels() as usize;
    let matrices = direction_matrices(d);
    let mut merged = CooccurrenceMatrix::zeros(ng, None);
    let mut per_dir = Vec::new();
    for m in &matrices {
        merged.merge(m);
        if let Some(p) = m.normalized() {
            per_dir.push(features_from_probabilities(&p, ng));
        }
    }
    let avg = average_directions(&per_dir);
    let merged = match merged.normalized() {
        Some(p) => features_from_probabilities(&p, ng),
        None => [Feature::nan(); 25],
    };
    directional_features(Family::Glcm, &NAMES, avg, merged)
}
