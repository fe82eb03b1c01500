//! Brute-force reference implementations of all 186 features.
//!
//! Written against the feature definitions only: dense matrices, naive
//! summation, explicit enumeration of voxel pairs, runs, zones and
//! neighbourhoods. Nothing here calls library algorithms.

#![allow(dead_code)]

use std::collections::BTreeMap;

pub type Values = BTreeMap<String, f64>;

#[derive(Debug, Clone)]
pub struct Case {
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
    pub bins: u32,
    pub ivh_bins: usize,
    pub alpha: i64,
}

impl Case {
    fn n(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    fn xyz(&self, i: usize) -> [i64; 3] {
        let nx = self.dims[0];
        let ny = self.dims[1];
        [(i % nx) as i64, ((i / nx) % ny) as i64, (i / (nx * ny)) as i64]
    }

    fn index(&self, p: [i64; 3]) -> Option<usize> {
        for a in 0..3 {
            if p[a] < 0 || p[a] >= self.dims[a] as i64 {
                return None;
            }
        }
        Some(p[0] as usize + self.dims[0] * (p[1] as usize + self.dims[1] * p[2] as usize))
    }

    fn roi(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.mask[i]).collect()
    }
}

/// Gray levels on the grid (0 outside the ROI) and the level count.
pub fn levels(c: &Case) -> (Vec<i64>, usize) {
    let roi = c.roi();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &i in &roi {
        lo = lo.min(c.values[i]);
        hi = hi.max(c.values[i]);
    }
    let mut lv = vec![0i64; c.n()];
    if hi == lo {
        for &i in &roi {
            lv[i] = 1;
        }
        return (lv, 1);
    }
    for &i in &roi {
        let b = ((c.bins as f64) * (c.values[i] - lo) / (hi - lo)).floor() as i64 + 1;
        lv[i] = b.min(c.bins as i64);
    }
    (lv, c.bins as usize)
}

fn offsets26() -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    for dx in -1..=1 {
        for dy in -1..=1 {
            for dz in -1..=1 {
                if (dx, dy, dz) != (0, 0, 0) {
                    out.push([dx, dy, dz]);
                }
            }
        }
    }
    out
}

/// One representative of each `{d, -d}` pair.
fn half_offsets() -> Vec<[i64; 3]> {
    offsets26().into_iter().filter(|d| *d > [-d[0], -d[1], -d[2]]).collect()
}

fn add(p: [i64; 3], d: [i64; 3]) -> [i64; 3] {
    [p[0] + d[0], p[1] + d[1], p[2] + d[2]]
}

fn put(out: &mut Values, key: &str, v: f64) {
    assert!(out.insert(key.to_string(), v).is_none(), "duplicate {key}");
}

// ---------------------------------------------------------------- intensity

fn nearest_rank(sorted: &[f64], p: usize) -> f64 {
    let n = sorted.len();
    let mut rank = (p * n + 99) / 100;
    if rank == 0 {
        rank = 1;
    }
    sorted[rank - 1]
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 0 {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    } else {
        sorted[(n - 1) / 2]
    }
}

/// The 16 statistics shared by intensity statistics and the histogram family.
fn descriptive(x: &[f64], prefix: &str, out: &mut Values) {
    let n = x.len() as f64;
    let mut s = x.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut total = 0.0;
    for v in x {
        total += v;
    }
    let mean = total / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in x {
        let d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let constant = s[0] == s[s.len() - 1];
    if constant {
        m2 = 0.0;
    }
    let p10 = nearest_rank(&s, 10);
    let p25 = nearest_rank(&s, 25);
    let p75 = nearest_rank(&s, 75);
    let p90 = nearest_rank(&s, 90);
    let med = median(&s);

    let mut mad = 0.0;
    let mut medad = 0.0;
    for v in x {
        mad += (v - mean).abs();
        medad += (v - med).abs();
    }
    let inner: Vec<f64> = x.iter().copied().filter(|&v| p10 <= v && v <= p90).collect();
    let inner_mean = inner.iter().sum::<f64>() / inner.len() as f64;
    let rmad = inner.iter().map(|v| (v - inner_mean).abs()).sum::<f64>() / inner.len() as f64;

    let k = |name: &str| format!("{prefix}.{name}");
    put(out, &k("mean"), mean);
    put(out, &k("variance"), m2);
    put(out, &k("skewness"), if constant { f64::NAN } else { m3 / m2.powf(1.5) });
    put(out, &k("kurtosis"), if constant { f64::NAN } else { m4 / (m2 * m2) - 3.0 });
    put(out, &k("median"), med);
    put(out, &k("minimum"), s[0]);
    put(out, &k("maximum"), s[s.len() - 1]);
    put(out, &k("p10"), p10);
    put(out, &k("p90"), p90);
    put(out, &k("interquartile_range"), p75 - p25);
    put(out, &k("range"), s[s.len() - 1] - s[0]);
    put(out, &k("mean_absolute_deviation"), if constant { 0.0 } else { mad / n });
    put(out, &k("robust_mean_absolute_deviation"), if constant { 0.0 } else { rmad });
    put(out, &k("median_absolute_deviation"), medad / n);
    put(out, &k("coefficient_of_variation"), if constant { f64::NAN } else { m2.sqrt() / mean });
    put(
        out,
        &k("quartile_coefficient_of_dispersion"),
        if p75 + p25 == 0.0 { f64::NAN } else { (p75 - p25) / (p75 + p25) },
    );
}

pub fn intensity_statistics(c: &Case, out: &mut Values) {
    let x: Vec<f64> = c.roi().iter().map(|&i| c.values[i]).collect();
    descriptive(&x, "is", out);
    let energy: f64 = x.iter().map(|v| v * v).sum();
    put(out, "is.energy", energy);
    put(out, "is.root_mean_square", (energy / x.len() as f64).sqrt());
}

pub fn local_intensity(c: &Case, out: &mut Values) {
    let r = 10.0 * (3.0 / (4.0 * std::f64::consts::PI)).powf(1.0 / 3.0);
    let sphere_mean = |centre: usize| {
        let p = c.xyz(centre);
        let (mut sum, mut count) = (0.0, 0.0);
        for j in 0..c.n() {
            let q = c.xyz(j);
            let mut d2 = 0.0;
            for a in 0..3 {
                let t = (q[a] - p[a]) as f64 * c.spacing[a];
                d2 += t * t;
            }
            if d2 <= r * r {
                sum += c.values[j];
                count += 1.0;
            }
        }
        sum / count
    };
    let roi = c.roi();
    let mut best = roi[0];
    for &i in &roi {
        if c.values[i] > c.values[best] {
            best = i;
        }
    }
    let global = roi.iter().map(|&i| sphere_mean(i)).fold(f64::NEG_INFINITY, f64::max);
    put(out, "li.local_peak", sphere_mean(best));
    put(out, "li.global_peak", global);
}

pub fn intensity_histogram(c: &Case, out: &mut Values) {
    let (lv, ng) = levels(c);
    let x: Vec<f64> = c.roi().iter().map(|&i| lv[i] as f64).collect();
    descriptive(&x, "ih", out);
    let mut h = vec![0.0; ng + 1];
    for &i in &c.roi() {
        h[lv[i] as usize] += 1.0;
    }
    let n = x.len() as f64;
    let mut mode = 1;
    let mut entropy = 0.0;
    let mut uniformity = 0.0;
    for l in 1..=ng {
        if h[l] > h[mode] {
            mode = l;
        }
        let p = h[l] / n;
        if p > 0.0 {
            entropy -= p * p.log2();
        }
        uniformity += p * p;
    }
    put(out, "ih.mode", mode as f64);
    put(out, "ih.entropy", entropy);
    put(out, "ih.uniformity", uniformity);
    if ng < 2 {
        for k in ["max_histogram_gradient", "max_histogram_gradient_level", "min_histogram_gradient", "min_histogram_gradient_level"] {
            put(out, &format!("ih.{k}"), f64::NAN);
        }
        return;
    }
    let grad = |l: usize| -> f64 {
        if l == 1 {
            h[2] - h[1]
        } else if l == ng {
            h[ng] - h[ng - 1]
        } else {
            (h[l + 1] - h[l - 1]) / 2.0
        }
    };
    let (mut gmax, mut lmax, mut gmin, mut lmin) = (f64::NEG_INFINITY, 0, f64::INFINITY, 0);
    for l in 1..=ng {
        let g = grad(l);
        if g > gmax {
            gmax = g;
            lmax = l;
        }
        if g < gmin {
            gmin = g;
            lmin = l;
        }
    }
    put(out, "ih.max_histogram_gradient", gmax);
    put(out, "ih.max_histogram_gradient_level", lmax as f64);
    put(out, "ih.min_histogram_gradient", gmin);
    put(out, "ih.min_histogram_gradient_level", lmin as f64);
}

pub fn intensity_volume_histogram(c: &Case, out: &mut Values) {
    let x: Vec<f64> = c.roi().iter().map(|&i| c.values[i]).collect();
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        for (k, v) in [("v10", 1.0), ("v90", 1.0), ("i10", lo), ("i90", lo), ("v10_minus_v90", 0.0), ("i10_minus_i90", 0.0), ("area_under_curve", 1.0)] {
            put(out, &format!("ivh.{k}"), v);
        }
        return;
    }
    let frac = |t: f64| x.iter().filter(|&&v| v >= t).count() as f64 / x.len() as f64;
    let b = c.ivh_bins;
    let gamma: Vec<f64> = (0..=b).map(|k| k as f64 / b as f64).collect();
    let nu: Vec<f64> = gamma.iter().map(|g| frac(lo + g * (hi - lo))).collect();
    // smallest gamma at which the piecewise-linear curve reaches x
    let cross = |target: f64| -> f64 {
        for k in 0..b {
            if nu[k] > target && nu[k + 1] <= target {
                let t = (nu[k] - target) / (nu[k] - nu[k + 1]);
                return gamma[k] + t * (gamma[k + 1] - gamma[k]);
            }
        }
        1.0
    };
    let v10 = frac(lo + 0.1 * (hi - lo));
    let v90 = frac(lo + 0.9 * (hi - lo));
    let i10 = lo + cross(0.1) * (hi - lo);
    let i90 = lo + cross(0.9) * (hi - lo);
    let mut auc = 0.0;
    for k in 0..b {
        auc += (nu[k] + nu[k + 1]) / 2.0 / b as f64;
    }
    put(out, "ivh.v10", v10);
    put(out, "ivh.v90", v90);
    put(out, "ivh.i10", i10);
    put(out, "ivh.i90", i90);
    put(out, "ivh.v10_minus_v90", v10 - v90);
    put(out, "ivh.i10_minus_i90", i10 - i90);
    put(out, "ivh.area_under_curve", auc);
}

// --------------------------------------------------------------------- GLCM

type Dense = Vec<Vec<f64>>;

/// Ordered-pair counts `C[l(p)][l(p + d)]` over in-mask pairs.
fn pair_counts(c: &Case, lv: &[i64], ng: usize, d: [i64; 3]) -> Dense {
    let mut m = vec![vec![0.0; ng + 1]; ng + 1];
    for i in 0..c.n() {
        if !c.mask[i] {
            continue;
        }
        if let Some(j) = c.index(add(c.xyz(i), d)) {
            if c.mask[j] {
                m[lv[i] as usize][lv[j] as usize] += 1.0;
            }
        }
    }
    m
}

fn glcm_values(p: &Dense, ng: usize) -> Vec<(&'static str, f64)> {
    let total: f64 = p.iter().flatten().sum();
    let p: Dense = p.iter().map(|r| r.iter().map(|v| v / total).collect()).collect();
    let ngf = ng as f64;
    let mut px = vec![0.0; ng + 1];
    let mut py = vec![0.0; ng + 1];
    let mut pdiff = vec![0.0; ng];
    let mut psum = vec![0.0; 2 * ng + 1];
    for i in 1..=ng {
        for j in 1..=ng {
            px[i] += p[i][j];
            py[j] += p[i][j];
            pdiff[(i as i64 - j as i64).unsigned_abs() as usize] += p[i][j];
            psum[i + j] += p[i][j];
        }
    }
    let ent = |v: &[f64]| -> f64 { v.iter().filter(|&&q| q > 0.0).map(|q| -q * q.log2()).sum() };
    let mu_x: f64 = (1..=ng).map(|i| i as f64 * px[i]).sum();
    let mu_y: f64 = (1..=ng).map(|j| j as f64 * py[j]).sum();
    let sd_x = (1..=ng).map(|i| (i as f64 - mu_x).powi(2) * px[i]).sum::<f64>().sqrt();
    let sd_y = (1..=ng).map(|j| (j as f64 - mu_y).powi(2) * py[j]).sum::<f64>().sqrt();

    let sum_ij = |f: &dyn Fn(f64, f64, f64) -> f64| -> f64 {
        let mut s = 0.0;
        for i in 1..=ng {
            for j in 1..=ng {
                if p[i][j] > 0.0 {
                    s += f(i as f64, j as f64, p[i][j]);
                }
            }
        }
        s
    };
    let mu = sum_ij(&|i, _, v| i * v);
    let hxy = sum_ij(&|_, _, v| -v * v.log2());
    let mut hxy1 = 0.0;
    let mut hxy2 = 0.0;
    for i in 1..=ng {
        for j in 1..=ng {
            let q = px[i] * py[j];
            if q > 0.0 {
                hxy1 -= p[i][j] * q.log2();
                hxy2 -= q * q.log2();
            }
        }
    }
    let hx = ent(&px);
    let diff_avg: f64 = (0..ng).map(|k| k as f64 * pdiff[k]).sum();
    let sum_avg: f64 = (2..=2 * ng).map(|k| k as f64 * psum[k]).sum();
    let cm = mu_x + mu_y;

    vec![
        ("joint_maximum", p.iter().flatten().copied().fold(0.0, f64::max)),
        ("joint_average", mu),
        ("joint_variance", sum_ij(&|i, _, v| (i - mu) * (i - mu) * v)),
        ("joint_entropy", hxy),
        ("difference_average", diff_avg),
        ("difference_variance", (0..ng).map(|k| (k as f64 - diff_avg).powi(2) * pdiff[k]).sum()),
        ("difference_entropy", ent(&pdiff)),
        ("sum_average", sum_avg),
        ("sum_variance", (2..=2 * ng).map(|k| (k as f64 - sum_avg).powi(2) * psum[k]).sum()),
        ("sum_entropy", ent(&psum)),
        ("angular_second_moment", sum_ij(&|_, _, v| v * v)),
        ("contrast", sum_ij(&|i, j, v| (i - j) * (i - j) * v)),
        ("dissimilarity", sum_ij(&|i, j, v| (i - j).abs() * v)),
        ("inverse_difference", sum_ij(&|i, j, v| v / (1.0 + (i - j).abs()))),
        ("inverse_difference_normalised", sum_ij(&|i, j, v| v / (1.0 + (i - j).abs() / ngf))),
        ("inverse_difference_moment", sum_ij(&|i, j, v| v / (1.0 + (i - j) * (i - j)))),
        (
            "inverse_difference_moment_normalised",
            sum_ij(&|i, j, v| v / (1.0 + (i - j) * (i - j) / (ngf * ngf))),
        ),
        ("inverse_variance", sum_ij(&|i, j, v| if i == j { 0.0 } else { v / ((i - j) * (i - j)) })),
        (
            "correlation",
            if sd_x > 0.0 && sd_y > 0.0 {
                sum_ij(&|i, j, v| (i - mu_x) * (j - mu_y) * v) / (sd_x * sd_y)
            } else {
                f64::NAN
            },
        ),
        ("autocorrelation", sum_ij(&|i, j, v| i * j * v)),
        ("cluster_tendency", sum_ij(&|i, j, v| (i + j - cm).powi(2) * v)),
        ("cluster_shade", sum_ij(&|i, j, v| (i + j - cm).powi(3) * v)),
        ("cluster_prominence", sum_ij(&|i, j, v| (i + j - cm).powi(4) * v)),
        ("information_correlation_1", if hx > 0.0 { (hxy - hxy1) / hx } else { f64::NAN }),
        ("information_correlation_2", (1.0 - (-2.0 * (hxy2 - hxy)).exp()).max(0.0).sqrt()),
    ]
}

/// Mean over directions of each named value; NaN if there are none.
fn average(per_dir: &[Vec<(&'static str, f64)>]) -> Vec<(&'static str, f64)> {
    if per_dir.is_empty() {
        return Vec::new();
    }
    let mut out = per_dir[0].clone();
    for (k, slot) in out.iter_mut().enumerate() {
        slot.1 = per_dir.iter().map(|d| d[k].1).sum::<f64>() / per_dir.len() as f64;
    }
    out
}

fn put_directional(out: &mut Values, family: &str, avg: Vec<(&'static str, f64)>, merged: Vec<(&'static str, f64)>, names: &[&'static str]) {
    let lookup = |v: &[(&'static str, f64)], n: &str| v.iter().find(|(k, _)| *k == n).map_or(f64::NAN, |x| x.1);
    for &n in names {
        put(out, &format!("{family}.dir_avg.{n}"), lookup(&avg, n));
        put(out, &format!("{family}.dir_merged.{n}"), lookup(&merged, n));
    }
}

pub fn glcm(c: &Case, out: &mut Values) {
    let (lv, ng) = levels(c);
    let mut merged = vec![vec![0.0; ng + 1]; ng + 1];
    let mut per_dir = Vec::new();
    for d in half_offsets() {
        let fwd = pair_counts(c, &lv, ng, d);
        let back = pair_counts(c, &lv, ng, [-d[0], -d[1], -d[2]]);
        let mut sym = vec![vec![0.0; ng + 1]; ng + 1];
        for i in 0..=ng {
            for j in 0..=ng {
                sym[i][j] = fwd[i][j] + back[i][j];
                merged[i][j] += sym[i][j];
            }
        }
        if sym.iter().flatten().sum::<f64>() > 0.0 {
            per_dir.push(glcm_values(&sym, ng));
        }
    }
    let names: Vec<&'static str> = glcm_values(&vec![vec![1.0; ng + 1]; ng + 1], ng).iter().map(|x| x.0).collect();
    let merged_vals = if merged.iter().flatten().sum::<f64>() > 0.0 {
        glcm_values(&merged, ng)
    } else {
        Vec::new()
    };
    put_directional(out, "glcm", average(&per_dir), merged_vals, &names);
}

// ---------------------------------------------------- run / zone statistics

/// Statistics of a dense count matrix `m[level][column]`, with
/// `(small, large, low, high)` naming supplied by the caller.
fn matrix_stats(m: &Dense, n_voxels: f64) -> BTreeMap<&'static str, f64> {
    let ns: f64 = m.iter().flatten().sum();
    let mut s = BTreeMap::new();
    let mut acc = |k: &'static str, v: f64| *s.entry(k).or_insert(0.0) += v;
    let rows = m.len();
    let cols = m[0].len();
    for i in 1..rows {
        for j in 1..cols {
            let v = m[i][j];
            if v == 0.0 {
                continue;
            }
            let (fi, fj) = (i as f64, j as f64);
            acc("small", v / (fj * fj));
            acc("large", v * fj * fj);
            acc("low", v / (fi * fi));
            acc("high", v * fi * fi);
            acc("small_low", v / (fi * fi * fj * fj));
            acc("small_high", v * fi * fi / (fj * fj));
            acc("large_low", v * fj * fj / (fi * fi));
            acc("large_high", v * fi * fi * fj * fj);
        }
    }
    for v in s.values_mut() {
        *v /= ns;
    }
    let mut gnu = 0.0;
    for row in m.iter().skip(1) {
        let r: f64 = row.iter().sum();
        gnu += r * r;
    }
    let mut cnu = 0.0;
    for j in 1..cols {
        let col: f64 = m.iter().map(|r| r[j]).sum();
        cnu += col * col;
    }
    let (mut mi, mut mj) = (0.0, 0.0);
    for i in 1..rows {
        for j in 1..cols {
            mi += i as f64 * m[i][j] / ns;
            mj += j as f64 * m[i][j] / ns;
        }
    }
    let (mut vi, mut vj, mut ent, mut energy) = (0.0, 0.0, 0.0, 0.0);
    for i in 1..rows {
        for j in 1..cols {
            let p = m[i][j] / ns;
            vi += (i as f64 - mi).powi(2) * p;
            vj += (j as f64 - mj).powi(2) * p;
            if p > 0.0 {
                ent -= p * p.log2();
            }
            energy += p * p;
        }
    }
    s.insert("gnu", gnu / ns);
    s.insert("gnu_n", gnu / (ns * ns));
    s.insert("cnu", cnu / ns);
    s.insert("cnu_n", cnu / (ns * ns));
    s.insert("percentage", ns / n_voxels);
    s.insert("grey_var", vi);
    s.insert("col_var", vj);
    s.insert("entropy", ent);
    s.insert("energy", energy);
    s
}

/// (feature name, stats key) tables per family.
const RUN_KEYS: [(&str, &str); 16] = [
    ("short_runs_emphasis", "small"),
    ("long_runs_emphasis", "large"),
    ("low_grey_level_run_emphasis", "low"),
    ("high_grey_level_run_emphasis", "high"),
    ("short_run_low_grey_level_emphasis", "small_low"),
    ("short_run_high_grey_level_emphasis", "small_high"),
    ("long_run_low_grey_level_emphasis", "large_low"),
    ("long_run_high_grey_level_emphasis", "large_high"),
    ("grey_level_non_uniformity", "gnu"),
    ("grey_level_non_uniformity_normalised", "gnu_n"),
    ("run_length_non_uniformity", "cnu"),
    ("run_length_non_uniformity_normalised", "cnu_n"),
    ("run_percentage", "percentage"),
    ("grey_level_variance", "grey_var"),
    ("run_length_variance", "col_var"),
    ("run_entropy", "entropy"),
];

const SIZE_KEYS: [(&str, &str); 16] = [
    ("small_zone_emphasis", "small"),
    ("large_zone_emphasis", "large"),
    ("low_grey_level_zone_emphasis", "low"),
    ("high_grey_level_zone_emphasis", "high"),
    ("small_zone_low_grey_level_emphasis", "small_low"),
    ("small_zone_high_grey_level_emphasis", "small_high"),
    ("large_zone_low_grey_level_emphasis", "large_low"),
    ("large_zone_high_grey_level_emphasis", "large_high"),
    ("grey_level_non_uniformity", "gnu"),
    ("grey_level_non_uniformity_normalised", "gnu_n"),
    ("zone_size_non_uniformity", "cnu"),
    ("zone_size_non_uniformity_normalised", "cnu_n"),
    ("zone_percentage", "percentage"),
    ("grey_level_variance", "grey_var"),
    ("zone_size_variance", "col_var"),
    ("zone_size_entropy", "entropy"),
];

const DIST_KEYS: [(&str, &str); 16] = [
    ("small_distance_emphasis", "small"),
    ("large_distance_emphasis", "large"),
    ("low_grey_level_zone_emphasis", "low"),
    ("high_grey_level_zone_emphasis", "high"),
    ("small_distance_low_grey_level_emphasis", "small_low"),
    ("small_distance_high_grey_level_emphasis", "small_high"),
    ("large_distance_low_grey_level_emphasis", "large_low"),
    ("large_distance_high_grey_level_emphasis", "large_high"),
    ("grey_level_non_uniformity", "gnu"),
    ("grey_level_non_uniformity_normalised", "gnu_n"),
    ("zone_distance_non_uniformity", "cnu"),
    ("zone_distance_non_uniformity_normalised", "cnu_n"),
    ("zone_percentage", "percentage"),
    ("grey_level_variance", "grey_var"),
    ("zone_distance_variance", "col_var"),
    ("zone_distance_entropy", "entropy"),
];

const DEPENDENCE_KEYS: [(&str, &str); 17] = [
    ("low_dependence_emphasis", "small"),
    ("high_dependence_emphasis", "large"),
    ("low_grey_level_count_emphasis", "low"),
    ("high_grey_level_count_emphasis", "high"),
    ("low_dependence_low_grey_level_emphasis", "small_low"),
    ("low_dependence_high_grey_level_emphasis", "small_high"),
    ("high_dependence_low_grey_level_emphasis", "large_low"),
    ("high_dependence_high_grey_level_emphasis", "large_high"),
    ("grey_level_non_uniformity", "gnu"),
    ("grey_level_non_uniformity_normalised", "gnu_n"),
    ("dependence_count_non_uniformity", "cnu"),
    ("dependence_count_non_uniformity_normalised", "cnu_n"),
    ("dependence_count_percentage", "percentage"),
    ("grey_level_variance", "grey_var"),
    ("dependence_count_variance", "col_var"),
    ("dependence_count_entropy", "entropy"),
    ("dependence_count_energy", "energy"),
];

fn named(stats: &BTreeMap<&'static str, f64>, keys: &[(&'static str, &'static str)]) -> Vec<(&'static str, f64)> {
    keys.iter().map(|&(n, k)| (n, stats[k])).collect()
}

fn dense(ng: usize, cols: usize) -> Dense {
    vec![vec![0.0; cols + 1]; ng + 1]
}

fn grow(m: &mut Dense, col: usize) {
    if col >= m[0].len() {
        for r in m.iter_mut() {
            r.resize(col + 1, 0.0);
        }
    }
}

// -------------------------------------------------------------------- GLRLM

fn runs(c: &Case, lv: &[i64], ng: usize, d: [i64; 3]) -> Dense {
    let mut m = dense(ng, 1);
    let mut visited = vec![false; c.n()];
    let back = [-d[0], -d[1], -d[2]];
    for i in 0..c.n() {
        if !c.mask[i] || visited[i] {
            continue;
        }
        let mut start = c.xyz(i);
        while let Some(j) = c.index(add(start, back)) {
            if !c.mask[j] || lv[j] != lv[i] {
                break;
            }
            start = add(start, back);
        }
        let mut len = 0;
        let mut p = start;
        while let Some(j) = c.index(p) {
            if !c.mask[j] || lv[j] != lv[i] {
                break;
            }
            visited[j] = true;
            len += 1;
            p = add(p, d);
        }
        grow(&mut m, len);
        m[lv[i] as usize][len] += 1.0;
    }
    m
}

pub fn glrlm(c: &Case, out: &mut Values) {
    let (lv, ng) = levels(c);
    let nv = c.roi().len() as f64;
    let dirs = half_offsets();
    let mut merged = dense(ng, 1);
    let mut per_dir = Vec::new();
    for &d in &dirs {
        let m = runs(c, &lv, ng, d);
        per_dir.push(named(&matrix_stats(&m, nv), &RUN_KEYS));
        grow(&mut merged, m[0].len() - 1);
        for i in 0..m.len() {
            for j in 0..m[0].len() {
                merged[i][j] += m[i][j];
            }
        }
    }
    let names: Vec<&'static str> = RUN_KEYS.iter().map(|k| k.0).collect();
    let merged_vals = named(&matrix_stats(&merged, nv * dirs.len() as f64), &RUN_KEYS);
    put_directional(out, "glrlm", average(&per_dir), merged_vals, &names);
}

// ------------------------------------------------------------ GLSZM / GLDZM

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Zones as lists of voxel indices, via union-find over 26-neighbours.
fn zones(c: &Case, lv: &[i64]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..c.n()).collect();
    for i in 0..c.n() {
        if !c.mask[i] {
            continue;
        }
        for d in offsets26() {
            if let Some(j) = c.index(add(c.xyz(i), d)) {
                if c.mask[j] && lv[j] == lv[i] {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..c.n() {
        if c.mask[i] {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
    }
    groups.into_values().collect()
}

pub fn glszm(c: &Case, out: &mut Values) {
    let (lv, ng) = levels(c);
    let mut m = dense(ng, 1);
    for z in zones(c, &lv) {
        grow(&mut m, z.len());
        m[lv[z[0]] as usize][z.len()] += 1.0;
    }
    for (n, v) in named(&matrix_stats(&m, c.roi().len() as f64), &SIZE_KEYS) {
        put(out, &format!("glszm.{n}"), v);
    }
}

/// City-block distance to the nearest voxel outside the ROI, where
/// everything beyond the grid is outside.
fn border_distance(c: &Case, i: usize) -> i64 {
    let p = c.xyz(i);
    let mut best = i64::MAX;
    for a in 0..3 {
        best = best.min(p[a] + 1).min(c.dims[a] as i64 - p[a]);
    }
    for j in 0..c.n() {
        if !c.mask[j] {
            let q = c.xyz(j);
            best = best.min((0..3).map(|a| (p[a] - q[a]).abs()).sum());
        }
    }
    best
}

pub fn gldzm(c: &Case, out: &mut Values) {
    let (lv, ng) = levels(c);
    let mut m = dense(ng, 1);
    for z in zones(c, &lv) {
        let d = z.iter().map(|&i| border_distance(c, i)).min().unwrap() as usize;
        grow(&mut m, d);
        m[lv[z[0]] as usize][d] += 1.0;
    }
    for (n, v) in named(&matrix_stats(&m, c.roi().len() as f64), &DIST_KEYS) {
        put(out, &format!("gldzm.{n}"), v);
    }
}

// ------------------------------------------------------------ NGTDM / NGLDM

pub fn ngtdm(c: &Case, out: &mut Values) {
    let (lv, ng) = levels(c);
    let mut n = vec![0.0; ng + 1];
    let mut s = vec![0.0; ng + 1];
    for i in c.roi() {
        let (mut sum, mut cnt) = (0.0, 0.0);
        for d in offsets26() {
            if let Some(j) = c.index(add(c.xyz(i), d)) {
                if c.mask[j] {
                    sum += lv[j] as f64;
                    cnt += 1.0;
                }
            }
        }
        if cnt > 0.0 {
            let l = lv[i] as usize;
            n[l] += 1.0;
            s[l] += (l as f64 - sum / cnt).abs();
        }
    }
    let nvc: f64 = n.iter().sum();
    let keys = ["coarseness", "contrast", "busyness", "complexity", "strength"];
    if nvc == 0.0 {
        for k in keys {
            put(out, &format!("ngtdm.{k}"), f64::NAN);
        }
        return;
    }
    let p: Vec<f64> = n.iter().map(|v| v / nvc).collect();
    let present: Vec<usize> = (1..=ng).filter(|&l| p[l] > 0.0).collect();
    let ngp = present.len() as f64;
    let ps: f64 = present.iter().map(|&l| p[l] * s[l]).sum();
    let s_sum: f64 = present.iter().map(|&l| s[l]).sum();
    let (mut sq, mut bden, mut cx, mut st) = (0.0, 0.0, 0.0, 0.0);
    for &i in &present {
        for &j in &present {
            let (fi, fj) = (i as f64, j as f64);
            sq += p[i] * p[j] * (fi - fj).powi(2);
            bden += (fi * p[i] - fj * p[j]).abs();
            cx += (fi - fj).abs() * (p[i] * s[i] + p[j] * s[j]) / (p[i] + p[j]);
            st += (p[i] + p[j]) * (fi - fj).powi(2);
        }
    }
    put(out, "ngtdm.coarseness", 1.0 / ps.max(1e-6));
    put(out, "ngtdm.contrast", if present.len() < 2 { 0.0 } else { sq / (ngp * (ngp - 1.0)) * s_sum / nvc });
    put(out, "ngtdm.busyness", if present.len() < 2 || bden == 0.0 { 0.0 } else { ps / bden });
    put(out, "ngtdm.complexity", cx / nvc);
    put(out, "ngtdm.strength", if s_sum == 0.0 { 0.0 } else { st / s_sum });
}

pub fn ngldm(c: &Case, out: &mut Values) {
    let (lv, ng) = levels(c);
    let mut m = dense(ng, 27);
    for i in c.roi() {
        let mut k = 0;
        for d in offsets26() {
            if let Some(j) = c.index(add(c.xyz(i), d)) {
                if c.mask[j] && (lv[j] - lv[i]).abs() <= c.alpha {
                    k += 1;
                }
            }
        }
        m[lv[i] as usize][k + 1] += 1.0;
    }
    for (n, v) in named(&matrix_stats(&m, c.roi().len() as f64), &DEPENDENCE_KEYS) {
        put(out, &format!("ngldm.{n}"), v);
    }
}

/// All 186 features keyed by canonical id.
pub fn all_features(c: &Case) -> Values {
    let mut out = Values::new();
    local_intensity(c, &mut out);
    intensity_statistics(c, &mut out);
    intensity_histogram(c, &mut out);
    intensity_volume_histogram(c, &mut out);
    glcm(c, &mut out);
    glrlm(c, &mut out);
    glszm(c, &mut out);
    gldzm(c, &mut out);
    ngtdm(c, &mut out);
    ngldm(c, &mut out);
    out
}

/// Relative agreement with an absolute floor for values that should be 0.
pub fn close(a: f64, b: f64, rel: f64) -> bool {
    if a.is_nan() || b.is_nan() {
        return a.is_nan() && b.is_nan();
    }
    if a == b {
        return true;
    }
    (a - b).abs() <= rel * a.abs().max(b.abs()) || (a - b).abs() <= 1e-12
}
