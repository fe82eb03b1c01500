//! Pairwise image-quality metrics over 3D volumes: MAE, MSE, PSNR and a
//! volumetric Gaussian-windowed SSIM.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{pairwise_sum, pairwise_sum_by};
use crate::stats::mean_std;
use crate::volume::{Dims, RoiMask, Volume3D};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SsimParams {
    /// Half-width of the cubic window; the window spans `2 * half_width + 1` voxels.
    pub half_width: usize,
    pub k1: f64,
    pub k2: f64,
    pub dynamic_range: f64,
    pub sigma: f64,
}

impl Default for SsimParams {
    fn default() -> Self {
        Self {
            half_width: 5,
            k1: 0.01,
            k2: 0.03,
            dynamic_range: 1.0,
            sigma: 1.5,
        }
    }
}

impl SsimParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.k1, self.k2, self.dynamic_range, self.sigma]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite());
        if self.half_width < 1 || !positive {
            return Err(Error::Config(format!("invalid SSIM parameters {self:?}")));
        }
        Ok(())
    }

    pub fn window(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn c1(&self) -> f64 {
        (self.k1 * self.dynamic_range).powi(2)
    }

    pub fn c2(&self) -> f64 {
        (self.k2 * self.dynamic_range).powi(2)
    }

    /// Unnormalized 1D Gaussian taps for offsets `-half_width..=half_width`.
    pub fn taps(&self) -> Vec<f64> {
        let w = self.half_width as i64;
        (-w..=w)
            .map(|k| (-((k * k) as f64) / (2.0 * self.sigma * self.sigma)).exp())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub mae: f64,
    pub mse: f64,
    pub ssim: f64,
    pub psnr: f64,
}

impl MetricSet {
    pub const NAMES: [&'static str; 4] = ["mae", "mse", "ssim", "psnr"];

    pub fn get(&self, metric: &str) -> Result<f64> {
        Ok(match metric {
            "mae" => self.mae,
            "mse" => self.mse,
            "ssim" => self.ssim,
            "psnr" => self.psnr,
            other => return Err(Error::UnknownMetric(other.to_string())),
        })
    }
}

fn check_dims(a: &Volume3D, b: &Volume3D) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::DimsMismatch {
            expected: a.dims(),
            found: b.dims(),
        });
    }
    Ok(())
}

fn check_mask(a: &Volume3D, roi: Option<&RoiMask>) -> Result<()> {
    match roi {
        Some(m) => m.check_aligned(a),
        None => Ok(()),
    }
}

fn mean_of_diffs(
    a: &Volume3D,
    b: &Volume3D,
    roi: Option<&RoiMask>,
    f: impl Fn(f64) -> f64,
) -> Result<f64> {
    check_dims(a, b)?;
    check_mask(a, roi)?;
    let (av, bv) = (a.values(), b.values());
    let d: Vec<f64> = match roi {
        None => av.iter().zip(bv).map(|(x, y)| f(x - y)).collect(),
        Some(m) => m.indices().map(|i| f(av[i] - bv[i])).collect(),
    };
    Ok(pairwise_sum(&d) / d.len() as f64)
}

pub fn mae(a: &Volume3D, b: &Volume3D) -> Result<f64> {
    mean_of_diffs(a, b, None, f64::abs)
}

pub fn mse(a: &Volume3D, b: &Volume3D) -> Result<f64> {
    mean_of_diffs(a, b, None, |d| d * d)
}

pub fn mae_masked(a: &Volume3D, b: &Volume3D, roi: &RoiMask) -> Result<f64> {
    mean_of_diffs(a, b, Some(roi), f64::abs)
}

pub fn mse_masked(a: &Volume3D, b: &Volume3D, roi: &RoiMask) -> Result<f64> {
    mean_of_diffs(a, b, Some(roi), |d| d * d)
}

/// PSNR in dB from a mean squared error. `+inf` when `mse == 0`.
///
/// Written as `20 log10(peak) - 10 log10(mse)` so that a unit peak gives
/// exactly `-10 log10(mse)`.
pub fn psnr_from_mse(mse: f64, peak: f64) -> f64 {
    if mse == 0.0 {
        return f64::INFINITY;
    }
    20.0 * peak.log10() - 10.0 * mse.log10()
}

pub fn psnr(a: &Volume3D, b: &Volume3D, peak: f64) -> Result<f64> {
    if !(peak > 0.0) {
        return Err(Error::Config(format!("PSNR peak must be positive, got {peak}")));
    }
    Ok(psnr_from_mse(mse(a, b)?, peak))
}

/// Separable filter along one axis with per-position renormalized taps, so
/// windows clipped by the volume boundary keep unit weight.
fn filter_axis(input: &[f64], dims: Dims, axis: usize, taps: &[f64]) -> Vec<f64> {
    let w = (taps.len() / 2) as i64;
    let n = dims[axis] as i64;
    let stride = match axis {
        0 => 1,
        1 => dims[0],
        _ => dims[0] * dims[1],
    };
    // Normalization only depends on the position along the axis.
    let norms: Vec<f64> = (0..n)
        .map(|p| {
            let mut s = 0.0;
            for k in -w..=w {
                if (0..n).contains(&(p + k)) {
                    s += taps[(k + w) as usize];
                }
            }
            s
        })
        .collect();
    let mut out = vec![0.0; input.len()];
    for (start, o) in out.iter_mut().enumerate() {
        let p = ((start / stride) % dims[axis]) as i64;
        let mut acc = 0.0;
        for k in -w..=w {
            let q = p + k;
            if (0..n).contains(&q) {
                let idx = (start as i64 + k * stride as i64) as usize;
                acc += taps[(k + w) as usize] * input[idx];
            }
        }
        *o = acc / norms[p as usize];
    }
    out
}

fn gaussian_filter(input: &[f64], dims: Dims, taps: &[f64]) -> Vec<f64> {
    let x = filter_axis(input, dims, 0, taps);
    let y = filter_axis(&x, dims, 1, taps);
    filter_axis(&y, dims, 2, taps)
}

/// Per-voxel SSIM map: one value per voxel-centred Gaussian window.
pub fn ssim3d_map(a: &Volume3D, b: &Volume3D, params: &SsimParams) -> Result<Vec<f64>> {
    check_dims(a, b)?;
    params.validate()?;
    let dims = a.dims();
    if dims.iter().any(|&d| d < params.window()) {
        return Err(Error::VolumeTooSmall {
            dims,
            window: params.window(),
        });
    }
    let taps = params.taps();
    let (av, bv) = (a.values(), b.values());
    let aa: Vec<f64> = av.iter().map(|x| x * x).collect();
    let bb: Vec<f64> = bv.iter().map(|x| x * x).collect();
    let ab: Vec<f64> = av.iter().zip(bv).map(|(x, y)| x * y).collect();

    let mu_a = gaussian_filter(av, dims, &taps);
    let mu_b = gaussian_filter(bv, dims, &taps);
    let e_aa = gaussian_filter(&aa, dims, &taps);
    let e_bb = gaussian_filter(&bb, dims, &taps);
    let e_ab = gaussian_filter(&ab, dims, &taps);

    let (c1, c2) = (params.c1(), params.c2());
    Ok((0..av.len())
        .map(|i| {
            let (ma, mb) = (mu_a[i], mu_b[i]);
            let va = e_aa[i] - ma * ma;
            let vb = e_bb[i] - mb * mb;
            let cov = e_ab[i] - ma * mb;
            ((2.0 * ma * mb + c1) * (2.0 * cov + c2))
                / ((ma * ma + mb * mb + c1) * (va + vb + c2))
        })
        .collect())
}

/// Mean SSIM over all voxel-centred 3D Gaussian windows.
pub fn ssim3d(a: &Volume3D, b: &Volume3D, params: &SsimParams) -> Result<f64> {
    let map = ssim3d_map(a, b, params)?;
    Ok(pairwise_sum(&map) / map.len() as f64)
}

/// Mean SSIM over windows centred on ROI voxels.
pub fn ssim3d_masked(a: &Volume3D, b: &Volume3D, params: &SsimParams, roi: &RoiMask) -> Result<f64> {
    check_mask(a, Some(roi))?;
    let map = ssim3d_map(a, b, params)?;
    let idx: Vec<usize> = roi.indices().collect();
    Ok(pairwise_sum_by(&idx, &|&i| map[i]) / idx.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricOptions {
    pub ssim: SsimParams,
    pub peak: f64,
    /// Restrict every metric to ROI voxels.
    pub roi_only: bool,
}

impl Default for MetricOptions {
    fn default() -> Self {
        Self {
            ssim: SsimParams::default(),
            peak: 1.0,
            roi_only: false,
        }
    }
}

/// All four metrics for one (reference, candidate) pair.
pub fn compute_metrics(
    reference: &Volume3D,
    candidate: &Volume3D,
    roi: &RoiMask,
    opts: &MetricOptions,
) -> Result<MetricSet> {
    if !(opts.peak > 0.0) {
        return Err(Error::Config(format!("PSNR peak must be positive, got {}", opts.peak)));
    }
    let (mae, mse, ssim) = if opts.roi_only {
        (
            mae_masked(reference, candidate, roi)?,
            mse_masked(reference, candidate, roi)?,
            ssim3d_masked(reference, candidate, &opts.ssim, roi)?,
        )
    } else {
        (
            mae(reference, candidate)?,
            mse(reference, candidate)?,
            ssim3d(reference, candidate, &opts.ssim)?,
        )
    };
    Ok(MetricSet {
        mae,
        mse,
        ssim,
        psnr: psnr_from_mse(mse, opts.peak),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation; NaN when `n == 1`.
    pub std: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricSummary {
    pub mae: Summary,
    pub mse: Summary,
    pub ssim: Summary,
    pub psnr: Summary,
}

pub fn summarize(values: &[MetricSet]) -> Result<MetricSummary> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let one = |f: fn(&MetricSet) -> f64| -> Summary {
        let v: Vec<f64> = values.iter().map(f).collect();
        let (mean, std) = mean_std(&v).expect("non-empty");
        Summary {
            mean,
            std,
            n: v.len(),
        }
    };
    Ok(MetricSummary {
        mae: one(|m| m.mae),
        mse: one(|m| m.mse),
        ssim: one(|m| m.ssim),
        psnr: one(|m| m.psnr),
    })
}
