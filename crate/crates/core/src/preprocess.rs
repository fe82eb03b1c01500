//! Intensity normalization, ROI-centred cropping and gray-level discretization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::volume::{coords, flat_index, Dims, RoiMask, Spacing, Volume3D};

/// Min-max normalize over the whole volume. A constant volume maps to zeros.
pub fn min_max_normalize(v: &Volume3D) -> Volume3D {
    let (lo, hi) = v
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    let range = hi - lo;
    let values = if range > 0.0 {
        v.values().iter().map(|&x| (x - lo) / range).collect()
    } else {
        vec![0.0; v.len()]
    };
    Volume3D::new(v.dims(), v.spacing(), values).expect("normalized values are finite")
}

/// Integer-rounded (half-up) centroid of the in-mask voxel coordinates.
pub fn mask_centroid(mask: &RoiMask) -> [i64; 3] {
    let dims = mask.dims();
    let mut sum = [0u64; 3];
    let mut n = 0u64;
    for i in mask.indices() {
        let c = coords(dims, i);
        for a in 0..3 {
            sum[a] += c[a] as u64;
        }
        n += 1;
    }
    let mut out = [0i64; 3];
    for a in 0..3 {
        // floor(sum / n + 1/2) in exact integer arithmetic
        out[a] = ((2 * sum[a] + n) / (2 * n)) as i64;
    }
    out
}

/// Crop `v` and `mask` to `target` voxels around the rounded mask centroid.
///
/// The window starts at `centroid - target / 2` on each axis. Voxels outside
/// the source grid are zero-filled and lie outside the mask.
pub fn crop_centered(v: &Volume3D, mask: &RoiMask, target: Dims) -> Result<(Volume3D, RoiMask)> {
    mask.check_aligned(v)?;
    if target.contains(&0) {
        return Err(Error::InvalidVolume(format!(
            "crop target must be positive, got {target:?}"
        )));
    }
    let dims = v.dims();
    let center = mask_centroid(mask);
    let start: [i64; 3] = std::array::from_fn(|a| center[a] - (target[a] / 2) as i64);

    let n = target[0] * target[1] * target[2];
    let mut values = vec![0.0; n];
    let mut flags = vec![false; n];
    for z in 0..target[2] {
        let sz = start[2] + z as i64;
        if sz < 0 || sz >= dims[2] as i64 {
            continue;
        }
        for y in 0..target[1] {
            let sy = start[1] + y as i64;
            if sy < 0 || sy >= dims[1] as i64 {
                continue;
            }
            for x in 0..target[0] {
                let sx = start[0] + x as i64;
                if sx < 0 || sx >= dims[0] as i64 {
                    continue;
                }
                let src = flat_index(dims, sx as usize, sy as usize, sz as usize);
                let dst = flat_index(target, x, y, z);
                values[dst] = v.values()[src];
                flags[dst] = mask.contains(src);
            }
        }
    }
    let out_mask = RoiMask::new(target, flags).map_err(|e| match e {
        Error::EmptyMask => Error::CropLosesRoi,
        other => other,
    })?;
    Ok((Volume3D::new(target, v.spacing(), values)?, out_mask))
}

/// Per-volume preprocessing applied before metrics and extraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PreprocessOptions {
    pub normalize: bool,
    /// Crop target in voxels; `None` keeps the full grid.
    pub crop: Option<Dims>,
    /// Normalize the full volume and then crop, instead of the reverse.
    pub normalize_before_crop: bool,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        Self {
            normalize: true,
            crop: Some([128, 128, 64]),
            normalize_before_crop: false,
        }
    }
}

impl PreprocessOptions {
    pub fn apply(&self, v: &Volume3D, mask: &RoiMask) -> Result<(Volume3D, RoiMask)> {
        mask.check_aligned(v)?;
        let norm = |v: &Volume3D| if self.normalize { min_max_normalize(v) } else { v.clone() };
        match self.crop {
            None => Ok((norm(v), mask.clone())),
            Some(target) if self.normalize_before_crop => crop_centered(&norm(v), mask, target),
            Some(target) => {
                let (c, m) = crop_centered(v, mask, target)?;
                Ok((norm(&c), m))
            }
        }
    }
}

/// How continuous intensities are mapped to gray levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DiscretizationScheme {
    FixedBinNumber { bins: u32 },
    FixedBinSize { width: f64, origin: f64 },
}

impl Default for DiscretizationScheme {
    fn default() -> Self {
        DiscretizationScheme::FixedBinNumber { bins: 32 }
    }
}

impl DiscretizationScheme {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DiscretizationScheme::FixedBinNumber { bins } if bins < 2 => Err(
                Error::InvalidScheme(format!("fixed bin number needs at least 2 bins, got {bins}")),
            ),
            DiscretizationScheme::FixedBinSize { width, origin }
                if !(width > 0.0) || !width.is_finite() || !origin.is_finite() =>
            {
                Err(Error::InvalidScheme(format!(
                    "fixed bin size needs a positive finite width, got {width} (origin {origin})"
                )))
            }
            _ => Ok(()),
        }
    }
}

impl std::fmt::Display for DiscretizationScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DiscretizationScheme::FixedBinNumber { bins } => write!(f, "FBN(bins={bins})"),
            DiscretizationScheme::FixedBinSize { width, origin } => {
                write!(f, "FBS(width={width},origin={origin})")
            }
        }
    }
}

/// Gray levels for the voxels of an ROI.
///
/// Levels are stored on the full grid; voxels outside the mask hold 0 and
/// voxels inside hold a level in `1..=num_levels`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedVolume {
    dims: Dims,
    spacing: Spacing,
    levels: Vec<u32>,
    num_levels: u32,
    scheme: DiscretizationScheme,
    mask: RoiMask,
}

impl DiscretizedVolume {
    /// Build directly from levels. Out-of-mask voxels are forced to 0.
    pub fn from_levels(
        dims: Dims,
        spacing: Spacing,
        levels: Vec<u32>,
        mask: RoiMask,
        scheme: DiscretizationScheme,
    ) -> Result<Self> {
        if mask.dims() != dims || levels.len() != mask.flags().len() {
            return Err(Error::DimsMismatch {
                expected: dims,
                found: mask.dims(),
            });
        }
        let mut levels = levels;
        let mut num_levels = 0;
        for (i, l) in levels.iter_mut().enumerate() {
            if mask.contains(i) {
                if *l == 0 {
                    return Err(Error::InvalidScheme(format!(
                        "in-mask voxel {i} has level 0"
                    )));
                }
                num_levels = num_levels.max(*l);
            } else {
                *l = 0;
            }
        }
        Ok(Self {
            dims,
            spacing,
            levels,
            num_levels,
            scheme,
            mask,
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    /// Levels on the full grid (0 outside the mask).
    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    #[inline]
    pub fn level(&self, index: usize) -> u32 {
        self.levels[index]
    }

    /// Effective number of gray levels `Ng`.
    pub fn num_levels(&self) -> u32 {
        self.num_levels
    }

    pub fn scheme(&self) -> DiscretizationScheme {
        self.scheme
    }

    pub fn mask(&self) -> &RoiMask {
        &self.mask
    }

    pub fn roi_levels(&self) -> Vec<u32> {
        self.mask.indices().map(|i| self.levels[i]).collect()
    }

    /// Voxel counts per level; entry `k` counts level `k + 1`.
    pub fn histogram(&self) -> Vec<u64> {
        let mut h = vec![0u64; self.num_levels as usize];
        for i in self.mask.indices() {
            h[self.levels[i] as usize - 1] += 1;
        }
        h
    }
}

pub fn discretize(
    v: &Volume3D,
    mask: &RoiMask,
    scheme: DiscretizationScheme,
) -> Result<DiscretizedVolume> {
    mask.check_aligned(v)?;
    scheme.validate()?;
    let values = v.values();
    let (lo, hi) = mask
        .indices()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
            (lo.min(values[i]), hi.max(values[i]))
        });
    if lo > hi {
        return Err(Error::EmptyMask);
    }

    let mut levels = vec![0u32; values.len()];
    let num_levels = match scheme {
        DiscretizationScheme::FixedBinNumber { bins } => {
            let range = hi - lo;
            if range > 0.0 {
                let ng = bins as f64;
                for i in mask.indices() {
                    let bin = (ng * (values[i] - lo) / range).floor() as u32 + 1;
                    levels[i] = bin.min(bins);
                }
                bins
            } else {
                for i in mask.indices() {
                    levels[i] = 1;
                }
                1
            }
        }
        DiscretizationScheme::FixedBinSize { width, origin } => {
            let raw = |x: f64| ((x - origin) / width).floor() as i64 + 1;
            let shift = raw(lo) - 1;
            let mut top = 1;
            for i in mask.indices() {
                let l = (raw(values[i]) - shift) as u32;
                levels[i] = l;
                top = top.max(l);
            }
            top
        }
    };

    Ok(DiscretizedVolume {
        dims: v.dims(),
        spacing: v.spacing(),
        levels,
        num_levels,
        scheme,
        mask: mask.clone(),
    })
}
