//! In-memory volume and mask representation.
//!
//! Voxels are stored in a flat buffer with x varying fastest, then y, then z:
//! `index = x + nx * (y + ny * z)`.

use crate::error::{Error, Result};

pub type Dims = [usize; 3];
pub type Spacing = [f64; 3];

#[inline]
pub fn flat_index(dims: Dims, x: usize, y: usize, z: usize) -> usize {
    x + dims[0] * (y + dims[1] * z)
}

#[inline]
pub fn coords(dims: Dims, index: usize) -> [usize; 3] {
    let x = index % dims[0];
    let rest = index / dims[0];
    [x, rest % dims[1], rest / dims[1]]
}

/// Offset a voxel coordinate, returning `None` when the result leaves the grid.
#[inline]
pub fn offset(dims: Dims, c: [usize; 3], d: [i64; 3]) -> Option<[usize; 3]> {
    let mut out = [0usize; 3];
    for a in 0..3 {
        let v = c[a] as i64 + d[a];
        if v < 0 || v >= dims[a] as i64 {
            return None;
        }
        out[a] = v as usize;
    }
    Some(out)
}

/// A 3D scalar field with physical voxel spacing in millimetres.
#[derive(Debug, Clone, PartialEq)]
pub struct Volume3D {
    dims: Dims,
    spacing: Spacing,
    values: Vec<f64>,
}

impl Volume3D {
    pub fn new(dims: Dims, spacing: Spacing, values: Vec<f64>) -> Result<Self> {
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidVolume(format!("zero dimension in {dims:?}")));
        }
        if spacing.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(Error::InvalidVolume(format!(
                "spacing must be positive, got {spacing:?}"
            )));
        }
        let n = dims[0] * dims[1] * dims[2];
        if n != values.len() {
            return Err(Error::InvalidVolume(format!(
                "dims {dims:?} need {n} values, got {}",
                values.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteVoxel { index });
        }
        Ok(Self {
            dims,
            spacing,
            values,
        })
    }

    pub fn filled(dims: Dims, spacing: Spacing, value: f64) -> Result<Self> {
        Self::new(dims, spacing, vec![value; dims[0] * dims[1] * dims[2]])
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, x: usize, y: usize, z: usize) -> f64 {
        self.values[flat_index(self.dims, x, y, z)]
    }

    /// Apply `f` to every voxel. Fails if `f` produces a non-finite value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.dims, self.spacing, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Binary region of interest aligned with a [`Volume3D`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoiMask {
    dims: Dims,
    flags: Vec<bool>,
}

impl RoiMask {
    /// Build a mask; rejects a length mismatch and an empty ROI.
    pub fn new(dims: Dims, flags: Vec<bool>) -> Result<Self> {
        if dims[0] * dims[1] * dims[2] != flags.len() {
            return Err(Error::InvalidVolume(format!(
                "mask dims {dims:?} do not match {} flags",
                flags.len()
            )));
        }
        if !flags.iter().any(|&f| f) {
            return Err(Error::EmptyMask);
        }
        Ok(Self { dims, flags })
    }

    pub fn full(dims: Dims) -> Self {
        Self {
            dims,
            flags: vec![true; dims[0] * dims[1] * dims[2]],
        }
    }

    /// Nonzero voxels of `v` are inside.
    pub fn from_volume(v: &Volume3D) -> Result<Self> {
        Self::new(v.dims(), v.values().iter().map(|&x| x != 0.0).collect())
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    #[inline]
    pub fn contains(&self, index: usize) -> bool {
        self.flags[index]
    }

    pub fn count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.flags
            .iter()
            .enumerate()
            .filter_map(|(i, &f)| f.then_some(i))
    }

    pub fn check_aligned(&self, v: &Volume3D) -> Result<()> {
        if self.dims != v.dims() {
            return Err(Error::DimsMismatch {
                expected: v.dims(),
                found: self.dims,
            });
        }
        Ok(())
    }

    /// Values of `v` inside the mask, in flat index order.
    pub fn roi_values(&self, v: &Volume3D) -> Vec<f64> {
        self.indices().map(|i| v.values()[i]).collect()
    }
}
