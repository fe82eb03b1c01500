//! Seeded synthetic phantoms: smooth value noise with an ellipsoidal ROI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::preprocess::min_max_normalize;
use crate::volume::{Dims, RoiMask, Spacing, Volume3D};

/// Lattice spacing of the value noise, in voxels.
pub const NOISE_CELL: usize = 4;

/// Ellipsoid semi-axis as a fraction of the half extent on each axis; the
/// ellipsoid then fills `(4/3) pi f^3 / 8 = 0.3` of the box.
pub fn mask_axis_fraction() -> f64 {
    (0.3 * 6.0 / std::f64::consts::PI).cbrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Phantom {
    pub volume: Volume3D,
    pub mask: RoiMask,
}

impl Phantom {
    /// Hex sha256 over the little-endian voxel values followed by the mask bytes.
    pub fn checksum(&self) -> String {
        let mut h = Sha256::new();
        for v in self.volume.values() {
            h.update(v.to_le_bytes());
        }
        for &f in self.mask.flags() {
            h.update([f as u8]);
        }
        hex::encode(h.finalize())
    }
}

pub fn generate_phantom(seed: u64, dims: Dims, spacing: Spacing) -> Result<Phantom> {
    if dims.contains(&0) {
        return Err(Error::InvalidVolume(format!("phantom dims must be positive, got {dims:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lat: [usize; 3] = std::array::from_fn(|a| dims[a].div_ceil(NOISE_CELL) + 1);
    let lattice: Vec<f64> = (0..lat[0] * lat[1] * lat[2]).map(|_| rng.gen::<f64>()).collect();
    let at = |x: usize, y: usize, z: usize| lattice[x + lat[0] * (y + lat[1] * z)];

    let mut values = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
    for z in 0..dims[2] {
        let (z0, tz) = (z / NOISE_CELL, (z % NOISE_CELL) as f64 / NOISE_CELL as f64);
        for y in 0..dims[1] {
            let (y0, ty) = (y / NOISE_CELL, (y % NOISE_CELL) as f64 / NOISE_CELL as f64);
            for x in 0..dims[0] {
                let (x0, tx) = (x / NOISE_CELL, (x % NOISE_CELL) as f64 / NOISE_CELL as f64);
                let lerp = |a: f64, b: f64, t: f64| a + (b - a) * t;
                let c00 = lerp(at(x0, y0, z0), at(x0 + 1, y0, z0), tx);
                let c10 = lerp(at(x0, y0 + 1, z0), at(x0 + 1, y0 + 1, z0), tx);
                let c01 = lerp(at(x0, y0, z0 + 1), at(x0 + 1, y0, z0 + 1), tx);
                let c11 = lerp(at(x0, y0 + 1, z0 + 1), at(x0 + 1, y0 + 1, z0 + 1), tx);
                values.push(lerp(lerp(c00, c10, ty), lerp(c01, c11, ty), tz));
            }
        }
    }
    let volume = min_max_normalize(&Volume3D::new(dims, spacing, values)?);

    let f = mask_axis_fraction();
    let centre: [f64; 3] = std::array::from_fn(|a| (dims[a] as f64 - 1.0) / 2.0);
    let semi: [f64; 3] = std::array::from_fn(|a| (f * dims[a] as f64 / 2.0).max(0.5));
    let mut flags = Vec::with_capacity(volume.len());
    for z in 0..dims[2] {
        for y in 0..dims[1] {
            for x in 0..dims[0] {
                let p = [x as f64, y as f64, z as f64];
                let r: f64 = (0..3).map(|a| ((p[a] - centre[a]) / semi[a]).powi(2)).sum();
                flags.push(r <= 1.0);
            }
        }
    }
    let mask = RoiMask::new(dims, flags)?;
    Ok(Phantom { volume, mask })
}
