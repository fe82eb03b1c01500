//! Minimal single-file NIfTI-1 (`.nii`) reader and writer.
//!
//! Only uncompressed files are handled. Orientation (qform/sform) is ignored.
//! Byte order is detected from `sizeof_hdr`, which must read as 348.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::volume::{RoiMask, Volume3D};

pub const HEADER_SIZE: usize = 348;
const WRITE_VOX_OFFSET: usize = 352;

/// NIfTI datatype codes understood by the reader.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Datatype {
    Int16,
    Uint16,
    Int32,
    Float32,
    Float64,
}

impl Datatype {
    pub fn code(self) -> i16 {
        match self {
            Datatype::Int16 => 4,
            Datatype::Int32 => 8,
            Datatype::Float32 => 16,
            Datatype::Float64 => 64,
            Datatype::Uint16 => 512,
        }
    }

    pub fn from_code(code: i16) -> Result<Self> {
        Ok(match code {
            4 => Datatype::Int16,
            8 => Datatype::Int32,
            16 => Datatype::Float32,
            64 => Datatype::Float64,
            512 => Datatype::Uint16,
            other => return Err(Error::UnsupportedDatatype(other)),
        })
    }

    pub fn size(self) -> usize {
        match self {
            Datatype::Int16 | Datatype::Uint16 => 2,
            Datatype::Int32 | Datatype::Float32 => 4,
            Datatype::Float64 => 8,
        }
    }
}

#[derive(Clone, Copy)]
struct Reader<'a> {
    bytes: &'a [u8],
    little: bool,
}

impl Reader<'_> {
    fn array<const N: usize>(&self, at: usize) -> [u8; N] {
        let mut b = [0u8; N];
        b.copy_from_slice(&self.bytes[at..at + N]);
        b
    }

    fn i16(&self, at: usize) -> i16 {
        let b = self.array::<2>(at);
        if self.little {
            i16::from_le_bytes(b)
        } else {
            i16::from_be_bytes(b)
        }
    }

    fn u16(&self, at: usize) -> u16 {
        let b = self.array::<2>(at);
        if self.little {
            u16::from_le_bytes(b)
        } else {
            u16::from_be_bytes(b)
        }
    }

    fn i32(&self, at: usize) -> i32 {
        let b = self.array::<4>(at);
        if self.little {
            i32::from_le_bytes(b)
        } else {
            i32::from_be_bytes(b)
        }
    }

    fn f32(&self, at: usize) -> f32 {
        let b = self.array::<4>(at);
        if self.little {
            f32::from_le_bytes(b)
        } else {
            f32::from_be_bytes(b)
        }
    }

    fn f64(&self, at: usize) -> f64 {
        let b = self.array::<8>(at);
        if self.little {
            f64::from_le_bytes(b)
        } else {
            f64::from_be_bytes(b)
        }
    }
}

/// The header fields the loader actually uses.
#[derive(Debug, Clone, PartialEq)]
pub struct NiftiHeader {
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    pub datatype: Datatype,
    pub vox_offset: usize,
    pub scl_slope: f64,
    pub scl_inter: f64,
    pub little_endian: bool,
}

pub fn parse_header(bytes: &[u8]) -> Result<NiftiHeader> {
    if bytes.len() < HEADER_SIZE {
        return Err(Error::MalformedHeader(format!(
            "file has {} bytes, header needs {HEADER_SIZE}",
            bytes.len()
        )));
    }
    let le = Reader { bytes, little: true };
    let be = Reader {
        bytes,
        little: false,
    };
    let r = if le.i32(0) == HEADER_SIZE as i32 {
        le
    } else if be.i32(0) == HEADER_SIZE as i32 {
        be
    } else {
        return Err(Error::MalformedHeader("sizeof_hdr is not 348".into()));
    };
    if &bytes[344..348] != b"n+1\0" {
        return Err(Error::MalformedHeader(
            "magic is not \"n+1\" (only single-file NIfTI-1 is supported)".into(),
        ));
    }

    let ndim = r.i16(40);
    if !(1..=7).contains(&ndim) {
        return Err(Error::MalformedHeader(format!("dim[0] = {ndim}")));
    }
    let mut dims = [1usize; 3];
    for (a, d) in dims.iter_mut().enumerate().take(ndim.min(3) as usize) {
        let v = r.i16(42 + 2 * a);
        if v < 1 {
            return Err(Error::MalformedHeader(format!("dim[{}] = {v}", a + 1)));
        }
        *d = v as usize;
    }
    for k in 4..=ndim as usize {
        let v = r.i16(40 + 2 * k);
        if v != 1 {
            return Err(Error::MalformedHeader(format!(
                "{ndim}D image with dim[{k}] = {v}; only 3D volumes are supported"
            )));
        }
    }

    let datatype = Datatype::from_code(r.i16(70))?;

    let mut spacing = [1.0f64; 3];
    for (a, s) in spacing.iter_mut().enumerate() {
        if a < ndim as usize {
            let p = r.f32(80 + 4 * a) as f64;
            if !(p > 0.0) || !p.is_finite() {
                return Err(Error::MalformedHeader(format!("pixdim[{}] = {p}", a + 1)));
            }
            *s = p;
        }
    }

    let vox_offset = r.f32(108);
    if !(vox_offset >= HEADER_SIZE as f32) || vox_offset.fract() != 0.0 {
        return Err(Error::MalformedHeader(format!("vox_offset = {vox_offset}")));
    }

    Ok(NiftiHeader {
        dims,
        spacing,
        datatype,
        vox_offset: vox_offset as usize,
        scl_slope: r.f32(112) as f64,
        scl_inter: r.f32(116) as f64,
        little_endian: r.little,
    })
}

/// Decode a complete `.nii` image held in memory.
pub fn decode(bytes: &[u8]) -> Result<Volume3D> {
    let h = parse_header(bytes)?;
    let n = h.dims[0] * h.dims[1] * h.dims[2];
    let width = h.datatype.size();
    let end = h.vox_offset + n * width;
    if bytes.len() < end {
        return Err(Error::MalformedHeader(format!(
            "voxel data truncated: need {end} bytes, file has {}",
            bytes.len()
        )));
    }
    let r = Reader {
        bytes,
        little: h.little_endian,
    };
    let scale = h.scl_slope != 0.0 && h.scl_slope.is_finite();
    let inter = if h.scl_inter.is_finite() { h.scl_inter } else { 0.0 };

    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let at = h.vox_offset + i * width;
        let raw = match h.datatype {
            Datatype::Int16 => r.i16(at) as f64,
            Datatype::Uint16 => r.u16(at) as f64,
            Datatype::Int32 => r.i32(at) as f64,
            Datatype::Float32 => r.f32(at) as f64,
            Datatype::Float64 => r.f64(at),
        };
        if !raw.is_finite() {
            return Err(Error::NonFiniteVoxel { index: i });
        }
        values.push(if scale { raw * h.scl_slope + inter } else { raw });
    }
    Volume3D::new(h.dims, h.spacing, values)
}

pub fn load_nifti(path: impl AsRef<Path>) -> Result<Volume3D> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

/// Load a mask volume and check it against the volume it annotates.
pub fn load_mask(path: impl AsRef<Path>, reference: &Volume3D) -> Result<RoiMask> {
    let v = load_nifti(path)?;
    if v.dims() != reference.dims() {
        return Err(Error::DimsMismatch {
            expected: reference.dims(),
            found: v.dims(),
        });
    }
    RoiMask::from_volume(&v)
}

/// Encode a volume as little-endian NIfTI-1 with float64 voxels.
///
/// The output depends only on dims, spacing and values, so equal volumes give
/// byte-identical files.
pub fn encode(v: &Volume3D) -> Vec<u8> {
    let mut h = vec![0u8; WRITE_VOX_OFFSET];
    let put_i16 = |h: &mut [u8], at: usize, x: i16| h[at..at + 2].copy_from_slice(&x.to_le_bytes());
    let put_f32 = |h: &mut [u8], at: usize, x: f32| h[at..at + 4].copy_from_slice(&x.to_le_bytes());

    h[0..4].copy_from_slice(&(HEADER_SIZE as i32).to_le_bytes());
    h[38] = b'r';
    let dims = v.dims();
    put_i16(&mut h, 40, 3);
    for a in 0..3 {
        put_i16(&mut h, 42 + 2 * a, dims[a] as i16);
    }
    for k in 4..8 {
        put_i16(&mut h, 40 + 2 * k, 1);
    }
    put_i16(&mut h, 70, Datatype::Float64.code());
    put_i16(&mut h, 72, 64);
    put_f32(&mut h, 76, 1.0);
    let spacing = v.spacing();
    for a in 0..3 {
        put_f32(&mut h, 80 + 4 * a, spacing[a] as f32);
    }
    put_f32(&mut h, 108, WRITE_VOX_OFFSET as f32);
    put_f32(&mut h, 112, 1.0);
    h[123] = 2; // NIFTI_UNITS_MM
    h[148..156].copy_from_slice(b"transfid");
    h[344..348].copy_from_slice(b"n+1\0");

    h.reserve(v.len() * 8);
    for &x in v.values() {
        h.extend_from_slice(&x.to_le_bytes());
    }
    h
}

pub fn write_nifti(path: impl AsRef<Path>, v: &Volume3D) -> Result<()> {
    crate::report::write_atomic(path.as_ref(), &encode(v))
}

/// Write a mask as a 0/1 float64 volume.
pub fn write_mask(path: impl AsRef<Path>, mask: &RoiMask, spacing: [f64; 3]) -> Result<()> {
    let values = mask.flags().iter().map(|&f| if f { 1.0 } else { 0.0 }).collect();
    let v = Volume3D::new(mask.dims(), spacing, values)?;
    write_nifti(path, &v)
}
