//! Fixtures shared by the benchmarks.

use transfid_core::phantom::{generate_phantom, Phantom};

/// Seeded phantom with its ellipsoidal ROI.
pub fn fixture(dims: [usize; 3]) -> Phantom {
    generate_phantom(11, dims, [1.0, 1.0, 1.0]).expect("valid phantom dims")
}
