//! Built-in check against the committed phantom golden files.

use crate::error::{Error, Result};
use crate::phantom::{generate_phantom, Phantom};
use crate::radiomics::{catalog, extract_all, ExtractionConfig, FeatureVector};
use crate::report::parse_features_csv;
use crate::volume::Dims;

pub const GOLDEN_SEED: u64 = 7;
pub const GOLDEN_DIMS: Dims = [16, 16, 16];
pub const GOLDEN_FEATURES: &str = include_str!("../data/phantom_seed7_16.csv");
pub const GOLDEN_CHECKSUM: &str = include_str!("../data/phantom_seed7_16.sha256");

/// Relative tolerance for golden feature values; the file stores 12
/// significant digits.
pub const GOLDEN_TOLERANCE: f64 = 1e-9;

pub fn golden_phantom() -> Phantom {
    generate_phantom(GOLDEN_SEED, GOLDEN_DIMS, [1.0; 3]).expect("golden phantom parameters are valid")
}

/// Features of the golden phantom with the default configuration and no
/// preprocessing.
pub fn golden_extraction() -> Result<FeatureVector> {
    let p = golden_phantom();
    extract_all(&p.volume, &p.mask, &ExtractionConfig::default())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    if a.is_nan() || b.is_nan() {
        return a.is_nan() && b.is_nan();
    }
    a == b || (a - b).abs() <= rel * a.abs().max(b.abs())
}

/// Runs every golden check and returns one entry per check.
pub fn run() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let p = golden_phantom();
    let sum = p.checksum();
    checks.push(Check {
        name: "phantom checksum".into(),
        passed: sum == GOLDEN_CHECKSUM.trim(),
        detail: sum,
    });

    let golden = parse_features_csv(GOLDEN_FEATURES, "golden features")?;
    let expected = golden
        .first()
        .ok_or_else(|| Error::Csv {
            path: "golden features".into(),
            message: "no rows".into(),
        })?
        .features
        .clone();
    let got = extract_all(&p.volume, &p.mask, &ExtractionConfig::default())?;
    let mut bad = Vec::new();
    for (k, id) in catalog().iter().enumerate() {
        let (g, e) = (got.entries()[k].1, expected.entries()[k].1);
        if !close(g.value, e.value, GOLDEN_TOLERANCE) || g.degenerate != e.degenerate {
            bad.push(format!("{id}: {} vs {}", g.value, e.value));
        }
    }
    checks.push(Check {
        name: "golden features".into(),
        passed: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{} features", catalog().len())
        } else {
            bad.join("; ")
        },
    });
    Ok(checks)
}
