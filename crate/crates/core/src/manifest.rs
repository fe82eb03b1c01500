//! Cohort manifest: a CSV with columns `patient_id,source,path`.
//!
//! The `original_mri` source is the reference image, `mask` holds the ROI and
//! every other source is a synthetic image. Relative paths resolve against
//! the manifest's directory.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};

pub const ORIGINAL_SOURCE: &str = "original_mri";
pub const MASK_SOURCE: &str = "mask";
pub const SYNTH_PREFIX: &str = "synth_";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatientRecord {
    pub patient_id: String,
    /// Source name to image path. Always contains `original_mri` and at least
    /// one synthetic source.
    pub source_paths: BTreeMap<String, PathBuf>,
    pub mask_path: PathBuf,
}

impl PatientRecord {
    pub fn original_path(&self) -> &Path {
        &self.source_paths[ORIGINAL_SOURCE]
    }

    /// Synthetic sources in name order.
    pub fn synthetic_sources(&self) -> impl Iterator<Item = (&str, &Path)> {
        self.source_paths
            .iter()
            .filter(|(s, _)| s.as_str() != ORIGINAL_SOURCE)
            .map(|(s, p)| (s.as_str(), p.as_path()))
    }
}

/// Network name for a synthetic source: the source name without `synth_`.
pub fn network_name(source: &str) -> &str {
    source.strip_prefix(SYNTH_PREFIX).unwrap_or(source)
}

#[derive(Debug, Deserialize)]
struct Row {
    patient_id: String,
    source: String,
    path: String,
}

pub fn parse_manifest(path: impl AsRef<Path>) -> Result<Vec<PatientRecord>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new(""));
    parse_manifest_str(&text, base).map_err(|e| match e {
        Error::Csv { message, .. } => Error::csv(path, message),
        other => other,
    })
}

/// Parse manifest text; relative paths are joined onto `base`.
pub fn parse_manifest_str(text: &str, base: &Path) -> Result<Vec<PatientRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut order: Vec<String> = Vec::new();
    let mut by_patient: HashMap<String, (BTreeMap<String, PathBuf>, Option<PathBuf>)> =
        HashMap::new();

    for row in reader.deserialize::<Row>() {
        let row = row.map_err(|e| Error::csv("<manifest>", e))?;
        if row.patient_id.is_empty() || row.source.is_empty() {
            return Err(Error::csv("<manifest>", "empty patient_id or source"));
        }
        let p = PathBuf::from(&row.path);
        let p = if p.is_absolute() { p } else { base.join(p) };

        let entry = by_patient.entry(row.patient_id.clone()).or_insert_with(|| {
            order.push(row.patient_id.clone());
            (BTreeMap::new(), None)
        });
        let duplicate = if row.source == MASK_SOURCE {
            entry.1.replace(p).is_some()
        } else {
            entry.0.insert(row.source.clone(), p).is_some()
        };
        if duplicate {
            return Err(Error::DuplicateEntry {
                patient: row.patient_id,
                source_name: row.source,
            });
        }
    }

    order
        .into_iter()
        .map(|id| {
            let (sources, mask) = by_patient.remove(&id).expect("patient recorded in order");
            if !sources.contains_key(ORIGINAL_SOURCE) {
                return Err(Error::MissingOriginal(id));
            }
            if sources.len() < 2 {
                return Err(Error::MissingSynthetic(id));
            }
            let mask_path = mask.ok_or_else(|| Error::MissingMask(id.clone()))?;
            Ok(PatientRecord {
                patient_id: id,
                source_paths: sources,
                mask_path,
            })
        })
        .collect()
}
