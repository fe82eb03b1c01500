//! Report files: feature, metric and group CSVs plus a JSON summary.
//!
//! Floats are written with a fixed number of significant digits so that
//! outputs are byte-stable: 12 for features and correlations, 9 for metrics.
//! NaN is an empty cell. Every file is written to a temporary sibling and
//! renamed into place.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::analysis::{ConcordanceRecord, Group, GroupAssignment, NetworkRanking};
use crate::error::{Error, Result};
use crate::iqa::{MetricSet, MetricSummary};
use crate::radiomics::{catalog, Feature, FeatureId, FeatureVector, Provenance, FEATURE_COUNT};
use crate::stats::TestResult;

/// Write `bytes` to `path` via a temporary file in the same directory.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Format with `digits` significant digits; NaN becomes an empty string.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        String::new()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{:.*e}", digits - 1, x)
    }
}

fn parse_cell(cell: &str) -> std::result::Result<f64, String> {
    if cell.is_empty() {
        return Ok(f64::NAN);
    }
    cell.parse::<f64>().map_err(|_| format!("not a number: {cell:?}"))
}

pub const FEATURE_DIGITS: usize = 12;
pub const METRIC_DIGITS: usize = 9;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub patient_id: String,
    pub source: String,
    pub features: FeatureVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub patient_id: String,
    pub network: String,
    pub metrics: MetricSet,
}

fn csv_bytes(header: Vec<String>, rows: impl Iterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(&header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// `patient_id,source,<186 feature ids>,flags`.
pub fn features_csv(rows: &[FeatureRow]) -> Vec<u8> {
    let mut header = vec!["patient_id".to_string(), "source".to_string()];
    header.extend(catalog().iter().map(|id| id.to_string()));
    header.push("flags".into());
    csv_bytes(
        header,
        rows.iter().map(|r| {
            let mut rec = vec![r.patient_id.clone(), r.source.clone()];
            let mut flags = Vec::new();
            for (id, f) in r.features.entries() {
                rec.push(format_sig(f.value, FEATURE_DIGITS));
                if f.degenerate {
                    flags.push(id.to_string());
                }
            }
            rec.push(flags.join(";"));
            rec
        }),
    )
}

pub fn write_features_csv(path: impl AsRef<Path>, rows: &[FeatureRow]) -> Result<()> {
    write_atomic(path, &features_csv(rows))
}

fn read_records(path: &Path, input: impl std::io::Read) -> Result<(csv::StringRecord, Vec<csv::StringRecord>)> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = r.headers().map_err(|e| Error::csv(path, e))?.clone();
    let records = r
        .records()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::csv(path, e))?;
    Ok((header, records))
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|e| Error::io(path, e))
}

pub fn read_features_csv(path: impl AsRef<Path>) -> Result<Vec<FeatureRow>> {
    let path = path.as_ref();
    parse_features(path, open(path)?)
}

/// Parse an in-memory feature table; `label` names it in errors.
pub fn parse_features_csv(text: &str, label: &str) -> Result<Vec<FeatureRow>> {
    parse_features(Path::new(label), text.as_bytes())
}

fn parse_features(path: &Path, input: impl std::io::Read) -> Result<Vec<FeatureRow>> {
    let (header, records) = read_records(path, input)?;
    let expected = FEATURE_COUNT + 3;
    if header.len() != expected
        || &header[0] != "patient_id"
        || &header[1] != "source"
        || &header[expected - 1] != "flags"
    {
        return Err(Error::csv(path, "unexpected feature table header"));
    }
    for (k, id) in catalog().iter().enumerate() {
        if header[k + 2] != id.to_string() {
            return Err(Error::csv(path, format!("column {} should be {id}", k + 3)));
        }
    }
    let mut rows = Vec::with_capacity(records.len());
    for (line, rec) in records.iter().enumerate() {
        let at = |msg: String| Error::csv(path, format!("row {}: {msg}", line + 2));
        let flagged: Vec<FeatureId> = rec[expected - 1]
            .split(';')
            .filter(|s| !s.is_empty())
            .map(|s| FeatureId::parse(s).ok_or_else(|| at(format!("unknown feature {s:?}"))))
            .collect::<Result<_>>()?;
        let mut values = Vec::with_capacity(FEATURE_COUNT);
        for (k, id) in catalog().iter().enumerate() {
            let value = parse_cell(&rec[k + 2]).map_err(at)?;
            values.push(Feature {
                value,
                degenerate: flagged.contains(id),
            });
        }
        rows.push(FeatureRow {
            patient_id: rec[0].to_string(),
            source: rec[1].to_string(),
            features: FeatureVector::from_values(values, Provenance::default())?,
        });
    }
    Ok(rows)
}

const METRIC_HEADER: [&str; 6] = ["patient_id", "network", "mae", "mse", "ssim", "psnr"];

pub fn metrics_csv(rows: &[MetricRow]) -> Vec<u8> {
    csv_bytes(
        METRIC_HEADER.iter().map(|s| s.to_string()).collect(),
        rows.iter().map(|r| {
            let m = r.metrics;
            vec![
                r.patient_id.clone(),
                r.network.clone(),
                format_sig(m.mae, METRIC_DIGITS),
                format_sig(m.mse, METRIC_DIGITS),
                format_sig(m.ssim, METRIC_DIGITS),
                format_sig(m.psnr, METRIC_DIGITS),
            ]
        }),
    )
}

pub fn write_metrics_csv(path: impl AsRef<Path>, rows: &[MetricRow]) -> Result<()> {
    write_atomic(path, &metrics_csv(rows))
}

pub fn read_metrics_csv(path: impl AsRef<Path>) -> Result<Vec<MetricRow>> {
    let path = path.as_ref();
    let (header, records) = read_records(path, open(path)?)?;
    if header.iter().ne(METRIC_HEADER.iter().copied()) {
        return Err(Error::csv(path, "unexpected metrics table header"));
    }
    records
        .iter()
        .enumerate()
        .map(|(line, rec)| {
            let num = |k: usize| parse_cell(&rec[k]).map_err(|m| Error::csv(path, format!("row {}: {m}", line + 2)));
            Ok(MetricRow {
                patient_id: rec[0].to_string(),
                network: rec[1].to_string(),
                metrics: MetricSet {
                    mae: num(2)?,
                    mse: num(3)?,
                    ssim: num(4)?,
                    psnr: num(5)?,
                },
            })
        })
        .collect()
}

/// `feature_id,group,rho_<net>...,pass_<net>...,anomalous`, one row per
/// feature in catalog order.
pub fn groups_csv(records: &[ConcordanceRecord], groups: &[GroupAssignment]) -> Vec<u8> {
    let networks: Vec<String> = records
        .first()
        .map(|r| r.networks.iter().map(|n| n.network.clone()).collect())
        .unwrap_or_default();
    let mut header = vec!["feature_id".to_string(), "group".to_string()];
    header.extend(networks.iter().map(|n| format!("rho_{n}")));
    header.extend(networks.iter().map(|n| format!("pass_{n}")));
    header.push("anomalous".into());
    csv_bytes(
        header,
        records.iter().zip(groups).map(|(r, g)| {
            let mut rec = vec![r.feature.to_string(), g.group.to_string()];
            rec.extend(r.networks.iter().map(|n| format_sig(n.rho, FEATURE_DIGITS)));
            rec.extend(g.pass.iter().map(|(_, p)| p.to_string()));
            rec.push(g.anomalous.to_string());
            rec
        }),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub metric: String,
    pub network_a: String,
    pub network_b: String,
    pub statistic: f64,
    pub p_value: f64,
    pub df: f64,
    pub degenerate: bool,
}

impl Comparison {
    pub fn new(metric: &str, a: &str, b: &str, t: TestResult) -> Self {
        Self {
            metric: metric.into(),
            network_a: a.into(),
            network_b: b.into(),
            statistic: t.statistic,
            p_value: t.p_value,
            df: t.df,
            degenerate: t.degenerate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub threshold: f64,
    pub top_network: String,
    pub ranking: NetworkRanking,
    pub patients: usize,
    /// Group sizes over all features.
    pub groups: BTreeMap<Group, usize>,
    /// Group sizes per family prefix.
    pub families: BTreeMap<String, BTreeMap<Group, usize>>,
    pub anomalous: usize,
    pub metrics: BTreeMap<String, MetricSummary>,
    pub comparisons: Vec<Comparison>,
    pub warnings: Vec<String>,
}

pub fn group_counts(groups: &[GroupAssignment]) -> (BTreeMap<Group, usize>, BTreeMap<String, BTreeMap<Group, usize>>) {
    let zero = || Group::ALL.into_iter().map(|g| (g, 0)).collect::<BTreeMap<_, _>>();
    let mut total = zero();
    let mut families: BTreeMap<String, BTreeMap<Group, usize>> = BTreeMap::new();
    for g in groups {
        *total.get_mut(&g.group).expect("all groups present") += 1;
        *families
            .entry(g.feature.family.prefix().to_string())
            .or_insert_with(zero)
            .get_mut(&g.group)
            .expect("all groups present") += 1;
    }
    (total, families)
}

/// Pretty JSON with a trailing newline. Non-finite numbers become `null`.
pub fn summary_json(summary: &Summary) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(summary).expect("summary serializes");
    out.push(b'\n');
    out
}
