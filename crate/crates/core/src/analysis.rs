//! Cohort assembly, per-feature concordance and group classification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::iqa::{compute_metrics, MetricSet};
use crate::manifest::{network_name, PatientRecord, ORIGINAL_SOURCE};
use crate::nifti::{load_mask, load_nifti};
use crate::numeric::mean;
use crate::radiomics::{catalog, extract_all, FeatureId, FeatureVector};
use crate::report::{FeatureRow, MetricRow};
use crate::stats::{paired_t_test, spearman_rho, PairedSample, TestResult};

/// Everything computed for one patient.
#[derive(Debug, Clone, PartialEq)]
pub struct PatientCells {
    pub patient_id: String,
    /// Feature vectors by source name, including `original_mri`.
    pub features: BTreeMap<String, FeatureVector>,
    /// Metrics of each synthetic image against the original, by network name.
    pub metrics: BTreeMap<String, MetricSet>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CohortTable {
    patients: Vec<PatientCells>,
    /// Network name to source name.
    networks: BTreeMap<String, String>,
    warnings: Vec<String>,
}

impl CohortTable {
    pub fn new(patients: Vec<PatientCells>, warnings: Vec<String>) -> Result<Self> {
        let mut networks: BTreeMap<String, String> = BTreeMap::new();
        let mut seen = BTreeSet::new();
        for p in &patients {
            if !seen.insert(p.patient_id.as_str()) {
                return Err(Error::DuplicateEntry {
                    patient: p.patient_id.clone(),
                    source_name: String::new(),
                });
            }
            for source in p.features.keys().filter(|s| s.as_str() != ORIGINAL_SOURCE) {
                register(&mut networks, network_name(source), source)?;
            }
            for net in p.metrics.keys() {
                if !networks.contains_key(net) {
                    networks.insert(net.clone(), format!("synth_{net}"));
                }
            }
        }
        Ok(Self {
            patients,
            networks,
            warnings,
        })
    }

    /// Assemble from report rows. Patient order is first appearance in
    /// `features`, then in `metrics`.
    pub fn from_rows(features: Vec<FeatureRow>, metrics: Vec<MetricRow>) -> Result<Self> {
        let mut order: Vec<String> = Vec::new();
        let mut cells: BTreeMap<String, PatientCells> = BTreeMap::new();
        let ids = features.iter().map(|r| &r.patient_id).chain(metrics.iter().map(|r| &r.patient_id));
        for id in ids {
            if !cells.contains_key(id) {
                order.push(id.clone());
                cells.insert(
                    id.clone(),
                    PatientCells {
                        patient_id: id.clone(),
                        features: BTreeMap::new(),
                        metrics: BTreeMap::new(),
                    },
                );
            }
        }
        for row in features {
            let c = cells.get_mut(&row.patient_id).expect("slot created");
            if c.features.insert(row.source.clone(), row.features).is_some() {
                return Err(Error::DuplicateEntry {
                    patient: row.patient_id,
                    source_name: row.source,
                });
            }
        }
        for row in metrics {
            let c = cells.get_mut(&row.patient_id).expect("slot created");
            if c.metrics.insert(row.network.clone(), row.metrics).is_some() {
                return Err(Error::DuplicateEntry {
                    patient: row.patient_id,
                    source_name: row.network,
                });
            }
        }
        let patients = order.into_iter().map(|id| cells.remove(&id).expect("present")).collect();
        Self::new(patients, Vec::new())
    }

    pub fn patients(&self) -> &[PatientCells] {
        &self.patients
    }

    pub fn len(&self) -> usize {
        self.patients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patients.is_empty()
    }

    /// Network names in sorted order.
    pub fn networks(&self) -> Vec<String> {
        self.networks.keys().cloned().collect()
    }

    pub fn source_of(&self, network: &str) -> Option<&str> {
        self.networks.get(network).map(String::as_str)
    }

    /// Patients excluded while building, one message each.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Feature rows in patient order; `original_mri` first, then synthetic
    /// sources by name.
    pub fn feature_rows(&self) -> Vec<FeatureRow> {
        let mut rows = Vec::new();
        for p in &self.patients {
            let mut sources: Vec<&String> = p.features.keys().collect();
            sources.sort_by_key(|s| (s.as_str() != ORIGINAL_SOURCE, s.as_str()));
            for s in sources {
                rows.push(FeatureRow {
                    patient_id: p.patient_id.clone(),
                    source: s.clone(),
                    features: p.features[s].clone(),
                });
            }
        }
        rows
    }

    /// Metric rows in patient order, then network name.
    pub fn metric_rows(&self) -> Vec<MetricRow> {
        let mut rows = Vec::new();
        for p in &self.patients {
            for (net, m) in &p.metrics {
                rows.push(MetricRow {
                    patient_id: p.patient_id.clone(),
                    network: net.clone(),
                    metrics: *m,
                });
            }
        }
        rows
    }

    /// Per-patient metric values for one network, in patient order.
    pub fn metric_values(&self, network: &str) -> Vec<MetricSet> {
        self.patients
            .iter()
            .filter_map(|p| p.metrics.get(network).copied())
            .collect()
    }
}

fn register(networks: &mut BTreeMap<String, String>, net: &str, source: &str) -> Result<()> {
    match networks.get(net) {
        Some(existing) if existing != source => Err(Error::Config(format!(
            "sources {existing:?} and {source:?} both map to network {net:?}"
        ))),
        Some(_) => Ok(()),
        None => {
            networks.insert(net.to_string(), source.to_string());
            Ok(())
        }
    }
}

/// Which outputs [`build_cohort`] computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stages {
    pub features: bool,
    pub metrics: bool,
}

impl Stages {
    pub const ALL: Stages = Stages {
        features: true,
        metrics: true,
    };
    pub const FEATURES: Stages = Stages {
        features: true,
        metrics: false,
    };
    pub const METRICS: Stages = Stages {
        features: false,
        metrics: true,
    };
}

/// Load, preprocess and evaluate every patient. Patients run concurrently on
/// `jobs` threads (0 = one per CPU); results keep manifest order. A patient
/// whose files fail to load or process is dropped with a warning.
pub fn build_cohort(records: &[PatientRecord], cfg: &RunConfig, jobs: usize, stages: Stages) -> Result<CohortTable> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<PatientCells>> =
        pool.install(|| records.par_iter().map(|r| process_patient(r, cfg, stages)).collect());

    let mut patients = Vec::new();
    let mut warnings = Vec::new();
    for (r, res) in records.iter().zip(results) {
        match res {
            Ok(cells) => patients.push(cells),
            Err(e) => warnings.push(format!("patient {}: excluded: {e}", r.patient_id)),
        }
    }
    if patients.is_empty() {
        return Err(Error::EmptyInput);
    }
    CohortTable::new(patients, warnings)
}

fn process_patient(r: &PatientRecord, cfg: &RunConfig, stages: Stages) -> Result<PatientCells> {
    let original = load_nifti(r.original_path())?;
    let mask = load_mask(&r.mask_path, &original)?;
    let (orig_pp, mask_pp) = cfg.preprocess.apply(&original, &mask)?;
    let extraction = cfg.extraction();
    let metric_opts = cfg.metric_options();

    let mut features = BTreeMap::new();
    let mut metrics = BTreeMap::new();
    if stages.features {
        features.insert(ORIGINAL_SOURCE.to_string(), extract_all(&orig_pp, &mask_pp, &extraction)?);
    }
    for (source, path) in r.synthetic_sources() {
        let synth = load_nifti(path)?;
        if synth.dims() != original.dims() {
            return Err(Error::DimsMismatch {
                expected: original.dims(),
                found: synth.dims(),
            });
        }
        let (synth_pp, _) = cfg.preprocess.apply(&synth, &mask)?;
        if stages.features {
            features.insert(source.to_string(), extract_all(&synth_pp, &mask_pp, &extraction)?);
        }
        if stages.metrics {
            metrics.insert(
                network_name(source).to_string(),
                compute_metrics(&orig_pp, &synth_pp, &mask_pp, &metric_opts)?,
            );
        }
    }
    Ok(PatientCells {
        patient_id: r.patient_id.clone(),
        features,
        metrics,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkConcordance {
    pub network: String,
    pub rho: f64,
    /// Patients with finite values on both sides.
    pub n_effective: usize,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcordanceRecord {
    pub feature: FeatureId,
    /// One entry per network, in network name order.
    pub networks: Vec<NetworkConcordance>,
}

impl ConcordanceRecord {
    pub fn rho(&self, network: &str) -> Option<f64> {
        self.networks.iter().find(|n| n.network == network).map(|n| n.rho)
    }
}

/// Spearman rho across patients between original and synthetic values of
/// each feature, for every network.
pub fn concordance(table: &CohortTable) -> Result<Vec<ConcordanceRecord>> {
    if table.len() < 2 {
        return Err(Error::CohortTooSmall(table.len()));
    }
    let networks = table.networks();
    let mut out = Vec::with_capacity(catalog().len());
    for (k, &feature) in catalog().iter().enumerate() {
        let mut per_net = Vec::with_capacity(networks.len());
        for net in &networks {
            let source = table.source_of(net).expect("listed network");
            let (mut x, mut y) = (Vec::new(), Vec::new());
            for p in table.patients() {
                let (Some(o), Some(s)) = (p.features.get(ORIGINAL_SOURCE), p.features.get(source)) else {
                    continue;
                };
                let (a, b) = (o.value_at(k), s.value_at(k));
                if a.is_finite() && b.is_finite() {
                    x.push(a);
                    y.push(b);
                }
            }
            let n = x.len();
            let (rho, degenerate) = match PairedSample::new(x, y) {
                Ok(s) => {
                    let c = spearman_rho(&s);
                    (c.rho, c.degenerate)
                }
                Err(_) => (f64::NAN, true),
            };
            per_net.push(NetworkConcordance {
                network: net.clone(),
                rho,
                n_effective: n,
                degenerate,
            });
        }
        out.push(ConcordanceRecord {
            feature,
            networks: per_net,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkScore {
    pub network: String,
    pub mean_ssim: f64,
    pub mean_mae: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkRanking {
    /// Best first.
    pub order: Vec<NetworkScore>,
    pub top_network: String,
}

/// Sort networks by mean SSIM (descending), then mean MAE (ascending), then
/// name. Networks without metrics are ranked last.
pub fn rank_networks(table: &CohortTable) -> Result<NetworkRanking> {
    let mut order: Vec<NetworkScore> = table
        .networks()
        .into_iter()
        .map(|net| {
            let m = table.metric_values(&net);
            let ssim: Vec<f64> = m.iter().map(|s| s.ssim).collect();
            let mae: Vec<f64> = m.iter().map(|s| s.mae).collect();
            NetworkScore {
                mean_ssim: if m.is_empty() { f64::NAN } else { mean(&ssim) },
                mean_mae: if m.is_empty() { f64::NAN } else { mean(&mae) },
                n: m.len(),
                network: net,
            }
        })
        .collect();
    if order.is_empty() {
        return Err(Error::EmptyInput);
    }
    let key = |x: f64, worst: f64| if x.is_nan() { worst } else { x };
    order.sort_by(|a, b| {
        key(b.mean_ssim, f64::NEG_INFINITY)
            .total_cmp(&key(a.mean_ssim, f64::NEG_INFINITY))
            .then(key(a.mean_mae, f64::INFINITY).total_cmp(&key(b.mean_mae, f64::INFINITY)))
            .then_with(|| a.network.cmp(&b.network))
    });
    let top_network = order[0].network.clone();
    Ok(NetworkRanking { order, top_network })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Group {
    Group1,
    Group2,
    Group3,
}

impl Group {
    pub const ALL: [Group; 3] = [Group::Group1, Group::Group2, Group::Group3];

    pub fn as_str(self) -> &'static str {
        match self {
            Group::Group1 => "Group1",
            Group::Group2 => "Group2",
            Group::Group3 => "Group3",
        }
    }

    pub fn parse(s: &str) -> Option<Group> {
        Group::ALL.into_iter().find(|g| g.as_str() == s)
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupAssignment {
    pub feature: FeatureId,
    pub group: Group,
    /// `(network, rho > threshold)` in record order.
    pub pass: Vec<(String, bool)>,
    pub top_network: String,
    /// Group3 features that some non-top network still discovers.
    pub anomalous: bool,
}

impl GroupAssignment {
    pub fn pass_count(&self) -> usize {
        self.pass.iter().filter(|(_, p)| *p).count()
    }
}

/// Group1 when a strict majority of networks discover the feature, Group2
/// when the top network does, Group3 otherwise. NaN never passes.
pub fn classify_groups(
    records: &[ConcordanceRecord],
    top_network: &str,
    threshold: f64,
) -> Result<Vec<GroupAssignment>> {
    let mut out = Vec::with_capacity(records.len());
    for r in records {
        if !r.networks.iter().any(|n| n.network == top_network) {
            return Err(Error::UnknownTopNetwork(top_network.to_string()));
        }
        let pass: Vec<(String, bool)> = r
            .networks
            .iter()
            .map(|n| (n.network.clone(), n.rho > threshold))
            .collect();
        let count = pass.iter().filter(|(_, p)| *p).count();
        let top_passes = pass.iter().any(|(n, p)| *p && n == top_network);
        let group = if 2 * count > pass.len() {
            Group::Group1
        } else if top_passes {
            Group::Group2
        } else {
            Group::Group3
        };
        out.push(GroupAssignment {
            feature: r.feature,
            group,
            anomalous: group == Group::Group3 && count > 0,
            pass,
            top_network: top_network.to_string(),
        });
    }
    Ok(out)
}

/// Paired t-test of one metric between two networks over the patients that
/// have both.
pub fn compare_networks(table: &CohortTable, metric: &str, a: &str, b: &str) -> Result<TestResult> {
    if !MetricSet::NAMES.contains(&metric) {
        return Err(Error::UnknownMetric(metric.to_string()));
    }
    for net in [a, b] {
        if table.source_of(net).is_none() {
            return Err(Error::UnknownNetwork(net.to_string()));
        }
    }
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for p in table.patients() {
        if let (Some(ma), Some(mb)) = (p.metrics.get(a), p.metrics.get(b)) {
            x.push(ma.get(metric)?);
            y.push(mb.get(metric)?);
        }
    }
    Ok(paired_t_test(&PairedSample::new(x, y)?))
}
