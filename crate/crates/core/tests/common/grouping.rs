//! Randomized concordance tables and the grouping rules checked on them.

use rand::seq::SliceRandom;
use rand::Rng;
use transfid_core::analysis::{classify_groups, ConcordanceRecord, NetworkConcordance};
use transfid_core::radiomics::catalog;
use transfid_core::Group;

pub const THRESHOLD: f64 = 0.5;

fn random_rho(rng: &mut impl Rng) -> f64 {
    match rng.gen_range(0..10) {
        0 => THRESHOLD,
        1 => f64::NAN,
        2 => 0.5 + 1e-12,
        _ => rng.gen_range(-1.0..=1.0),
    }
}

/// 186 records over `networks` networks; returns the table and the chosen
/// top network.
pub fn random_table(rng: &mut impl Rng) -> (Vec<ConcordanceRecord>, String) {
    let n = rng.gen_range(1..=7);
    let names: Vec<String> = (0..n).map(|k| format!("net{k}")).collect();
    let records = catalog()
        .iter()
        .map(|&feature| ConcordanceRecord {
            feature,
            networks: names
                .iter()
                .map(|name| {
                    let rho = random_rho(rng);
                    NetworkConcordance {
                        network: name.clone(),
                        rho,
                        n_effective: 10,
                        degenerate: rho.is_nan(),
                    }
                })
                .collect(),
        })
        .collect();
    let top = names.choose(rng).unwrap().clone();
    (records, top)
}

fn rank(g: Group) -> u8 {
    match g {
        Group::Group1 => 1,
        Group::Group2 => 2,
        Group::Group3 => 3,
    }
}

/// Checks partition, threshold, majority, monotonicity and network-order
/// invariance on one table. Returns a description of the first violation.
pub fn check_table(records: &[ConcordanceRecord], top: &str, rng: &mut impl Rng) -> Result<(), String> {
    let groups = classify_groups(records, top, THRESHOLD).map_err(|e| e.to_string())?;
    if groups.len() != records.len() {
        return Err(format!("{} assignments for {} features", groups.len(), records.len()));
    }
    let sizes: usize = Group::ALL.iter().map(|g| groups.iter().filter(|a| a.group == *g).count()).sum();
    if sizes != catalog().len() {
        return Err(format!("group sizes sum to {sizes}"));
    }
    for (r, a) in records.iter().zip(&groups) {
        if a.feature != r.feature {
            return Err(format!("order changed at {}", r.feature));
        }
        let passes: Vec<bool> = r.networks.iter().map(|n| n.rho > THRESHOLD).collect();
        for (n, (name, p)) in r.networks.iter().zip(&a.pass) {
            if *name != n.network || *p != (n.rho > THRESHOLD) {
                return Err(format!("{}: pass flag wrong for rho {}", r.feature, n.rho));
            }
        }
        let count = passes.iter().filter(|p| **p).count();
        let top_pass = r.networks.iter().any(|n| n.network == top && n.rho > THRESHOLD);
        let expected = if 2 * count > passes.len() {
            Group::Group1
        } else if top_pass {
            Group::Group2
        } else {
            Group::Group3
        };
        if a.group != expected {
            return Err(format!("{}: {} expected {expected}", r.feature, a.group));
        }
        if a.anomalous != (expected == Group::Group3 && count > 0) {
            return Err(format!("{}: anomalous flag wrong", r.feature));
        }
    }

    // Raising one rho never makes a feature worse.
    let mut raised = records.to_vec();
    for r in raised.iter_mut() {
        let k = rng.gen_range(0..r.networks.len());
        let old = r.networks[k].rho;
        r.networks[k].rho = if old.is_nan() { rng.gen_range(-1.0..=1.0) } else { rng.gen_range(old..=1.0) };
    }
    let after = classify_groups(&raised, top, THRESHOLD).map_err(|e| e.to_string())?;
    for (b, a) in groups.iter().zip(&after) {
        if rank(a.group) > rank(b.group) {
            return Err(format!("{}: raising rho moved {} to {}", b.feature, b.group, a.group));
        }
    }

    // Network order within a record is irrelevant.
    let mut shuffled = records.to_vec();
    for r in shuffled.iter_mut() {
        r.networks.shuffle(rng);
    }
    let again = classify_groups(&shuffled, top, THRESHOLD).map_err(|e| e.to_string())?;
    for (x, y) in groups.iter().zip(&again) {
        if x.group != y.group || x.anomalous != y.anomalous {
            return Err(format!("{}: depends on network order", x.feature));
        }
    }
    Ok(())
}
