//! Texture matrices and the emphasis statistics shared by the run-length,
//! zone and dependence families.

use std::collections::BTreeMap;

use crate::numeric::xlog2x;

use super::Feature;

/// Dense symmetric gray-level co-occurrence counts, `ng x ng`, 1-based levels.
#[derive(Debug, Clone, PartialEq)]
pub struct CooccurrenceMatrix {
    ng: usize,
    counts: Vec<f64>,
    pub direction: Option<[i64; 3]>,
}

impl CooccurrenceMatrix {
    pub fn zeros(ng: usize, direction: Option<[i64; 3]>) -> Self {
        Self {
            ng,
            counts: vec![0.0; ng * ng],
            direction,
        }
    }

    pub fn ng(&self) -> usize {
        self.ng
    }

    /// Count for levels `(i, j)`, 1-based.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.counts[(i - 1) * self.ng + (j - 1)]
    }

    pub(crate) fn add(&mut self, i: usize, j: usize, c: f64) {
        self.counts[(i - 1) * self.ng + (j - 1)] += c;
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    pub fn is_symmetric(&self) -> bool {
        (1..=self.ng).all(|i| (1..=self.ng).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub(crate) fn merge(&mut self, other: &CooccurrenceMatrix) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    /// Joint probabilities; `None` when the matrix is empty.
    pub fn normalized(&self) -> Option<Vec<f64>> {
        let total = self.total();
        (total > 0.0).then(|| self.counts.iter().map(|c| c / total).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    RunLength,
    SizeZone,
    DistanceZone,
    Dependence,
}

/// Sparse gray level x column-value counts. Rows are gray levels (from 1);
/// columns are run lengths, zone sizes, zone distances or dependence counts
/// plus one, all from 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoneMatrix {
    pub kind: MatrixKind,
    pub direction: Option<[i64; 3]>,
    cells: BTreeMap<(u32, u32), f64>,
}

impl ZoneMatrix {
    pub fn new(kind: MatrixKind, direction: Option<[i64; 3]>) -> Self {
        Self {
            kind,
            direction,
            cells: BTreeMap::new(),
        }
    }

    pub(crate) fn add(&mut self, level: u32, column: u32, c: f64) {
        debug_assert!(level >= 1 && column >= 1);
        *self.cells.entry((level, column)).or_insert(0.0) += c;
    }

    pub(crate) fn merge(&mut self, other: &ZoneMatrix) {
        for (&k, &c) in &other.cells {
            *self.cells.entry(k).or_insert(0.0) += c;
        }
    }

    pub fn get(&self, level: u32, column: u32) -> f64 {
        self.cells.get(&(level, column)).copied().unwrap_or(0.0)
    }

    /// Nonzero cells as `(level, column, count)`, ordered by level then column.
    pub fn cells(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.cells.iter().map(|(&(i, j), &c)| (i, j, c))
    }

    pub fn total(&self) -> f64 {
        self.cells.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Cell probabilities in `cells()` order.
    pub fn normalized(&self) -> Option<Vec<f64>> {
        let total = self.total();
        (total > 0.0).then(|| self.cells.values().map(|c| c / total).collect())
    }
}

/// Per-level NGTDM entry: `count` voxels with a valid neighbourhood and the
/// summed absolute difference `s` from their neighbourhood means.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NgtdmRow {
    pub level: u32,
    pub count: u64,
    pub s: f64,
}

/// Emphasis-style statistics of a [`ZoneMatrix`], with `i` the gray level
/// and `j` the column value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmphasisStats {
    pub small_emphasis: f64,
    pub large_emphasis: f64,
    pub low_grey_emphasis: f64,
    pub high_grey_emphasis: f64,
    pub small_low_grey_emphasis: f64,
    pub small_high_grey_emphasis: f64,
    pub large_low_grey_emphasis: f64,
    pub large_high_grey_emphasis: f64,
    pub grey_non_uniformity: f64,
    pub grey_non_uniformity_normalised: f64,
    pub column_non_uniformity: f64,
    pub column_non_uniformity_normalised: f64,
    /// `N_s / N_v`.
    pub percentage: f64,
    pub grey_variance: f64,
    pub column_variance: f64,
    pub entropy: f64,
    pub energy: f64,
}

impl EmphasisStats {
    /// `n_voxels` is the denominator of the percentage feature. Returns
    /// `None` for an empty matrix.
    pub fn compute(m: &ZoneMatrix, n_voxels: f64) -> Option<Self> {
        let ns = m.total();
        if ns <= 0.0 {
            return None;
        }
        let mut s = [0.0f64; 8];
        let mut row_sums: BTreeMap<u32, f64> = BTreeMap::new();
        let mut col_sums: BTreeMap<u32, f64> = BTreeMap::new();
        let mut mu_i = 0.0;
        let mut mu_j = 0.0;
        let mut entropy = 0.0;
        let mut energy = 0.0;
        for (i, j, c) in m.cells() {
            let (i2, j2) = ((i as f64).powi(2), (j as f64).powi(2));
            s[0] += c / j2;
            s[1] += c * j2;
            s[2] += c / i2;
            s[3] += c * i2;
            s[4] += c / (i2 * j2);
            s[5] += c * i2 / j2;
            s[6] += c * j2 / i2;
            s[7] += c * i2 * j2;
            *row_sums.entry(i).or_insert(0.0) += c;
            *col_sums.entry(j).or_insert(0.0) += c;
            let p = c / ns;
            mu_i += i as f64 * p;
            mu_j += j as f64 * p;
            entropy -= xlog2x(p);
            energy += p * p;
        }
        let mut var_i = 0.0;
        let mut var_j = 0.0;
        for (i, j, c) in m.cells() {
            let p = c / ns;
            var_i += (i as f64 - mu_i).powi(2) * p;
            var_j += (j as f64 - mu_j).powi(2) * p;
        }
        let gnu: f64 = row_sums.values().map(|r| r * r).sum();
        let cnu: f64 = col_sums.values().map(|r| r * r).sum();
        Some(Self {
            small_emphasis: s[0] / ns,
            large_emphasis: s[1] / ns,
            low_grey_emphasis: s[2] / ns,
            high_grey_emphasis: s[3] / ns,
            small_low_grey_emphasis: s[4] / ns,
            small_high_grey_emphasis: s[5] / ns,
            large_low_grey_emphasis: s[6] / ns,
            large_high_grey_emphasis: s[7] / ns,
            grey_non_uniformity: gnu / ns,
            grey_non_uniformity_normalised: gnu / (ns * ns),
            column_non_uniformity: cnu / ns,
            column_non_uniformity_normalised: cnu / (ns * ns),
            percentage: ns / n_voxels,
            grey_variance: var_i,
            column_variance: var_j,
            entropy,
            energy,
        })
    }

    /// Values in the order of the 16 shared run/zone feature slots:
    /// small, large, low grey, high grey, small-low, small-high, large-low,
    /// large-high, GLNU, GLNU-N, column NU, column NU-N, percentage,
    /// grey variance, column variance, entropy.
    pub fn sixteen(&self) -> [f64; 16] {
        [
            self.small_emphasis,
            self.large_emphasis,
            self.low_grey_emphasis,
            self.high_grey_emphasis,
            self.small_low_grey_emphasis,
            self.small_high_grey_emphasis,
            self.large_low_grey_emphasis,
            self.large_high_grey_emphasis,
            self.grey_non_uniformity,
            self.grey_non_uniformity_normalised,
            self.column_non_uniformity,
            self.column_non_uniformity_normalised,
            self.percentage,
            self.grey_variance,
            self.column_variance,
            self.entropy,
        ]
    }
}

/// Pick `values` (laid out as `slot_names`) into the order of `names`.
pub(crate) fn arrange<const N: usize>(
    names: &[&'static str; N],
    slot_names: &[&str],
    values: &[f64],
) -> [Feature; N] {
    std::array::from_fn(|k| {
        let slot = slot_names
            .iter()
            .position(|&n| n == names[k])
            .unwrap_or_else(|| panic!("no slot for {}", names[k]));
        Feature::checked(values[slot])
    })
}
