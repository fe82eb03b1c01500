//! Rank correlation, paired t-test and descriptive statistics.

use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;

/// Equal-length paired observations with `n >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl PairedSample {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidVolume(format!(
                "paired sample lengths differ: {} vs {}",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::TooFewSamples(x.len()));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidVolume("paired sample contains non-finite values".into()));
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn swapped(&self) -> Self {
        Self {
            x: self.y.clone(),
            y: self.x.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub rho: f64,
    /// Set when the coefficient is undefined (a constant side); `rho` is NaN.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub df: f64,
    /// Zero-variance differences with a nonzero mean: `statistic` is infinite.
    pub degenerate: bool,
}

/// Average ranks, doubled so that tied ranks stay integral.
///
/// A run of ties occupying 1-based positions `a..=b` gets `a + b`.
pub fn doubled_ranks(values: &[f64]) -> Vec<i64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0i64; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let r = (start + 1 + end) as i64;
        for &k in &order[start..end] {
            ranks[k] = r;
        }
        start = end;
    }
    ranks
}

/// Average (fractional) ranks, 1-based.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    doubled_ranks(values).into_iter().map(|r| r as f64 / 2.0).collect()
}

/// Spearman's rho as the Pearson correlation of average ranks.
///
/// Centered doubled ranks are integers, so the covariance and variances are
/// exact; perfectly monotone data therefore gives exactly +1 or -1.
pub fn spearman_rho(s: &PairedSample) -> Correlation {
    let n = s.len() as i64;
    let center = |r: Vec<i64>| -> Vec<i64> { r.into_iter().map(|r| r - (n + 1)).collect() };
    let rx = center(doubled_ranks(s.x()));
    let ry = center(doubled_ranks(s.y()));
    let mut cov: i128 = 0;
    let mut vx: i128 = 0;
    let mut vy: i128 = 0;
    for (&a, &b) in rx.iter().zip(&ry) {
        cov += a as i128 * b as i128;
        vx += a as i128 * a as i128;
        vy += b as i128 * b as i128;
    }
    if vx == 0 || vy == 0 {
        return Correlation {
            rho: f64::NAN,
            degenerate: true,
        };
    }
    let rho = if vx == vy {
        cov as f64 / vx as f64
    } else {
        cov as f64 / ((vx as f64).sqrt() * (vy as f64).sqrt())
    };
    Correlation {
        rho: rho.clamp(-1.0, 1.0),
        degenerate: false,
    }
}

/// Sample mean and standard deviation (`n - 1` denominator; NaN for `n = 1`).
pub fn mean_std(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = values.len() as f64;
    let mean = pairwise_sum(values) / n;
    if values.len() == 1 {
        return Ok((mean, f64::NAN));
    }
    let sq: Vec<f64> = values.iter().map(|&v| (v - mean) * (v - mean)).collect();
    Ok((mean, (pairwise_sum(&sq) / (n - 1.0)).sqrt()))
}

/// Two-sided paired t-test on `x - y`.
pub fn paired_t_test(s: &PairedSample) -> TestResult {
    let d: Vec<f64> = s.x().iter().zip(s.y()).map(|(a, b)| a - b).collect();
    let n = d.len() as f64;
    let df = n - 1.0;
    if d.iter().all(|&v| v == 0.0) {
        return TestResult {
            statistic: 0.0,
            p_value: 1.0,
            df,
            degenerate: false,
        };
    }
    let (mean, sd) = mean_std(&d).expect("n >= 2");
    if sd == 0.0 {
        return TestResult {
            statistic: f64::INFINITY.copysign(mean),
            p_value: 0.0,
            df,
            degenerate: true,
        };
    }
    let t = mean / (sd / n.sqrt());
    TestResult {
        statistic: t,
        p_value: student_t_two_sided_p(t, df),
        df,
        degenerate: false,
    }
}

/// `P(|T| >= |t|)` for Student's t with `df` degrees of freedom.
pub fn student_t_two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let x = df / (df + t * t);
    beta_reg(df / 2.0, 0.5, x).clamp(0.0, 1.0)
}
