//! Small numeric helpers shared by the metric and feature code.

const PAIRWISE_BLOCK: usize = 64;

/// Pairwise (cascade) summation. The split points depend only on the length,
/// so the result is reproducible for a given input order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_BLOCK {
        let mut acc = 0.0;
        for &v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Pairwise sum of `f(x)` over `values`, without allocating the mapped slice
/// for short inputs.
pub fn pairwise_sum_by<T>(values: &[T], f: &impl Fn(&T) -> f64) -> f64 {
    if values.len() <= PAIRWISE_BLOCK {
        let mut acc = 0.0;
        for v in values {
            acc += f(v);
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum_by(&values[..mid], f) + pairwise_sum_by(&values[mid..], f)
}

pub fn mean(values: &[f64]) -> f64 {
    pairwise_sum(values) / values.len() as f64
}

/// `x * log2(x)` with the `0 log 0 = 0` convention.
#[inline]
pub fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}
