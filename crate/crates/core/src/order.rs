//! Order statistics with a stable, index-based tie order.

use std::cmp::Ordering;

use crate::types::{EValues, PValues};

/// Indices sorted by value, descending; equal values keep ascending index order.
pub(crate) fn desc_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap_or(Ordering::Equal));
    idx
}

/// Indices sorted by value, ascending; equal values keep ascending index order.
pub(crate) fn asc_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(Ordering::Equal));
    idx
}

/// The permutation putting e-values in decreasing order, and the sorted values.
/// `sorted[i]` is the (i+1)-th largest e-value.
pub fn order_statistics_desc(evals: &EValues) -> (Vec<usize>, Vec<f64>) {
    let v = evals.as_slice();
    let order = desc_order(v);
    let sorted = order.iter().map(|&i| v[i]).collect();
    (order, sorted)
}

/// The permutation putting p-values in increasing order, and the sorted values.
pub fn order_statistics_asc(pvals: &PValues) -> (Vec<usize>, Vec<f64>) {
    let v = pvals.as_slice();
    let order = asc_order(v);
    let sorted = order.iter().map(|&i| v[i]).collect();
    (order, sorted)
}
