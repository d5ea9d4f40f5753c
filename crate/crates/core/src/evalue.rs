//! The e-BH procedure, its randomized variants, and BH.

use crate::error::{check_len, check_unit_closed, check_unit_open_closed, Result};
use crate::order::{asc_order, desc_order};
use crate::rounding::{stochastic_round, Grid};
use crate::types::{Alpha, Discoveries, EValues, PValues};

/// The e-BH rejection level for rank `i`: `K / (alpha i)`.
///
/// Every comparison against an e-BH level and every level placed on the e-BH
/// grid goes through this function, so a value rounded onto a level clears
/// that level exactly.
#[inline]
pub(crate) fn ebh_level(k: usize, i: usize, alpha: f64) -> f64 {
    k as f64 / (alpha * i as f64)
}

/// Output of any procedure in the e-BH family.
#[derive(Debug, Clone, PartialEq)]
pub struct EbhResult {
    pub discoveries: Discoveries,
    pub k_star: usize,
    /// `alpha (k* + 1) / K`.
    pub alpha_hat_star: f64,
    /// The e-values the final step-up pass ran on, for randomized variants.
    pub rounded_values: Option<Vec<f64>>,
}

impl EbhResult {
    fn new(k: usize, alpha: f64, rejected: Vec<usize>, k_star: usize, rounded: Option<Vec<f64>>) -> Self {
        let discoveries = Discoveries::from_indices(rejected, ebh_level(k, k_star + 1, alpha));
        EbhResult {
            discoveries,
            k_star,
            alpha_hat_star: alpha * (k_star + 1) as f64 / k as f64,
            rounded_values: rounded,
        }
    }

    pub fn rejected(&self) -> &[usize] {
        &self.discoveries.rejected
    }
}

/// The e-BH grid `{K/(alpha i) : i in [K]} ∪ {0, inf}`.
#[derive(Debug, Clone)]
pub struct LevelGrid {
    k: usize,
    alpha: f64,
    grid: Grid,
}

impl LevelGrid {
    pub fn new(k: usize, alpha: Alpha) -> Result<Self> {
        if k == 0 {
            return Err(crate::Error::Empty);
        }
        let a = alpha.get();
        let mut levels: Vec<f64> = (1..=k).map(|i| ebh_level(k, i, a)).collect();
        levels.push(0.0);
        levels.push(f64::INFINITY);
        Ok(LevelGrid {
            k,
            alpha: a,
            grid: Grid::new(levels)?,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Sorted order and `k*` of e-BH on raw values.
pub(crate) fn ebh_kstar(x: &[f64], alpha: f64) -> (Vec<usize>, usize) {
    let k = x.len();
    let order = desc_order(x);
    let k_star = (1..=k)
        .rev()
        .find(|&i| x[order[i - 1]] >= ebh_level(k, i, alpha))
        .unwrap_or(0);
    (order, k_star)
}

pub(crate) fn ebh_raw(x: &[f64], alpha: f64) -> EbhResult {
    let k = x.len();
    let (order, k_star) = ebh_kstar(x, alpha);
    let res = EbhResult::new(k, alpha, order[..k_star].to_vec(), k_star, None);
    if k_star < k {
        let t = res.discoveries.threshold;
        debug_assert!(x
            .iter()
            .enumerate()
            .all(|(i, &v)| (v >= t) == res.discoveries.contains(i)));
    }
    res
}

/// e-BH: reject the `k*` largest e-values, `k* = max{i : X_[i] >= K/(alpha i)}`.
pub fn ebh(evals: &EValues, alpha: Alpha) -> EbhResult {
    ebh_raw(evals.as_slice(), alpha.get())
}

fn check_draws(u: &[f64], k: usize, open: bool) -> Result<()> {
    check_len(k, u.len())?;
    for &v in u {
        if open {
            check_unit_open_closed(v, "u")?;
        } else {
            check_unit_closed(v, "u")?;
        }
    }
    Ok(())
}

pub(crate) fn r1_raw(x: &[f64], alpha: f64, grid: &Grid, u: &[f64]) -> EbhResult {
    let rounded: Vec<f64> = x
        .iter()
        .zip(u)
        .map(|(&v, &ui)| stochastic_round(grid, v, ui).value)
        .collect();
    let mut res = ebh_raw(&rounded, alpha);
    res.rounded_values = Some(rounded);
    res
}

/// R1-eBH: e-BH on the e-values stochastically rounded onto the e-BH grid.
pub fn r1_ebh(evals: &EValues, alpha: Alpha, u: &[f64]) -> Result<EbhResult> {
    check_draws(u, evals.len(), false)?;
    let grid = LevelGrid::new(evals.len(), alpha)?;
    Ok(r1_raw(evals.as_slice(), alpha.get(), grid.grid(), u))
}

pub(crate) fn r2_raw(x: &[f64], alpha: f64, u: &[f64]) -> EbhResult {
    let k = x.len();
    let (_, k_star) = ebh_kstar(x, alpha);
    let t = ebh_level(k, k_star + 1, alpha);
    let alpha_hat = alpha * (k_star + 1) as f64 / k as f64;
    let mut rejected = Vec::new();
    let mut rounded = Vec::with_capacity(k);
    for (i, (&v, &ui)) in x.iter().zip(u).enumerate() {
        if v >= t {
            rejected.push(i);
            rounded.push(v);
        } else if v > 0.0 && ui <= alpha_hat * v {
            rejected.push(i);
            rounded.push(t);
        } else {
            rounded.push(0.0);
        }
    }
    EbhResult::new(k, alpha, rejected, k_star, Some(rounded)).with_count()
}

impl EbhResult {
    /// Randomized rules can reject more than `k*` hypotheses; report the count
    /// actually rejected while keeping `alpha_hat_star` from the e-BH pass.
    fn with_count(mut self) -> Self {
        self.k_star = self.discoveries.len();
        self
    }
}

/// R2-eBH: adaptive rounding at the e-BH data-dependent level `alpha_hat*`.
/// Rejects `i` iff `X_i >= 1/alpha_hat*` or `u_i <= alpha_hat* X_i`.
pub fn r2_ebh(evals: &EValues, alpha: Alpha, u: &[f64]) -> Result<EbhResult> {
    check_draws(u, evals.len(), false)?;
    Ok(r2_raw(evals.as_slice(), alpha.get(), u))
}

pub(crate) fn rboth_raw(x: &[f64], alpha: f64, grid: &Grid, u_grid: &[f64], u_adapt: &[f64]) -> EbhResult {
    let k = x.len();
    let step1 = r1_raw(x, alpha, grid, u_grid);
    let rounded = step1.rounded_values.expect("r1 records rounded values");
    let t = ebh_level(k, step1.k_star + 1, alpha);
    let rejected: Vec<usize> = rounded
        .iter()
        .zip(u_adapt)
        .enumerate()
        .filter(|&(_, (&s, &ui))| s > 0.0 && s >= ui * t)
        .map(|(i, _)| i)
        .collect();
    EbhResult::new(k, alpha, rejected, step1.k_star, Some(rounded)).with_count()
}

/// Rboth-eBH: stochastic rounding onto the e-BH grid, then adaptive rounding
/// of the rounded values at the level found by the first pass.
pub fn rboth_ebh(evals: &EValues, alpha: Alpha, u_grid: &[f64], u_adapt: &[f64]) -> Result<EbhResult> {
    check_draws(u_grid, evals.len(), false)?;
    check_draws(u_adapt, evals.len(), false)?;
    let grid = LevelGrid::new(evals.len(), alpha)?;
    Ok(rboth_raw(evals.as_slice(), alpha.get(), grid.grid(), u_grid, u_adapt))
}

/// For each hypothesis, `l(i) = argmax_{j >= rank[i]} j X_[j]` (1-based, largest
/// index on ties), where `rank[i] = #{j : X_j >= X_i}`.
pub fn ell_index(evals: &EValues) -> Vec<usize> {
    let x = evals.as_slice();
    let k = x.len();
    let order = desc_order(x);
    let sorted: Vec<f64> = order.iter().map(|&i| x[i]).collect();
    // best[r] = argmax over j in r..=K of j * X_[j], scanning from the tail.
    let mut best = vec![0usize; k + 2];
    let mut best_val = f64::NEG_INFINITY;
    let mut best_j = k;
    for j in (1..=k).rev() {
        let v = j as f64 * sorted[j - 1];
        if v > best_val {
            best_val = v;
            best_j = j;
        }
        best[j] = best_j;
    }
    x.iter()
        .map(|&xi| {
            let rank = x.iter().filter(|&&xj| xj >= xi).count();
            best[rank]
        })
        .collect()
}

pub(crate) fn scaled_ebh(x: &[f64], alpha: f64, u: impl Fn(usize) -> f64) -> EbhResult {
    let scaled: Vec<f64> = x.iter().enumerate().map(|(i, &v)| v / u(i)).collect();
    let mut res = ebh_raw(&scaled, alpha);
    res.rounded_values = Some(scaled);
    res
}

/// U-eBH: e-BH applied to `X_i / u` with one shared draw `u`.
pub fn u_ebh(evals: &EValues, alpha: Alpha, u: f64) -> Result<EbhResult> {
    check_unit_open_closed(u, "u")?;
    Ok(scaled_ebh(evals.as_slice(), alpha.get(), |_| u))
}

/// U-eBH computed from the rounding view: reject `i` iff
/// `u <= alpha l(i) X_[l(i)] / K`.
pub fn u_ebh_by_ell(evals: &EValues, alpha: Alpha, u: f64) -> Result<Discoveries> {
    check_unit_open_closed(u, "u")?;
    let x = evals.as_slice();
    let k = x.len() as f64;
    let order = desc_order(x);
    let ell = ell_index(evals);
    let rejected = ell
        .iter()
        .enumerate()
        .filter(|&(_, &l)| u <= alpha.get() * l as f64 * x[order[l - 1]] / k)
        .map(|(i, _)| i)
        .collect();
    Ok(Discoveries::from_indices(rejected, f64::NAN))
}

/// J-eBH: e-BH applied to `X_i / u_i` with independent draws, equivalently BH
/// on `u_i / X_i`.
pub fn j_ebh(evals: &EValues, alpha: Alpha, u: &[f64]) -> Result<EbhResult> {
    check_draws(u, evals.len(), true)?;
    Ok(scaled_ebh(evals.as_slice(), alpha.get(), |i| u[i]))
}

/// `M(X, P) = X 1{X >= 1/alpha_hat} ∨ (1/alpha_hat) 1{alpha_hat X >= P}`.
pub fn merge_evalue_pvalue(x: f64, p: f64, alpha_hat: f64) -> f64 {
    let keep = if x >= 1.0 / alpha_hat { x } else { 0.0 };
    let lift = if alpha_hat * x >= p { 1.0 / alpha_hat } else { 0.0 };
    keep.max(lift)
}

pub(crate) fn pe_raw(x: &[f64], p: &[f64], alpha: f64) -> EbhResult {
    let k = x.len();
    let (_, k_star) = ebh_kstar(x, alpha);
    let t = ebh_level(k, k_star + 1, alpha);
    let alpha_hat = alpha * (k_star + 1) as f64 / k as f64;
    let mut rejected = Vec::new();
    let mut merged = Vec::with_capacity(k);
    for (i, (&xi, &pi)) in x.iter().zip(p).enumerate() {
        if xi >= t || pi <= alpha_hat * xi {
            rejected.push(i);
        }
        merged.push(merge_evalue_pvalue(xi, pi, alpha_hat));
    }
    EbhResult::new(k, alpha, rejected, k_star, Some(merged)).with_count()
}

/// Pe-BH: reject `i` iff `X_i >= 1/alpha_hat*` or `P_i <= alpha_hat* X_i`, where
/// `alpha_hat*` comes from e-BH on `X` and `P` is independent of `X`.
pub fn pe_ebh(evals: &EValues, pvals: &PValues, alpha: Alpha) -> Result<EbhResult> {
    check_len(evals.len(), pvals.len())?;
    Ok(pe_raw(evals.as_slice(), pvals.as_slice(), alpha.get()))
}

pub(crate) fn bh_raw(p: &[f64], alpha: f64) -> Discoveries {
    let k = p.len();
    let order = asc_order(p);
    let k_star = (1..=k)
        .rev()
        .find(|&i| p[order[i - 1]] <= alpha * i as f64 / k as f64)
        .unwrap_or(0);
    Discoveries::from_indices(order[..k_star].to_vec(), alpha * k_star as f64 / k as f64)
}

/// Benjamini–Hochberg: reject the `k*` smallest p-values,
/// `k* = max{i : P_(i) <= alpha i / K}`.
pub fn bh(pvals: &PValues, alpha: Alpha) -> Discoveries {
    bh_raw(pvals.as_slice(), alpha.get())
}
