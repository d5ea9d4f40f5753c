//! Global null tests: Hommel and U-Hommel merged p-values, their closed-testing
//! shortcuts, brute-force closed testing, and dual-form p-merging.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, check_unit_open_closed, domain, Result};
use crate::harmonic::{harmonic_unchecked, HarmonicTable};
use crate::order::asc_order;
use crate::pvalue::{by_calibrate_with, floor_cap};
use crate::types::{Alpha, Discoveries, PValues};

/// A merged p-value, capped at 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MergedP {
    pub value: f64,
    pub randomized: bool,
    pub u_used: Option<f64>,
}

impl MergedP {
    fn plain(value: f64) -> Self {
        MergedP {
            value: value.min(1.0),
            randomized: false,
            u_used: None,
        }
    }

    fn with_u(value: f64, u: f64) -> Self {
        MergedP {
            value: value.min(1.0),
            randomized: true,
            u_used: Some(u),
        }
    }
}

/// Hommel level `alpha j / (m l_m)` for the `j`-th smallest of `m` p-values.
#[inline]
fn hommel_level(alpha: f64, m: usize, j: usize, ell_m: f64) -> f64 {
    alpha * j as f64 / (m as f64 * ell_m)
}

fn sorted(p: &[f64]) -> Vec<f64> {
    asc_order(p).into_iter().map(|i| p[i]).collect()
}

/// `min_i P_(i) K l_K / i`.
pub fn hommel_p(pvals: &PValues) -> MergedP {
    MergedP::plain(hommel_raw(pvals.as_slice(), |i| i))
}

/// `min_i P_(i) K l_K / (floor(i/u) ∧ K)`.
pub fn u_hommel_p(pvals: &PValues, u: f64) -> Result<MergedP> {
    check_unit_open_closed(u, "u")?;
    let k = pvals.len();
    Ok(MergedP::with_u(
        hommel_raw(pvals.as_slice(), |i| floor_cap(i as f64 / u, k)),
        u,
    ))
}

pub(crate) fn hommel_raw(p: &[f64], denom: impl Fn(usize) -> usize) -> f64 {
    let k = p.len();
    let scale = k as f64 * harmonic_unchecked(k);
    sorted(p)
        .iter()
        .enumerate()
        .map(|(i, &q)| q * scale / denom(i + 1) as f64)
        .fold(f64::INFINITY, f64::min)
}

/// Hommel's local test on the p-values of one intersection hypothesis:
/// rejects iff `P_(j) <= alpha j / (m l_m)` for some `j`.
pub fn hommel_local_test(p_sub: &[f64], alpha: f64) -> bool {
    local_test(p_sub, alpha, |j, _| j)
}

/// The randomized local test with levels `alpha (floor(j/u) ∧ m) / (m l_m)`.
pub fn u_hommel_local_test(p_sub: &[f64], alpha: f64, u: f64) -> bool {
    local_test(p_sub, alpha, |j, m| floor_cap(j as f64 / u, m))
}

fn local_test(p_sub: &[f64], alpha: f64, numer: impl Fn(usize, usize) -> usize) -> bool {
    let m = p_sub.len();
    if m == 0 {
        return false;
    }
    let ell = harmonic_unchecked(m);
    sorted(p_sub)
        .iter()
        .enumerate()
        .any(|(j, &q)| q <= hommel_level(alpha, m, numer(j + 1, m), ell))
}

/// Largest intersection size `i` whose Hommel test does not reject the `i`
/// largest p-values, or `None` when every intersection is rejected.
fn closed_h(sorted_p: &[f64], alpha: f64, table: &HarmonicTable, numer: impl Fn(usize, usize) -> usize) -> Option<usize> {
    let k = sorted_p.len();
    (1..=k).rev().find(|&i| {
        let ell = table.get(i);
        (1..=i).all(|j| sorted_p[k - i + j - 1] > hommel_level(alpha, i, numer(j, i), ell))
    })
}

fn closed_shortcut(p: &[f64], alpha: f64, numer: impl Fn(usize, usize) -> usize + Copy) -> Discoveries {
    let k = p.len();
    let table = HarmonicTable::new(k).expect("nonempty");
    let sp = sorted(p);
    match closed_h(&sp, alpha, &table, numer) {
        None => Discoveries::from_indices((0..k).collect(), f64::INFINITY),
        Some(h) => {
            let t = hommel_level(alpha, h, numer(1, h), table.get(h));
            let rejected = (0..k).filter(|&i| p[i] <= t).collect();
            Discoveries::from_indices(rejected, t)
        }
    }
}

/// Closed testing with Hommel local tests, via the `h(alpha)` shortcut.
/// When every intersection is rejected, all hypotheses are rejected.
pub fn closed_hommel(pvals: &PValues, alpha: Alpha) -> Discoveries {
    closed_shortcut(pvals.as_slice(), alpha.get(), |j, _| j)
}

/// Closed testing with U-Hommel local tests sharing one draw `u`, via the
/// `h_U(alpha)` shortcut.
pub fn closed_u_hommel(pvals: &PValues, alpha: Alpha, u: f64) -> Result<Discoveries> {
    check_unit_open_closed(u, "u")?;
    Ok(closed_shortcut(pvals.as_slice(), alpha.get(), move |j, m| {
        floor_cap(j as f64 / u, m)
    }))
}

/// Largest family accepted by [`closed_testing_bruteforce`].
pub const BRUTEFORCE_MAX_K: usize = 20;

/// Closed testing by enumerating all `2^K - 1` intersections. `local_test`
/// receives the p-values of an intersection and `alpha`.
pub fn closed_testing_bruteforce<F>(pvals: &PValues, alpha: Alpha, local_test: F) -> Result<Discoveries>
where
    F: Fn(&[f64], f64) -> bool + Sync,
{
    let p = pvals.as_slice();
    let k = p.len();
    if k > BRUTEFORCE_MAX_K {
        return domain(format!(
            "brute-force closed testing is limited to K <= {BRUTEFORCE_MAX_K}, got {k}"
        ));
    }
    let a = alpha.get();
    // Union of all intersections that are not rejected; their members survive.
    let kept: u32 = (1u32..(1u32 << k))
        .into_par_iter()
        .filter(|&mask| {
            let sub: Vec<f64> = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| p[i]).collect();
            !local_test(&sub, a)
        })
        .reduce(|| 0, |x, y| x | y);
    let rejected = (0..k).filter(|&i| kept >> i & 1 == 0).collect();
    Ok(Discoveries::from_indices(rejected, f64::NAN))
}

/// `K 1{l_K x <= 1} / ceil(K l_K x)`, infinite at 0.
pub fn grid_harmonic_calibrator(x: f64, k: usize) -> Result<f64> {
    if k == 0 {
        return domain("K must be at least 1");
    }
    if x.is_nan() || x < 0.0 {
        return domain(format!("x must be nonnegative, got {x}"));
    }
    Ok(grid_harmonic_with(x, k, harmonic_unchecked(k)))
}

fn grid_harmonic_with(x: f64, k: usize, ell: f64) -> f64 {
    if ell * x > 1.0 {
        return 0.0;
    }
    let c = (k as f64 * ell * x).ceil();
    if c == 0.0 {
        f64::INFINITY
    } else {
        k as f64 / c
    }
}

/// A p-to-e calibrator: nonincreasing, integrating to 1 on [0, 1], zero above 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Calibrator {
    /// The grid harmonic calibrator for `k` hypotheses.
    GridHarmonic { k: usize },
    /// The BY calibrator at level `alpha` for `k` hypotheses.
    By { alpha: f64, k: usize },
    /// `1{x <= cutoff} / cutoff`.
    Step { cutoff: f64 },
}

impl Calibrator {
    fn validate(&self) -> Result<()> {
        match *self {
            Calibrator::GridHarmonic { k } | Calibrator::By { k, .. } if k == 0 => {
                domain("calibrator needs K >= 1")
            }
            Calibrator::By { alpha, .. } if !(alpha > 0.0 && alpha <= 1.0) => {
                domain(format!("BY calibrator level must lie in (0, 1], got {alpha}"))
            }
            Calibrator::Step { cutoff } if !(cutoff > 0.0 && cutoff <= 1.0) => {
                domain(format!("step calibrator cutoff must lie in (0, 1], got {cutoff}"))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Calibrator::GridHarmonic { k } => grid_harmonic_with(x, k, harmonic_unchecked(k)),
            Calibrator::By { alpha, k } => by_calibrate_with(x, alpha, k, harmonic_unchecked(k)),
            Calibrator::Step { cutoff } => {
                if x <= cutoff {
                    1.0 / cutoff
                } else {
                    0.0
                }
            }
        }
    }
}

/// A p-merging function in dual form: the merged p-value is the smallest `a`
/// with `sum_i w_i f_i(p_i / a) >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PMergingDual {
    weights: Vec<f64>,
    calibrators: Vec<Calibrator>,
}

impl PMergingDual {
    pub fn new(weights: Vec<f64>, calibrators: Vec<Calibrator>) -> Result<Self> {
        if weights.is_empty() {
            return Err(crate::Error::Empty);
        }
        check_len(weights.len(), calibrators.len())?;
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return domain("weights must be finite and nonnegative");
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return domain(format!("weights must sum to 1, got {total}"));
        }
        for c in &calibrators {
            c.validate()?;
        }
        Ok(PMergingDual {
            weights,
            calibrators,
        })
    }

    /// Equal weights on the grid harmonic calibrator for `k` hypotheses.
    pub fn grid_harmonic(k: usize) -> Result<Self> {
        Self::new(vec![1.0 / k as f64; k], vec![Calibrator::GridHarmonic { k }; k])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `sum_i w_i f_i(p_i / a)`, with zero-weight terms dropped.
    pub fn evidence(&self, p: &[f64], a: f64) -> f64 {
        self.weights
            .iter()
            .zip(&self.calibrators)
            .zip(p)
            .filter(|((w, _), _)| **w > 0.0)
            .map(|((w, f), &q)| w * f.eval(q / a))
            .sum()
    }

    /// The evidence as `a` tends to 0: only zero p-values contribute.
    fn evidence_at_zero(&self, p: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(&self.calibrators)
            .zip(p)
            .filter(|((w, _), &q)| **w > 0.0 && q == 0.0)
            .map(|((w, f), _)| w * f.eval(0.0))
            .sum()
    }
}

/// Absolute tolerance of the bisection in [`merge_p`].
pub const MERGE_TOL: f64 = 1e-12;

fn merge_with_threshold(dual: &PMergingDual, p: &[f64], t: f64) -> f64 {
    if dual.evidence_at_zero(p) >= t {
        return 0.0;
    }
    if dual.evidence(p, 1.0) < t {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > MERGE_TOL {
        let mid = 0.5 * (lo + hi);
        if dual.evidence(p, mid) >= t {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// The merged p-value `inf{a in (0, 1] : X(p / a) >= 1}`, or 1 if none.
pub fn merge_p(dual: &PMergingDual, pvals: &PValues) -> Result<MergedP> {
    check_len(dual.len(), pvals.len())?;
    Ok(MergedP::plain(merge_with_threshold(dual, pvals.as_slice(), 1.0)))
}

/// The randomized merged p-value `inf{a : X(p / a) >= u}`.
pub fn merge_p_randomized(dual: &PMergingDual, pvals: &PValues, u: f64) -> Result<MergedP> {
    check_len(dual.len(), pvals.len())?;
    check_unit_open_closed(u, "u")?;
    Ok(MergedP::with_u(merge_with_threshold(dual, pvals.as_slice(), u), u))
}
