//! Post-selection confidence intervals with false coverage rate control.
//!
//! Each rule maps the number of selected parameters to a common error level
//! for the selected intervals. e-BY and Ue-BY are meant for e-CIs; BY and
//! U-BY for ordinary confidence intervals.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{check_unit_open_closed, domain, Result};
use crate::harmonic::harmonic_unchecked;
use crate::pvalue::floor_cap;
use crate::types::Alpha;

/// The four level rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelRule {
    EBy,
    UeBy,
    By,
    UBy,
}

impl LevelRule {
    pub const ALL: [LevelRule; 4] = [LevelRule::EBy, LevelRule::UeBy, LevelRule::By, LevelRule::UBy];

    pub fn name(self) -> &'static str {
        match self {
            LevelRule::EBy => "e-by",
            LevelRule::UeBy => "ue-by",
            LevelRule::By => "by",
            LevelRule::UBy => "u-by",
        }
    }

    pub fn is_randomized(self) -> bool {
        matches!(self, LevelRule::UeBy | LevelRule::UBy)
    }

    /// Whether the rule is paired with e-CIs (as opposed to ordinary CIs).
    pub fn uses_eci(self) -> bool {
        matches!(self, LevelRule::EBy | LevelRule::UeBy)
    }

    /// The level for `n_selected` of `k` parameters; `u` is ignored by the
    /// deterministic rules.
    pub fn level(self, n_selected: usize, k: usize, alpha: Alpha, u: f64) -> Result<Option<f64>> {
        match self {
            LevelRule::EBy => eby_level(n_selected, k, alpha),
            LevelRule::UeBy => ueby_level(n_selected, k, alpha, u),
            LevelRule::By => by_fcr_level(n_selected, k, alpha),
            LevelRule::UBy => u_by_fcr_level(n_selected, k, alpha, u),
        }
    }
}

fn check_counts(n_selected: usize, k: usize) -> Result<()> {
    if k == 0 {
        return domain("K must be at least 1");
    }
    if n_selected > k {
        return domain(format!("{n_selected} selected out of only {k}"));
    }
    Ok(())
}

/// e-BY: `alpha |S| / K`; `None` when nothing is selected.
pub fn eby_level(n_selected: usize, k: usize, alpha: Alpha) -> Result<Option<f64>> {
    check_counts(n_selected, k)?;
    Ok((n_selected > 0).then(|| alpha.get() * n_selected as f64 / k as f64))
}

/// Ue-BY: `alpha |S| / (u K)`, capped at 1.
pub fn ueby_level(n_selected: usize, k: usize, alpha: Alpha, u: f64) -> Result<Option<f64>> {
    check_counts(n_selected, k)?;
    check_unit_open_closed(u, "u")?;
    Ok((n_selected > 0).then(|| (alpha.get() * n_selected as f64 / (u * k as f64)).min(1.0)))
}

/// BY: `alpha |S| / (K l_K)`.
pub fn by_fcr_level(n_selected: usize, k: usize, alpha: Alpha) -> Result<Option<f64>> {
    check_counts(n_selected, k)?;
    let ell = harmonic_unchecked(k);
    Ok((n_selected > 0).then(|| alpha.get() * n_selected as f64 / (k as f64 * ell)))
}

/// U-BY: `alpha (floor(|S|/u) ∧ K) / (K l_K)`, capped at 1.
pub fn u_by_fcr_level(n_selected: usize, k: usize, alpha: Alpha, u: f64) -> Result<Option<f64>> {
    check_counts(n_selected, k)?;
    check_unit_open_closed(u, "u")?;
    let ell = harmonic_unchecked(k);
    let m = floor_cap(n_selected as f64 / u, k);
    Ok((n_selected > 0).then(|| (alpha.get() * m as f64 / (k as f64 * ell)).min(1.0)))
}

/// The open half-line `(lower, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfLine {
    pub lower: f64,
}

impl HalfLine {
    pub fn contains(&self, theta: f64) -> bool {
        theta > self.lower
    }

    pub fn is_subset_of(&self, other: &HalfLine) -> bool {
        self.lower >= other.lower
    }
}

/// The family of e-values `X(theta) = exp(lambda (z - theta) - lambda^2 sigma^2 / 2)`
/// for the mean of a Gaussian observation `z` with known `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianECI {
    z: f64,
    sigma: f64,
    lambda: f64,
}

impl GaussianECI {
    pub fn new(z: f64, sigma: f64, lambda: f64) -> Result<Self> {
        if !z.is_finite() {
            return domain(format!("observation must be finite, got {z}"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return domain(format!("sigma must be positive, got {sigma}"));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return domain(format!("lambda must be positive, got {lambda}"));
        }
        Ok(GaussianECI { z, sigma, lambda })
    }

    pub fn evalue_at(&self, theta: f64) -> f64 {
        (self.lambda * (self.z - theta) - 0.5 * self.lambda * self.lambda * self.sigma * self.sigma).exp()
    }

    /// `{theta : X(theta) < 1/alpha}`.
    pub fn interval_at(&self, alpha: f64) -> HalfLine {
        HalfLine {
            lower: self.z - 0.5 * self.lambda * self.sigma * self.sigma - (1.0 / alpha).ln() / self.lambda,
        }
    }
}

/// The Gaussian e-CI `(z - lambda sigma^2 / 2 - ln(1/alpha) / lambda, inf)`.
pub fn gaussian_eci(z: f64, sigma: f64, lambda: f64, alpha: Alpha) -> Result<HalfLine> {
    Ok(GaussianECI::new(z, sigma, lambda)?.interval_at(alpha.get()))
}

/// The one-sided Gaussian confidence interval `(z - sigma q_{1-alpha}, inf)`.
pub fn gaussian_ci(z: f64, sigma: f64, alpha: f64) -> HalfLine {
    let q = Normal::standard().inverse_cdf(1.0 - alpha);
    HalfLine { lower: z - sigma * q }
}

/// Selection of parameters and the common level assigned to them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub selected: Vec<usize>,
    pub level: Option<f64>,
}

/// Selects indices with `z_i > threshold`.
pub fn select_above(z: &[f64], threshold: f64) -> Vec<usize> {
    (0..z.len()).filter(|&i| z[i] > threshold).collect()
}

/// Selects the `m` indices with largest `|z_i|` (ties by index), returned sorted.
pub fn select_top_abs(z: &[f64], m: usize) -> Vec<usize> {
    let abs: Vec<f64> = z.iter().map(|v| v.abs()).collect();
    let mut idx = crate::order::desc_order(&abs);
    idx.truncate(m.min(z.len()));
    idx.sort_unstable();
    idx
}

/// Applies a level rule to a selection.
pub fn select_and_level(selected: Vec<usize>, k: usize, rule: LevelRule, alpha: Alpha, u: f64) -> Result<SelectionResult> {
    let level = rule.level(selected.len(), k, alpha, u)?;
    Ok(SelectionResult { selected, level })
}
