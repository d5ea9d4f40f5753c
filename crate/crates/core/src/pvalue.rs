//! BY, randomized BY, the BY calibrator, and reshaped step-up procedures.

use crate::error::{check_unit_open_closed, domain, Result};
use crate::evalue::ebh_level;
use crate::harmonic::harmonic_unchecked;
use crate::order::asc_order;
use crate::types::{Alpha, Discoveries, PValues};

/// A reshaping function `beta(r) = sum over atoms x <= r of x * mass(x)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ReshapingFunction {
    /// The BY reshape `(floor(r) ∧ K) / l_K`, evaluated in closed form.
    ByHarmonic { k: usize, ell: f64 },
    /// A discrete probability measure given by ascending atoms and masses.
    /// `partial[i]` is `beta` at `atoms[i]`.
    Discrete {
        atoms: Vec<f64>,
        masses: Vec<f64>,
        partial: Vec<f64>,
    },
}

impl ReshapingFunction {
    /// The reshape under which reshaped step-up is the BY procedure for `K` hypotheses.
    pub fn by(k: usize) -> Result<Self> {
        if k == 0 {
            return domain("K must be at least 1");
        }
        Ok(ReshapingFunction::ByHarmonic {
            k,
            ell: harmonic_unchecked(k),
        })
    }

    /// A reshape from `(atom, mass)` pairs; atoms are finite and nonnegative,
    /// masses nonnegative and summing to 1 (to within 1e-9).
    pub fn discrete(mut pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.is_empty() {
            return domain("reshaping measure needs at least one atom");
        }
        for &(x, m) in &pairs {
            if !(x.is_finite() && x >= 0.0) {
                return domain(format!("atoms must be finite and nonnegative, got {x}"));
            }
            if !(m.is_finite() && m >= 0.0) {
                return domain(format!("masses must be nonnegative, got {m}"));
            }
        }
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        if (total - 1.0).abs() > 1e-9 {
            return domain(format!("masses must sum to 1, got {total}"));
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let (atoms, masses): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let mut acc = 0.0;
        let partial = atoms
            .iter()
            .zip(&masses)
            .map(|(x, m)| {
                acc += x * m;
                acc
            })
            .collect();
        Ok(ReshapingFunction::Discrete {
            atoms,
            masses,
            partial,
        })
    }

    /// The BY measure written as a discrete measure: mass `1/(j l_K)` at atom `j`.
    /// Its `beta` agrees with [`ReshapingFunction::by`] up to rounding.
    pub fn by_as_measure(k: usize) -> Result<Self> {
        if k == 0 {
            return domain("K must be at least 1");
        }
        let ell = harmonic_unchecked(k);
        Self::discrete((1..=k).map(|j| (j as f64, 1.0 / (j as f64 * ell))).collect())
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            ReshapingFunction::ByHarmonic { k, ell } => floor_cap(r, *k) as f64 / ell,
            ReshapingFunction::Discrete { atoms, partial, .. } => {
                let n = atoms.partition_point(|&a| a <= r);
                if n == 0 {
                    0.0
                } else {
                    partial[n - 1]
                }
            }
        }
    }

    /// Step-up level `alpha beta(r) / K`. The BY reshape uses the same
    /// expression as plain BY so both routes agree bit for bit.
    fn level(&self, alpha: f64, k: usize, r: f64) -> f64 {
        match self {
            ReshapingFunction::ByHarmonic { k: kb, ell } => by_level(alpha, floor_cap(r, *kb), k, *ell),
            ReshapingFunction::Discrete { .. } => alpha * self.eval(r) / k as f64,
        }
    }
}

/// `alpha m / (K l)`.
#[inline]
fn by_level(alpha: f64, m: usize, k: usize, ell: f64) -> f64 {
    alpha * m as f64 / (k as f64 * ell)
}

/// `floor(r) ∧ K`, where a value within about one ulp below an integer counts as
/// that integer. This keeps `floor(i/u)` from losing a unit to division error.
pub(crate) fn floor_cap(r: f64, k: usize) -> usize {
    if r.is_nan() || r < 0.0 {
        return 0;
    }
    if r >= k as f64 {
        return k;
    }
    let c = r.ceil();
    let f = if c - r <= c * f64::EPSILON { c } else { r.floor() };
    (f as usize).min(k)
}

/// Output of a BY-type step-up procedure.
#[derive(Debug, Clone, PartialEq)]
pub struct ByResult {
    pub discoveries: Discoveries,
    pub k_star: usize,
    /// The level the `k*`-th smallest p-value cleared; every rejected p-value is
    /// at most this.
    pub threshold: f64,
}

fn step_up(p: &[f64], level: impl Fn(usize) -> f64) -> ByResult {
    let k = p.len();
    let order = asc_order(p);
    let k_star = (1..=k)
        .rev()
        .find(|&i| p[order[i - 1]] <= level(i))
        .unwrap_or(0);
    let threshold = if k_star == 0 { 0.0 } else { level(k_star) };
    ByResult {
        discoveries: Discoveries::from_indices(order[..k_star].to_vec(), threshold),
        k_star,
        threshold,
    }
}

pub(crate) fn reshaped_raw(p: &[f64], alpha: f64, beta: &ReshapingFunction, u: f64) -> ByResult {
    let k = p.len();
    step_up(p, |i| beta.level(alpha, k, i as f64 / u))
}

/// Step-up with levels `alpha beta(i) / K`.
pub fn reshaped_by(pvals: &PValues, alpha: Alpha, beta: &ReshapingFunction) -> ByResult {
    reshaped_raw(pvals.as_slice(), alpha.get(), beta, 1.0)
}

/// Randomized step-up with levels `alpha beta(i/u) / K`.
pub fn reshaped_u_by(pvals: &PValues, alpha: Alpha, beta: &ReshapingFunction, u: f64) -> Result<ByResult> {
    check_unit_open_closed(u, "u")?;
    Ok(reshaped_raw(pvals.as_slice(), alpha.get(), beta, u))
}

/// Benjamini–Yekutieli: step-up with levels `alpha i / (K l_K)`.
pub fn by(pvals: &PValues, alpha: Alpha) -> ByResult {
    let beta = ReshapingFunction::by(pvals.len()).expect("PValues is nonempty");
    reshaped_by(pvals, alpha, &beta)
}

/// Randomized BY: step-up with levels `alpha (floor(i/u) ∧ K) / (K l_K)`.
pub fn u_by(pvals: &PValues, alpha: Alpha, u: f64) -> Result<ByResult> {
    let beta = ReshapingFunction::by(pvals.len()).expect("PValues is nonempty");
    reshaped_u_by(pvals, alpha, &beta, u)
}

/// The BY calibrator: `K / (alpha c)` for the smallest integer `c >= 1` with
/// `p <= alpha c / (K l_K)`, and 0 above the cutoff `alpha / l_K`.
pub fn by_calibrate(p: f64, alpha: Alpha, k: usize) -> Result<f64> {
    if k == 0 {
        return domain("K must be at least 1");
    }
    if p.is_nan() || p < 0.0 {
        return domain(format!("p-value must be nonnegative, got {p}"));
    }
    Ok(by_calibrate_with(p, alpha.get(), k, harmonic_unchecked(k)))
}

pub(crate) fn by_calibrate_with(p: f64, alpha: f64, k: usize, ell: f64) -> f64 {
    let level = |c: usize| by_level(alpha, c, k, ell);
    if p > level(k) {
        return 0.0;
    }
    // Start from the closed form and settle on the BY level grid.
    let mut c = ((p * k as f64 * ell / alpha).ceil() as usize).clamp(1, k);
    while c > 1 && p <= level(c - 1) {
        c -= 1;
    }
    while c < k && p > level(c) {
        c += 1;
    }
    ebh_level(k, c, alpha)
}
