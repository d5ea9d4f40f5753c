//! Stochastic rounding of e-values onto a grid of levels.
//!
//! Every rounding here takes its randomness as an explicit uniform draw `u` and
//! rounds up exactly when `u` falls at or below the up-probability, so outputs
//! are nonincreasing in `u` and coupled draws give coupled outputs.

use crate::error::{check_len, domain, Error, Result};
use crate::harmonic::harmonic_unchecked;
use crate::types::{Alpha, EValues};

/// A finite set of levels in [0, inf], sorted strictly ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    levels: Vec<f64>,
}

/// Result of rounding one value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundingOutcome {
    pub value: f64,
    pub moved_up: bool,
}

impl Grid {
    /// Builds a grid from levels in any order; duplicates are merged.
    pub fn new(mut levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Empty);
        }
        for (index, &v) in levels.iter().enumerate() {
            if v.is_nan() {
                return Err(Error::NaN { index });
            }
            if v < 0.0 {
                return Err(Error::OutOfRange { index, value: v });
            }
        }
        levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
        levels.dedup();
        Ok(Grid { levels })
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Smallest level.
    pub fn g_star(&self) -> f64 {
        self.levels[0]
    }

    /// Largest level.
    pub fn g_sup(&self) -> f64 {
        self.levels[self.levels.len() - 1]
    }

    pub fn contains(&self, x: f64) -> bool {
        self.levels
            .binary_search_by(|l| l.partial_cmp(&x).unwrap())
            .is_ok()
    }

    /// `(x_-, x^+)`: the largest level `<= x` and the smallest level `>= x`.
    /// `None` when `x` lies outside `[g_star, g_sup]`.
    pub fn neighbors(&self, x: f64) -> Option<(f64, f64)> {
        if x.is_nan() || x < self.g_star() || x > self.g_sup() {
            return None;
        }
        // First index with level >= x.
        let hi = self.levels.partition_point(|&l| l < x);
        let up = self.levels[hi];
        if up == x {
            return Some((x, x));
        }
        Some((self.levels[hi - 1], up))
    }
}

/// Rounds `x` to one of its grid neighbours so that the expected output is `x`.
///
/// `x` is returned unchanged when it lies outside the grid's range, on the
/// grid, or below an infinite upper neighbour.
pub fn stochastic_round(grid: &Grid, x: f64, u: f64) -> RoundingOutcome {
    let unchanged = RoundingOutcome {
        value: x,
        moved_up: false,
    };
    let Some((lo, hi)) = grid.neighbors(x) else {
        return unchanged;
    };
    if lo == hi || hi == f64::INFINITY {
        return unchanged;
    }
    if u <= (x - lo) / (hi - lo) {
        RoundingOutcome {
            value: hi,
            moved_up: true,
        }
    } else {
        RoundingOutcome {
            value: lo,
            moved_up: false,
        }
    }
}

/// Rounds `x` onto `{0, 1/alpha_hat}` when it is below `1/alpha_hat`, and keeps
/// it otherwise. Zero never rounds up.
pub fn adaptive_round(x: f64, alpha_hat: f64, u: f64) -> Result<f64> {
    if !(alpha_hat > 0.0 && alpha_hat <= 1.0) {
        return domain(format!("alpha_hat must lie in (0, 1], got {alpha_hat}"));
    }
    Ok(adaptive_round_unchecked(x, alpha_hat, u))
}

#[inline]
pub(crate) fn adaptive_round_unchecked(x: f64, alpha_hat: f64, u: f64) -> f64 {
    if x >= 1.0 / alpha_hat {
        x
    } else if x > 0.0 && u <= alpha_hat * x {
        1.0 / alpha_hat
    } else {
        0.0
    }
}

/// Rounds every coordinate with the same draw `u`, each onto its own grid.
pub fn joint_round(xs: &EValues, grids: &[Grid], u: f64) -> Result<EValues> {
    check_len(xs.len(), grids.len())?;
    let out = xs
        .as_slice()
        .iter()
        .zip(grids)
        .map(|(&x, g)| stochastic_round(g, x, u).value)
        .collect();
    EValues::new(out)
}

/// For the e-BH level grid `{K/(alpha j)}`, the largest `j` with `K/(alpha j) >= x`.
/// Requires `0 < x <= K/alpha`.
fn upper_level_index(x: f64, alpha: f64, k: usize) -> usize {
    let kf = k as f64;
    let mut j = ((kf / (alpha * x)).floor() as usize).clamp(1, k);
    // Repair any off-by-one from the division.
    while j < k && kf / (alpha * (j + 1) as f64) >= x {
        j += 1;
    }
    while j > 1 && kf / (alpha * j as f64) < x {
        j -= 1;
    }
    j
}

fn check_generalized(x: f64, alpha: Alpha, k: usize) -> Result<()> {
    if k == 0 {
        return domain("K must be at least 1");
    }
    if x.is_nan() || x < 0.0 || x > k as f64 / alpha.get() {
        return domain(format!(
            "x must lie in [0, K/alpha] = [0, {}], got {x}",
            k as f64 / alpha.get()
        ));
    }
    Ok(())
}

/// Generalized rounding onto the e-BH levels with equal probability on each
/// level `K/(alpha j)` for `j <= j^+`, and the remaining mass at 0.
pub fn generalized_round_uniform(x: f64, alpha: Alpha, k: usize, u: f64) -> Result<f64> {
    check_generalized(x, alpha, k)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let a = alpha.get();
    let kf = k as f64;
    let jp = upper_level_index(x, a, k);
    let per_level = a * x / (kf * harmonic_unchecked(jp));
    // Levels are laid out from the largest (j = 1) at small u.
    let mut acc = 0.0;
    for j in 1..=jp {
        acc += per_level;
        if u <= acc {
            return Ok(kf / (a * j as f64));
        }
    }
    Ok(0.0)
}

/// Generalized rounding onto the e-BH levels with probability proportional to
/// `j` on level `K/(alpha j)`, so each level carries equal expectation.
pub fn generalized_round_equal(x: f64, alpha: Alpha, k: usize, u: f64) -> Result<f64> {
    check_generalized(x, alpha, k)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let a = alpha.get();
    let kf = k as f64;
    let jp = upper_level_index(x, a, k);
    let unit = a * x / (kf * jp as f64);
    let mut acc = 0.0;
    for j in 1..=jp {
        acc += unit * j as f64;
        if u <= acc {
            return Ok(kf / (a * j as f64));
        }
    }
    Ok(0.0)
}
