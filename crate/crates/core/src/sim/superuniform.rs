//! Monte Carlo check of the randomized superuniformity bound
//! `E[1{P <= c beta(R/U)} / R] <= c` under adversarial couplings of `(P, R)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit_open_closed, domain, Result};
use crate::pvalue::ReshapingFunction;
use crate::rng::UniformSource;

/// How `R in {1..K}` is coupled to a uniform `P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coupling {
    /// `R = max(1, ceil(K P))`: small p-values come with small `R`.
    Comonotone,
    /// `R = K + 1 - max(1, ceil(K P))`: small p-values come with large `R`.
    Countermonotone,
    /// `R` is the smallest `r` with `P <= c beta(r)` (or `K` if none), which
    /// makes the deterministic bound hold with equality.
    Tight,
}

impl Coupling {
    pub const ALL: [Coupling; 3] = [Coupling::Comonotone, Coupling::Countermonotone, Coupling::Tight];

    fn r(self, p: f64, k: usize, c: f64, beta: &ReshapingFunction) -> usize {
        let rank = ((k as f64 * p).ceil() as usize).clamp(1, k);
        match self {
            Coupling::Comonotone => rank,
            Coupling::Countermonotone => k + 1 - rank,
            Coupling::Tight => (1..=k).find(|&r| p <= c * beta.eval(r as f64)).unwrap_or(k),
        }
    }
}

/// Mean and standard error of the stressed quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StressEstimate {
    pub mean: f64,
    pub se: f64,
    pub trials: usize,
}

/// Estimates `E[1{P <= c beta(R/U)} / R]` with `P` uniform, `R` coupled to `P`
/// on `1..=k`, and `U` an independent uniform, or `U = fixed_u` when given.
pub fn superuniformity_stress(
    beta: &ReshapingFunction,
    c: f64,
    coupling: Coupling,
    k: usize,
    n_trials: usize,
    seed: u64,
    fixed_u: Option<f64>,
) -> Result<StressEstimate> {
    if !(c >= 0.0 && c.is_finite()) {
        return domain(format!("c must be finite and nonnegative, got {c}"));
    }
    if k == 0 || n_trials < 2 {
        return domain("need K >= 1 and at least two trials");
    }
    if let Some(u) = fixed_u {
        check_unit_open_closed(u, "u")?;
    }
    let root = UniformSource::new(seed);
    let values: Vec<f64> = (0..n_trials as u64)
        .into_par_iter()
        .map(|t| {
            let d = root.substream(t).uniforms(2);
            let p = d[0];
            let u = fixed_u.unwrap_or(d[1]);
            let r = coupling.r(p, k, c, beta);
            if p <= c * beta.eval(r as f64 / u) {
                1.0 / r as f64
            } else {
                0.0
            }
        })
        .collect();
    let (mean, se) = super::mean_se(&values);
    Ok(StressEstimate {
        mean,
        se,
        trials: n_trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_reshape_gives_zero() {
        let zero = ReshapingFunction::discrete(vec![(0.0, 1.0)]).unwrap();
        for cp in Coupling::ALL {
            let e = superuniformity_stress(&zero, 0.5, cp, 10, 1000, 1, None).unwrap();
            // P is never 0 because draws lie in (0, 1].
            assert_eq!(e.mean, 0.0);
        }
    }

    #[test]
    fn deterministic_bound_with_fixed_u() {
        let k = 20;
        let beta = ReshapingFunction::by(k).unwrap();
        let c = 0.5 / k as f64;
        for cp in Coupling::ALL {
            let e = superuniformity_stress(&beta, c, cp, k, 100_000, 2, Some(1.0)).unwrap();
            assert!(e.mean <= c + 3.0 * e.se, "{cp:?}: {} vs {c}", e.mean);
        }
        let tight = superuniformity_stress(&beta, c, Coupling::Tight, k, 100_000, 2, Some(1.0)).unwrap();
        assert!((tight.mean - c).abs() <= 4.0 * tight.se);
    }

    #[test]
    fn randomized_bound_comonotone() {
        let k = 20;
        let beta = ReshapingFunction::by(k).unwrap();
        let c = 0.5 / k as f64;
        let e = superuniformity_stress(&beta, c, Coupling::Comonotone, k, 100_000, 3, None).unwrap();
        assert!(e.mean <= c + 3.0 * e.se, "{} vs {c}", e.mean);
        assert!(superuniformity_stress(&beta, -1.0, Coupling::Tight, k, 10, 3, None).is_err());
    }
}
