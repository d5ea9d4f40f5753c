//! The Guo–Rao construction on which BY is run against its worst case.

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{domain, Result};
use crate::harmonic::HarmonicTable;
use crate::rng::{uniform_open_closed, UniformSource};
use crate::types::PValues;

/// A realization: p-values and the null set (the first `K0` indices).
#[derive(Debug, Clone, PartialEq)]
pub struct GuoRaoInstance {
    pub pvals: PValues,
    pub null_set: Vec<usize>,
    /// The sampled `N` in `1..=K+1`.
    pub n: usize,
}

fn check(k: usize, k0: usize, alpha: f64) -> Result<()> {
    if k == 0 || k0 == 0 || k0 > k {
        return domain(format!("need 1 <= K0 <= K, got K = {k}, K0 = {k0}"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    Ok(())
}

/// `P(N = n)` for `n = 1..=K+1` (entry `n - 1`):
/// `alpha K0 / (n K l_K)` for `n <= K0`, `alpha / (K l_K)` for `K0 < n <= K`, and
/// the remaining mass `1 - alpha (K + K0 (l_K0 - 1)) / (K l_K)` at `n = K + 1`.
pub fn guo_rao_n_probabilities(k: usize, k0: usize, alpha: f64) -> Result<Vec<f64>> {
    check(k, k0, alpha)?;
    let h = HarmonicTable::new(k)?;
    let denom = k as f64 * h.get(k);
    let mut probs: Vec<f64> = (1..=k)
        .map(|n| {
            if n <= k0 {
                alpha * k0 as f64 / (n as f64 * denom)
            } else {
                alpha / denom
            }
        })
        .collect();
    let rest = 1.0 - alpha * (k as f64 + k0 as f64 * (h.get(k0) - 1.0)) / denom;
    if rest < 0.0 {
        return domain(format!("alpha = {alpha} is too large for K = {k}, K0 = {k0}"));
    }
    probs.push(rest);
    Ok(probs)
}

/// The closed form `alpha (K + K0 (l_K0 - 1)) / (K l_K)`.
pub fn guo_rao_exact_fdr(k: usize, k0: usize, alpha: f64) -> Result<f64> {
    check(k, k0, alpha)?;
    let h = HarmonicTable::new(k)?;
    Ok(alpha * (k as f64 + k0 as f64 * (h.get(k0) - 1.0)) / (k as f64 * h.get(k)))
}

/// Draws one realization of the construction from `stream`.
pub fn guo_rao_sample(k: usize, k0: usize, alpha: f64, stream: &UniformSource) -> Result<GuoRaoInstance> {
    let probs = guo_rao_n_probabilities(k, k0, alpha)?;
    let ell = HarmonicTable::new(k)?.get(k);
    let mut rng = stream.rng();
    let draw = uniform_open_closed(&mut rng);
    let mut acc = 0.0;
    let mut n = k + 1;
    for (i, p) in probs[..k].iter().enumerate() {
        acc += p;
        if draw <= acc {
            n = i + 1;
            break;
        }
    }
    let u0: f64 = rng.random();
    let u1: f64 = rng.random();
    let cutoff = alpha / ell;
    let mut p = vec![0.0; k];
    if n <= k {
        let low = alpha * (n as f64 - 1.0 + u0) / (k as f64 * ell);
        let high = cutoff + (1.0 - cutoff) * u1;
        p.iter_mut().for_each(|v| *v = high);
        for i in sample(&mut rng, k0, n.min(k0)) {
            p[i] = low;
        }
        if n > k0 {
            for i in sample(&mut rng, k - k0, n - k0) {
                p[k0 + i] = low;
            }
        }
    } else {
        let high = cutoff + (1.0 - cutoff) * u0;
        for (i, v) in p.iter_mut().enumerate() {
            *v = if i < k0 { high } else { 1.0 };
        }
    }
    Ok(GuoRaoInstance {
        pvals: PValues::new(p)?,
        null_set: (0..k0).collect(),
        n,
    })
}
