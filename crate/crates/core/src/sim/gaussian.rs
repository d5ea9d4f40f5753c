//! Correlated Gaussian data and the e-values and p-values built from it.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Dependence structure of the noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dependence {
    /// `Cov(Z_i, Z_j) = rho^|i-j|`.
    ToeplitzPositive,
    /// `Cov(Z_i, Z_j) = -rho / (K - 1)` for `i != j`.
    EquicorrelatedNegative,
}

impl Dependence {
    pub fn name(self) -> &'static str {
        match self {
            Dependence::ToeplitzPositive => "toeplitz-positive",
            Dependence::EquicorrelatedNegative => "equicorrelated-negative",
        }
    }

    pub fn check_rho(self, rho: f64) -> Result<()> {
        let ok = match self {
            Dependence::ToeplitzPositive => (0.0..1.0).contains(&rho),
            Dependence::EquicorrelatedNegative => (0.0..=1.0).contains(&rho),
        };
        if ok {
            Ok(())
        } else {
            domain(format!("rho = {rho} is not valid for {}", self.name()))
        }
    }
}

fn normals<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    (0..k).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Unit-variance noise with the given dependence, plus `means`.
pub fn sample_correlated_gaussian<R: Rng + ?Sized>(
    means: &[f64],
    rho: f64,
    dependence: Dependence,
    rng: &mut R,
) -> Result<Vec<f64>> {
    dependence.check_rho(rho)?;
    let k = means.len();
    let eps = normals(rng, k);
    let mut z = match dependence {
        Dependence::ToeplitzPositive => {
            // AR(1): Z_1 = e_1, Z_i = rho Z_{i-1} + sqrt(1 - rho^2) e_i.
            let c = (1.0 - rho * rho).sqrt();
            let mut out = Vec::with_capacity(k);
            let mut prev = 0.0;
            for (i, &e) in eps.iter().enumerate() {
                prev = if i == 0 { e } else { rho * prev + c * e };
                out.push(prev);
            }
            out
        }
        Dependence::EquicorrelatedNegative => {
            if k == 1 {
                eps
            } else {
                // sqrt(1 + r) (e_i - mean) + sqrt(1 - rho) mean, r = rho/(K-1):
                // eigenvalue 1 - rho along the ones vector, 1 + r orthogonal to it.
                let r = rho / (k - 1) as f64;
                let bar = eps.iter().sum::<f64>() / k as f64;
                let a = (1.0 + r).sqrt();
                let b = (1.0 - rho).sqrt();
                eps.iter().map(|&e| a * (e - bar) + b * bar).collect()
            }
        }
    };
    for (zi, m) in z.iter_mut().zip(means) {
        *zi += m;
    }
    Ok(z)
}

/// Gaussian sampler for an arbitrary covariance matrix via its Cholesky factor.
#[derive(Debug, Clone)]
pub struct CovarianceSampler {
    factor: DMatrix<f64>,
}

impl CovarianceSampler {
    /// `cov` is a row-major `k x k` matrix; it must be symmetric positive definite.
    pub fn new(cov: &[f64], k: usize) -> Result<Self> {
        if cov.len() != k * k || k == 0 {
            return domain(format!("covariance must be {k} x {k}"));
        }
        let m = DMatrix::from_row_slice(k, k, cov);
        if (0..k).any(|i| (0..i).any(|j| (m[(i, j)] - m[(j, i)]).abs() > 1e-12)) {
            return domain("covariance must be symmetric");
        }
        match m.cholesky() {
            Some(c) => Ok(CovarianceSampler { factor: c.l() }),
            None => domain("covariance is not positive definite"),
        }
    }

    pub fn dim(&self) -> usize {
        self.factor.nrows()
    }

    pub fn sample<R: Rng + ?Sized>(&self, means: &[f64], rng: &mut R) -> Vec<f64> {
        let k = self.dim();
        let e = nalgebra::DVector::from_vec(normals(rng, k));
        let z = &self.factor * e;
        z.iter().zip(means).map(|(v, m)| v + m).collect()
    }
}

/// Likelihood-ratio e-value `exp(lambda z - lambda^2 sigma^2 / 2)`.
pub fn lr_evalue(z: f64, lambda: f64, sigma: f64) -> Result<f64> {
    if lambda.is_nan() || lambda <= 0.0 {
        return domain(format!("lambda must be positive, got {lambda}"));
    }
    Ok(lr_evalue_unchecked(z, lambda, sigma))
}

#[inline]
pub(crate) fn lr_evalue_unchecked(z: f64, lambda: f64, sigma: f64) -> f64 {
    (lambda * z - 0.5 * lambda * lambda * sigma * sigma).exp()
}

/// One-sided p-value `1 - Phi(z)`, accurate in the upper tail.
pub fn one_sided_p(z: f64) -> f64 {
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}
