//! Validated inputs and the discovery-set output shared by every procedure.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Target level of a procedure, restricted to (0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(level: f64) -> Result<Self> {
        if level > 0.0 && level <= 1.0 {
            Ok(Alpha(level))
        } else {
            domain(format!("alpha must lie in (0, 1], got {level}"))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Alpha::new(v)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.0
    }
}

fn validate(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Empty);
    }
    for (index, &value) in values.iter().enumerate() {
        if value.is_nan() {
            return Err(Error::NaN { index });
        }
        if value < 0.0 {
            return Err(Error::OutOfRange { index, value });
        }
    }
    Ok(())
}

/// Nonnegative e-values; `+inf` is allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct EValues(Vec<f64>);

impl EValues {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        validate(&values)?;
        Ok(EValues(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Nonnegative p-values. Entries above 1 are accepted (p-merging inputs live on
/// `[0, inf)`) but are never rejected by a step-up procedure. `+inf` is accepted
/// so that `u / 0` is representable.
#[derive(Debug, Clone, PartialEq)]
pub struct PValues(Vec<f64>);

impl PValues {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        validate(&values)?;
        Ok(PValues(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Indices rejected by a procedure.
///
/// `rejected` holds 0-based hypothesis indices in ascending order and always
/// has `k_star` entries. `threshold` is the realized rejection threshold on the
/// scale the procedure works on (an e-value level for e-BH variants, a p-value
/// cutoff for step-up p-value procedures).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discoveries {
    pub rejected: Vec<usize>,
    pub k_star: usize,
    pub threshold: f64,
}

impl Discoveries {
    pub(crate) fn from_indices(mut rejected: Vec<usize>, threshold: f64) -> Self {
        rejected.sort_unstable();
        rejected.dedup();
        let k_star = rejected.len();
        Discoveries {
            rejected,
            k_star,
            threshold,
        }
    }

    pub fn empty(threshold: f64) -> Self {
        Discoveries {
            rejected: Vec::new(),
            k_star: 0,
            threshold,
        }
    }

    pub fn len(&self) -> usize {
        self.k_star
    }

    pub fn is_empty(&self) -> bool {
        self.k_star == 0
    }

    pub fn contains(&self, index: usize) -> bool {
        self.rejected.binary_search(&index).is_ok()
    }

    /// True when every index rejected by `other` is also rejected here.
    pub fn is_superset_of(&self, other: &Discoveries) -> bool {
        other.rejected.iter().all(|&i| self.contains(i))
    }

    pub fn same_set(&self, other: &Discoveries) -> bool {
        self.rejected == other.rejected
    }

    /// Per-index rejection mask of length `k`.
    pub fn mask(&self, k: usize) -> Vec<bool> {
        let mut m = vec![false; k];
        for &i in &self.rejected {
            m[i] = true;
        }
        m
    }
}
