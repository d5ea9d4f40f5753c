use crate::error::{domain, Result};

/// The K-th harmonic number, summed in ascending order of terms.
pub fn harmonic(k: usize) -> Result<f64> {
    if k == 0 {
        return domain("harmonic number needs K >= 1");
    }
    Ok(harmonic_unchecked(k))
}

pub(crate) fn harmonic_unchecked(k: usize) -> f64 {
    (1..=k).map(|i| 1.0 / i as f64).sum()
}

/// Cached harmonic numbers `l_1..=l_K`, built with the same summation order as
/// [`harmonic`] so values agree bit for bit.
#[derive(Debug, Clone)]
pub struct HarmonicTable {
    values: Vec<f64>,
}

impl HarmonicTable {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return domain("harmonic table needs K >= 1");
        }
        let mut values = Vec::with_capacity(k);
        let mut acc = 0.0;
        for i in 1..=k {
            acc += 1.0 / i as f64;
            values.push(acc);
        }
        Ok(HarmonicTable { values })
    }

    /// `l_k` for `1 <= k <= K`.
    #[inline]
    pub fn get(&self, k: usize) -> f64 {
        self.values[k - 1]
    }

    pub fn max_k(&self) -> usize {
        self.values.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::ToPrimitive;

    #[test]
    fn examples() {
        assert_eq!(harmonic(1).unwrap(), 1.0);
        assert!((harmonic(3).unwrap() - 11.0 / 6.0).abs() < 1e-15);
        assert_eq!(harmonic(10).unwrap(), 2.9289682539682538);
        assert!(harmonic(0).is_err());
    }

    #[test]
    fn table_matches_function_and_increases() {
        let t = HarmonicTable::new(500).unwrap();
        assert_eq!(t.get(1), 1.0);
        for k in 1..=500 {
            assert_eq!(t.get(k), harmonic(k).unwrap());
            if k > 1 {
                assert!(t.get(k) > t.get(k - 1));
            }
        }
    }

    #[test]
    fn matches_exact_rational_sum() {
        let t = HarmonicTable::new(10_000).unwrap();
        let mut exact = BigRational::from_integer(BigInt::from(0));
        for k in 1..=10_000usize {
            exact += BigRational::new(BigInt::from(1), BigInt::from(k));
            if k <= 200 || k % 250 == 0 {
                let e = exact.to_f64().unwrap();
                assert!(((t.get(k) - e) / e).abs() <= 1e-14, "k={k}");
            }
        }
    }
}
