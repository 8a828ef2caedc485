//! Integer tallies shared by the measures, the game and the search.

use num_bigint::BigInt;

use crate::dataset::Dataset;
use crate::Rational;

/// Weighted value counts of one dimension among `members`.
pub(crate) fn value_counts(d: &Dataset, members: &[usize], dim: usize) -> Vec<u64> {
    let mut counts = vec![0u64; d.schema().dimension(dim).cardinality()];
    for &i in members {
        counts[d.value(i, dim)] += d.units(i);
    }
    counts
}

/// Entropy of a count vector in nats. Zero counts contribute nothing.
pub(crate) fn entropy_nats(counts: &[u64], total: u64) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    counts
        .iter()
        .filter(|&&n| n > 0 && n < total)
        .map(|&n| {
            let p = n as f64 / t;
            -p * p.ln()
        })
        .sum()
}

/// Sufficient statistics for the quadratic measures of a two-block split:
/// `a`, `b`, `c` are the summed squared counts inside the block, inside its
/// complement and over the population.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct SquareSums {
    pub a: u128,
    pub b: u128,
    pub c: u128,
}

impl SquareSums {
    pub fn add_dimension(&mut self, block: &[u64], marginal: &[u64]) {
        for (&n, &m) in block.iter().zip(marginal) {
            let r = m - n;
            self.a += u128::from(n) * u128::from(n);
            self.b += u128::from(r) * u128::from(r);
            self.c += u128::from(m) * u128::from(m);
        }
    }

    /// P(c)ΣP(f|c)² + P(¬c)ΣP(f|¬c)² − ΣP(f)², for block weight `wc` of `w`.
    pub fn quad_partition_f64(&self, w: u64, wc: u64) -> f64 {
        let wn = w - wc;
        if wc == 0 || wn == 0 {
            return 0.0;
        }
        let (w, wc, wn) = (w as f64, wc as f64, wn as f64);
        self.a as f64 / (wc * w) + self.b as f64 / (wn * w) - self.c as f64 / (w * w)
    }

    pub fn quad_partition_exact(&self, w: u64, wc: u64) -> Rational {
        let wn = w - wc;
        if wc == 0 || wn == 0 {
            return Rational::from_integer(0.into());
        }
        let (w, wc, wn) = (BigInt::from(w), BigInt::from(wc), BigInt::from(wn));
        let (a, b, c) = (BigInt::from(self.a), BigInt::from(self.b), BigInt::from(self.c));
        let num = a * &wn * &w + b * &wc * &w - c * &wc * &wn;
        Rational::new(num, &w * &w * wc * wn)
    }

    /// P(c)[ΣP(f|c)² − ΣP(f)²].
    pub fn quad_category_exact(&self, w: u64, wc: u64) -> Rational {
        if wc == 0 {
            return Rational::from_integer(0.into());
        }
        let (w, wc) = (BigInt::from(w), BigInt::from(wc));
        let (a, c) = (BigInt::from(self.a), BigInt::from(self.c));
        let num = a * &w * &w - &wc * &wc * c;
        Rational::new(num, &w * &w * &w * wc)
    }
}
