//! The pseudorandom restriction family: preimages h^{-1}(T) of a fixed
//! target set T = {0, .., ell-1} under all non-constant polynomials of
//! degree <= k-1 over GF(q). The family has exactly q^k - q members and
//! exactly computable r-wise inclusion probabilities
//! Pr[i_1..i_r in S] = (q^{k-r} ell^r - ell) / (q^k - q).

use super::gf::{is_prime, poly_eval};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;

/// Enumeration cap; the member count q^k must stay below this.
const FAMILY_SIZE_CAP: u64 = 200_000_000;

#[derive(Clone, Debug)]
pub struct HashFamily {
    pub q: u64,
    pub k: usize,
    pub t_size: usize,
}

impl HashFamily {
    pub fn new(q: u64, k: usize, t_size: usize) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::UnsupportedField(q));
        }
        if k < 2 || t_size < 2 || t_size > q as usize || k > t_size.max(2) * 32 {
            return Err(Error::Parameter(format!(
                "hash family needs 2 <= k and 2 <= |T| <= q; got k = {}, |T| = {}, q = {}",
                k, t_size, q
            )));
        }
        Ok(HashFamily { q, k, t_size })
    }

    pub fn size(&self) -> u64 {
        self.q.pow(self.k as u32) - self.q
    }

    /// Exact r-wise inclusion probability as a rational.
    pub fn membership_probability(&self, r: usize) -> BigRational {
        let q = BigInt::from(self.q);
        let ell = BigInt::from(self.t_size as u64);
        let num = q.pow((self.k - r) as u32) * ell.pow(r as u32) - &ell;
        let den = q.pow(self.k as u32) - &q;
        BigRational::new(num, den)
    }

    /// Enumerate the family, deduplicating members that induce the same
    /// subset. Exact multiplicities are kept so expectations over the family
    /// stay exact.
    pub fn enumerate(&self) -> Result<FamilySubsets> {
        let q = self.q;
        let k = self.k;
        let total = q.checked_pow(k as u32).filter(|&t| t <= FAMILY_SIZE_CAP).ok_or_else(|| {
            Error::Parameter(format!(
                "family of size {}^{} exceeds the enumeration cap",
                q, k
            ))
        })?;
        let mut counts: std::collections::HashMap<u64, u64> = std::collections::HashMap::new();
        let mut coeffs = vec![0u64; k];
        for code in 0..total {
            // decode coefficient tuple (a_0 .. a_{k-1}) base q
            let mut c = code;
            for a in coeffs.iter_mut() {
                *a = c % q;
                c /= q;
            }
            if coeffs[1..].iter().all(|&a| a == 0) {
                continue; // constant polynomial, excluded from the family
            }
            let mut mask: u64 = 0;
            for x in 0..q {
                if poly_eval(&coeffs, x, q) < self.t_size as u64 {
                    mask |= 1 << x;
                }
            }
            *counts.entry(mask).or_insert(0) += 1;
        }
        let mut subsets: Vec<(u64, u64)> = counts.into_iter().collect();
        subsets.sort_unstable();
        Ok(FamilySubsets {
            q,
            ell: self.t_size,
            k,
            total: self.size(),
            subsets,
        })
    }
}

/// Deduplicated family: distinct subsets (as bitmasks over [q]) with the
/// number of polynomials mapping to each.
#[derive(Clone, Debug)]
pub struct FamilySubsets {
    pub q: u64,
    pub ell: usize,
    pub k: usize,
    /// Total member count, q^k - q.
    pub total: u64,
    pub subsets: Vec<(u64, u64)>,
}

impl FamilySubsets {
    /// Exact number of members containing every index in `vars`.
    pub fn count_containing(&self, vars: &[usize]) -> u64 {
        let mut want: u64 = 0;
        for &v in vars {
            want |= 1 << v;
        }
        self.subsets
            .iter()
            .filter(|(mask, _)| mask & want == want)
            .map(|(_, c)| c)
            .sum()
    }

    /// Exact inclusion probability of a variable set, from the enumeration.
    pub fn empirical_probability(&self, vars: &[usize]) -> BigRational {
        BigRational::new(
            BigInt::from(self.count_containing(vars)),
            BigInt::from(self.total),
        )
    }

    pub fn subset_vars(mask: u64) -> Vec<usize> {
        (0..64).filter(|&v| mask >> v & 1 == 1).collect()
    }

    /// Sizes of every member, for the ell <= |S| <= (k-1) ell invariant.
    pub fn size_range(&self) -> (usize, usize) {
        let mut lo = usize::MAX;
        let mut hi = 0;
        for &(mask, _) in &self.subsets {
            let s = mask.count_ones() as usize;
            lo = lo.min(s);
            hi = hi.max(s);
        }
        (lo, hi)
    }
}
