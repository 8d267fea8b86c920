//! Canonical indexing of degree-δ monomials in n variables.
//!
//! A monomial is a multiset of variable indices, stored as a non-decreasing
//! tuple. Ranks are assigned lexicographically over those tuples, so
//! `(0,0) < (0,1) < (1,1)` for n = 2, δ = 2. The count of degree-δ monomials
//! is C(n+δ-1, δ).

use crate::error::{Error, Result};

// bounds chosen so every table entry fits u64 (largest is C(82, 19) ~ 1.9e18);
// anything bigger falls back to the direct computation
const BINOM_A: usize = 83;
const BINOM_B: usize = 20;

fn binomial_table() -> &'static [u64] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![0u64; BINOM_A * BINOM_B];
        for a in 0..BINOM_A {
            t[a * BINOM_B] = 1;
            for b in 1..BINOM_B.min(a + 1) {
                t[a * BINOM_B + b] =
                    t[(a - 1) * BINOM_B + b - 1] + t[(a - 1) * BINOM_B + b];
            }
        }
        t
    })
}

/// C(a, b) in u64; desk-scale arguments never overflow.
pub fn binomial(a: usize, b: usize) -> u64 {
    if b > a {
        return 0;
    }
    if a < BINOM_A && b < BINOM_B {
        return binomial_table()[a * BINOM_B + b];
    }
    let b = b.min(a - b);
    let mut num: u128 = 1;
    for i in 0..b {
        num = num * (a - i) as u128 / (i + 1) as u128;
    }
    num as u64
}

/// Number of degree-`degree` monomials in `n` variables: C(n+δ-1, δ).
pub fn monomial_count(n: usize, degree: usize) -> usize {
    if degree == 0 {
        return 1;
    }
    binomial(n + degree - 1, degree) as usize
}

/// Number of non-decreasing tuples of length `len` with entries in `[lo, n)`.
fn tail_count(n: usize, lo: usize, len: usize) -> u64 {
    if len == 0 {
        return 1;
    }
    if lo >= n {
        return 0;
    }
    binomial(n - lo + len - 1, len)
}

/// Sum of tail counts over a half-open value range, via the hockey-stick
/// identity: sum_{w=lo}^{hi-1} C(n-w+len-1, len) =
/// C(n-lo+len, len+1) - C(n-hi+len, len+1).
#[inline]
fn tail_count_range(n: usize, lo: usize, hi: usize, len: usize) -> u64 {
    if hi <= lo {
        return 0;
    }
    binomial(n - lo + len, len + 1) - binomial(n.saturating_sub(hi) + len, len + 1)
}

/// A monomial index: non-decreasing tuple of variable indices, one per degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonomialIndex {
    entries: Vec<usize>,
}

impl MonomialIndex {
    pub fn new(mut entries: Vec<usize>) -> Self {
        entries.sort_unstable();
        MonomialIndex { entries }
    }

    /// Requires entries already sorted; checked in debug builds only.
    pub fn from_sorted(entries: Vec<usize>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0] <= w[1]));
        MonomialIndex { entries }
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn degree(&self) -> usize {
        self.entries.len()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.entries.iter().any(|&v| v >= n) {
            return Err(Error::MalformedInput(format!(
                "monomial index {:?} out of range for n = {}",
                self.entries, n
            )));
        }
        Ok(())
    }

    /// Exponent vector of length n.
    pub fn exponents(&self, n: usize) -> Vec<u16> {
        let mut e = vec![0u16; n];
        for &v in &self.entries {
            e[v] += 1;
        }
        e
    }

    /// Number of distinct orderings of this multiset: δ! / ∏ mult_v!.
    pub fn perm_count(&self) -> u64 {
        perm_count_sorted(&self.entries)
    }
}

pub fn perm_count_sorted(entries: &[usize]) -> u64 {
    let mut total: u128 = 1;
    let mut k: u128 = 0;
    let mut run: u128 = 0;
    let mut prev = usize::MAX;
    for &v in entries {
        k += 1;
        if v == prev {
            run += 1;
        } else {
            run = 1;
            prev = v;
        }
        total = total * k / run;
    }
    total as u64
}

/// Rank of a sorted multiset in lexicographic order.
pub fn rank_sorted(n: usize, entries: &[usize]) -> usize {
    let degree = entries.len();
    let mut rank: u64 = 0;
    let mut lo = 0usize;
    for (p, &v) in entries.iter().enumerate() {
        rank += tail_count_range(n, lo, v, degree - p - 1);
        lo = v;
    }
    rank as usize
}

pub fn monomial_rank(idx: &MonomialIndex, n: usize) -> Result<usize> {
    idx.validate(n)?;
    Ok(rank_sorted(n, idx.entries()))
}

/// Inverse of `monomial_rank`.
pub fn monomial_unrank(n: usize, degree: usize, mut rank: usize) -> MonomialIndex {
    let mut entries = Vec::with_capacity(degree);
    let mut lo = 0usize;
    for p in 0..degree {
        let rem = degree - p - 1;
        let mut v = lo;
        loop {
            let c = tail_count(n, v, rem) as usize;
            if rank < c {
                break;
            }
            rank -= c;
            v += 1;
        }
        entries.push(v);
        lo = v;
    }
    MonomialIndex::from_sorted(entries)
}

/// Rank directly from an exponent vector (avoids building the tuple).
pub fn rank_exponents(n: usize, exps: &[u16]) -> usize {
    debug_assert_eq!(exps.len(), n);
    let degree: usize = exps.iter().map(|&e| e as usize).sum();
    let mut rank: u64 = 0;
    let mut rem = degree;
    let mut lo = 0usize;
    for (v, &e) in exps.iter().enumerate() {
        if e == 0 {
            continue;
        }
        // first occurrence of v advances the lower bound; repeats only
        // decrement the remaining length
        rem -= 1;
        rank += tail_count_range(n, lo, v, rem);
        lo = v;
        for _ in 1..e {
            rem -= 1;
        }
    }
    rank as usize
}

/// Iterate all degree-δ multisets over [0, n) in lexicographic (rank) order.
pub struct MultisetIter {
    n: usize,
    current: Option<Vec<usize>>,
}

impl MultisetIter {
    pub fn new(n: usize, degree: usize) -> Self {
        let current = if n == 0 && degree > 0 {
            None
        } else {
            Some(vec![0usize; degree])
        };
        MultisetIter { n, current }
    }
}

impl Iterator for MultisetIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.current.clone()?;
        // advance: find rightmost entry that can be incremented
        let mut next = cur.clone();
        let degree = next.len();
        let mut pos = degree;
        loop {
            if pos == 0 {
                self.current = None;
                break;
            }
            pos -= 1;
            if next[pos] + 1 < self.n {
                let v = next[pos] + 1;
                for e in next.iter_mut().skip(pos) {
                    *e = v;
                }
                self.current = Some(next);
                break;
            }
        }
        if degree == 0 {
            self.current = None;
            return Some(vec![]);
        }
        Some(cur)
    }
}

/// Multiset union of two sorted slices.
pub fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_n2_d2() {
        // lexicographic: (0,0), (0,1), (1,1)
        assert_eq!(rank_sorted(2, &[0, 0]), 0);
        assert_eq!(rank_sorted(2, &[0, 1]), 1);
        assert_eq!(rank_sorted(2, &[1, 1]), 2);
    }

    #[test]
    fn count_n3_d2() {
        assert_eq!(monomial_count(3, 2), 6);
    }

    #[test]
    fn unrank_is_inverse_n4_d3() {
        let total = monomial_count(4, 3);
        for r in 0..total {
            let idx = monomial_unrank(4, 3, r);
            assert_eq!(monomial_rank(&idx, 4).unwrap(), r);
        }
    }

    #[test]
    fn iter_matches_unrank() {
        let n = 5;
        let d = 3;
        let all: Vec<_> = MultisetIter::new(n, d).collect();
        assert_eq!(all.len(), monomial_count(n, d));
        for (r, ms) in all.iter().enumerate() {
            assert_eq!(monomial_unrank(n, d, r).entries(), &ms[..]);
            assert_eq!(rank_sorted(n, ms), r);
        }
    }

    #[test]
    fn rank_from_exponents_agrees() {
        let n = 6;
        for ms in MultisetIter::new(n, 4) {
            let idx = MonomialIndex::from_sorted(ms.clone());
            let exps = idx.exponents(n);
            assert_eq!(rank_exponents(n, &exps), rank_sorted(n, &ms));
        }
    }

    #[test]
    fn out_of_range_rejected() {
        let idx = MonomialIndex::new(vec![0, 3]);
        assert!(monomial_rank(&idx, 3).is_err());
    }

    #[test]
    fn perm_counts() {
        assert_eq!(perm_count_sorted(&[0, 0, 0]), 1);
        assert_eq!(perm_count_sorted(&[0, 1]), 2);
        assert_eq!(perm_count_sorted(&[0, 0, 1, 2]), 12);
    }

    #[test]
    fn degree_zero() {
        assert_eq!(monomial_count(4, 0), 1);
        let all: Vec<_> = MultisetIter::new(4, 0).collect();
        assert_eq!(all, vec![Vec::<usize>::new()]);
    }
}
