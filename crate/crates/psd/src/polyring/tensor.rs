//! Symmetric tensor view of homogeneous polynomials.
//!
//! A `SymTensor` of order δ stores one entry per sorted index (orbit), with
//! the orbit size available for norm and conversion bookkeeping. The
//! conversion convention is pinned exactly: tensor entry = coefficient /
//! orbit size, so that p(x) = <T, x^{⊗δ}> holds entrywise.

use super::coeff::Coeff;
use super::monomial::{monomial_count, perm_count_sorted, rank_sorted, MultisetIter};
use super::poly::{HomPoly, RestrictionMap};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor<C: Coeff> {
    n: usize,
    order: usize,
    entries: Vec<C>,
}

pub type SymTensorF = SymTensor<f64>;

impl<C: Coeff> SymTensor<C> {
    pub fn zero(n: usize, order: usize) -> Self {
        SymTensor {
            n,
            order,
            entries: vec![C::zero(); monomial_count(n, order)],
        }
    }

    pub fn from_entries(n: usize, order: usize, entries: Vec<C>) -> Result<Self> {
        if entries.len() != monomial_count(n, order) {
            return Err(Error::MalformedInput(format!(
                "canonical entry vector has length {}, expected {}",
                entries.len(),
                monomial_count(n, order)
            )));
        }
        Ok(SymTensor { n, order, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Canonical entries, one per sorted index, in monomial-rank order.
    pub fn entries(&self) -> &[C] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [C] {
        &mut self.entries
    }

    /// Entry at an arbitrary (not necessarily sorted) index.
    pub fn get(&self, index: &[usize]) -> C {
        let mut sorted = index.to_vec();
        sorted.sort_unstable();
        self.entries[rank_sorted(self.n, &sorted)].clone()
    }

    pub fn get_sorted(&self, sorted: &[usize]) -> &C {
        &self.entries[rank_sorted(self.n, sorted)]
    }

    pub fn set_sorted(&mut self, sorted: &[usize], value: C) {
        self.entries[rank_sorted(self.n, sorted)] = value;
    }

    /// Zero out every entry whose index touches a variable outside `subset`.
    /// Idempotent; `subset` need not be the full variable range.
    pub fn zero_out(&self, subset: &RestrictionMap) -> Self {
        let mut out = self.clone();
        for (r, mono) in MultisetIter::new(self.n, self.order).enumerate() {
            if mono.iter().any(|&v| !subset.contains(v)) {
                out.entries[r] = C::zero();
            }
        }
        out
    }

    /// Convert back to the coefficient vector: coeff = entry * orbit size.
    pub fn to_poly(&self) -> HomPoly<C> {
        let mut coeffs = Vec::with_capacity(self.entries.len());
        for (r, mono) in MultisetIter::new(self.n, self.order).enumerate() {
            coeffs.push(self.entries[r].scale_i64(perm_count_sorted(&mono) as i64));
        }
        HomPoly::new(self.n, self.order, coeffs).expect("entry count matches by construction")
    }

    pub fn from_poly(p: &HomPoly<C>) -> Self {
        let mut entries = Vec::with_capacity(p.coeffs().len());
        for (r, mono) in MultisetIter::new(p.n(), p.degree()).enumerate() {
            entries.push(p.coeffs()[r].div_nat(perm_count_sorted(&mono)));
        }
        SymTensor {
            n: p.n(),
            order: p.degree(),
            entries,
        }
    }
}

impl SymTensorF {
    /// Frobenius norm over the full (permutation-expanded) tensor.
    pub fn frob_norm(&self) -> f64 {
        let mut acc = 0.0;
        for (r, mono) in MultisetIter::new(self.n, self.order).enumerate() {
            acc += perm_count_sorted(&mono) as f64 * self.entries[r] * self.entries[r];
        }
        acc.sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.abs()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.n != other.n || self.order != other.order {
            return Err(Error::MalformedInput("tensor shape mismatch".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        SymTensor::from_entries(self.n, self.order, entries)
    }
}

/// Dense (unsymmetrized) tensor with row-major strides, used as the input
/// side of the symmetrization operator and in small tests.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor<C: Coeff> {
    n: usize,
    order: usize,
    data: Vec<C>,
}

impl<C: Coeff> DenseTensor<C> {
    pub fn zero(n: usize, order: usize) -> Self {
        DenseTensor {
            n,
            order,
            data: vec![C::zero(); n.pow(order as u32)],
        }
    }

    pub fn from_data(n: usize, order: usize, data: Vec<C>) -> Result<Self> {
        if data.len() != n.pow(order as u32) {
            return Err(Error::MalformedInput("dense tensor data length mismatch".into()));
        }
        Ok(DenseTensor { n, order, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn data(&self) -> &[C] {
        &self.data
    }

    fn offset(&self, index: &[usize]) -> usize {
        index.iter().fold(0, |acc, &v| acc * self.n + v)
    }

    pub fn get(&self, index: &[usize]) -> &C {
        &self.data[self.offset(index)]
    }

    pub fn set(&mut self, index: &[usize], value: C) {
        let o = self.offset(index);
        self.data[o] = value;
    }

    /// Rank-1 tensor v^{⊗order}.
    pub fn rank_one(v: &[C], order: usize) -> Self {
        let n = v.len();
        let mut out = DenseTensor::zero(n, order);
        let mut idx = vec![0usize; order];
        for slot in out.data.iter_mut() {
            let mut val = C::one();
            for &i in idx.iter() {
                val = val * v[i].clone();
            }
            *slot = val;
            // odometer increment
            for p in (0..order).rev() {
                idx[p] += 1;
                if idx[p] < n {
                    break;
                }
                idx[p] = 0;
            }
        }
        out
    }
}

/// Average a dense tensor over all index permutations.
///
/// For a sorted index I the average over the δ! permutations equals the mean
/// over the distinct arrangements of I, each visited once.
pub fn sym<C: Coeff>(t: &DenseTensor<C>) -> SymTensor<C> {
    let mut out = SymTensor::zero(t.n(), t.order());
    for (r, mono) in MultisetIter::new(t.n(), t.order()).enumerate() {
        let mut acc = C::zero();
        let mut count = 0u64;
        let mut arrangement = mono.clone();
        loop {
            acc += t.get(&arrangement).clone();
            count += 1;
            if !next_permutation(&mut arrangement) {
                break;
            }
        }
        out.entries[r] = acc.div_nat(count);
    }
    out
}

/// In-place next lexicographic permutation; false when wrapped around.
fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Evaluate <T, x^{⊗δ}> by expanding orbits.
pub fn tensor_apply(t: &SymTensorF, x: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (r, mono) in MultisetIter::new(t.n(), t.order()).enumerate() {
        let mut prod = t.entries()[r];
        if prod == 0.0 {
            continue;
        }
        for &v in &mono {
            prod *= x[v];
        }
        acc += perm_count_sorted(&mono) as f64 * prod;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::monomial::MonomialIndex;
    use crate::polyring::poly::Poly;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_poly(n: usize, degree: usize, rng: &mut impl Rng) -> Poly {
        let count = monomial_count(n, degree);
        Poly::new(n, degree, (0..count).map(|_| rng.sample(StandardNormal)).collect()).unwrap()
    }

    #[test]
    fn square_monomial_maps_to_corner() {
        // p = x0^2 over n = 2: T[0,0] = 1, everything else 0
        let p = Poly::monomial(2, &MonomialIndex::new(vec![0, 0]), 1.0).unwrap();
        let t = SymTensor::from_poly(&p);
        assert_eq!(t.get(&[0, 0]), 1.0);
        assert_eq!(t.get(&[0, 1]), 0.0);
        assert_eq!(t.get(&[1, 1]), 0.0);
    }

    #[test]
    fn cross_term_splits_symmetrically() {
        // p = x0 x1: T[0,1] = T[1,0] = 1/2
        let p = Poly::monomial(2, &MonomialIndex::new(vec![0, 1]), 1.0).unwrap();
        let t = SymTensor::from_poly(&p);
        assert_eq!(t.get(&[0, 1]), 0.5);
        assert_eq!(t.get(&[1, 0]), 0.5);
    }

    #[test]
    fn tensor_evaluation_matches_poly() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = random_poly(3, 2, &mut rng);
        let t = SymTensor::from_poly(&p);
        for _ in 0..20 {
            let x: Vec<f64> = (0..3).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let a = p.eval(&x).unwrap();
            let b = tensor_apply(&t, &x);
            assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn round_trip_poly_tensor_poly() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = random_poly(4, 3, &mut rng);
        let back = SymTensor::from_poly(&p).to_poly();
        for (a, b) in p.coeffs().iter().zip(back.coeffs()) {
            assert!((a - b).abs() < 1e-14 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn sym_of_unit_tensor_pair() {
        // e0 ⊗ e1 over n = 2 symmetrizes to off-diagonal 1/2
        let mut t = DenseTensor::<f64>::zero(2, 2);
        t.set(&[0, 1], 1.0);
        let s = sym(&t);
        assert_eq!(s.get(&[0, 1]), 0.5);
        assert_eq!(s.get(&[0, 0]), 0.0);
        assert_eq!(s.get(&[1, 1]), 0.0);
    }

    #[test]
    fn sym_idempotent_on_symmetric_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let v: Vec<f64> = (0..3).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let t = DenseTensor::rank_one(&v, 3);
        let s = sym(&t);
        // v^{⊗3} is already symmetric
        for (r, mono) in MultisetIter::new(3, 3).enumerate() {
            assert!((s.entries()[r] - t.get(&mono)).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_out_everything_and_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let p = random_poly(4, 3, &mut rng);
        let t = SymTensor::from_poly(&p);
        let full = t.zero_out(&RestrictionMap::full(4));
        assert_eq!(full, t);
        let empty = t.zero_out(&RestrictionMap::new(4, vec![]).unwrap());
        assert!(empty.entries().iter().all(|&e| e == 0.0));
    }

    #[test]
    fn zero_out_matches_restrict_embedding() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let p = random_poly(5, 3, &mut rng);
        let subset = RestrictionMap::new(5, vec![0, 2, 4]).unwrap();
        let zeroed = SymTensor::from_poly(&p).zero_out(&subset);
        let restricted = SymTensor::from_poly(&p.restrict(&subset).unwrap());
        for (r_local, mono) in MultisetIter::new(3, 3).enumerate() {
            let global: Vec<usize> = mono.iter().map(|&v| subset.global(v)).collect();
            let a = restricted.entries()[r_local];
            let b = zeroed.get(&global);
            assert!((a - b).abs() < 1e-14, "mismatch at {:?}", global);
        }
    }
}
