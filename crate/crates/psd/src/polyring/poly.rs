//! Dense homogeneous polynomials over a coefficient ring.
//!
//! A degree-δ polynomial in n variables is its coefficient vector in
//! canonical monomial-rank order. Inner product and norm are those of the
//! coefficient vector.

use super::coeff::Coeff;
use super::monomial::{
    monomial_count, rank_exponents, rank_sorted, MonomialIndex, MultisetIter,
};
use crate::error::{Error, Result};

/// Hard cap on total degree; power-sum instances at desk scale stay below it.
pub const MAX_DEGREE: usize = 18;

#[derive(Clone, Debug, PartialEq)]
pub struct HomPoly<C: Coeff> {
    n: usize,
    degree: usize,
    coeffs: Vec<C>,
}

/// The float-backed polynomial used throughout the pipeline.
pub type Poly = HomPoly<f64>;

impl<C: Coeff> HomPoly<C> {
    pub fn new(n: usize, degree: usize, coeffs: Vec<C>) -> Result<Self> {
        let expect = monomial_count(n, degree);
        if coeffs.len() != expect {
            return Err(Error::MalformedInput(format!(
                "coefficient vector has length {}, expected C({}+{}-1,{}) = {}",
                coeffs.len(),
                n,
                degree,
                degree,
                expect
            )));
        }
        Ok(HomPoly { n, degree, coeffs })
    }

    pub fn zero(n: usize, degree: usize) -> Self {
        HomPoly {
            n,
            degree,
            coeffs: vec![C::zero(); monomial_count(n, degree)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn coeff(&self, idx: &MonomialIndex) -> Result<&C> {
        if idx.degree() != self.degree {
            return Err(Error::MalformedInput(format!(
                "index degree {} != polynomial degree {}",
                idx.degree(),
                self.degree
            )));
        }
        idx.validate(self.n)?;
        Ok(&self.coeffs[rank_sorted(self.n, idx.entries())])
    }

    pub fn set_coeff(&mut self, idx: &MonomialIndex, value: C) -> Result<()> {
        idx.validate(self.n)?;
        self.coeffs[rank_sorted(self.n, idx.entries())] = value;
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b.clone();
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a -= b.clone();
        }
        Ok(out)
    }

    pub fn scaled(&self, s: &C) -> Self {
        let mut out = self.clone();
        for a in out.coeffs.iter_mut() {
            *a = a.clone() * s.clone();
        }
        out
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.degree != other.degree {
            return Err(Error::MalformedInput(format!(
                "shape mismatch: ({}, {}) vs ({}, {})",
                self.n, self.degree, other.n, other.degree
            )));
        }
        Ok(())
    }

    /// Exact polynomial product; output degree is the sum of degrees.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::MalformedInput("variable count mismatch".into()));
        }
        let degree = self.degree + other.degree;
        if degree > MAX_DEGREE {
            return Err(Error::Capacity {
                requested: degree,
                cap: MAX_DEGREE,
            });
        }
        let mut out = HomPoly::zero(self.n, degree);
        // iterate the smaller factor outside; work in exponent vectors so the
        // inner loop allocates nothing
        let (small, big) = if self.coeffs.len() <= other.coeffs.len() {
            (self, other)
        } else {
            (other, self)
        };
        let small_exps: Vec<Vec<u16>> = MultisetIter::new(self.n, small.degree)
            .map(|m| MonomialIndex::from_sorted(m).exponents(self.n))
            .collect();
        let big_exps: Vec<Vec<u16>> = MultisetIter::new(self.n, big.degree)
            .map(|m| MonomialIndex::from_sorted(m).exponents(self.n))
            .collect();
        let mut merged = vec![0u16; self.n];
        for (i, ei) in small_exps.iter().enumerate() {
            if small.coeffs[i].is_zero() {
                continue;
            }
            for (j, ej) in big_exps.iter().enumerate() {
                if big.coeffs[j].is_zero() {
                    continue;
                }
                for v in 0..self.n {
                    merged[v] = ei[v] + ej[v];
                }
                let r = rank_exponents(self.n, &merged);
                out.coeffs[r] += small.coeffs[i].clone() * big.coeffs[j].clone();
            }
        }
        Ok(out)
    }

    /// p^k by repeated multiplication with the base.
    pub fn pow(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Ok(HomPoly::new(self.n, 0, vec![C::one()])?);
        }
        if self.degree * k > MAX_DEGREE {
            return Err(Error::Capacity {
                requested: self.degree * k,
                cap: MAX_DEGREE,
            });
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Iterated partial derivative over the multiset `index`.
    pub fn partial_derivative(&self, index: &MonomialIndex) -> Result<Self> {
        index.validate(self.n)?;
        if index.degree() > self.degree {
            return Err(Error::MalformedInput(format!(
                "derivative order {} exceeds degree {}",
                index.degree(),
                self.degree
            )));
        }
        let out_degree = self.degree - index.degree();
        let di = index.exponents(self.n);
        let mut out = HomPoly::zero(self.n, out_degree);
        let mut exps = vec![0u16; self.n];
        for (r_out, mono) in MultisetIter::new(self.n, out_degree).enumerate() {
            for e in exps.iter_mut() {
                *e = 0;
            }
            for &v in &mono {
                exps[v] += 1;
            }
            // coefficient of x^beta in d_I p is p[beta + i] * prod_v (beta_v + i_v)! / beta_v!
            let mut factor: u64 = 1;
            for v in 0..self.n {
                let b = exps[v] as u64;
                let i = di[v] as u64;
                for t in 0..i {
                    factor *= b + i - t;
                }
                exps[v] += di[v];
            }
            let r_src = rank_exponents(self.n, &exps);
            out.coeffs[r_out] = self.coeffs[r_src].scale_i64(factor as i64);
        }
        Ok(out)
    }

    /// Restrict to the variables of `map`: monomials touching any variable
    /// outside the subset are dropped, survivors are re-indexed through it.
    pub fn restrict(&self, map: &RestrictionMap) -> Result<Self> {
        if map.n != self.n {
            return Err(Error::MalformedInput(format!(
                "restriction over n = {} applied to polynomial with n = {}",
                map.n, self.n
            )));
        }
        let ell = map.subset.len();
        let mut out = HomPoly::zero(ell, self.degree);
        for (r_local, mono) in MultisetIter::new(ell, self.degree).enumerate() {
            let global: Vec<usize> = mono.iter().map(|&v| map.subset[v]).collect();
            let r_global = rank_sorted(self.n, &global);
            out.coeffs[r_local] = self.coeffs[r_global].clone();
        }
        Ok(out)
    }

    /// Evaluate by direct monomial sum.
    pub fn eval(&self, x: &[C]) -> Result<C> {
        if x.len() != self.n {
            return Err(Error::MalformedInput("evaluation point dimension mismatch".into()));
        }
        let mut acc = C::zero();
        for (r, mono) in MultisetIter::new(self.n, self.degree).enumerate() {
            if self.coeffs[r].is_zero() {
                continue;
            }
            let mut term = self.coeffs[r].clone();
            for &v in &mono {
                term = term * x[v].clone();
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Coefficient-vector inner product.
    pub fn inner(&self, other: &Self) -> Result<C> {
        self.check_shape(other)?;
        let mut acc = C::zero();
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            acc += a.clone() * b.clone();
        }
        Ok(acc)
    }
}

impl Poly {
    /// Coefficient-vector Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// A single monomial with the given coefficient.
    pub fn monomial(n: usize, idx: &MonomialIndex, value: f64) -> Result<Self> {
        let mut p = Poly::zero(n, idx.degree());
        p.set_coeff(idx, value)?;
        Ok(p)
    }
}

/// Coordinate restriction x = M_S y for a subset S of variables,
/// S strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictionMap {
    n: usize,
    subset: Vec<usize>,
}

impl RestrictionMap {
    pub fn new(n: usize, subset: Vec<usize>) -> Result<Self> {
        if subset.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::MalformedInput(
                "restriction subset must be strictly increasing".into(),
            ));
        }
        if subset.iter().any(|&v| v >= n) {
            return Err(Error::MalformedInput("restriction subset index out of range".into()));
        }
        Ok(RestrictionMap { n, subset })
    }

    pub fn full(n: usize) -> Self {
        RestrictionMap {
            n,
            subset: (0..n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.subset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subset.is_empty()
    }

    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    pub fn contains(&self, v: usize) -> bool {
        self.subset.binary_search(&v).is_ok()
    }

    /// Map a local variable index to its global index.
    pub fn global(&self, local: usize) -> usize {
        self.subset[local]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    pub fn random_poly(n: usize, degree: usize, rng: &mut impl Rng) -> Poly {
        let count = monomial_count(n, degree);
        let coeffs: Vec<f64> = (0..count).map(|_| rng.sample(StandardNormal)).collect();
        Poly::new(n, degree, coeffs).unwrap()
    }

    #[test]
    fn pow_of_single_variable() {
        // x0^2 cubed -> x0^6
        let p = Poly::monomial(2, &MonomialIndex::new(vec![0, 0]), 1.0).unwrap();
        let q = p.pow(3).unwrap();
        assert_eq!(q.degree(), 6);
        let mut expect = Poly::zero(2, 6);
        expect.set_coeff(&MonomialIndex::new(vec![0; 6]), 1.0).unwrap();
        assert_eq!(q, expect);
    }

    #[test]
    fn pow_binomial() {
        // (x0^2 + x1^2)^2 = x0^4 + 2 x0^2 x1^2 + x1^4
        let mut p = Poly::zero(2, 2);
        p.set_coeff(&MonomialIndex::new(vec![0, 0]), 1.0).unwrap();
        p.set_coeff(&MonomialIndex::new(vec![1, 1]), 1.0).unwrap();
        let q = p.pow(2).unwrap();
        assert_eq!(*q.coeff(&MonomialIndex::new(vec![0, 0, 0, 0])).unwrap(), 1.0);
        assert_eq!(*q.coeff(&MonomialIndex::new(vec![0, 0, 1, 1])).unwrap(), 2.0);
        assert_eq!(*q.coeff(&MonomialIndex::new(vec![1, 1, 1, 1])).unwrap(), 1.0);
        assert_eq!(*q.coeff(&MonomialIndex::new(vec![0, 0, 0, 1])).unwrap(), 0.0);
    }

    #[test]
    fn pow_capacity_error() {
        let p = Poly::monomial(2, &MonomialIndex::new(vec![0, 0]), 1.0).unwrap();
        assert!(matches!(p.pow(10), Err(Error::Capacity { .. })));
    }

    #[test]
    fn derivative_cubic() {
        // d/dx0 (x0^3) = 3 x0^2
        let p = Poly::monomial(1, &MonomialIndex::new(vec![0, 0, 0]), 1.0).unwrap();
        let d = p.partial_derivative(&MonomialIndex::new(vec![0])).unwrap();
        assert_eq!(*d.coeff(&MonomialIndex::new(vec![0, 0])).unwrap(), 3.0);
    }

    #[test]
    fn derivative_mixed() {
        // d_{0,1} (x0^2 x1) = 2 x0
        let p = Poly::monomial(2, &MonomialIndex::new(vec![0, 0, 1]), 1.0).unwrap();
        let d = p.partial_derivative(&MonomialIndex::new(vec![0, 1])).unwrap();
        assert_eq!(*d.coeff(&MonomialIndex::new(vec![0])).unwrap(), 2.0);
        assert_eq!(*d.coeff(&MonomialIndex::new(vec![1])).unwrap(), 0.0);
    }

    #[test]
    fn derivative_order_error() {
        let p = Poly::monomial(2, &MonomialIndex::new(vec![0, 1]), 1.0).unwrap();
        assert!(p.partial_derivative(&MonomialIndex::new(vec![0, 0, 1])).is_err());
    }

    #[test]
    fn derivative_order_independence() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = random_poly(4, 5, &mut rng);
        let i = MonomialIndex::new(vec![0, 2]);
        let j = MonomialIndex::new(vec![2, 3]);
        let both = MonomialIndex::new(vec![0, 2, 2, 3]);
        let a = p.partial_derivative(&both).unwrap();
        let b = p
            .partial_derivative(&i)
            .unwrap()
            .partial_derivative(&j)
            .unwrap();
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((x - y).abs() < 1e-9 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn restrict_kills_outside_variables() {
        // x0 x2 restricted to {0,1} -> 0
        let p = Poly::monomial(3, &MonomialIndex::new(vec![0, 2]), 1.0).unwrap();
        let r = RestrictionMap::new(3, vec![0, 1]).unwrap();
        let q = p.restrict(&r).unwrap();
        assert!(q.coeffs().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn restrict_reindexes() {
        // x2^2 restricted to {1,2} -> y1^2
        let p = Poly::monomial(3, &MonomialIndex::new(vec![2, 2]), 1.5).unwrap();
        let r = RestrictionMap::new(3, vec![1, 2]).unwrap();
        let q = p.restrict(&r).unwrap();
        assert_eq!(*q.coeff(&MonomialIndex::new(vec![1, 1])).unwrap(), 1.5);
    }

    #[test]
    fn nested_restrict_is_intersection() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_poly(6, 3, &mut rng);
        let outer = RestrictionMap::new(6, vec![0, 2, 3, 5]).unwrap();
        // local {1,2} within {0,2,3,5} corresponds to global {2,3}
        let inner = RestrictionMap::new(4, vec![1, 2]).unwrap();
        let direct = RestrictionMap::new(6, vec![2, 3]).unwrap();
        let a = p.restrict(&outer).unwrap().restrict(&inner).unwrap();
        let b = p.restrict(&direct).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn restrict_commutes_with_local_derivative() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = random_poly(5, 4, &mut rng);
        let r = RestrictionMap::new(5, vec![1, 3, 4]).unwrap();
        // derivative in a variable inside S: global index 3 = local index 1
        let d_global = p
            .partial_derivative(&MonomialIndex::new(vec![3]))
            .unwrap()
            .restrict(&r)
            .unwrap();
        let d_local = p
            .restrict(&r)
            .unwrap()
            .partial_derivative(&MonomialIndex::new(vec![1]))
            .unwrap();
        for (x, y) in d_global.coeffs().iter().zip(d_local.coeffs()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_rational_pow_additivity() {
        type RatPoly = HomPoly<BigRational>;
        let int = |v: i64| BigRational::from_integer(BigInt::from(v));
        let p = RatPoly::new(2, 2, vec![int(2), int(-3), int(1)]).unwrap();
        let lhs = p.pow(5).unwrap();
        let rhs = p.pow(2).unwrap().mul(&p.pow(3).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn float_pow_additivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = random_poly(3, 2, &mut rng);
        let lhs = p.pow(3).unwrap();
        let rhs = p.pow(1).unwrap().mul(&p.pow(2).unwrap()).unwrap();
        let diff: f64 = lhs
            .coeffs()
            .iter()
            .zip(rhs.coeffs())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(diff < 1e-10 * lhs.norm().max(1.0));
    }
}
