//! Exact combinatorics and arithmetic of homogeneous polynomials, symmetric
//! tensors, derivatives, and coordinate restrictions.
//!
//! Every value here is immutable after construction and every operation is
//! pure, so the whole module is safe to use from multiple threads.

pub mod coeff;
pub mod monomial;
pub mod poly;
pub mod tensor;

pub use coeff::{Coeff, QuadSqrt6};
pub use monomial::{
    
    binomial, merge_sorted, monomial_count, monomial_rank, monomial_unrank, perm_count_sorted,
    rank_exponents, rank_sorted, MonomialIndex, MultisetIter,
};
pub use poly::{HomPoly, Poly, RestrictionMap, MAX_DEGREE};
pub use tensor::{sym, tensor_apply, DenseTensor, SymTensor, SymTensorF};

use num_rational::BigRational;

/// Exact-rational polynomial for the symbolic oracles.
pub type RatPoly = HomPoly<BigRational>;
