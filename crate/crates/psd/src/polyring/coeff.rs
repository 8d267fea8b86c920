//! Coefficient abstraction: the polynomial layer runs over `f64` for the
//! numerical pipeline and over exact rationals for the symbolic oracles.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt::Debug;
use std::ops::{AddAssign, Mul, Neg, Sub, SubAssign};

pub trait Coeff:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + AddAssign
    + SubAssign
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64(v: i64) -> Self;
    /// Exact division by a natural number (orbit sizes, factorials).
    fn div_nat(&self, d: u64) -> Self;
    fn scale_i64(&self, s: i64) -> Self {
        self.clone() * Self::from_i64(s)
    }
    /// Magnitude as `f64`; lossy for rationals, used only for diagnostics.
    fn abs_f64(&self) -> f64;
}

impl Coeff for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn div_nat(&self, d: u64) -> Self {
        self / d as f64
    }
    fn abs_f64(&self) -> f64 {
        self.abs()
    }
}

impl Coeff for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn div_nat(&self, d: u64) -> Self {
        self / BigRational::from_integer(BigInt::from(d))
    }
    fn abs_f64(&self) -> f64 {
        let n = self.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
        let d = self.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
        (n / d).abs()
    }
}

/// Element of the quadratic extension Q(sqrt(6)), stored as `a + b*sqrt(6)`.
///
/// Exact arithmetic for the cubic non-identifiability witness where the
/// construction requires `a = sqrt(6)` literally.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadSqrt6 {
    pub rat: BigRational,
    pub irr: BigRational,
}

impl QuadSqrt6 {
    pub fn new(rat: BigRational, irr: BigRational) -> Self {
        QuadSqrt6 { rat, irr }
    }
    pub fn sqrt6() -> Self {
        QuadSqrt6::new(BigRational::zero(), BigRational::one())
    }
    pub fn to_f64(&self) -> f64 {
        self.rat.abs_f64() * self.rat.signum_f64() + self.irr.abs_f64() * self.irr.signum_f64() * 6f64.sqrt()
    }
}

trait SignumF64 {
    fn signum_f64(&self) -> f64;
}
impl SignumF64 for BigRational {
    fn signum_f64(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else if self.is_positive() {
            1.0
        } else {
            -1.0
        }
    }
}

impl Zero for QuadSqrt6 {
    fn zero() -> Self {
        QuadSqrt6::new(BigRational::zero(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.irr.is_zero()
    }
}

impl One for QuadSqrt6 {
    fn one() -> Self {
        QuadSqrt6::new(BigRational::one(), BigRational::zero())
    }
}

impl std::ops::Add for QuadSqrt6 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        QuadSqrt6::new(self.rat + rhs.rat, self.irr + rhs.irr)
    }
}

impl std::ops::Sub for QuadSqrt6 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        QuadSqrt6::new(self.rat - rhs.rat, self.irr - rhs.irr)
    }
}

impl AddAssign for QuadSqrt6 {
    fn add_assign(&mut self, rhs: Self) {
        self.rat += rhs.rat;
        self.irr += rhs.irr;
    }
}

impl SubAssign for QuadSqrt6 {
    fn sub_assign(&mut self, rhs: Self) {
        self.rat -= rhs.rat;
        self.irr -= rhs.irr;
    }
}

impl Mul for QuadSqrt6 {
    type Output = Self;
    // (a + b s)(c + d s) = ac + 6bd + (ad + bc) s  with s^2 = 6
    fn mul(self, rhs: Self) -> Self {
        let six = BigRational::from_integer(BigInt::from(6));
        QuadSqrt6::new(
            &self.rat * &rhs.rat + six * &self.irr * &rhs.irr,
            &self.rat * &rhs.irr + &self.irr * &rhs.rat,
        )
    }
}

impl Neg for QuadSqrt6 {
    type Output = Self;
    fn neg(self) -> Self {
        QuadSqrt6::new(-self.rat, -self.irr)
    }
}

impl Coeff for QuadSqrt6 {
    fn from_i64(v: i64) -> Self {
        QuadSqrt6::new(BigRational::from_integer(BigInt::from(v)), BigRational::zero())
    }
    fn div_nat(&self, d: u64) -> Self {
        QuadSqrt6::new(self.rat.div_nat(d), self.irr.div_nat(d))
    }
    fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }
}
