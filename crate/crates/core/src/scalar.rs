//! Scalar abstraction shared by the measure and integral engines.
//!
//! Everything downstream of the simulator is plain ring arithmetic over
//! atoms and grid values, so it runs unchanged on `f32`, `f64` and exact
//! rationals. The exact instantiation turns the discrete identities into
//! equalities that can be checked with `==`.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, NumAssign, Signed, ToPrimitive, Zero};

pub trait Scalar: NumAssign + Signed + Clone + Debug + PartialEq + Send + Sync + 'static {
    fn from_i64(v: i64) -> Self;
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    fn powi(&self, exp: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc *= self.clone();
        }
        acc
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn powi(&self, exp: usize) -> Self {
        f64::powi(*self, exp as i32)
    }
}

impl Scalar for f32 {
    fn from_i64(v: i64) -> Self {
        v as f32
    }
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    fn to_f64(&self) -> f64 {
        *self as f64
    }
    fn powi(&self, exp: usize) -> Self {
        f32::powi(*self, exp as i32)
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_f64(v: f64) -> Self {
        // Exact binary expansion; non-finite input collapses to zero.
        <BigRational as FromPrimitive>::from_f64(v).unwrap_or_else(BigRational::zero)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// `|a - b| <= tol * (1 + |b|)`, the closeness test used for identities that
/// hold up to floating-point reordering.
pub fn close<S: Scalar>(a: &S, b: &S, tol: f64) -> bool {
    let diff = (a.clone() - b.clone()).abs().to_f64();
    diff <= tol * (1.0 + b.abs().to_f64())
}

/// Residual normalised as in [`close`].
pub fn relative_residual<S: Scalar>(a: &S, b: &S) -> f64 {
    (a.clone() - b.clone()).abs().to_f64() / (1.0 + b.abs().to_f64())
}
