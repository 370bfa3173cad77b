//! Exact arithmetic: prime fields, small extension fields, rationals and
//! p-adic valuations.

mod gfp;
mod gfpe;
mod padic;

pub use gfp::{Gfp, Prime};
pub use gfpe::{gfpe_context, GfpeField};
pub use padic::{padic_leading_digit, vp, vp_int, PadicValue};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

use num_traits::{One, Zero};
use std::fmt::Debug;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field of size {p}^{e} does not fit in 128 bits")]
    FieldTooLarge { p: u64, e: usize },
    #[error("p-adic leading digit needs a value of nonnegative valuation")]
    NegativeValuation,
}

/// A field given by a context value; elements are plain data.
///
/// Keeping the modulus in the context (instead of in every element) lets the
/// same elimination code run over GF(p), GF(p^e) and the rationals.
pub trait Field: Sync {
    type Elem: Clone + Eq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }
}

/// The rationals, used for exact cross-checks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
}

/// Shorthand for an exact rational from a pair of machine integers.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Number of bits in the denominator of a reduced rational.
pub fn denominator_bits(q: &BigRational) -> u64 {
    q.denom().bits()
}
