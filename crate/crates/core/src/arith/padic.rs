use super::{ArithError, BigInt, BigRational, Prime};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

/// A p-adic valuation: an integer exponent, or `+∞` for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PadicValue {
    Finite(i64),
    Infinite,
}

impl PadicValue {
    pub fn finite(self) -> Option<i64> {
        match self {
            PadicValue::Finite(k) => Some(k),
            PadicValue::Infinite => None,
        }
    }
}

impl Ord for PadicValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (PadicValue::Finite(a), PadicValue::Finite(b)) => a.cmp(b),
            (PadicValue::Finite(_), PadicValue::Infinite) => Ordering::Less,
            (PadicValue::Infinite, PadicValue::Finite(_)) => Ordering::Greater,
            (PadicValue::Infinite, PadicValue::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for PadicValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::ops::Add for PadicValue {
    type Output = PadicValue;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (PadicValue::Finite(a), PadicValue::Finite(b)) => PadicValue::Finite(a + b),
            _ => PadicValue::Infinite,
        }
    }
}

impl fmt::Display for PadicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PadicValue::Finite(k) => write!(f, "{k}"),
            PadicValue::Infinite => write!(f, "inf"),
        }
    }
}

/// Exponent of `p` in a nonzero integer; `+∞` for zero.
pub fn vp_int(z: &BigInt, p: Prime) -> PadicValue {
    if z.is_zero() {
        return PadicValue::Infinite;
    }
    let p = BigInt::from(p.get());
    let mut z = z.abs();
    let mut k = 0;
    loop {
        let (q, r) = z.div_rem(&p);
        if !r.is_zero() {
            return PadicValue::Finite(k);
        }
        z = q;
        k += 1;
    }
}

/// `vp(u) = k` where `u = p^k a/b` with `a`, `b` prime to `p`.
pub fn vp(u: &BigRational, p: Prime) -> PadicValue {
    match (vp_int(u.numer(), p), vp_int(u.denom(), p)) {
        (PadicValue::Infinite, _) => PadicValue::Infinite,
        (PadicValue::Finite(a), PadicValue::Finite(b)) => PadicValue::Finite(a - b),
        (PadicValue::Finite(_), PadicValue::Infinite) => unreachable!("denominator is nonzero"),
    }
}

/// The order-0 digit `a₀` of the p-adic expansion of `u`, so that
/// `vp(u - a₀) >= 1`. Zero when `vp(u) >= 1`.
pub fn padic_leading_digit(u: &BigRational, p: Prime) -> Result<u64, ArithError> {
    match vp(u, p) {
        PadicValue::Infinite => Ok(0),
        PadicValue::Finite(k) if k < 0 => Err(ArithError::NegativeValuation),
        PadicValue::Finite(k) if k > 0 => Ok(0),
        PadicValue::Finite(_) => {
            // a = b x (mod p)
            let pm = BigInt::from(p.get());
            let a = u.numer().mod_floor(&pm).to_u64().unwrap();
            let b = u.denom().mod_floor(&pm).to_u64().unwrap();
            let f = super::Gfp::from_prime(p);
            use super::Field;
            let b_inv = f.inv(&b).expect("denominator is prime to p");
            Ok(f.mul(&a, &b_inv))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use proptest::prelude::*;

    fn prime(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(vp(&rat(12, 1), prime(2)), PadicValue::Finite(2));
        assert_eq!(vp(&rat(0, 1), prime(5)), PadicValue::Infinite);
        assert_eq!(vp(&rat(18, 5), prime(3)), PadicValue::Finite(2));
        assert_eq!(vp(&rat(5, 18), prime(3)), PadicValue::Finite(-2));
        assert_eq!(vp(&rat(-7, 1), prime(7)), PadicValue::Finite(1));
    }

    #[test]
    fn leading_digit_examples() {
        assert_eq!(padic_leading_digit(&rat(7, 1), prime(7)), Ok(0));
        assert_eq!(padic_leading_digit(&rat(3, 1), prime(5)), Ok(3));
        assert_eq!(padic_leading_digit(&rat(10, 3), prime(7)), Ok(1));
        assert_eq!(
            padic_leading_digit(&rat(1, 7), prime(7)),
            Err(ArithError::NegativeValuation)
        );
        // 10/3 - 1 = 7/3
        assert_eq!(vp(&(rat(10, 3) - rat(1, 1)), prime(7)), PadicValue::Finite(1));
    }

    fn nonzero() -> impl Strategy<Value = BigRational> {
        (1i64..5000, 1i64..5000, any::<bool>()).prop_map(|(a, b, neg)| rat(if neg { -a } else { a }, b))
    }

    proptest! {
        #[test]
        fn valuation_is_multiplicative(u in nonzero(), v in nonzero(), pi in 0usize..4) {
            let p = prime([2, 3, 5, 7][pi]);
            prop_assert_eq!(vp(&(&u * &v), p), vp(&u, p) + vp(&v, p));
        }

        #[test]
        fn valuation_is_ultrametric(u in nonzero(), v in nonzero(), pi in 0usize..4) {
            let p = prime([2, 3, 5, 7][pi]);
            prop_assert!(vp(&(&u + &v), p) >= vp(&u, p).min(vp(&v, p)));
        }

        #[test]
        fn leading_digit_cancels(a in -5000i64..5000, b in 1i64..5000, pi in 0usize..4) {
            let p = prime([2, 3, 5, 7][pi]);
            let u = rat(a, b);
            prop_assume!(vp(&u, p) >= PadicValue::Finite(0));
            let d = padic_leading_digit(&u, p).unwrap();
            prop_assert!(d < p.get());
            let rest = u - rat(d as i64, 1);
            prop_assert!(vp(&rest, p) >= PadicValue::Finite(1));
        }
    }
}
