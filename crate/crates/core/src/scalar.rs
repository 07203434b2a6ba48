//! Scalar abstraction for the geometry kernel.
//!
//! The kernel is written once against [`Scalar`]. Exact results require an
//! exact field such as [`BigRational`]; the float impls exist for quick
//! previews and rendering and carry no certificates.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// An ordered field usable by the geometry kernel.
pub trait Scalar:
    Clone + PartialOrd + Debug + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    /// The value `2^{-k}`.
    fn pow2_neg(k: u32) -> Self;

    /// Lossy conversion for presentation only.
    fn to_f64_lossy(&self) -> f64;

    /// `floor(self)` as an integer.
    fn floor_i64(&self) -> i64;

    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer fits scalar")
    }

    fn half() -> Self {
        Self::pow2_neg(1)
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl Scalar for BigRational {
    fn pow2_neg(k: u32) -> Self {
        BigRational::new(BigInt::one(), BigInt::one() << k as usize)
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn floor_i64(&self) -> i64 {
        self.floor().to_integer().to_i64().expect("floor fits i64")
    }
}

impl Scalar for f64 {
    fn pow2_neg(k: u32) -> Self {
        (-(k as i32) as f64).exp2()
    }

    fn to_f64_lossy(&self) -> f64 {
        *self
    }

    fn floor_i64(&self) -> i64 {
        self.floor() as i64
    }
}

impl Scalar for f32 {
    fn pow2_neg(k: u32) -> Self {
        (-(k as i32) as f32).exp2()
    }

    fn to_f64_lossy(&self) -> f64 {
        *self as f64
    }

    fn floor_i64(&self) -> i64 {
        self.floor() as i64
    }
}

/// Exponent `k` standing for the dyadic tolerance `2^{-k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyadicExp(pub u32);

impl DyadicExp {
    pub fn value<T: Scalar>(self) -> T {
        T::pow2_neg(self.0)
    }

    /// `(2^{-k})^2 = 2^{-2k}`, the form every distance comparison uses.
    pub fn squared<T: Scalar>(self) -> T {
        T::pow2_neg(2 * self.0)
    }

    /// Exact comparison `2^{-k} < r` for nonnegative `r`.
    pub fn lt<T: Scalar>(self, r: &T) -> bool {
        self.value::<T>() < *r
    }
}

/// Least `k >= k_min` with `(2^{-k})^2 < d2`, or `None` if `d2 == 0`
/// or the search exceeds `k_max`.
pub fn least_exp_below_sq<T: Scalar>(d2: &T, k_min: u32, k_max: u32) -> Option<u32> {
    if *d2 <= T::zero() {
        return None;
    }
    (k_min..=k_max).find(|&k| T::pow2_neg(2 * k) < *d2)
}

/// Parse `"p/q"` or `"p"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::parse_bytes(num.as_bytes(), 10)?;
    let d = BigInt::parse_bytes(den.as_bytes(), 10)?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

/// Canonical `"p/q"` (or `"p"` for integers) text for a rational.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `true` iff `a + c < b` where `a = sqrt(a2)`, `b = sqrt(b2)` and `c >= 0`.
pub fn sqrt_sum_lt<T: Scalar>(a2: &T, c: &T, b2: &T) -> bool {
    // a + c < b  <=>  c < b  and  a2 < (b - c)^2 = b2 - 2cb + c^2
    //            <=>  2cb < b2 + c^2 - a2
    let rhs = b2.clone() + c.clone() * c.clone() - a2.clone();
    if rhs <= T::zero() {
        return false;
    }
    let two = T::from_int(2);
    let lhs_sq = two.clone() * two * c.clone() * c.clone() * b2.clone();
    if !(c.clone() * c.clone() < b2.clone()) {
        return false;
    }
    lhs_sq < rhs.clone() * rhs
}

/// `true` iff `sqrt(a2) + sqrt(b2) <= c` for nonnegative inputs and `c >= 0`.
pub fn sqrt_pair_le<T: Scalar>(a2: &T, b2: &T, c: &T) -> bool {
    // a + b <= c  <=>  a2 + b2 + 2ab <= c^2  <=>  2ab <= c^2 - a2 - b2
    let rhs = c.clone() * c.clone() - a2.clone() - b2.clone();
    if rhs < T::zero() {
        return false;
    }
    T::from_int(4) * a2.clone() * b2.clone() <= rhs.clone() * rhs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn parses_and_formats() {
        assert_eq!(q("6/4"), q("3/2"));
        assert_eq!(format_rational(&q("6/4")), "3/2");
        assert_eq!(format_rational(&q("-4/2")), "-2");
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }

    #[test]
    fn pow2_is_exact() {
        assert_eq!(BigRational::pow2_neg(3), q("1/8"));
        assert_eq!(DyadicExp(2).squared::<BigRational>(), q("1/16"));
        assert!(DyadicExp(1).lt(&q("3/4")));
        assert!(!DyadicExp(1).lt(&q("1/2")));
        assert_eq!(f64::pow2_neg(2), 0.25);
    }

    #[test]
    fn least_exponent() {
        assert_eq!(least_exp_below_sq(&q("1/4"), 0, 10), Some(2));
        assert_eq!(least_exp_below_sq(&q("9/64"), 2, 10), Some(2));
        assert_eq!(least_exp_below_sq(&q("0"), 0, 10), None);
    }

    #[test]
    fn sqrt_comparisons() {
        // 3 + 1 < 5
        assert!(sqrt_sum_lt(&q("9"), &q("1"), &q("25")));
        // 3 + 2 < 5 is false
        assert!(!sqrt_sum_lt(&q("9"), &q("2"), &q("25")));
        // 3 + 4 <= 7
        assert!(sqrt_pair_le(&q("9"), &q("16"), &q("7")));
        assert!(!sqrt_pair_le(&q("9"), &q("16"), &q("69/10")));
    }
}
