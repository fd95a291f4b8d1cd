//! Exact arithmetic for the real-valued parameters.
//!
//! Real inputs (epsilon, lambda, eta, alpha, ...) are rounded once to a
//! multiple of 2^-20 and from then on handled as exact rationals. Quantities
//! that need a logarithm are evaluated in `f64` and rounded *up* to the grid
//! when they serve as upper bounds.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Real = Ratio<i128>;

pub const SCALE_BITS: u32 = 20;
const SCALE: f64 = (1u64 << SCALE_BITS) as f64;

/// Nearest multiple of 2^-20.
pub fn q20(x: f64) -> Real {
    Real::new((x * SCALE).round() as i128, 1 << SCALE_BITS)
}

/// Smallest multiple of 2^-20 that is `>= x`.
pub fn q20_up(x: f64) -> Real {
    Real::new((x * SCALE).ceil() as i128, 1 << SCALE_BITS)
}

pub fn int(x: i64) -> Real {
    Real::from_integer(x as i128)
}

pub fn to_f64(x: &Real) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

pub fn ceil_i64(x: &Real) -> i64 {
    x.ceil().to_integer() as i64
}

pub fn floor_i64(x: &Real) -> i64 {
    x.floor().to_integer() as i64
}

pub fn to_big(x: &Real) -> BigRational {
    BigRational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()))
}

/// `base^exp * scale`, exact.
pub fn big_pow_scaled(base: &Real, exp: usize, scale: i64) -> BigRational {
    let b = to_big(base);
    let mut acc = BigRational::one();
    for _ in 0..exp {
        acc *= &b;
    }
    acc * BigRational::from_integer(BigInt::from(scale))
}

pub fn big_floor(x: &BigRational) -> i64 {
    x.floor().to_integer().to_i64().unwrap_or(i64::MAX)
}

pub fn big_ceil(x: &BigRational) -> i64 {
    x.ceil().to_integer().to_i64().unwrap_or(i64::MAX)
}

/// Exact `a / b` for integers, as a `Real`.
pub fn frac(a: i64, b: i64) -> Real {
    Real::new(a as i128, b as i128)
}

pub fn is_nonneg(x: &Real) -> bool {
    !x.is_negative()
}

pub fn half() -> Real {
    Real::new(1, 2)
}

pub fn zero() -> Real {
    Real::zero()
}

/// `a * b` with the result snapped up to 2^-20; keeps denominators bounded
/// in long products.
pub fn mul_up(a: &Real, b: &Real) -> Real {
    snap_up(&(a * b))
}

pub fn snap_up(x: &Real) -> Real {
    let s = 1i128 << SCALE_BITS;
    let num = x.numer() * s;
    let (q, r) = num.div_mod_floor(x.denom());
    Real::new(if r.is_zero() { q } else { q + 1 }, s)
}

/// `lhs <= exact()`, where `approx` is an `f64` estimate of the right side.
/// The exact value is only built when the estimate is too close to call.
pub fn int_le(lhs: i64, approx: f64, exact: impl FnOnce() -> BigRational) -> bool {
    let tol = 1e-6 * (1.0 + approx.abs());
    if approx.is_finite() && (lhs as f64) < approx - tol {
        return true;
    }
    if approx.is_finite() && (lhs as f64) > approx + tol {
        return false;
    }
    BigRational::from_integer(BigInt::from(lhs)) <= exact()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rounding() {
        assert_eq!(q20(0.5), half());
        assert!(q20(1.0 / 3.0) * int(3) <= int(1) + frac(1, 1 << 20));
        assert!(q20_up(1.0 / 3.0) >= frac(1, 3));
        assert_eq!(snap_up(&frac(1, 3)), q20_up(1.0 / 3.0));
    }

    #[test]
    fn exact_power_floor() {
        // (7/8)^1 * 64 = 56
        assert_eq!(big_floor(&big_pow_scaled(&frac(7, 8), 1, 64)), 56);
        assert_eq!(big_ceil(&big_pow_scaled(&frac(7, 8), 2, 64)), 49);
        assert_eq!(ceil_i64(&frac(-3, 2)), -1);
        assert_eq!(floor_i64(&frac(-3, 2)), -2);
    }
}
