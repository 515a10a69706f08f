//! Helpers around arbitrary-precision rationals.
//!
//! [`num_rational::BigRational`] already maintains the invariants we need
//! (gcd-reduced, positive denominator); this module adds the "p/q" string
//! conventions used by every external interface plus exact square roots.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Arbitrary-precision rational, always reduced with positive denominator.
pub type Rational = num_rational::BigRational;

/// Shorthand for small rationals in tests and fixtures.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Embeds an integer.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses "p" or "p/q" with optional sign; q must be nonzero.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let s = s.trim();
    let bad = || Error::BadRational(s.to_string());
    match s.split_once('/') {
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(n))
        }
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
    }
}

/// Renders in lowest terms: integers as "p", everything else as "p/q".
pub fn render_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Exact nonnegative square root, if the argument is a rational square.
pub fn sqrt_exact(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let num = x.numer();
    let den = x.denom();
    let rn = num.sqrt();
    let rd = den.sqrt();
    if &(&rn * &rn) == num && &(&rd * &rd) == den {
        Some(Rational::new(rn, rd))
    } else {
        None
    }
}

/// Least common multiple of the denominators of a slice of rationals.
pub fn common_denominator(values: &[Rational]) -> BigInt {
    let mut d = BigInt::one();
    for v in values {
        d = d.lcm(v.denom());
    }
    d
}

/// Scales a rational vector to integers by the common denominator.
/// Returns (scaled vector, denominator used).
pub fn scale_to_integers(values: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let d = common_denominator(values);
    let scaled = values
        .iter()
        .map(|v| v.numer() * (&d / v.denom()))
        .collect();
    (scaled, d)
}

/// True when every entry is an integer.
pub fn all_integral(values: &[Rational]) -> bool {
    values.iter().all(|v| v.denom().is_one())
}
