//! Exact rational scalars and the handful of numeric helpers the rest of the
//! crate needs: parsing, canonical `p/q` formatting, square-root brackets,
//! continued-fraction rationalization and real values that may be irrational.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num = BigInt::from_str(num).ok()?;
    let den = BigInt::from_str(den).ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Canonical decimal form of the exact fraction: `p` for integers, `p/q` otherwise.
pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Very large numerators and denominators: divide in floating point
        // after shifting both to a common magnitude.
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Floor and ceiling rationals of `sqrt(q)` with denominator `den * 10^digits`.
pub fn sqrt_bracket(q: &Rational, digits: u32) -> (Rational, Rational) {
    assert!(!q.is_negative(), "square root of a negative rational");
    if q.is_zero() {
        return (zero(), zero());
    }
    // sqrt(a/b) = sqrt(a*b) / b
    let scale = BigInt::from(10u32).pow(digits);
    let radicand = q.numer() * q.denom() * &scale * &scale;
    let lo = radicand.sqrt();
    let den = q.denom() * &scale;
    let lower = Rational::new(lo.clone(), den.clone());
    if &lo * &lo == radicand {
        return (lower.clone(), lower);
    }
    (lower, Rational::new(lo + 1, den))
}

/// A rational in `[sqrt(q), sqrt(q)·(1 + 10^-digits)]` with the smallest
/// denominator, equal to `sqrt(q)` when that is rational.
pub fn sqrt_upper_compact(q: &Rational, digits: u32) -> Rational {
    let (lo, hi) = sqrt_bracket(q, digits + 2);
    if lo == hi {
        return lo;
    }
    let slack = Rational::new(BigInt::one(), BigInt::from(10u32).pow(digits));
    let top = &hi * (Rational::one() + slack);
    simplest_between(&hi, &top)
}

/// The rational with the smallest denominator in `[a, b]`, for `0 <= a <= b`.
pub fn simplest_between(a: &Rational, b: &Rational) -> Rational {
    let fl = a.floor();
    if fl == *a {
        return fl;
    }
    if b.floor() > fl {
        return fl + Rational::one();
    }
    let inner = simplest_between(&(Rational::one() / (b - &fl)), &(Rational::one() / (a - &fl)));
    fl + Rational::one() / inner
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// by continued-fraction convergents.
pub fn rationalize(x: f64, max_den: u64) -> Rational {
    if !x.is_finite() {
        return zero();
    }
    let negative = x < 0.0;
    let mut rest = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    for _ in 0..64 {
        let a = rest.floor();
        if a > 1e18 {
            break;
        }
        let a_int = a as u128;
        let p2 = a_int * p1 + p0;
        let q2 = a_int * q1 + q0;
        if q2 > max_den as u128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let f = rest - a;
        if f < 1e-15 {
            break;
        }
        rest = 1.0 / f;
    }
    if q1 == 0 {
        return zero();
    }
    let value = Rational::new(BigInt::from(p1), BigInt::from(q1));
    if negative {
        -value
    } else {
        value
    }
}

/// Smallest multiple of `1/10^digits` that is `>= x`, for turning float
/// upper bounds into rational ones.
pub fn ceil_decimal(x: f64, digits: u32) -> Rational {
    let scale = 10f64.powi(digits as i32);
    let scaled = (x * scale).ceil();
    let num = BigInt::from(scaled as i128);
    Rational::new(num, BigInt::from(10u32).pow(digits))
}

/// Multiplies a rational vector by the least common multiple of its
/// denominators and divides by the gcd of the numerators.
pub fn primitive_integer(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = v.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if gcd.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &gcd).collect()
}

pub fn sign_of(q: &Rational) -> Ordering {
    match q.numer().sign() {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

/// A nonnegative real that is either an exact rational, the square root of
/// one, or a floating point estimate. Norms of rational vectors land in one
/// of these three shapes depending on the exponent.
#[derive(Clone, Debug, PartialEq)]
pub enum RealValue {
    Exact(Rational),
    Sqrt(Rational),
    Approx(f64),
}

/// Decimal digits used when a square root has to be bracketed.
pub const SQRT_DIGITS: u32 = 20;

/// Relative slack applied to floating point values before they are trusted
/// as bounds.
pub const FLOAT_SLACK: f64 = 1e-9;

impl RealValue {
    /// `sqrt(q)`, collapsed to `Exact` when `q` is a rational square.
    pub fn sqrt_of(q: Rational) -> RealValue {
        let (lo, hi) = sqrt_bracket(&q, 0);
        if lo == hi {
            RealValue::Exact(lo)
        } else {
            RealValue::Sqrt(q)
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            RealValue::Exact(q) => to_f64(q),
            RealValue::Sqrt(q) => to_f64(q).sqrt(),
            RealValue::Approx(v) => *v,
        }
    }

    pub fn is_exact(&self) -> bool {
        match self {
            RealValue::Exact(_) => true,
            RealValue::Sqrt(q) => {
                let (lo, hi) = sqrt_bracket(q, 0);
                lo == hi
            }
            RealValue::Approx(_) => false,
        }
    }

    /// A rational no smaller than the value.
    pub fn upper_rational(&self) -> Rational {
        match self {
            RealValue::Exact(q) => q.clone(),
            RealValue::Sqrt(q) => sqrt_bracket(q, SQRT_DIGITS).1,
            RealValue::Approx(v) => ceil_decimal(v * (1.0 + FLOAT_SLACK) + 1e-12, 12),
        }
    }

    /// A rational no larger than the value.
    pub fn lower_rational(&self) -> Rational {
        match self {
            RealValue::Exact(q) => q.clone(),
            RealValue::Sqrt(q) => sqrt_bracket(q, SQRT_DIGITS).0,
            RealValue::Approx(v) => {
                let lo = v * (1.0 - FLOAT_SLACK) - 1e-12;
                if lo <= 0.0 {
                    zero()
                } else {
                    -ceil_decimal(-lo, 12)
                }
            }
        }
    }

    /// Compares against a rational: exact for `Exact` and `Sqrt`, within
    /// [`FLOAT_SLACK`] for `Approx` (ties resolve to `Equal`).
    pub fn cmp_rational(&self, q: &Rational) -> Ordering {
        match self {
            RealValue::Exact(v) => v.cmp(q),
            RealValue::Sqrt(v) => {
                if q.is_negative() {
                    Ordering::Greater
                } else {
                    v.cmp(&(q * q))
                }
            }
            RealValue::Approx(v) => {
                let qf = to_f64(q);
                let tol = FLOAT_SLACK * (1.0 + qf.abs().max(v.abs()));
                if (v - qf).abs() <= tol {
                    Ordering::Equal
                } else if *v < qf {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    }

    pub fn le_rational(&self, q: &Rational) -> bool {
        self.cmp_rational(q) != Ordering::Greater
    }

    pub fn scale(&self, c: &Rational) -> RealValue {
        match self {
            RealValue::Exact(v) => RealValue::Exact(v * c.abs()),
            RealValue::Sqrt(v) => RealValue::Sqrt(v * c * c),
            RealValue::Approx(v) => RealValue::Approx(v * to_f64(c).abs()),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            RealValue::Exact(q) => fmt_rational(q),
            RealValue::Sqrt(q) => format!("sqrt({})", fmt_rational(q)),
            RealValue::Approx(v) => format!("~{v:.12}"),
        }
    }
}

impl fmt::Display for RealValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}
