//! Scalar kinds used across the crate: arbitrary-precision rationals for the
//! exact core and `Complex64` for numerics.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Exact rational scalar. Always reduced, denominator positive.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Field operations shared by the exact and floating paths.
pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    fn from_i64(v: i64) -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn to_complex(&self) -> Complex64;
    /// Whether arithmetic in this field is exact.
    const EXACT: bool;

    fn powi(&self, e: i64) -> Self {
        let mut base = if e < 0 { Self::one() / self.clone() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

impl Field for Rational {
    const EXACT: bool = true;
    fn from_i64(v: i64) -> Self {
        int(v)
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }
}

impl Field for Complex64 {
    const EXACT: bool = false;
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_rational(q: &Rational) -> Self {
        Complex64::new(rational_to_f64(q), 0.0)
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
}

/// Nearest double; handles numerators and denominators beyond f64 range.
pub fn rational_to_f64(q: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // shift both into range
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift = nb - db - 60;
    let (n, d) = if shift > 0 {
        (q.numer().clone(), q.denom().clone() << shift as usize)
    } else {
        (q.numer().clone() << (-shift) as usize, q.denom().clone())
    };
    let ratio = (n / d).to_f64().unwrap_or(f64::NAN);
    ratio * 2f64.powi(shift as i32)
}

/// `"num/den"`, or just `"num"` for integers.
pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Some(Rational::from_integer(n));
    }
    // finite decimal literal, e.g. "0.25"
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let (ip, fp) = body.split_once('.')?;
    if ip.is_empty() && fp.is_empty() || !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{}{}", ip, fp).parse().ok()?;
    let den = num_traits::pow(BigInt::from(10), fp.len());
    let q = Rational::new(digits, den);
    Some(if neg { -q } else { q })
}

/// 15 significant digits, scientific notation.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    format!("{:.14e}", x)
}
