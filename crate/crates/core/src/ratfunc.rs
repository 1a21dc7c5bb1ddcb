//! Univariate rational functions over Q, used to keep the matrix size N symbolic.

use std::fmt;

use num_traits::{One, Zero};

use crate::scalar::{fmt_rational, Rational};

/// Dense polynomial, coefficients from the constant term up; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly(Vec<Rational>);

impl Poly {
    pub fn new(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly(c)
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    /// x + a
    pub fn linear(a: Rational) -> Self {
        Poly::new(vec![a, Rational::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    fn lead(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new(
            (0..n)
                .map(|i| {
                    self.0.get(i).cloned().unwrap_or_else(Rational::zero) + o.0.get(i).cloned().unwrap_or_else(Rational::zero)
                })
                .collect(),
        )
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::default();
        }
        let mut c = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    pub fn scale(&self, s: &Rational) -> Poly {
        Poly::new(self.0.iter().map(|c| c * s).collect())
    }

    /// (quotient, remainder)
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.degree().unwrap();
        let mut r = self.0.clone();
        let mut q = vec![Rational::zero(); self.0.len().saturating_sub(dd)];
        let lead = d.lead();
        while r.len() > dd && !r.is_empty() {
            let shift = r.len() - 1 - dd;
            let f = r.last().unwrap() / &lead;
            for (i, c) in d.0.iter().enumerate() {
                r[shift + i] -= &f * c;
            }
            q[shift] = f;
            r.pop();
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        (Poly::new(q), Poly::new(r))
    }

    pub fn monic_gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let l = a.lead();
        a.scale(&(Rational::one() / l))
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &Rational::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let coef = fmt_rational(&mag);
            match (k, coef.as_str()) {
                (0, _) => write!(f, "{}", coef)?,
                (1, "1") => write!(f, "N")?,
                (1, _) => write!(f, "{}*N", coef)?,
                (_, "1") => write!(f, "N^{}", k)?,
                _ => write!(f, "{}*N^{}", coef, k)?,
            }
        }
        Ok(())
    }
}

/// num/den in lowest terms with a monic denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFunc { num, den: Poly::constant(Rational::one()) };
        }
        let g = Poly::monic_gcd(&num, &den);
        let num = num.divrem(&g).0;
        let den = den.divrem(&g).0;
        let l = den.lead();
        RatFunc { num: num.scale(&(Rational::one() / &l)), den: den.scale(&(Rational::one() / l)) }
    }

    pub fn constant(c: Rational) -> Self {
        RatFunc::new(Poly::constant(c), Poly::constant(Rational::one()))
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc::new(p, Poly::constant(Rational::one()))
    }

    pub fn zero() -> Self {
        RatFunc::constant(Rational::zero())
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        RatFunc::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        RatFunc::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn inv(&self) -> RatFunc {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    /// `None` at a pole.
    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.den.eval(x);
        (!d.is_zero()).then(|| self.num.eval(x) / d)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) && self.den.coeffs()[0].is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}
