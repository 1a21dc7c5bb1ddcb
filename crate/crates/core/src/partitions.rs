//! Integer partitions and the scalars attached to them: z_λ, dim λ / |λ|!,
//! generalized Pochhammer symbols and content products.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{arg_err, Error, Result};
use crate::scalar::{Field, Rational};

/// A weakly decreasing list of positive parts. Zeros are dropped on construction.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return arg_err(format!("parts {:?} are not weakly decreasing", parts));
        }
        if parts.contains(&0) {
            return arg_err("zero part in the middle of a partition");
        }
        Ok(Partition(parts))
    }

    /// Sorts the parts; useful for cycle types.
    pub fn from_unsorted(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    /// The one-row partition (m); empty for m = 0.
    pub fn row(m: usize) -> Self {
        if m == 0 {
            Self::empty()
        } else {
            Partition(vec![m])
        }
    }

    /// (1^d)
    pub fn column(d: usize) -> Self {
        Partition(vec![1; d])
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// λ_i with 1-based index; 0 beyond the length.
    pub fn part(&self, i: usize) -> usize {
        self.0.get(i.wrapping_sub(1)).copied().unwrap_or(0)
    }

    pub fn conjugate(&self) -> Self {
        let first = self.0.first().copied().unwrap_or(0);
        let conj = (1..=first).map(|j| self.0.iter().take_while(|&&p| p >= j).count()).collect();
        Partition(conj)
    }

    /// (k, m_k) pairs for every part size present, ascending in k.
    pub fn multiplicities(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &p in self.0.iter().rev() {
            match out.last_mut() {
                Some((k, m)) if *k == p => *m += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    /// Cells (i, j), 1-based, row by row.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &p)| (1..=p).map(move |j| (i + 1, j)))
    }

    pub fn hook_lengths(&self) -> Vec<usize> {
        let conj = self.conjugate();
        self.cells().map(|(i, j)| self.part(i) - j + conj.part(j) - i + 1).collect()
    }

    /// λ + α: pad to `n` rows and add α to each. Requires ℓ(λ) ≤ n.
    pub fn shifted(&self, alpha: usize, n: usize) -> Result<Self> {
        if self.len() > n {
            return arg_err(format!("cannot pad {} to {} rows", self, n));
        }
        Partition::new((1..=n).map(|i| self.part(i) + alpha).collect())
    }

    /// Parts as a p-exponent vector: entry k-1 is the multiplicity of k.
    pub fn to_exponents(&self) -> Vec<u32> {
        let mut e = vec![0u32; self.0.first().copied().unwrap_or(0)];
        for &p in &self.0 {
            e[p - 1] += 1;
        }
        e
    }

    pub fn from_exponents(e: &[u32]) -> Self {
        let mut parts = Vec::new();
        for (k, &m) in e.iter().enumerate().rev() {
            parts.extend(std::iter::repeat_n(k + 1, m as usize));
        }
        Partition(parts)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let s: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self)
    }
}

impl FromStr for Partition {
    type Err = Error;
    /// Comma-joined parts; "0" or "" is the empty partition.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "0" || s == "()" {
            return Ok(Partition::empty());
        }
        let s = s.trim_start_matches('(').trim_end_matches(')');
        let parts = s
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Argument(format!("bad part '{}'", t))))
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        Partition::new(v).map_err(serde::de::Error::custom)
    }
}

/// All partitions of `d` in reverse-lexicographic order.
pub fn enumerate_partitions(d: usize) -> Vec<Partition> {
    partitions_bounded(d, d, usize::MAX)
}

/// Partitions of `d` with parts ≤ `max_part` and at most `max_len` parts, reverse-lex.
pub fn partitions_bounded(d: usize, max_part: usize, max_len: usize) -> Vec<Partition> {
    fn rec(rem: usize, max_part: usize, max_len: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        if cur.len() == max_len {
            return;
        }
        for p in (1..=max_part.min(rem)).rev() {
            cur.push(p);
            rec(rem - p, p, max_len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, max_part, max_len, &mut Vec::new(), &mut out);
    out
}

/// Every partition of weight ≤ `dmax` with at most `max_len` rows, by weight then reverse-lex.
pub fn partitions_up_to(dmax: usize, max_len: usize) -> Vec<Partition> {
    (0..=dmax).flat_map(|d| partitions_bounded(d, d, max_len)).collect()
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn factorial_rational(n: usize) -> Rational {
    Rational::from_integer(factorial(n))
}

/// z_λ = ∏_k k^{m_k} m_k!
pub fn z_of(lambda: &Partition) -> Rational {
    let z = lambda
        .multiplicities()
        .into_iter()
        .fold(BigInt::one(), |acc, (k, m)| acc * num_traits::pow(BigInt::from(k), m) * factorial(m));
    Rational::from_integer(z)
}

/// dim λ / |λ|! = 1 / ∏ hooks
pub fn dim_over_dfact(lambda: &Partition) -> Rational {
    let h = lambda.hook_lengths().into_iter().fold(BigInt::one(), |acc, h| acc * BigInt::from(h));
    Rational::new(BigInt::one(), h)
}

/// Number of standard Young tableaux of shape λ.
pub fn dim(lambda: &Partition) -> BigInt {
    (dim_over_dfact(lambda) * factorial_rational(lambda.weight())).to_integer()
}

/// (a)_λ = ∏_i (a − i + 1)_{λ_i} with rising factorials.
pub fn pochhammer_lambda<F: Field>(a: &F, lambda: &Partition) -> F {
    let mut acc = F::one();
    for (i, &p) in lambda.parts().iter().enumerate() {
        let base = a.clone() - F::from_i64(i as i64);
        for k in 0..p {
            acc *= base.clone() + F::from_i64(k as i64);
        }
    }
    acc
}

/// ∏_{(i,j)∈λ} r(n + j − i). `r` returns `None` at a pole.
pub fn content_product<F: Field>(r: impl Fn(i64) -> Option<F>, n: i64, lambda: &Partition) -> Result<F> {
    let mut acc = F::one();
    for (i, j) in lambda.cells() {
        let arg = n + j as i64 - i as i64;
        match r(arg) {
            Some(v) => acc *= v,
            None => return Err(Error::Pole { row: i, col: j, arg }),
        }
    }
    Ok(acc)
}
