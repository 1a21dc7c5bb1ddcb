//! Hurwitz numbers: the character sum, its (N)_λ-weighted variant, and a
//! permutation-counting brute force used as ground truth.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::characters::phi;
use crate::error::{arg_err, Error, Result};
use crate::partitions::{dim_over_dfact, enumerate_partitions, factorial_rational, pochhammer_lambda, Partition};
use crate::ratfunc::{Poly, RatFunc};
use crate::scalar::{int, Field, Rational};

fn common_weight(profiles: &[Partition]) -> Result<usize> {
    let Some(first) = profiles.first() else {
        return arg_err("at least one profile is needed to fix the degree");
    };
    let d = first.weight();
    if let Some(bad) = profiles.iter().find(|p| p.weight() != d) {
        return arg_err(format!("profile {} has weight {}, expected {}", bad, bad.weight(), d));
    }
    Ok(d)
}

/// (λ, (dimλ/d!)^e ∏ φ_λ(Δ^i)) for every λ ⊢ d.
fn terms(e: i64, d: usize, profiles: &[Partition]) -> Result<Vec<(Partition, Rational)>> {
    enumerate_partitions(d)
        .into_iter()
        .map(|lambda| {
            let mut t = dim_over_dfact(&lambda).powi(e);
            for delta in profiles {
                t *= phi(&lambda, delta)?;
            }
            Ok((lambda, t))
        })
        .collect()
}

/// H_e(Δ¹,…,Δᵏ) = Σ_λ (dimλ/d!)^e ∏ φ_λ(Δ^i)
pub fn hurwitz(e: i64, profiles: &[Partition]) -> Result<Rational> {
    let d = common_weight(profiles)?;
    hurwitz_degree(e, d, profiles)
}

/// As [`hurwitz`] with the degree given explicitly, so an empty profile list is allowed.
pub fn hurwitz_degree(e: i64, d: usize, profiles: &[Partition]) -> Result<Rational> {
    if let Some(bad) = profiles.iter().find(|p| p.weight() != d) {
        return arg_err(format!("profile {} has weight {}, expected {}", bad, bad.weight(), d));
    }
    Ok(terms(e, d, profiles)?.into_iter().map(|(_, t)| t).sum())
}

/// Σ_λ (dimλ/d!)^e ∏ φ_λ(Δ^i) (1/(N)_λ)^m
pub fn hurwitz_weighted<F: Field>(e: i64, profiles: &[Partition], m: u32, n: &F) -> Result<F> {
    let d = common_weight(profiles)?;
    hurwitz_weighted_degree(e, d, profiles, m, n)
}

pub fn hurwitz_weighted_degree<F: Field>(e: i64, d: usize, profiles: &[Partition], m: u32, n: &F) -> Result<F> {
    if let Some(bad) = profiles.iter().find(|p| p.weight() != d) {
        return arg_err(format!("profile {} has weight {}, expected {}", bad, bad.weight(), d));
    }
    let mut acc = F::zero();
    for (lambda, t) in terms(e, d, profiles)? {
        let w = if m == 0 { F::one() } else { pochhammer_lambda(n, &lambda) };
        if w.is_zero() {
            return Err(Error::Domain(format!("(N)_λ vanishes for λ = ({})", lambda)));
        }
        acc += F::from_rational(&t) / w.powi(m as i64);
    }
    Ok(acc)
}

/// The weighted Hurwitz number as a rational function of N.
pub fn hurwitz_weighted_symbolic(e: i64, profiles: &[Partition], m: u32) -> Result<RatFunc> {
    let d = common_weight(profiles)?;
    let mut acc = RatFunc::zero();
    for (lambda, t) in terms(e, d, profiles)? {
        if t.is_zero() {
            continue;
        }
        // (N)_λ = ∏ (N + j − i)
        let poch = lambda.cells().fold(Poly::constant(Rational::one()), |acc, (i, j)| {
            acc.mul(&Poly::linear(int(j as i64 - i as i64)))
        });
        let mut den = Poly::constant(Rational::one());
        for _ in 0..m {
            den = den.mul(&poch);
        }
        acc = acc.add(&RatFunc::new(Poly::constant(t), den));
    }
    Ok(acc)
}

pub const BRUTEFORCE_BUDGET: f64 = 1e7;
pub const BRUTEFORCE_MAX_DEGREE: usize = 6;

/// Counts solutions of σ_1⋯σ_F ρ_1²⋯ρ_m² [α_1,β_1]⋯[α_h,β_h] = 1 in S_d with
/// σ_i of cycle type Δ^i, divided by d!. Equals H_{2−2h−m}(Δ¹,…,Δ^F).
pub fn hurwitz_bruteforce(h: u32, m: u32, d: usize, profiles: &[Partition]) -> Result<Rational> {
    if let Some(bad) = profiles.iter().find(|p| p.weight() != d) {
        return arg_err(format!("profile {} has weight {}, expected {}", bad, bad.weight(), d));
    }
    if d > BRUTEFORCE_MAX_DEGREE {
        return Err(Error::ScaleGuard(format!("degree {} exceeds {}", d, BRUTEFORCE_MAX_DEGREE)));
    }
    let g = SymmetricGroup::new(d);
    let exponent = profiles.len() as i64 - 1 + 2 * m as i64 + 2 * h as i64;
    let bound = (g.order() as f64).powi(exponent.max(0) as i32);
    if bound > BRUTEFORCE_BUDGET {
        return Err(Error::ScaleGuard(format!(
            "enumeration bound {}!^{} = {:.3e} exceeds {:.0e}",
            d, exponent, bound, BRUTEFORCE_BUDGET
        )));
    }
    let mut factors: Vec<Vec<u64>> = Vec::new();
    for delta in profiles {
        factors.push(g.class_indicator(delta));
    }
    if m > 0 {
        let sq = g.squares();
        factors.extend(std::iter::repeat_n(sq, m as usize));
    }
    if h > 0 {
        let cm = g.commutators();
        factors.extend(std::iter::repeat_n(cm, h as usize));
    }
    // counts[x] = number of partial products equal to x
    let mut counts = vec![0u64; g.order()];
    counts[g.identity] = 1;
    for f in &factors {
        let support: Vec<(usize, u64)> = f.iter().enumerate().filter(|(_, &c)| c > 0).map(|(i, &c)| (i, c)).collect();
        let mut next = vec![0u64; g.order()];
        for (x, &cx) in counts.iter().enumerate() {
            if cx == 0 {
                continue;
            }
            for &(y, cy) in &support {
                next[g.mul(x, y)] += cx * cy;
            }
        }
        counts = next;
    }
    Ok(Rational::from_integer(BigInt::from(counts[g.identity])) / factorial_rational(d))
}

/// S_d with elements indexed 0..d!. Composition (a·b)(i) = a(b(i)).
struct SymmetricGroup {
    elems: Vec<Vec<u8>>,
    table: Vec<u16>,
    identity: usize,
}

impl SymmetricGroup {
    fn new(d: usize) -> Self {
        let mut elems = Vec::new();
        permutations(&mut (0..d as u8).collect::<Vec<_>>(), 0, &mut elems);
        elems.sort();
        let index: HashMap<Vec<u8>, usize> = elems.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let n = elems.len();
        let mut table = vec![0u16; n * n];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                let c: Vec<u8> = b.iter().map(|&k| a[k as usize]).collect();
                table[i * n + j] = index[&c] as u16;
            }
        }
        let identity = index[&(0..d as u8).collect::<Vec<_>>()];
        SymmetricGroup { elems, table, identity }
    }

    fn order(&self) -> usize {
        self.elems.len()
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b] as usize
    }

    fn inv(&self, a: usize) -> usize {
        (0..self.order()).find(|&b| self.mul(a, b) == self.identity).unwrap()
    }

    fn cycle_type(&self, a: usize) -> Partition {
        let p = &self.elems[a];
        let mut seen = vec![false; p.len()];
        let mut lens = Vec::new();
        for s in 0..p.len() {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut k = s;
            while !seen[k] {
                seen[k] = true;
                k = p[k] as usize;
                len += 1;
            }
            lens.push(len);
        }
        Partition::from_unsorted(lens)
    }

    fn class_indicator(&self, delta: &Partition) -> Vec<u64> {
        (0..self.order()).map(|a| u64::from(self.cycle_type(a) == *delta)).collect()
    }

    fn squares(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.order()];
        for a in 0..self.order() {
            out[self.mul(a, a)] += 1;
        }
        out
    }

    /// multiset of αβα⁻¹β⁻¹
    fn commutators(&self) -> Vec<u64> {
        let inv: Vec<usize> = (0..self.order()).map(|a| self.inv(a)).collect();
        let mut out = vec![0u64; self.order()];
        for a in 0..self.order() {
            for b in 0..self.order() {
                let c = self.mul(self.mul(a, b), self.mul(inv[a], inv[b]));
                out[c] += 1;
            }
        }
        out
    }
}

fn permutations(v: &mut Vec<u8>, k: usize, out: &mut Vec<Vec<u8>>) {
    if k == v.len() {
        out.push(v.clone());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, out);
        v.swap(k, i);
    }
}
