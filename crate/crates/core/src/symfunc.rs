//! Symmetric functions in the power-sum variables p_1, p_2, ….
//!
//! The power-sum basis is the only internal representation. Schur functions
//! come from Jacobi–Trudi over the one-row functions s_(m); matrix arguments
//! use the bialternant over eigenvalues when the spectrum is well separated.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::characters::character;
use crate::error::{arg_err, Error, Result};
use crate::partitions::{dim_over_dfact, enumerate_partitions, pochhammer_lambda, z_of, Partition};
use crate::scalar::{fmt_rational, int, Field, Rational};

pub const DEFAULT_DMAX: usize = 8;

/// Exact polynomial in p_1, p_2, …. Keys are exponent vectors (entry k-1 is
/// the power of p_k) with trailing zeros trimmed; no zero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymPolynomial {
    terms: BTreeMap<Vec<u32>, Rational>,
}

fn trim(mut e: Vec<u32>) -> Vec<u32> {
    while e.last() == Some(&0) {
        e.pop();
    }
    e
}

fn graded_degree(e: &[u32]) -> usize {
    e.iter().enumerate().map(|(k, &m)| (k + 1) * m as usize).sum()
}

impl SymPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut s = Self::zero();
        s.add_term(Vec::new(), c);
        s
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    /// The single variable p_k.
    pub fn p(k: usize) -> Self {
        assert!(k >= 1, "power sums start at p_1");
        let mut e = vec![0; k];
        e[k - 1] = 1;
        let mut s = Self::zero();
        s.add_term(e, Rational::one());
        s
    }

    /// The monomial p_Δ = p_{Δ1} p_{Δ2} ⋯
    pub fn monomial(delta: &Partition) -> Self {
        let mut s = Self::zero();
        s.add_term(delta.to_exponents(), Rational::one());
        s
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = trim(e);
        let slot = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of p_Δ.
    pub fn coeff(&self, delta: &Partition) -> Rational {
        self.terms.get(&delta.to_exponents()).cloned().unwrap_or_else(Rational::zero)
    }

    /// Highest graded degree (deg p_m = m); 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|e| graded_degree(e)).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| graded_degree(e));
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        SymPolynomial { terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let n = e1.len().max(e2.len());
                let e: Vec<u32> =
                    (0..n).map(|k| e1.get(k).copied().unwrap_or(0) + e2.get(k).copied().unwrap_or(0)).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    /// Substitute p_m → −p_m.
    pub fn negate_p(&self) -> Self {
        SymPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let odd = e.iter().map(|&m| m as u64).sum::<u64>() % 2 == 1;
                    (e.clone(), if odd { -c.clone() } else { c.clone() })
                })
                .collect(),
        }
    }

    /// ∂/∂p_1
    pub fn d_p1(&self) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            if let Some(&m) = e.first() {
                if m > 0 {
                    let mut e2 = e.clone();
                    e2[0] -= 1;
                    out.add_term(e2, c * int(m as i64));
                }
            }
        }
        out
    }

    /// Evaluate with p_k given by `pk(k)` (k ≥ 1).
    pub fn eval_with<F: Field>(&self, pk: impl Fn(usize) -> F) -> F {
        let maxk = self.terms.keys().map(|e| e.len()).max().unwrap_or(0);
        let vals: Vec<F> = (1..=maxk).map(&pk).collect();
        self.eval_values(&vals)
    }

    /// Evaluate with p_k = vals[k-1]; missing entries are zero.
    pub fn eval_values<F: Field>(&self, vals: &[F]) -> F {
        let mut acc = F::zero();
        'term: for (e, c) in &self.terms {
            let mut t = F::from_rational(c);
            for (k, &m) in e.iter().enumerate() {
                if m == 0 {
                    continue;
                }
                match vals.get(k) {
                    Some(v) => t *= v.powi(m as i64),
                    None => continue 'term,
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_point<F: Field>(&self, point: &PowerSumPoint<F>) -> F {
        let vals: Vec<F> = (1..=self.degree().max(1)).map(|m| point.value(m)).collect();
        self.eval_values(&vals)
    }
}

impl Serialize for SymPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            exponents: &'a [u32],
            coeff: String,
        }
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            seq.serialize_element(&Term { exponents: e, coeff: fmt_rational(c) })?;
        }
        seq.end()
    }
}

/// A point p = (p_1, p_2, …), finite or given by a rule.
#[derive(Clone, Debug, PartialEq)]
pub enum PowerSumPoint<F> {
    /// p_∞ = (1, 0, 0, …)
    Infinity,
    /// p(a) = (a, a, a, …)
    Constant(F),
    /// p_m = (1 − q^m)/(1 − t^m)
    QT { q: F, t: F },
    /// Finitely many couplings; zero beyond.
    Explicit(Vec<F>),
    /// p_m → z^m p_m of the inner point.
    Graded { base: Box<PowerSumPoint<F>>, z: F },
}

impl<F: Field> PowerSumPoint<F> {
    pub fn qt(q: F, t: F) -> Result<Self> {
        let tn = t.to_complex().norm();
        if (tn - 1.0).abs() < 1e-12 {
            return arg_err("p(q,t) needs |t| != 1");
        }
        Ok(PowerSumPoint::QT { q, t })
    }

    pub fn graded(self, z: F) -> Self {
        PowerSumPoint::Graded { base: Box::new(self), z }
    }

    /// p_m for m ≥ 1.
    pub fn value(&self, m: usize) -> F {
        match self {
            PowerSumPoint::Infinity => {
                if m == 1 {
                    F::one()
                } else {
                    F::zero()
                }
            }
            PowerSumPoint::Constant(a) => a.clone(),
            PowerSumPoint::QT { q, t } => (F::one() - q.powi(m as i64)) / (F::one() - t.powi(m as i64)),
            PowerSumPoint::Explicit(v) => v.get(m - 1).cloned().unwrap_or_else(F::zero),
            PowerSumPoint::Graded { base, z } => base.value(m) * z.powi(m as i64),
        }
    }

    /// Number of nonzero couplings when finite, `None` for infinite rules.
    pub fn support(&self) -> Option<usize> {
        match self {
            PowerSumPoint::Infinity => Some(1),
            PowerSumPoint::Explicit(v) => Some(v.len()),
            PowerSumPoint::Graded { base, .. } => base.support(),
            _ => None,
        }
    }

    pub fn to_complex(&self) -> PowerSumPoint<Complex64> {
        match self {
            PowerSumPoint::Infinity => PowerSumPoint::Infinity,
            PowerSumPoint::Constant(a) => PowerSumPoint::Constant(a.to_complex()),
            PowerSumPoint::QT { q, t } => PowerSumPoint::QT { q: q.to_complex(), t: t.to_complex() },
            PowerSumPoint::Explicit(v) => PowerSumPoint::Explicit(v.iter().map(|x| x.to_complex()).collect()),
            PowerSumPoint::Graded { base, z } => {
                PowerSumPoint::Graded { base: Box::new(base.to_complex()), z: z.to_complex() }
            }
        }
    }
}

type Cache = RwLock<HashMap<Partition, Arc<SymPolynomial>>>;

fn one_row_cache() -> &'static RwLock<Vec<Arc<SymPolynomial>>> {
    static C: OnceLock<RwLock<Vec<Arc<SymPolynomial>>>> = OnceLock::new();
    C.get_or_init(|| RwLock::new(vec![Arc::new(SymPolynomial::one())]))
}

fn schur_cache() -> &'static Cache {
    static C: OnceLock<Cache> = OnceLock::new();
    C.get_or_init(|| RwLock::new(HashMap::new()))
}

/// s_(m): coefficient of z^m in exp(Σ p_k z^k / k). Built from the Newton
/// recursion m·s_(m) = Σ_{k=1}^m p_k s_(m−k).
pub fn elementary_schur(m: usize) -> Arc<SymPolynomial> {
    if let Some(s) = one_row_cache().read().unwrap().get(m) {
        return s.clone();
    }
    let mut cache = one_row_cache().write().unwrap();
    while cache.len() <= m {
        let j = cache.len();
        let mut acc = SymPolynomial::zero();
        for k in 1..=j {
            acc = acc.add(&SymPolynomial::p(k).mul(&cache[j - k]));
        }
        cache.push(Arc::new(acc.scale(&Rational::new(1.into(), (j as i64).into()))));
    }
    cache[m].clone()
}

/// s_λ as a polynomial in the power sums (Jacobi–Trudi determinant).
pub fn schur_in_p(lambda: &Partition) -> Arc<SymPolynomial> {
    if let Some(s) = schur_cache().read().unwrap().get(lambda) {
        return s.clone();
    }
    let s = Arc::new(jacobi_trudi(lambda));
    schur_cache().write().unwrap().entry(lambda.clone()).or_insert(s).clone()
}

/// det[s_(λ_i − i + j)] by Laplace expansion over column subsets: D[S] is the
/// minor on rows 1..|S| and columns S.
fn jacobi_trudi(lambda: &Partition) -> SymPolynomial {
    let l = lambda.len();
    if l == 0 {
        return SymPolynomial::one();
    }
    let entry = |i: usize, j: usize| -> Option<Arc<SymPolynomial>> {
        let idx = lambda.part(i) as i64 - i as i64 + j as i64;
        (idx >= 0).then(|| elementary_schur(idx as usize))
    };
    let full = 1usize << l;
    let mut d: Vec<Option<SymPolynomial>> = vec![None; full];
    d[0] = Some(SymPolynomial::one());
    for s in 1..full {
        let row = (s as u32).count_ones() as usize;
        let mut acc = SymPolynomial::zero();
        for j in 0..l {
            if s & (1 << j) == 0 {
                continue;
            }
            let Some(a) = entry(row, j + 1) else { continue };
            let Some(minor) = &d[s & !(1 << j)] else { continue };
            if minor.is_zero() {
                continue;
            }
            let above = (s >> (j + 1)).count_ones();
            let term = a.mul(minor);
            acc = if above % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        }
        d[s] = Some(acc);
    }
    d[full - 1].take().unwrap()
}

/// Traces tr X^m for m = 1..=mmax.
pub fn trace_powers<F: Field>(x: &DMatrix<F>, mmax: usize) -> Vec<F> {
    let mut out = Vec::with_capacity(mmax);
    if mmax == 0 {
        return out;
    }
    let mut pow = x.clone();
    out.push(pow.trace());
    for _ in 1..mmax {
        pow = &pow * x;
        out.push(pow.trace());
    }
    out
}

/// p_Δ(X) = ∏ tr X^{Δ_i}; p_() = 1.
pub fn power_sum_eval<F: Field>(delta: &Partition, x: &DMatrix<F>) -> F {
    let tr = trace_powers(x, delta.part(1));
    delta.parts().iter().fold(F::one(), |acc, &k| acc * tr[k - 1].clone())
}

/// s_λ(X) from p_m = tr X^m. Exact for rational matrices.
pub fn schur_eval_via_traces<F: Field>(lambda: &Partition, x: &DMatrix<F>) -> F {
    if lambda.len() > x.nrows() {
        return F::zero();
    }
    let tr = trace_powers(x, lambda.weight());
    schur_in_p(lambda).eval_values(&tr)
}

/// Eigenvalues of a complex square matrix (complex Schur form).
pub fn eigenvalues(x: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    if x.nrows() == 1 {
        return Ok(vec![x[(0, 0)]]);
    }
    let ev = x.clone().try_schur(1e-15, 10_000).map(|s| s.eigenvalues());
    match ev.flatten() {
        Some(v) => Ok(v.iter().copied().collect()),
        None => Err(Error::Numeric(format!(
            "eigenvalue iteration did not converge (N = {}, |X|_F = {:.3e})",
            x.nrows(),
            x.norm()
        ))),
    }
}

fn min_gap(xs: &[Complex64]) -> f64 {
    let mut g = f64::INFINITY;
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            g = g.min((xs[i] - xs[j]).norm());
        }
    }
    g
}

/// det[x_j^{h_i}] / ∏_{i<j}(x_i − x_j) with h_i = λ_i + N − i.
fn bialternant(lambda: &Partition, xs: &[Complex64]) -> Complex64 {
    let n = xs.len();
    let m = DMatrix::from_fn(n, n, |i, j| xs[j].powu((lambda.part(i + 1) + n - i - 1) as u32));
    let mut vdm = Complex64::one();
    for i in 0..n {
        for j in i + 1..n {
            vdm *= xs[i] - xs[j];
        }
    }
    m.determinant() / vdm
}

/// s_λ of a diagonalizable matrix given its eigenvalues. `scale` is the
/// matrix norm used for the degeneracy test.
pub fn schur_eval_eigen(lambda: &Partition, xs: &[Complex64], scale: f64) -> Complex64 {
    if lambda.len() > xs.len() {
        return Complex64::zero();
    }
    if lambda.is_empty() {
        return Complex64::one();
    }
    if min_gap(xs) <= 1e-8 * scale.max(f64::MIN_POSITIVE) {
        let p: Vec<Complex64> = (1..=lambda.weight()).map(|m| xs.iter().map(|x| x.powu(m as u32)).sum()).collect();
        return schur_in_p(lambda).eval_values(&p);
    }
    bialternant(lambda, xs)
}

/// Relative eigenvalue gap below which [`schur_eval_matrix`] uses traces.
pub const SEPARATION: f64 = 1e-3;

/// s_λ(X): bialternant over eigenvalues, 0 when ℓ(λ) > N, traces when the
/// spectrum is nearly degenerate.
pub fn schur_eval_matrix(lambda: &Partition, x: &DMatrix<Complex64>) -> Result<Complex64> {
    if !x.is_square() || x.nrows() == 0 {
        return arg_err("matrix must be square and nonempty");
    }
    if lambda.len() > x.nrows() {
        return Ok(Complex64::zero());
    }
    if lambda.is_empty() {
        return Ok(Complex64::one());
    }
    let xs = eigenvalues(x)?;
    let scale = x.norm();
    // defective matrices put eigenvalues ~sqrt(eps) apart; the bialternant
    // is only trusted on a clearly separated spectrum
    if min_gap(&xs) <= SEPARATION * scale {
        return Ok(schur_eval_via_traces(lambda, x));
    }
    Ok(bialternant(lambda, &xs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Schur,
    Power,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CharMapDirection {
    /// p_Δ = Σ_λ (dimλ/d!) z_Δ φ_λ(Δ) s_λ
    PowerToSchur,
    /// s_λ = (dimλ/d!) Σ_Δ φ_λ(Δ) p_Δ
    SchurToPower,
}

/// A linear combination of basis elements indexed by partitions of one weight.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BasisExpansion {
    pub basis: Basis,
    pub terms: Vec<(Partition, String)>,
    #[serde(skip)]
    pub coeffs: Vec<(Partition, Rational)>,
}

impl BasisExpansion {
    fn new(basis: Basis, coeffs: Vec<(Partition, Rational)>) -> Self {
        let coeffs: Vec<_> = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let terms = coeffs.iter().map(|(p, c)| (p.clone(), fmt_rational(c))).collect();
        BasisExpansion { basis, terms, coeffs }
    }

    pub fn coeff(&self, key: &Partition) -> Rational {
        self.coeffs.iter().find(|(p, _)| p == key).map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero)
    }

    /// Rewrite in the power-sum monomials.
    pub fn to_polynomial(&self) -> SymPolynomial {
        self.coeffs.iter().fold(SymPolynomial::zero(), |acc, (p, c)| {
            let basis_elt = match self.basis {
                Basis::Power => SymPolynomial::monomial(p),
                Basis::Schur => (*schur_in_p(p)).clone(),
            };
            acc.add(&basis_elt.scale(c))
        })
    }
}

/// The character map between the p_Δ and s_λ bases of degree |argument|.
pub fn char_map(direction: CharMapDirection, argument: &Partition) -> BasisExpansion {
    let d = argument.weight();
    match direction {
        CharMapDirection::PowerToSchur => {
            let coeffs = enumerate_partitions(d)
                .into_iter()
                .map(|lambda| {
                    let c = character(&lambda, argument).expect("weights agree");
                    (lambda, c)
                })
                .collect();
            BasisExpansion::new(Basis::Schur, coeffs)
        }
        CharMapDirection::SchurToPower => {
            let coeffs = enumerate_partitions(d)
                .into_iter()
                .map(|delta| {
                    let c = character(argument, &delta).expect("weights agree") / z_of(&delta);
                    (delta, c)
                })
                .collect();
            BasisExpansion::new(Basis::Power, coeffs)
        }
    }
}

/// Special points at which Schur functions have closed forms.
#[derive(Clone, Debug, PartialEq)]
pub enum SpecialPoint<F> {
    PInfinity,
    /// I_N
    Identity(usize),
    /// I_{N,k}: k units on the diagonal of an N×N zero matrix
    Rank { n: usize, k: usize },
    /// p(a) = (a, a, …)
    Geometric(F),
    /// p(q, t)
    QT { q: F, t: F },
}

/// Closed-form value of s_λ at a special point.
pub fn schur_special<F: Field>(lambda: &Partition, point: &SpecialPoint<F>) -> Result<F> {
    let sinf = F::from_rational(&dim_over_dfact(lambda));
    Ok(match point {
        SpecialPoint::PInfinity => sinf,
        SpecialPoint::Identity(n) => {
            if *n == 0 {
                return arg_err("identity needs N >= 1");
            }
            pochhammer_lambda(&F::from_i64(*n as i64), lambda) * sinf
        }
        SpecialPoint::Rank { n, k } => {
            if *n == 0 || k > n {
                return arg_err(format!("rank({}, {}) needs N >= 1 and 0 <= k <= N", n, k));
            }
            pochhammer_lambda(&F::from_i64(*k as i64), lambda) * sinf
        }
        SpecialPoint::Geometric(a) => pochhammer_lambda(a, lambda) * sinf,
        SpecialPoint::QT { q, t } => {
            let base = PowerSumPoint::qt(F::zero(), t.clone())?;
            let s0 = schur_in_p(lambda).eval_point(&base);
            q_pochhammer_lambda(q, t, lambda) * s0
        }
    })
}

/// (q;t)_λ = ∏_{(i,j)∈λ} (1 − q t^{j−i})
pub fn q_pochhammer_lambda<F: Field>(q: &F, t: &F, lambda: &Partition) -> F {
    lambda
        .cells()
        .fold(F::one(), |acc, (i, j)| acc * (F::one() - q.clone() * t.powi(j as i64 - i as i64)))
}
