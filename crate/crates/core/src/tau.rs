//! Hypergeometric tau functions: the scalar series, the three determinantal
//! representations, HCIZ and the unitary-group coupling series.
//!
//! Conventions. r_λ(n) = ∏_{(i,j)∈λ} r(n + j − i) and
//! τ_r(n, x) = 1 + Σ_{m≥1} r(n+1)⋯r(n+m) x^m.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{arg_err, Error, Result};
use crate::partitions::{content_product, partitions_up_to, pochhammer_lambda, Partition};
use crate::scalar::Field;
use crate::symfunc::{eigenvalues, elementary_schur, schur_eval_eigen, schur_in_p, PowerSumPoint, SymPolynomial};

type LatticeFn<F> = Arc<dyn Fn(i64) -> Option<F> + Send + Sync>;

/// A function on the integer lattice.
#[derive(Clone)]
pub enum RFunction<F> {
    /// scale · ∏(a_i + n) / (n ∏(b_i + n))
    Hypergeometric { a: Vec<F>, b: Vec<F>, scale: F },
    /// scale · ∏(a_i + n) / ∏(b_i + n), no 1/n factor
    Ratio { a: Vec<F>, b: Vec<F>, scale: F },
    /// values[n − offset]; undefined outside the table
    Table { offset: i64, values: Vec<F> },
    Custom(LatticeFn<F>),
}

impl<F: Field> RFunction<F> {
    /// r ≡ 1
    pub fn one() -> Self {
        RFunction::Ratio { a: vec![], b: vec![], scale: F::one() }
    }

    pub fn constant(c: F) -> Self {
        RFunction::Ratio { a: vec![], b: vec![], scale: c }
    }

    pub fn hypergeometric(a: Vec<F>, b: Vec<F>) -> Self {
        RFunction::Hypergeometric { a, b, scale: F::one() }
    }

    pub fn ratio(a: Vec<F>, b: Vec<F>) -> Self {
        RFunction::Ratio { a, b, scale: F::one() }
    }

    /// r(x) = x + a
    pub fn linear(a: F) -> Self {
        RFunction::ratio(vec![a], vec![])
    }

    pub fn custom(f: impl Fn(i64) -> Option<F> + Send + Sync + 'static) -> Self {
        RFunction::Custom(Arc::new(f))
    }

    pub fn scaled(self, c: F) -> Self {
        match self {
            RFunction::Hypergeometric { a, b, scale } => RFunction::Hypergeometric { a, b, scale: scale * c },
            RFunction::Ratio { a, b, scale } => RFunction::Ratio { a, b, scale: scale * c },
            other => RFunction::custom(move |n| other.eval(n).map(|v| v * c.clone())),
        }
    }

    /// `None` at a pole or outside a table.
    pub fn eval(&self, n: i64) -> Option<F> {
        let ratio = |a: &[F], b: &[F], scale: &F, extra: Option<i64>| {
            let x = F::from_i64(n);
            let num = a.iter().fold(scale.clone(), |acc, ai| acc * (ai.clone() + x.clone()));
            let mut den = b.iter().fold(F::one(), |acc, bi| acc * (bi.clone() + x.clone()));
            if let Some(k) = extra {
                den *= F::from_i64(k);
            }
            (!den.is_zero()).then(|| num / den)
        };
        match self {
            RFunction::Hypergeometric { a, b, scale } => ratio(a, b, scale, Some(n)),
            RFunction::Ratio { a, b, scale } => ratio(a, b, scale, None),
            RFunction::Table { offset, values } => {
                usize::try_from(n - offset).ok().and_then(|k| values.get(k).cloned())
            }
            RFunction::Custom(f) => f(n),
        }
    }

    pub fn to_complex(&self) -> RFunction<Complex64> {
        let conv = |v: &[F]| v.iter().map(|x| x.to_complex()).collect::<Vec<_>>();
        match self {
            RFunction::Hypergeometric { a, b, scale } => {
                RFunction::Hypergeometric { a: conv(a), b: conv(b), scale: scale.to_complex() }
            }
            RFunction::Ratio { a, b, scale } => RFunction::Ratio { a: conv(a), b: conv(b), scale: scale.to_complex() },
            RFunction::Table { offset, values } => RFunction::Table { offset: *offset, values: conv(values) },
            RFunction::Custom(f) => {
                let f = f.clone();
                RFunction::custom(move |n| f(n).map(|v| v.to_complex()))
            }
        }
    }

    /// r_λ(n); a pole names the offending cell.
    pub fn content_product(&self, n: i64, lambda: &Partition) -> Result<F> {
        content_product(|c| self.eval(c), n, lambda)
    }

    fn checked(&self, n: i64) -> Result<F> {
        self.eval(n).ok_or_else(|| Error::Domain(format!("r has a pole at {}", n)))
    }
}

impl<F: fmt::Debug> fmt::Debug for RFunction<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RFunction::Hypergeometric { a, b, scale } => {
                write!(f, "Hypergeometric {{ a: {:?}, b: {:?}, scale: {:?} }}", a, b, scale)
            }
            RFunction::Ratio { a, b, scale } => write!(f, "Ratio {{ a: {:?}, b: {:?}, scale: {:?} }}", a, b, scale),
            RFunction::Table { offset, values } => write!(f, "Table {{ offset: {}, values: {:?} }}", offset, values),
            RFunction::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Both sides of a determinantal identity.
#[derive(Clone, Debug, PartialEq)]
pub struct TauPair {
    pub series: Complex64,
    /// `None` when the determinant route does not apply (note says why).
    pub determinant: Option<Complex64>,
    pub note: Option<String>,
}

impl TauPair {
    fn refused(series: Complex64, why: impl Into<String>) -> Self {
        TauPair { series, determinant: None, note: Some(why.into()) }
    }

    /// |series − determinant| / (1 + |series|)
    pub fn discrepancy(&self) -> Option<f64> {
        self.determinant.map(|d| (self.series - d).norm() / (1.0 + self.series.norm()))
    }
}

/// 1 + Σ_{m=1}^{cap} r(n+1)⋯r(n+m) x^m
pub fn tau_scalar(r: &RFunction<Complex64>, n: i64, x: Complex64, cap: usize) -> Result<Complex64> {
    let mut acc = Complex64::one();
    let mut coef = Complex64::one();
    let mut xm = Complex64::one();
    for m in 1..=cap as i64 {
        coef *= r.checked(n + m)?;
        xm *= x;
        acc += coef * xm;
    }
    Ok(acc)
}

/// ∏_{i<j} (x_i − x_j) = det[x_i^{N−k}]
fn vandermonde(xs: &[Complex64]) -> Complex64 {
    let mut v = Complex64::one();
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            v *= xs[i] - xs[j];
        }
    }
    v
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

fn spectrum(x: &DMatrix<Complex64>) -> Result<(Vec<Complex64>, f64)> {
    if !x.is_square() || x.nrows() == 0 {
        return arg_err("matrix must be square and nonempty");
    }
    Ok((eigenvalues(x)?, x.norm().max(1e-300)))
}

fn distinct(xs: &[Complex64], scale: f64) -> bool {
    xs.len() < 2 || min_gap(xs) > 1e-8 * scale
}

/// Σ_{|λ|≤cap} r_λ(n) s_λ(X) s_λ(Y), with the determinant
/// [∏_{c=n−N+1}^{n−1} r(c)^{c−n}] · det[τ_r(n−N, x_i y_j)] / (V(x) V(y)).
pub fn tau_xy(
    r: &RFunction<Complex64>,
    n: i64,
    x: &DMatrix<Complex64>,
    y: &DMatrix<Complex64>,
    cap: usize,
) -> Result<TauPair> {
    let (xs, sx) = spectrum(x)?;
    let (ys, sy) = spectrum(y)?;
    let nn = xs.len();
    if ys.len() != nn {
        return arg_err(format!("X is {}x{} but Y is {}x{}", nn, nn, ys.len(), ys.len()));
    }
    let mut series = Complex64::zero();
    for lambda in partitions_up_to(cap, nn) {
        let rl = r.content_product(n, &lambda)?;
        if rl.is_zero() {
            continue;
        }
        series += rl * schur_eval_eigen(&lambda, &xs, sx) * schur_eval_eigen(&lambda, &ys, sy);
    }
    if !distinct(&xs, sx) || !distinct(&ys, sy) {
        return Ok(TauPair::refused(series, "degenerate spectrum: determinant route refused"));
    }
    let mut constant = Complex64::one();
    for c in n - nn as i64 + 1..n {
        let rc = r.checked(c)?;
        if rc.is_zero() {
            return Ok(TauPair::refused(series, format!("r({}) = 0: determinant constant undefined", c)));
        }
        constant *= rc.powi((c - n) as i32);
    }
    // entries carry every power needed for |λ| ≤ cap
    let entry_cap = cap + nn - 1;
    let mut m = DMatrix::<Complex64>::zeros(nn, nn);
    for i in 0..nn {
        for j in 0..nn {
            m[(i, j)] = tau_scalar(r, n - nn as i64, xs[i] * ys[j], entry_cap)?;
        }
    }
    let det = constant * m.determinant() / (vandermonde(&xs) * vandermonde(&ys));
    Ok(TauPair { series, determinant: Some(det), note: None })
}

fn derivative_chain(m: usize, depth: usize) -> Vec<SymPolynomial> {
    let mut out = Vec::with_capacity(depth);
    let mut cur = (*elementary_schur(m)).clone();
    for _ in 0..depth {
        let next = cur.d_p1();
        out.push(cur);
        cur = next;
    }
    out
}

/// Σ_{ℓ(λ)≤n, |λ|≤cap} r_λ(n) s_λ(p¹) s_λ(p²), with the determinant
/// ∏_{i=1}^{n−1} r(i)^{i−n} · det[∂^a_{p¹_1} ∂^b_{p²_1} τ_r(1, p¹, p²)]_{a,b<n}.
pub fn tau_pp(
    r: &RFunction<Complex64>,
    n: usize,
    p1: &PowerSumPoint<Complex64>,
    p2: &PowerSumPoint<Complex64>,
    cap: usize,
) -> Result<TauPair> {
    if n == 0 {
        return arg_err("n must be at least 1");
    }
    match r.eval(0) {
        Some(v) if v.is_zero() => {}
        _ => return arg_err("determinantal form needs r(0) = 0"),
    }
    let mut series = Complex64::zero();
    for lambda in partitions_up_to(cap, n) {
        let rl = r.content_product(n as i64, &lambda)?;
        if rl.is_zero() {
            continue;
        }
        let s = schur_in_p(&lambda);
        series += rl * s.eval_point(p1) * s.eval_point(p2);
    }
    let mut constant = Complex64::one();
    for i in 1..n as i64 {
        let ri = r.checked(i)?;
        if ri.is_zero() {
            return Ok(TauPair::refused(series, format!("r({}) = 0: determinant constant undefined", i)));
        }
        constant *= ri.powi((i - n as i64) as i32);
    }
    let entry_cap = cap + n - 1;
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    let mut coef = Complex64::one();
    for deg in 0..=entry_cap {
        if deg > 0 {
            coef *= r.checked(deg as i64)?;
        }
        if coef.is_zero() {
            break;
        }
        let chain = derivative_chain(deg, n);
        let v1: Vec<Complex64> = chain.iter().map(|q| q.eval_point(p1)).collect();
        let v2: Vec<Complex64> = chain.iter().map(|q| q.eval_point(p2)).collect();
        for a in 0..n {
            for b in 0..n {
                m[(a, b)] += coef * v1[a] * v2[b];
            }
        }
    }
    Ok(TauPair { series, determinant: Some(constant * m.determinant()), note: None })
}

/// Σ_m r(n+1)⋯r(n+m) x^m s_(m)(p), m ≤ cap
fn tau_row(r: &RFunction<Complex64>, n: i64, x: Complex64, one_rows: &[Complex64], cap: usize) -> Result<Complex64> {
    let mut acc = Complex64::one();
    let mut coef = Complex64::one();
    let mut xm = Complex64::one();
    for m in 1..=cap {
        coef *= r.checked(n + m as i64)?;
        xm *= x;
        acc += coef * xm * one_rows[m];
    }
    Ok(acc)
}

/// Σ_{|λ|≤cap} r_λ(n) s_λ(X) s_λ(p), with the determinant
/// det[x_i^{N−k} τ_r(n−k, x_i, p)] / V(x).
pub fn tau_xp(
    r: &RFunction<Complex64>,
    n: i64,
    x: &DMatrix<Complex64>,
    p: &PowerSumPoint<Complex64>,
    cap: usize,
) -> Result<TauPair> {
    let (xs, sx) = spectrum(x)?;
    let nn = xs.len();
    let mut series = Complex64::zero();
    for lambda in partitions_up_to(cap, nn) {
        let rl = r.content_product(n, &lambda)?;
        if rl.is_zero() {
            continue;
        }
        series += rl * schur_eval_eigen(&lambda, &xs, sx) * schur_in_p(&lambda).eval_point(p);
    }
    if !distinct(&xs, sx) {
        return Ok(TauPair::refused(series, "degenerate spectrum: determinant route refused"));
    }
    let entry_cap = cap + nn;
    let one_rows: Vec<Complex64> = (0..=entry_cap).map(|m| elementary_schur(m).eval_point(p)).collect();
    let mut m = DMatrix::<Complex64>::zeros(nn, nn);
    for i in 0..nn {
        for k in 1..=nn {
            let t = tau_row(r, n - k as i64, xs[i], &one_rows, entry_cap)?;
            m[(i, k - 1)] = xs[i].powu((nn - k) as u32) * t;
        }
    }
    Ok(TauPair { series, determinant: Some(m.determinant() / vandermonde(&xs)), note: None })
}

/// ∫ exp(α tr U A U† B) dU: the series Σ α^{|λ|} s_λ(A) s_λ(B) / (N)_λ and
/// the determinant ∏_{p<N} p! · det[e^{α a_i b_j}] / (α^{N(N−1)/2} V(a) V(b)).
pub fn hciz(alpha: Complex64, a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, cap: usize) -> Result<TauPair> {
    let (xs, sx) = spectrum(a)?;
    let (ys, sy) = spectrum(b)?;
    let nn = xs.len();
    if ys.len() != nn {
        return arg_err("A and B must have the same size");
    }
    let nc = Complex64::new(nn as f64, 0.0);
    let mut series = Complex64::zero();
    for lambda in partitions_up_to(cap, nn) {
        let w = alpha.powu(lambda.weight() as u32) / pochhammer_lambda(&nc, &lambda);
        series += w * schur_eval_eigen(&lambda, &xs, sx) * schur_eval_eigen(&lambda, &ys, sy);
    }
    if !distinct(&xs, sx) || !distinct(&ys, sy) {
        return Ok(TauPair::refused(series, "degenerate spectrum: determinant route refused"));
    }
    if alpha.is_zero() {
        return Ok(TauPair { series, determinant: Some(Complex64::one()), note: None });
    }
    let m = DMatrix::from_fn(nn, nn, |i, j| (alpha * xs[i] * ys[j]).exp());
    let superfactorial: f64 = (1..nn).map(|p| (1..=p).map(|k| k as f64).product::<f64>()).product();
    let det = m.determinant() * superfactorial
        / (alpha.powu((nn * (nn - 1) / 2) as u32) * vandermonde(&xs) * vandermonde(&ys));
    Ok(TauPair { series, determinant: Some(det), note: None })
}

/// Σ_{ℓ(λ)≤N, |λ|≤cap} s_λ(p) s_λ(p̄)
pub fn morozov_series(
    p: &PowerSumPoint<Complex64>,
    pbar: &PowerSumPoint<Complex64>,
    n: usize,
    cap: usize,
) -> Complex64 {
    partitions_up_to(cap, n)
        .iter()
        .map(|lambda| {
            let s = schur_in_p(lambda);
            s.eval_point(p) * s.eval_point(pbar)
        })
        .sum()
}
