//! Closed forms for expectations of products of dressed monodromies over a
//! mixed ensemble of Ginibre and Haar-unitary matrices.
//!
//! Every evaluator takes the observed side (faces or vertices) and returns
//! the value of E{…} in terms of the monodromies of the opposite side. Exact
//! sources give exact results; Schur values then go through power sums.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::characters::{character, phi};
use crate::dessin::{DessinModel, SourceAssignment};
use crate::error::{arg_err, Error, Result};
use crate::partitions::{dim_over_dfact, enumerate_partitions, partitions_bounded, partitions_up_to, pochhammer_lambda, z_of, Partition};
use crate::scalar::{rat, Field, Rational};
use crate::symfunc::{power_sum_eval, schur_eval_matrix, schur_eval_via_traces, schur_in_p, PowerSumPoint};
use crate::tau::RFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Ginibre,
    Unitary,
}

/// Which random matrix dresses each edge, plus ħ and the matrix size.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSpec {
    pub kinds: Vec<EdgeKind>,
    pub hbar: Rational,
    pub size: usize,
}

impl EnsembleSpec {
    /// ħ defaults to 1/N.
    pub fn new(kinds: Vec<EdgeKind>, size: usize) -> Result<Self> {
        if size == 0 {
            return arg_err("matrix size must be at least 1");
        }
        if kinds.is_empty() {
            return arg_err("ensemble needs at least one edge");
        }
        Ok(EnsembleSpec { kinds, hbar: rat(1, size as i64), size })
    }

    pub fn ginibre(n: usize, size: usize) -> Result<Self> {
        Self::new(vec![EdgeKind::Ginibre; n], size)
    }

    pub fn unitary(n: usize, size: usize) -> Result<Self> {
        Self::new(vec![EdgeKind::Unitary; n], size)
    }

    pub fn with_hbar(mut self, hbar: Rational) -> Result<Self> {
        if hbar <= Rational::zero() {
            return arg_err("hbar must be positive");
        }
        self.hbar = hbar;
        Ok(self)
    }

    /// "G,G,U" style list.
    pub fn parse_kinds(s: &str) -> Result<Vec<EdgeKind>> {
        s.split(',')
            .map(|t| match t.trim().to_ascii_lowercase().as_str() {
                "g" | "ginibre" => Ok(EdgeKind::Ginibre),
                "u" | "unitary" | "cue" => Ok(EdgeKind::Unitary),
                other => arg_err(format!("unknown edge kind '{}' (use G or U)", other)),
            })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.kinds.len()
    }

    pub fn n1(&self) -> usize {
        self.kinds.iter().filter(|k| **k == EdgeKind::Ginibre).count()
    }

    pub fn n2(&self) -> usize {
        self.n() - self.n1()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Faces,
    Vertices,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formula {
    Trace,
    Schur,
    SchurDet,
    Mixed,
    Power,
    Theorem,
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Formula::Trace => "trace",
            Formula::Schur => "schur",
            Formula::SchurDet => "schur-det",
            Formula::Mixed => "mixed",
            Formula::Power => "power",
            Formula::Theorem => "theorem",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosedFormResult<F> {
    pub value: F,
    /// (λ, contribution) for λ-sums; empty otherwise.
    pub series: Vec<(Partition, F)>,
    pub formula: Formula,
    pub side: Side,
    /// Degree cap of a truncated series.
    pub truncation: Option<usize>,
    pub note: Option<String>,
}

impl<F: Field> ClosedFormResult<F> {
    fn single(value: F, formula: Formula, side: Side) -> Self {
        ClosedFormResult { value, series: Vec::new(), formula, side, truncation: None, note: None }
    }

    fn zero(formula: Formula, side: Side, why: impl Into<String>) -> Self {
        ClosedFormResult { note: Some(why.into()), ..Self::single(F::zero(), formula, side) }
    }
}

/// Schur values and determinants, exact for rationals.
pub trait SpectralField: Field {
    fn schur(lambda: &Partition, x: &DMatrix<Self>) -> Result<Self>;
    fn det(x: &DMatrix<Self>) -> Self;
    /// Whether a determinant should be treated as zero relative to |x|.
    fn is_singular(det: &Self, x: &DMatrix<Self>) -> bool;
}

impl SpectralField for Rational {
    fn schur(lambda: &Partition, x: &DMatrix<Self>) -> Result<Self> {
        Ok(schur_eval_via_traces(lambda, x))
    }

    fn det(x: &DMatrix<Self>) -> Self {
        rational_det(x)
    }

    fn is_singular(det: &Self, _x: &DMatrix<Self>) -> bool {
        det.is_zero()
    }
}

impl SpectralField for Complex64 {
    fn schur(lambda: &Partition, x: &DMatrix<Self>) -> Result<Self> {
        schur_eval_matrix(lambda, x)
    }

    fn det(x: &DMatrix<Self>) -> Self {
        x.determinant()
    }

    fn is_singular(det: &Self, x: &DMatrix<Self>) -> bool {
        det.norm() <= 1e-12 * x.norm().max(1e-300).powi(x.nrows() as i32)
    }
}

/// Gaussian elimination over Q.
pub fn rational_det(x: &DMatrix<Rational>) -> Rational {
    let n = x.nrows();
    let mut a = x.clone();
    let mut det = Rational::from_integer(1.into());
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[(r, c)].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            a.swap_rows(p, c);
            det = -det;
        }
        let piv = a[(c, c)].clone();
        det *= piv.clone();
        for r in c + 1..n {
            if a[(r, c)].is_zero() {
                continue;
            }
            let f = a[(r, c)].clone() / piv.clone();
            for k in c..n {
                let v = a[(c, k)].clone() * f.clone();
                a[(r, k)] -= v;
            }
        }
    }
    det
}

/// The model seen from the chosen side: `observed` carries the observable,
/// `stars` are the monodromies that appear in the answer.
struct Setup<F> {
    observed: usize,
    stars: Vec<DMatrix<F>>,
    observed_mats: Vec<DMatrix<F>>,
    hbar: F,
    n1: i64,
    n2: i64,
    size: usize,
}

fn setup<F: SpectralField>(
    model: &DessinModel,
    sources: &SourceAssignment<F>,
    ens: &EnsembleSpec,
    side: Side,
) -> Result<Setup<F>> {
    if ens.n() != model.n {
        return arg_err(format!("ensemble has {} edges, model has {}", ens.n(), model.n));
    }
    if sources.size() != ens.size {
        return arg_err(format!("sources are {}x{}, ensemble N = {}", sources.size(), sources.size(), ens.size));
    }
    sources.check_covers(model.n)?;
    let (obs, star) = match side {
        Side::Faces => (&model.faces, &model.vertices),
        Side::Vertices => (&model.vertices, &model.faces),
    };
    Ok(Setup {
        observed: obs.len(),
        stars: star.iter().map(|w| sources.word_product(w)).collect::<Result<_>>()?,
        observed_mats: obs.iter().map(|w| sources.word_product(w)).collect::<Result<_>>()?,
        hbar: F::from_rational(&ens.hbar),
        n1: ens.n1() as i64,
        n2: ens.n2() as i64,
        size: ens.size,
    })
}

fn check_len<T>(what: &str, v: &[T], want: usize) -> Result<()> {
    if v.len() != want {
        return arg_err(format!("{} per observed cycle: got {}, need {}", what, v.len(), want));
    }
    Ok(())
}

/// ħ^{n1} N^{−n2} ∏ tr W*
pub fn trace_product_expectation<F: SpectralField>(
    model: &DessinModel,
    sources: &SourceAssignment<F>,
    ens: &EnsembleSpec,
    side: Side,
) -> Result<ClosedFormResult<F>> {
    let s = setup(model, sources, ens, side)?;
    let mut v = s.hbar.powi(s.n1) * F::from_i64(s.size as i64).powi(-s.n2);
    for w in &s.stars {
        v *= w.trace();
    }
    Ok(ClosedFormResult::single(v, Formula::Trace, side))
}

/// The common λ-weight: ħ^{n1 d} s_λ(p_∞)^{−n1} s_λ(I_N)^{−n2} = ħ^{n1 d} (dimλ/d!)^{−n1−n2} ((N)_λ)^{−n2}.
fn schur_weight<F: Field>(s: &Setup<F>, lambda: &Partition) -> F {
    let sinf = F::from_rational(&dim_over_dfact(lambda));
    let poch = pochhammer_lambda(&F::from_i64(s.size as i64), lambda);
    s.hbar.powi(s.n1 * lambda.weight() as i64) * sinf.powi(-(s.n1 + s.n2)) * poch.powi(-s.n2)
}

fn star_schur_product<F: SpectralField>(s: &Setup<F>, lambda: &Partition) -> Result<F> {
    let mut acc = F::one();
    for w in &s.stars {
        acc *= F::schur(lambda, w)?;
    }
    Ok(acc)
}

/// E{∏ s_{λ^i}(W_i)} = δ ħ^{n1 d} s_λ(p_∞)^{−n1} s_λ(I_N)^{−n2} ∏ s_λ(W*).
pub fn schur_expectation<F: SpectralField>(
    model: &DessinModel,
    sources: &SourceAssignment<F>,
    ens: &EnsembleSpec,
    lambdas: &[Partition],
    side: Side,
) -> Result<ClosedFormResult<F>> {
    let s = setup(model, sources, ens, side)?;
    check_len("partitions", lambdas, s.observed)?;
    let lambda = &lambdas[0];
    if lambdas.iter().any(|l| l != lambda) {
        return Ok(ClosedFormResult::zero(Formula::Schur, side, "partitions differ"));
    }
    if lambda.len() > s.size {
        return Ok(ClosedFormResult::zero(
            Formula::Schur,
            side,
            format!("ℓ({}) = {} exceeds N = {}", lambda, lambda.len(), s.size),
        ));
    }
    let v = schur_weight(&s, lambda) * star_schur_product(&s, lambda)?;
    Ok(ClosedFormResult::single(v, Formula::Schur, side))
}

/// ∏_{i=1}^N (N − i + 1)_α = ∏_{i=1}^N Γ(h_i+1+α)/Γ(h_i+1) at λ = ∅; the
/// constant that relates s_λ(p_∞) and s_{λ+α}(p_∞) beyond (N+α)_λ/(N)_λ.
pub fn shift_constant<F: Field>(n: usize, alpha: u32) -> F {
    let mut acc = F::one();
    for i in 1..=n {
        for k in 0..alpha {
            acc *= F::from_i64((n - i + 1) as i64 + k as i64);
        }
    }
    acc
}

fn padded(l: &Partition, n: usize) -> Vec<i64> {
    (1..=n).map(|i| l.part(i) as i64).collect()
}

/// E{∏ s_{λ^i}(W_i) det(W_i)^{α_i}}: with α = max α_i and λ the partition
/// attached to it, the value is
/// (ħ^{−(|λ|+αN)} s_λ(p_∞) (N)_λ / ((N+α)_λ K_α))^{−n1} s_λ(I_N)^{−n2} ∏ s_λ(W*) det(W*)^α,
/// K_α = [`shift_constant`].
pub fn schur_det_expectation<F: SpectralField>(
    model: &DessinModel,
    sources: &SourceAssignment<F>,
    ens: &EnsembleSpec,
    lambdas: &[Partition],
    alphas: &[u32],
    side: Side,
) -> Result<ClosedFormResult<F>> {
    let s = setup(model, sources, ens, side)?;
    check_len("partitions", lambdas, s.observed)?;
    check_len("exponents", alphas, s.observed)?;
    for (k, w) in s.stars.iter().chain(&s.observed_mats).enumerate() {
        if F::is_singular(&F::det(w), w) {
            return Err(Error::Domain(format!("monodromy {} is singular; det W must be nonzero", k + 1)));
        }
    }
    let n = s.size;
    if let Some(l) = lambdas.iter().find(|l| l.len() > n) {
        return Ok(ClosedFormResult::zero(Formula::SchurDet, side, format!("ℓ({}) exceeds N = {}", l, n)));
    }
    let m = (0..alphas.len()).max_by_key(|&i| alphas[i]).unwrap();
    let alpha = alphas[m];
    let lambda = &lambdas[m];
    let target: Vec<i64> = padded(lambda, n).iter().map(|x| x + alpha as i64).collect();
    for (l, &a) in lambdas.iter().zip(alphas) {
        let shifted: Vec<i64> = padded(l, n).iter().map(|x| x + a as i64).collect();
        if shifted != target {
            return Ok(ClosedFormResult::zero(Formula::SchurDet, side, "shifted partitions differ"));
        }
    }
    let nn = F::from_i64(n as i64);
    let d = lambda.weight() as i64;
    let sinf = F::from_rational(&dim_over_dfact(lambda));
    let base = s.hbar.powi(-(d + alpha as i64 * n as i64)) * sinf.clone() * pochhammer_lambda(&nn, lambda)
        / (pochhammer_lambda(&(nn.clone() + F::from_i64(alpha as i64)), lambda) * shift_constant::<F>(n, alpha));
    let sid = pochhammer_lambda(&nn, lambda) * sinf;
    let mut v = base.powi(-s.n1) * sid.powi(-s.n2);
    for w in &s.stars {
        v *= F::schur(lambda, w)? * F::det(w).powi(alpha as i64);
    }
    Ok(ClosedFormResult::single(v, Formula::SchurDet, side))
}

/// First k observed cycles carry p_{Δ^i}, the rest s_{μ^i}:
/// δ ħ^{n1 d} ((N)_μ)^{−n2} (dimμ/d!)^{−n} ∏ χ_μ(Δ^i) ∏ s_μ(W*).
/// k = 0 is allowed (pure Schur case); the Schur suffix must be nonempty.
pub fn mixed_expectation<F: SpectralField>(
    model: &DessinModel,
    sources: &SourceAssignment<F>,
    ens: &EnsembleSpec,
    deltas: &[Partition],
    mus: &[Partition],
    side: Side,
) -> Result<ClosedFormResult<F>> {
    let s = setup(model, sources, ens, side)?;
    if mus.is_empty() || deltas.len() + mus.len() != s.observed {
        return arg_err(format!(
            "need k power-sum profiles and {} − k ≥ 1 Schur partitions, got {} + {}",
            s.observed,
            deltas.len(),
            mus.len()
        ));
    }
    let mu = &mus[0];
    let d = mu.weight();
    if mus.iter().any(|m| m != mu) {
        return Ok(ClosedFormResult::zero(Formula::Mixed, side, "Schur partitions differ"));
    }
    if deltas.iter().any(|x| x.weight() != d) {
        return Ok(ClosedFormResult::zero(Formula::Mixed, side, "weights differ"));
    }
    if mu.len() > s.size {
        return Ok(ClosedFormResult::zero(Formula::Mixed, side, format!("ℓ({}) exceeds N = {}", mu, s.size)));
    }
    let mut v = schur_weight(&s, mu);
    for delta in deltas {
        v *= F::from_rational(&character(mu, delta)?);
    }
    v *= star_schur_product(&s, mu)?;
    Ok(ClosedFormResult::single(v, Formula::Mixed, side))
}

/// Upper bound on (Υ_d tuples) × (λ terms) for [`power_expectation`].
pub const POWER_BUDGET: f64 = 2e7;

/// E{∏ p_{Δ^i}(W_i)} = ∏ z_{Δ^i} ħ^{n1 d} Σ_{Δ̃ ∈ Υ_d^V} H_E(Δ̃, Δ | n2) ∏ p_{Δ̃^j}(W*_j),
/// E = F − n + V. With unitary edges the Hurwitz sum runs over ℓ(λ) ≤ N,
/// where (N)_λ ≠ 0; the dropped terms vanish against ∏ p(W*) anyway.
pub fn power_expectation<F: SpectralField>(
    model: &DessinModel,
    sources: &SourceAssignment<F>,
    ens: &EnsembleSpec,
    deltas: &[Partition],
    side: Side,
) -> Result<ClosedFormResult<F>> {
    let s = setup(model, sources, ens, side)?;
    check_len("profiles", deltas, s.observed)?;
    let d = deltas[0].weight();
    if deltas.iter().any(|x| x.weight() != d) {
        return Ok(ClosedFormResult::zero(Formula::Power, side, "weights differ"));
    }
    let ups = enumerate_partitions(d);
    let v_count = s.stars.len();
    let tuples = (ups.len() as f64).powi(v_count as i32);
    let bound = tuples * ups.len() as f64;
    if bound > POWER_BUDGET {
        return Err(Error::ScaleGuard(format!(
            "|Υ_{}|^{} × |Υ_{}| = {:.3e} exceeds {:.0e}",
            d, v_count, d, bound, POWER_BUDGET
        )));
    }
    let euler = model.euler;
    let lambdas: Vec<Partition> = if s.n2 > 0 { partitions_bounded(d, d, s.size) } else { ups.clone() };
    let nn = F::from_i64(s.size as i64);
    // base_λ = (dimλ/d!)^E (N)_λ^{−n2} ∏_i φ_λ(Δ^i)
    let mut base = Vec::with_capacity(lambdas.len());
    for l in &lambdas {
        let mut b = F::from_rational(&dim_over_dfact(l)).powi(euler);
        b *= pochhammer_lambda(&nn, l).powi(-s.n2);
        for delta in deltas {
            b *= F::from_rational(&phi(l, delta)?);
        }
        base.push(b);
    }
    let phis: Vec<Vec<F>> = lambdas
        .iter()
        .map(|l| ups.iter().map(|u| phi(l, u).map(|q| F::from_rational(&q))).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let pvals: Vec<Vec<F>> = s.stars.iter().map(|w| ups.iter().map(|u| power_sum_eval(u, w)).collect()).collect();
    let mut total = F::zero();
    let mut idx = vec![0usize; v_count];
    loop {
        let mut h = F::zero();
        for (li, b) in base.iter().enumerate() {
            let mut t = b.clone();
            for &u in &idx {
                t *= phis[li][u].clone();
            }
            h += t;
        }
        if !h.is_zero() {
            let mut p = h;
            for (j, &u) in idx.iter().enumerate() {
                p *= pvals[j][u].clone();
            }
            total += p;
        }
        // odometer over Υ_d^V
        let mut k = 0;
        loop {
            if k == v_count {
                let mut pre = s.hbar.powi(s.n1 * d as i64);
                for delta in deltas {
                    pre *= F::from_rational(&z_of(delta));
                }
                return Ok(ClosedFormResult::single(pre * total, Formula::Power, side));
            }
            idx[k] += 1;
            if idx[k] < ups.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// E{∏ τ_{r^{(i)}}(p^i, W_i)} truncated at |λ| ≤ dmax:
/// Σ_λ ((N)_λ)^{−n2} ∏ r^{(i)}_λ(0) ħ^{n1|λ|} (dimλ/|λ|!)^{−n} ∏ s_λ(W*) ∏ s_λ(p^i).
pub fn theorem_series<F: SpectralField>(
    model: &DessinModel,
    sources: &SourceAssignment<F>,
    ens: &EnsembleSpec,
    rs: &[RFunction<F>],
    points: &[PowerSumPoint<F>],
    side: Side,
    dmax: usize,
) -> Result<ClosedFormResult<F>> {
    let s = setup(model, sources, ens, side)?;
    check_len("r functions", rs, s.observed)?;
    check_len("points", points, s.observed)?;
    let mut series = Vec::new();
    let mut total = F::zero();
    for lambda in partitions_up_to(dmax, s.size) {
        let mut t = schur_weight(&s, &lambda);
        for r in rs {
            t *= r.content_product(0, &lambda)?;
        }
        if t.is_zero() {
            continue;
        }
        let poly = schur_in_p(&lambda);
        for p in points {
            t *= poly.eval_point(p);
        }
        t *= star_schur_product(&s, &lambda)?;
        total += t.clone();
        series.push((lambda, t));
    }
    Ok(ClosedFormResult {
        value: total,
        series,
        formula: Formula::Theorem,
        side,
        truncation: Some(dmax),
        note: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dessin::examples::{two_edge_maps, words};
    use crate::scalar::int;
    use crate::symfunc::trace_powers;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn model(v: &[&[i32]]) -> DessinModel {
        DessinModel::from_words(words(v)).unwrap()
    }

    fn random_rational(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Rational> {
        DMatrix::from_fn(n, n, |_, _| rat(rng.random_range(-4..=4), rng.random_range(1..=3)))
    }

    fn random_sources(rng: &mut ChaCha8Rng, edges: usize, n: usize) -> SourceAssignment<Rational> {
        let m: BTreeMap<i32, DMatrix<Rational>> =
            (1..=edges as i32).flat_map(|i| [i, -i]).map(|l| (l, random_rational(rng, n))).collect();
        SourceAssignment::new(m).unwrap()
    }

    fn ens(kinds: &str, n: usize, hbar: Rational) -> EnsembleSpec {
        EnsembleSpec::new(EnsembleSpec::parse_kinds(kinds).unwrap(), n).unwrap().with_hbar(hbar).unwrap()
    }

    fn diag(v: &[i64]) -> DMatrix<Rational> {
        DMatrix::from_fn(v.len(), v.len(), |i, j| if i == j { int(v[i]) } else { int(0) })
    }

    #[test]
    fn trace_products_on_small_models() {
        let m = model(&[&[1], &[-1]]);
        let src = SourceAssignment::<Rational>::identity(1, 2);
        let e = ens("G", 2, int(1));
        assert_eq!(trace_product_expectation(&m, &src, &e, Side::Faces).unwrap().value, int(2));
        let torus = model(&[&[1, 2, -1, -2]]);
        for n in 1..4 {
            let src = SourceAssignment::<Rational>::identity(2, n);
            let e = EnsembleSpec::unitary(2, n).unwrap();
            assert_eq!(trace_product_expectation(&torus, &src, &e, Side::Faces).unwrap().value, rat(1, n as i64));
        }
    }

    #[test]
    fn hbar_defaults_to_inverse_size() {
        let e = EnsembleSpec::ginibre(2, 4).unwrap();
        assert_eq!(e.hbar, rat(1, 4));
        assert_eq!((e.n1(), e.n2()), (2, 0));
        assert!(e.clone().with_hbar(int(0)).is_err());
        assert!(EnsembleSpec::parse_kinds("G,X").is_err());
        let mixed = EnsembleSpec::new(EnsembleSpec::parse_kinds("G, u ,U").unwrap(), 3).unwrap();
        assert_eq!((mixed.n1(), mixed.n2()), (1, 2));
    }

    #[test]
    fn unequal_partitions_give_exact_zero() {
        let m = model(&[&[1], &[-1]]);
        let src = SourceAssignment::<Rational>::identity(1, 3);
        let r = schur_expectation(&m, &src, &ens("G", 3, int(1)), &[p(&[2]), p(&[1, 1])], Side::Faces).unwrap();
        assert!(r.value.is_zero());
        assert!(r.note.is_some());
        let long = schur_expectation(&m, &src, &ens("G", 3, int(1)), &vec![p(&[1, 1, 1, 1]); 2], Side::Faces).unwrap();
        assert!(long.value.is_zero());
    }

    #[test]
    fn schur_of_one_box_is_the_trace_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (_, w) in two_edge_maps() {
            let m = DessinModel::from_words(w).unwrap();
            let src = random_sources(&mut rng, 2, 3);
            for kinds in ["G,G", "G,U", "U,U"] {
                let e = ens(kinds, 3, rat(1, 3));
                let lam = vec![p(&[1]); m.face_count()];
                let a = schur_expectation(&m, &src, &e, &lam, Side::Faces).unwrap().value;
                let b = trace_product_expectation(&m, &src, &e, Side::Faces).unwrap().value;
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn single_edge_trace_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = model(&[&[1, -1]]);
        for _ in 0..5 {
            let a = random_rational(&mut rng, 3);
            let b = random_rational(&mut rng, 3);
            let src = SourceAssignment::new(BTreeMap::from([(1, a.clone()), (-1, b.clone())])).unwrap();
            let h = rat(2, 7);
            let e = ens("G", 3, h.clone());
            let ta = trace_powers(&a, 2);
            let tb = trace_powers(&b, 2);
            let two = power_expectation(&m, &src, &e, &[p(&[2])], Side::Faces).unwrap().value;
            let want = h.clone() * h.clone()
                * (ta[1].clone() * tb[0].clone() * tb[0].clone() + ta[0].clone() * ta[0].clone() * tb[1].clone());
            assert_eq!(two, want);
            // dropping the (trA trB)² term gives the wrong (tr ZAZ†B)²
            let ones = power_expectation(&m, &src, &e, &[p(&[1, 1])], Side::Faces).unwrap().value;
            let naive = h.clone() * h.clone() * ta[1].clone() * tb[1].clone();
            let disconnected = h.clone() * h * (ta[0].clone() * tb[0].clone()).powi(2);
            assert_eq!(ones, naive.clone() + disconnected.clone());
            if !disconnected.is_zero() {
                assert_ne!(ones, naive);
            }
        }
    }

    /// E{∏ p_{Δ^i}(W_i)} assembled from Schur expectations through the character map.
    fn power_via_schur(
        m: &DessinModel,
        src: &SourceAssignment<Rational>,
        e: &EnsembleSpec,
        deltas: &[Partition],
        side: Side,
    ) -> Rational {
        let d = deltas[0].weight();
        let mut acc = int(0);
        for lam in enumerate_partitions(d) {
            let mut chi = int(1);
            for delta in deltas {
                chi *= character(&lam, delta).unwrap();
            }
            if chi.is_zero() {
                continue;
            }
            let k = deltas.len();
            acc += chi * schur_expectation(m, src, e, &vec![lam.clone(); k], side).unwrap().value;
        }
        acc
    }

    fn tuples(d: usize, k: usize) -> Vec<Vec<Partition>> {
        let ups = enumerate_partitions(d);
        let mut out = vec![vec![]];
        for _ in 0..k {
            out = out
                .into_iter()
                .flat_map(|t: Vec<Partition>| {
                    ups.iter().map(move |u| {
                        let mut t = t.clone();
                        t.push(u.clone());
                        t
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn cross_formula_consistency_on_two_edge_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (name, w) in two_edge_maps() {
            let m = DessinModel::from_words(w).unwrap();
            let src = random_sources(&mut rng, 2, 3);
            for kinds in ["G,G", "G,U", "U,U"] {
                let e = ens(kinds, 3, rat(1, 3));
                for side in [Side::Faces, Side::Vertices] {
                    let k = if side == Side::Faces { m.face_count() } else { m.vertex_count() };
                    for d in 1..=3 {
                        for deltas in tuples(d, k) {
                            let pw = power_expectation(&m, &src, &e, &deltas, side).unwrap().value;
                            assert_eq!(pw, power_via_schur(&m, &src, &e, &deltas, side), "{} {} {:?}", name, kinds, deltas);
                        }
                        // one power-sum cycle, the rest Schur
                        if k >= 2 {
                            for mu in enumerate_partitions(d) {
                                for delta in enumerate_partitions(d) {
                                    let mixed =
                                        mixed_expectation(&m, &src, &e, std::slice::from_ref(&delta), &vec![mu.clone(); k - 1], side)
                                            .unwrap()
                                            .value;
                                    let mut via = int(0);
                                    for lam in enumerate_partitions(d) {
                                        let mut parts = vec![lam.clone()];
                                        parts.extend(vec![mu.clone(); k - 1]);
                                        via += character(&lam, &delta).unwrap()
                                            * schur_expectation(&m, &src, &e, &parts, side).unwrap().value;
                                    }
                                    assert_eq!(mixed, via, "{} {} {} {}", name, kinds, mu, delta);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn all_unit_profiles_use_dimensions() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = model(&[&[-1, -2], &[1], &[2]]);
        let src = random_sources(&mut rng, 2, 3);
        let e = ens("G,U", 3, rat(1, 3));
        for mu in enumerate_partitions(3) {
            let ones = p(&[1, 1, 1]);
            let mixed = mixed_expectation(&m, &src, &e, &[ones.clone(), ones], std::slice::from_ref(&mu), Side::Faces).unwrap().value;
            let dim = crate::partitions::dim(&mu);
            let schur = schur_expectation(&m, &src, &e, &vec![mu.clone(); 3], Side::Faces).unwrap().value;
            assert_eq!(mixed, schur * Rational::from_integer(dim.clone() * dim));
        }
        let bad = mixed_expectation(&m, &src, &e, &[p(&[2])], &[p(&[1]), p(&[1])], Side::Faces).unwrap();
        assert!(bad.value.is_zero());
        assert!(mixed_expectation(&m, &src, &e, &[p(&[1]), p(&[1]), p(&[1])], &[], Side::Faces).is_err());
    }

    #[test]
    fn e4_instance_and_the_prefactor() {
        // faces (−1), (1,2,−2): p_Δ on the first, s_λ on the second
        let m = model(&[&[-1], &[1, 2, -2]]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let src = random_sources(&mut rng, 2, 3);
        let e = ens("G,G", 3, int(1));
        let c = |l: i32| src.get(l).unwrap().clone();
        for lam in [p(&[1]), p(&[2]), p(&[1, 1]), p(&[2, 1])] {
            for delta in enumerate_partitions(lam.weight()) {
                let got = mixed_expectation(&m, &src, &e, std::slice::from_ref(&delta), std::slice::from_ref(&lam), Side::Faces).unwrap().value;
                let chi = character(&lam, &delta).unwrap();
                let stars = schur_eval_via_traces(&lam, &c(2)) * schur_eval_via_traces(&lam, &(c(1) * c(-2) * c(-1)));
                let h = dim_over_dfact(&lam);
                assert_eq!(got, chi.clone() * stars.clone() / (h.clone() * h.clone()));
                if lam.weight() >= 2 && !(chi.is_zero() || stars.is_zero()) {
                    assert_ne!(got, h * chi * stars);
                }
            }
        }
    }

    #[test]
    fn duality_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut models: Vec<DessinModel> = two_edge_maps().into_iter().map(|(_, w)| DessinModel::from_words(w).unwrap()).collect();
        models.push(model(&[&[1, 2, 3], &[-3, -2, -1]]));
        models.push(model(&[&[1, -2, 3], &[-1, 2, -3]]));
        models.push(model(&[&[1, 2, -1, -2, 3, -3]]));
        for m in &models {
            let dual = m.dual();
            let src = random_sources(&mut rng, m.n, 2);
            let e = EnsembleSpec::new(vec![EdgeKind::Ginibre; m.n], 2).unwrap();
            let f = m.face_count();
            let a = trace_product_expectation(m, &src, &e, Side::Faces).unwrap().value;
            assert_eq!(a, trace_product_expectation(&dual, &src, &e, Side::Vertices).unwrap().value);
            for lam in [p(&[2]), p(&[1, 1])] {
                let a = schur_expectation(m, &src, &e, &vec![lam.clone(); f], Side::Faces).unwrap().value;
                let b = schur_expectation(&dual, &src, &e, &vec![lam.clone(); f], Side::Vertices).unwrap().value;
                assert_eq!(a, b);
            }
            let deltas: Vec<Partition> = (0..f).map(|i| if i % 2 == 0 { p(&[2]) } else { p(&[1, 1]) }).collect();
            let a = power_expectation(m, &src, &e, &deltas, Side::Faces).unwrap().value;
            assert_eq!(a, power_expectation(&dual, &src, &e, &deltas, Side::Vertices).unwrap().value);
        }
    }

    #[test]
    fn placement_of_unitary_edges_is_irrelevant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (_, w) in two_edge_maps() {
            let m = DessinModel::from_words(w).unwrap();
            let src = random_sources(&mut rng, 2, 3);
            let f = m.face_count();
            let gu = ens("G,U", 3, rat(1, 3));
            let ug = ens("U,G", 3, rat(1, 3));
            for lam in enumerate_partitions(2) {
                let l = vec![lam.clone(); f];
                assert_eq!(
                    schur_expectation(&m, &src, &gu, &l, Side::Faces).unwrap().value,
                    schur_expectation(&m, &src, &ug, &l, Side::Faces).unwrap().value
                );
            }
            let deltas = vec![p(&[2]); f];
            assert_eq!(
                power_expectation(&m, &src, &gu, &deltas, Side::Faces).unwrap().value,
                power_expectation(&m, &src, &ug, &deltas, Side::Faces).unwrap().value
            );
        }
    }

    #[test]
    fn depends_only_on_star_spectra() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (_, w) in two_edge_maps() {
            let m = DessinModel::from_words(w).unwrap();
            let src = random_sources(&mut rng, 2, 3).to_complex();
            let g = DMatrix::from_fn(3, 3, |i, j| {
                let z = Complex64::new(rng.random_range(-0.4..0.4), rng.random_range(-0.4..0.4));
                if i == j { z + 1.0 } else { z }
            });
            let gi = g.clone().try_inverse().unwrap();
            let conj = src.conjugated(&g, &gi);
            let e = ens("G,U", 3, rat(1, 3));
            let f = m.face_count();
            for lam in [p(&[1]), p(&[2]), p(&[2, 1])] {
                let a = schur_expectation(&m, &src, &e, &vec![lam.clone(); f], Side::Faces).unwrap().value;
                let b = schur_expectation(&m, &conj, &e, &vec![lam.clone(); f], Side::Faces).unwrap().value;
                assert!((a - b).norm() <= 1e-9 * (1.0 + a.norm()), "{} {}", a, b);
            }
            let a = power_expectation(&m, &src, &e, &vec![p(&[2]); f], Side::Faces).unwrap().value;
            let b = power_expectation(&m, &conj, &e, &vec![p(&[2]); f], Side::Faces).unwrap().value;
            assert!((a - b).norm() <= 1e-9 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn exact_and_float_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = model(&[&[1, 2], &[-2, -1]]);
        let src = random_sources(&mut rng, 2, 3);
        let e = ens("G,U", 3, rat(1, 3));
        for lam in enumerate_partitions(3) {
            let q = schur_expectation(&m, &src, &e, &[lam.clone(), lam.clone()], Side::Faces).unwrap().value;
            let c = schur_expectation(&m, &src.to_complex(), &e, &[lam.clone(), lam], Side::Faces).unwrap().value;
            let qf = crate::scalar::rational_to_f64(&q);
            assert!((c.re - qf).abs() <= 1e-9 * (1.0 + qf.abs()) && c.im.abs() < 1e-9 * (1.0 + qf.abs()));
        }
    }

    #[test]
    fn schur_det_reduces_and_shifts() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let m = model(&[&[1, 2], &[-2, -1]]);
        let src = random_sources(&mut rng, 2, 3);
        let e = ens("G,U", 3, rat(1, 2));
        for lam in [p(&[]), p(&[1]), p(&[2, 1])] {
            let l = vec![lam.clone(); 2];
            assert_eq!(
                schur_det_expectation(&m, &src, &e, &l, &[0, 0], Side::Faces).unwrap().value,
                schur_expectation(&m, &src, &e, &l, Side::Faces).unwrap().value
            );
            // s_λ · det = s_{λ+1}
            let shifted = lam.shifted(1, 3).unwrap();
            let a = schur_det_expectation(&m, &src, &e, &l, &[1, 1], Side::Faces).unwrap().value;
            let b = schur_expectation(&m, &src, &e, &vec![shifted.clone(); 2], Side::Faces).unwrap().value;
            assert_eq!(a, b);
            // mixed shifts: (λ+1, 0) on one face and (λ, 1) on the other
            let c = schur_det_expectation(&m, &src, &e, &[shifted, lam.clone()], &[0, 1], Side::Faces).unwrap().value;
            assert_eq!(a, c);
        }
        let off = schur_det_expectation(&m, &src, &e, &[p(&[2]), p(&[1])], &[0, 1], Side::Faces).unwrap();
        assert!(off.value.is_zero());
        let mut sing = src.clone();
        sing.set(1, DMatrix::zeros(3, 3)).unwrap();
        assert!(matches!(
            schur_det_expectation(&m, &sing, &e, &[p(&[1]), p(&[1])], &[1, 1], Side::Faces),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn determinant_power_needs_the_shift_constant() {
        // single Ginibre edge, face (1,−1), C_{−1} = I: E{s_λ(ZAZ†) det(ZZ†)^α}
        let m = model(&[&[1, -1]]);
        let a = diag(&[2, 3, 5]);
        let src = SourceAssignment::new(BTreeMap::from([(1, a.clone()), (-1, diag(&[1, 1, 1]))])).unwrap();
        let h = rat(1, 3);
        let e = ens("G", 3, h.clone());
        for (lam, alpha) in [(p(&[]), 1u32), (p(&[1]), 1), (p(&[2, 1]), 2)] {
            let got = schur_det_expectation(&m, &src, &e, std::slice::from_ref(&lam), &[alpha], Side::Faces).unwrap().value;
            let got = got / rational_det(&a).powi(alpha as i64);
            let d = lam.weight() as i64;
            let naive = h.powi(d + 3 * alpha as i64) * schur_eval_via_traces(&lam, &a) * pochhammer_lambda(&int(3 + alpha as i64), &lam);
            assert_eq!(got, naive.clone() * shift_constant::<Rational>(3, alpha));
            assert_ne!(got, naive);
        }
        // E|det Z|² = N! ħ^N
        let small = ens("G", 2, int(1));
        let src2 = SourceAssignment::<Rational>::identity(1, 2);
        let v = schur_det_expectation(&m, &src2, &small, &[p(&[])], &[1], Side::Faces).unwrap().value;
        assert_eq!(v, int(2));
    }

    #[test]
    fn rational_determinant() {
        assert_eq!(rational_det(&diag(&[2, 3, 4])), int(24));
        let m = DMatrix::from_row_slice(3, 3, &[0, 1, 2, 1, 0, 3, 4, -3, 8].map(int));
        assert_eq!(rational_det(&m), int(-2));
        let s = DMatrix::from_row_slice(2, 2, &[1, 2, 2, 4].map(int));
        assert!(rational_det(&s).is_zero());
    }

    fn hypergeometric_sources(n: usize, k: usize) -> SourceAssignment<Rational> {
        let mut src = SourceAssignment::<Rational>::identity(2, n);
        let proj = DMatrix::from_fn(n, n, |i, j| if i == j && i < k { int(1) } else { int(0) });
        src.set(-2, proj).unwrap();
        src
    }

    #[test]
    fn genus_one_series_with_rank_k_star() {
        let torus = model(&[&[1, 2, -1, -2]]);
        let (n, k) = (3usize, 2usize);
        let src = hypergeometric_sources(n, k);
        let e = EnsembleSpec::unitary(2, n).unwrap();
        let (a, z) = (rat(3, 2), rat(1, 5));
        let point = PowerSumPoint::Constant(a.clone()).graded(z.clone());
        let res = theorem_series(&torus, &src, &e, &[RFunction::one()], &[point], Side::Faces, 5).unwrap();
        let nn = int(n as i64);
        let mut want = int(0);
        for (lam, t) in &res.series {
            let c = z.powi(lam.weight() as i64) * pochhammer_lambda(&a, lam) * pochhammer_lambda(&int(k as i64), lam)
                / pochhammer_lambda(&nn, lam).powi(2);
            assert_eq!(*t, c, "{}", lam);
            want += c;
        }
        assert_eq!(res.value, want);
        assert_eq!(res.truncation, Some(5));
    }

    #[test]
    fn exponent_permutation_symmetry() {
        // bouquet: big face (−1,−2), petals (1), (2)
        let m = model(&[&[-1, -2], &[1], &[2]]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let src = random_sources(&mut rng, 2, 3);
        let e = ens("G,G", 3, rat(1, 3));
        let nn = 3i64;
        let run = |ex: [i64; 3]| {
            let big = RFunction::linear(int(nn + ex[0]));
            let petal = |x: i64| RFunction::ratio(vec![int(nn + x)], vec![int(nn)]);
            let pts = vec![
                PowerSumPoint::Infinity.graded(rat(1, 4)),
                PowerSumPoint::Explicit(vec![rat(1, 2), rat(-1, 3)]),
                PowerSumPoint::Explicit(vec![rat(2, 3), rat(1, 5), rat(1, 7)]),
            ];
            theorem_series(&m, &src, &e, &[big, petal(ex[1]), petal(ex[2])], &pts, Side::Faces, 4).unwrap().value
        };
        let base = run([2, 0, 1]);
        for perm in [[2, 1, 0], [0, 2, 1], [0, 1, 2], [1, 0, 2], [1, 2, 0]] {
            assert_eq!(run(perm), base);
        }
        assert_ne!(run([2, 0, 5]), base);
    }

    #[test]
    fn exponential_of_trace_coefficients() {
        // faces (1), (−1) dressed by one Ginibre matrix, p = p_∞ on both:
        // E{e^{tr ZC_1} e^{tr Z†C_{−1}}} = e^{ħ tr C_1C_{−1}} degree by degree
        let m = model(&[&[1], &[-1]]);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let src = random_sources(&mut rng, 1, 3);
        let h = rat(1, 3);
        let e = ens("G", 3, h.clone());
        let pts = vec![PowerSumPoint::Infinity, PowerSumPoint::Infinity];
        let res = theorem_series(&m, &src, &e, &[RFunction::one(), RFunction::one()], &pts, Side::Faces, 6).unwrap();
        let t = (src.get(1).unwrap() * src.get(-1).unwrap()).trace() * h;
        for d in 0..=6usize {
            let got: Rational = res.series.iter().filter(|(l, _)| l.weight() == d).map(|(_, v)| v.clone()).sum();
            assert_eq!(got, t.powi(d as i64) / crate::partitions::factorial_rational(d));
        }
        let zero = theorem_series(&m, &src, &e, &[RFunction::one(), RFunction::one()], &pts, Side::Faces, 0).unwrap();
        assert_eq!(zero.value, int(1));
    }

    #[test]
    fn theorem_series_reports_poles() {
        let m = model(&[&[1], &[-1]]);
        let src = SourceAssignment::<Rational>::identity(1, 2);
        let e = ens("G", 2, int(1));
        let r = RFunction::ratio(vec![], vec![int(-1)]);
        let pts = vec![PowerSumPoint::Infinity, PowerSumPoint::Infinity];
        let err = theorem_series(&m, &src, &e, &[r, RFunction::one()], &pts, Side::Faces, 3).unwrap_err();
        assert_eq!(err, Error::Pole { row: 1, col: 2, arg: 1 });
    }

    #[test]
    fn power_sum_scale_guard() {
        let m = model(&[&[1, 2, 3], &[-3, -2, -1]]);
        let src = SourceAssignment::<Rational>::identity(3, 2);
        let e = EnsembleSpec::ginibre(3, 2).unwrap();
        let d = 20;
        let r = power_expectation(&m, &src, &e, &[Partition::row(d), Partition::row(d)], Side::Faces);
        assert!(matches!(r, Err(Error::ScaleGuard(_))), "{:?}", m.vertices);
    }

    #[test]
    fn mismatched_inputs_are_rejected() {
        let m = model(&[&[1], &[-1]]);
        let src = SourceAssignment::<Rational>::identity(1, 2);
        assert!(trace_product_expectation(&m, &src, &EnsembleSpec::ginibre(2, 2).unwrap(), Side::Faces).is_err());
        assert!(trace_product_expectation(&m, &src, &EnsembleSpec::ginibre(1, 3).unwrap(), Side::Faces).is_err());
        assert!(schur_expectation(&m, &src, &EnsembleSpec::ginibre(1, 2).unwrap(), &[p(&[1])], Side::Faces).is_err());
    }
}
