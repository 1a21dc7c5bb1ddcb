//! Named batches of closed-form vs Monte Carlo checks.
//!
//! Closed forms are evaluated exactly on rational sources and converted to
//! f64 at the end; the sampler sees the same sources as complex matrices.
//! Mixed and unitary ensembles are checked through Schur-basis and
//! trace-product formulas only.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{compare, estimate, splitmix, Check, FactorKind, McConfig, Observable};
use crate::dessin::examples::{two_edge_maps, words};
use crate::dessin::{CyclicWord, DessinModel, SourceAssignment};
use crate::error::{arg_err, Error, Result};
use crate::expectation::{
    mixed_expectation, power_expectation, schur_det_expectation, schur_expectation, trace_product_expectation,
    ClosedFormResult, EdgeKind, EnsembleSpec, Side,
};
use crate::partitions::{enumerate_partitions, partitions_up_to, Partition};
use crate::scalar::{rat, rational_to_f64, Rational};
use crate::symfunc::PowerSumPoint;
use crate::tau::{hciz, morozov_series};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Lemmas,
    Prop1,
    Prop2,
    Prop4,
    Hciz,
    Morozov,
    All,
}

impl Suite {
    pub const ALL: [Suite; 6] = [Suite::Lemmas, Suite::Prop1, Suite::Prop2, Suite::Prop4, Suite::Hciz, Suite::Morozov];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Lemmas => "lemmas",
            Suite::Prop1 => "prop1",
            Suite::Prop2 => "prop2",
            Suite::Prop4 => "prop4",
            Suite::Hciz => "hciz",
            Suite::Morozov => "morozov",
            Suite::All => "all",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let all = Suite::ALL.iter().copied().chain([Suite::All]);
        for suite in all {
            if suite.to_string() == s.to_ascii_lowercase() {
                return Ok(suite);
            }
        }
        arg_err(format!("unknown suite '{}'", s))
    }
}

/// One closed form with the observable that should reproduce it.
#[derive(Clone, Debug)]
pub struct Case {
    pub name: String,
    pub closed: Complex64,
    pub sources: SourceAssignment<Complex64>,
    pub ens: EnsembleSpec,
    pub observable: Observable,
}

/// Matrix size and ħ for the size-generic suites; ħ defaults to 1/N.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteParams {
    pub n: usize,
    pub hbar: Option<Rational>,
    /// Seeds the random rational sources.
    pub seed: u64,
}

impl SuiteParams {
    pub fn new(n: usize, seed: u64) -> Self {
        SuiteParams { n, hbar: None, seed }
    }

    fn ensemble(&self, kinds: Vec<EdgeKind>) -> Result<EnsembleSpec> {
        let ens = EnsembleSpec::new(kinds, self.n)?;
        match &self.hbar {
            Some(h) => ens.with_hbar(h.clone()),
            None => Ok(ens),
        }
    }
}

/// I + E with entries of E in {−1/4, −1/8, 0, 1/8, 1/4}: safely invertible for N ≤ 3
/// and not simultaneously diagonalizable.
fn random_source(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Rational> {
    DMatrix::from_fn(n, n, |i, j| {
        let e = rat(rng.random_range(-2..=2), 8);
        if i == j {
            e + rat(1, 1)
        } else {
            e
        }
    })
}

fn random_sources(edges: usize, n: usize, rng: &mut ChaCha8Rng) -> Result<SourceAssignment<Rational>> {
    let m: BTreeMap<i32, DMatrix<Rational>> = (1..=edges as i32)
        .flat_map(|i| [i, -i])
        .map(|l| (l, random_source(n, rng)))
        .collect();
    SourceAssignment::new(m)
}

fn value(r: Result<ClosedFormResult<Rational>>) -> Result<Complex64> {
    Ok(Complex64::new(rational_to_f64(&r?.value), 0.0))
}

fn p(v: &[usize]) -> Partition {
    Partition::new(v.to_vec()).expect("valid partition")
}

fn kinds_label(kinds: &[EdgeKind]) -> String {
    kinds.iter().map(|k| if *k == EdgeKind::Ginibre { 'G' } else { 'U' }).collect()
}

fn side_label(side: Side) -> &'static str {
    match side {
        Side::Faces => "faces",
        Side::Vertices => "vertices",
    }
}

fn observed(model: &DessinModel, side: Side) -> &[CyclicWord] {
    match side {
        Side::Faces => &model.faces,
        Side::Vertices => &model.vertices,
    }
}

fn fmt_parts(ls: &[Partition]) -> String {
    ls.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ")
}

struct Builder<'a> {
    params: &'a SuiteParams,
    rng: ChaCha8Rng,
    cases: Vec<Case>,
}

impl<'a> Builder<'a> {
    fn new(params: &'a SuiteParams, salt: u64) -> Self {
        Builder { params, rng: ChaCha8Rng::seed_from_u64(splitmix(params.seed ^ salt)), cases: Vec::new() }
    }

    fn sources(&mut self, edges: usize) -> Result<SourceAssignment<Rational>> {
        random_sources(edges, self.params.n, &mut self.rng)
    }

    fn push(
        &mut self,
        name: String,
        closed: Complex64,
        src: &SourceAssignment<Rational>,
        ens: &EnsembleSpec,
        words: &[CyclicWord],
        kinds: Vec<FactorKind>,
    ) -> Result<()> {
        self.cases.push(Case {
            name,
            closed,
            sources: src.to_complex(),
            ens: ens.clone(),
            observable: Observable::on_words(words, kinds)?,
        });
        Ok(())
    }
}

fn lemmas(params: &SuiteParams) -> Result<Vec<Case>> {
    let n = params.n;
    let mut b = Builder::new(params, 1);
    let single = DessinModel::from_words(words(&[&[1, -1]]))?;
    let pair = DessinModel::from_words(words(&[&[1], &[-1]]))?;
    let ginibre = params.ensemble(vec![EdgeKind::Ginibre])?;
    let unitary = params.ensemble(vec![EdgeKind::Unitary])?;

    let src = b.sources(1)?;
    for lambda in partitions_up_to(3, n).into_iter().filter(|l| !l.is_empty()) {
        let v = value(schur_expectation(&single, &src, &ginibre, std::slice::from_ref(&lambda), Side::Faces))?;
        b.push(format!("s_{}(ZAZ'B)", lambda), v, &src, &ginibre, &single.faces, vec![FactorKind::Schur(lambda)])?;
    }
    for delta in [p(&[2]), p(&[1, 1])] {
        let v = value(power_expectation(&single, &src, &ginibre, std::slice::from_ref(&delta), Side::Faces))?;
        b.push(format!("p_{}(ZAZ'B)", delta), v, &src, &ginibre, &single.faces, vec![FactorKind::Power(delta)])?;
    }

    let src = b.sources(1)?;
    let small = partitions_up_to(2, n).into_iter().filter(|l| !l.is_empty()).collect::<Vec<_>>();
    for mu in &small {
        for lambda in &small {
            let ls = [mu.clone(), lambda.clone()];
            let v = value(schur_expectation(&pair, &src, &ginibre, &ls, Side::Faces))?;
            let kinds = vec![FactorKind::Schur(mu.clone()), FactorKind::Schur(lambda.clone())];
            b.push(format!("s_{}(ZA)s_{}(Z'B)", mu, lambda), v, &src, &ginibre, &pair.faces, kinds)?;
        }
    }

    let src = b.sources(1)?;
    let one = p(&[1]);
    let v = value(schur_det_expectation(&single, &src, &ginibre, std::slice::from_ref(&one), &[1], Side::Faces))?;
    b.push("s_(1)det(ZAZ'B)".into(), v, &src, &ginibre, &single.faces, vec![FactorKind::SchurDet(one.clone(), 1)])?;
    let v = value(schur_det_expectation(&pair, &src, &ginibre, &[one.clone(), one.clone()], &[1, 1], Side::Faces))?;
    let kinds = vec![FactorKind::SchurDet(one.clone(), 1), FactorKind::SchurDet(one, 1)];
    b.push("s_(1)det(ZA)s_(1)det(Z'B)".into(), v, &src, &ginibre, &pair.faces, kinds)?;

    let src = b.sources(1)?;
    for lambda in partitions_up_to(3, n).into_iter().filter(|l| !l.is_empty()) {
        let v = value(schur_expectation(&single, &src, &unitary, std::slice::from_ref(&lambda), Side::Faces))?;
        b.push(format!("s_{}(UAU'B)", lambda), v, &src, &unitary, &single.faces, vec![FactorKind::Schur(lambda)])?;
    }
    for mu in &small {
        for lambda in &small {
            let ls = [mu.clone(), lambda.clone()];
            let v = value(schur_expectation(&pair, &src, &unitary, &ls, Side::Faces))?;
            let kinds = vec![FactorKind::Schur(mu.clone()), FactorKind::Schur(lambda.clone())];
            b.push(format!("s_{}(UA)s_{}(U'B)", mu, lambda), v, &src, &unitary, &pair.faces, kinds)?;
        }
    }

    // power sums on the short face, Schur on the long one
    let e4 = DessinModel::from_words(words(&[&[-1], &[1, 2, -2]]))?;
    let gg = params.ensemble(vec![EdgeKind::Ginibre; 2])?;
    let src = b.sources(2)?;
    for d in 1..=2 {
        for delta in enumerate_partitions(d) {
            for mu in enumerate_partitions(d).into_iter().filter(|m| m.len() <= n) {
                let v = value(mixed_expectation(&e4, &src, &gg, std::slice::from_ref(&delta), std::slice::from_ref(&mu), Side::Faces))?;
                let kinds = vec![FactorKind::Power(delta.clone()), FactorKind::Schur(mu.clone())];
                b.push(format!("p_{}(Z1'C)s_{}(Z1AZ2BZ2'D)", delta, mu), v, &src, &gg, &e4.faces, kinds)?;
            }
        }
    }
    Ok(b.cases)
}

fn ensembles(params: &SuiteParams) -> Result<Vec<EnsembleSpec>> {
    use EdgeKind::*;
    [vec![Ginibre, Ginibre], vec![Ginibre, Unitary], vec![Unitary, Unitary]]
        .into_iter()
        .map(|k| params.ensemble(k))
        .collect()
}

fn prop1(params: &SuiteParams) -> Result<Vec<Case>> {
    let mut b = Builder::new(params, 2);
    for (name, faces) in two_edge_maps() {
        let model = DessinModel::from_words(faces)?;
        let src = b.sources(2)?;
        for ens in ensembles(params)? {
            for side in [Side::Faces, Side::Vertices] {
                let v = value(trace_product_expectation(&model, &src, &ens, side))?;
                let ws = observed(&model, side);
                let kinds = vec![FactorKind::Power(p(&[1])); ws.len()];
                let label = format!("{} {} {} trace", name, kinds_label(&ens.kinds), side_label(side));
                b.push(label, v, &src, &ens, ws, kinds)?;
            }
        }
    }
    Ok(b.cases)
}

fn prop2(params: &SuiteParams) -> Result<Vec<Case>> {
    let mut b = Builder::new(params, 3);
    for (name, faces) in two_edge_maps() {
        let model = DessinModel::from_words(faces)?;
        let src = b.sources(2)?;
        for ens in ensembles(params)? {
            for lambda in [p(&[2]), p(&[1, 1])].into_iter().filter(|l| l.len() <= params.n) {
                let ls = vec![lambda.clone(); model.faces.len()];
                let v = value(schur_expectation(&model, &src, &ens, &ls, Side::Faces))?;
                let kinds = vec![FactorKind::Schur(lambda.clone()); model.faces.len()];
                let label = format!("{} {} s_{}", name, kinds_label(&ens.kinds), lambda);
                b.push(label, v, &src, &ens, &model.faces, kinds)?;
            }
        }
    }
    Ok(b.cases)
}

/// Every tuple of partitions of d, one per slot.
fn profile_tuples(d: usize, slots: usize) -> Vec<Vec<Partition>> {
    let parts = enumerate_partitions(d);
    let mut out: Vec<Vec<Partition>> = vec![Vec::new()];
    for _ in 0..slots {
        out = out
            .into_iter()
            .flat_map(|t| {
                parts.iter().map(move |q| {
                    let mut t = t.clone();
                    t.push(q.clone());
                    t
                })
            })
            .collect();
    }
    out
}

fn prop4(params: &SuiteParams) -> Result<Vec<Case>> {
    let mut b = Builder::new(params, 4);
    let model = DessinModel::from_words(words(&[&[1], &[-1]]))?;
    let ens = params.ensemble(vec![EdgeKind::Ginibre])?;
    let src = b.sources(1)?;
    for side in [Side::Faces, Side::Vertices] {
        let ws = observed(&model, side);
        for d in 1..=3 {
            for deltas in profile_tuples(d, ws.len()) {
                let v = value(power_expectation(&model, &src, &ens, &deltas, side))?;
                let kinds = deltas.iter().cloned().map(FactorKind::Power).collect();
                b.push(format!("p[{}] {}", fmt_parts(&deltas), side_label(side)), v, &src, &ens, ws, kinds)?;
            }
        }
    }
    Ok(b.cases)
}

fn diag(v: &[f64]) -> DMatrix<Complex64> {
    DMatrix::from_fn(v.len(), v.len(), |i, j| Complex64::new(if i == j { v[i] } else { 0.0 }, 0.0))
}

fn hciz_cases() -> Result<Vec<Case>> {
    let a = diag(&[1.0, 2.0]);
    let bm = diag(&[3.0, 5.0]);
    let face = words(&[&[1, -1]]);
    let ens = EnsembleSpec::unitary(1, 2)?;
    let src = SourceAssignment::new([(1, a.clone()), (-1, bm.clone())].into_iter().collect())?;
    [Complex64::new(0.1, 0.0), Complex64::new(0.05, 0.08)]
        .into_iter()
        .map(|alpha| {
            let pair = hciz(alpha, &a, &bm, 40)?;
            let closed = pair.determinant.ok_or_else(|| Error::Numeric("HCIZ determinant refused".into()))?;
            Ok(Case {
                name: format!("hciz N=2 alpha={}", alpha),
                closed,
                sources: src.clone(),
                ens: ens.clone(),
                observable: Observable::on_words(&face, vec![FactorKind::ExpTrace(vec![alpha])])?,
            })
        })
        .collect()
}

/// Couplings are ≤ 0.5, so the tail beyond this degree is far below MC noise.
const MOROZOV_CAP: usize = 12;

fn join(v: &[Complex64]) -> String {
    v.iter().map(|z| z.to_string()).collect::<Vec<_>>().join(",")
}

fn morozov_cases() -> Result<Vec<Case>> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let instances = [
        (1usize, vec![c(0.5, 0.0)], vec![c(0.5, 0.0)]),
        (1, vec![c(0.4, 0.1), c(0.2, 0.0)], vec![c(0.3, 0.0), c(-0.2, 0.1)]),
        (2, vec![c(0.3, 0.0), c(0.2, 0.0)], vec![c(0.4, 0.0), c(-0.1, 0.0)]),
        (2, vec![c(0.3, 0.2), c(0.1, 0.0), c(0.1, 0.0)], vec![c(0.5, -0.1), c(0.2, 0.0)]),
    ];
    let faces = words(&[&[1], &[-1]]);
    instances
        .into_iter()
        .map(|(n, pv, qv)| {
            let closed = morozov_series(&PowerSumPoint::Explicit(pv.clone()), &PowerSumPoint::Explicit(qv.clone()), n, MOROZOV_CAP);
            Ok(Case {
                name: format!("morozov N={} p=[{}] pbar=[{}]", n, join(&pv), join(&qv)),
                closed,
                sources: SourceAssignment::identity(1, n),
                ens: EnsembleSpec::unitary(1, n)?,
                observable: Observable::on_words(&faces, vec![FactorKind::ExpTrace(pv), FactorKind::ExpTrace(qv)])?,
            })
        })
        .collect()
}

/// The cases of a suite, in a fixed order.
pub fn cases(suite: Suite, params: &SuiteParams) -> Result<Vec<Case>> {
    if params.n == 0 || params.n > 3 {
        return arg_err(format!("suites use N in 1..=3, got {}", params.n));
    }
    Ok(match suite {
        Suite::Lemmas => lemmas(params)?,
        Suite::Prop1 => prop1(params)?,
        Suite::Prop2 => prop2(params)?,
        Suite::Prop4 => prop4(params)?,
        Suite::Hciz => hciz_cases()?,
        Suite::Morozov => morozov_cases()?,
        Suite::All => {
            let mut all = Vec::new();
            for s in Suite::ALL {
                all.extend(cases(s, params)?);
            }
            all
        }
    })
}

/// Estimate every case; case k uses its own seed derived from `cfg.seed` and k.
pub fn run(cases: &[Case], cfg: &McConfig, threshold: f64) -> Result<Vec<Check>> {
    cases
        .iter()
        .enumerate()
        .map(|(k, case)| {
            let cfg = McConfig { seed: splitmix(cfg.seed.wrapping_add(k as u64)), ..*cfg };
            let est = estimate(&case.sources, &case.ens, &case.observable, &cfg)?;
            Ok(compare(case.name.clone(), case.closed, est, threshold))
        })
        .collect()
}
