//! Monte Carlo oracle: Ginibre and Haar sampling, sample means of
//! observables of dressed monodromies, and z-score comparison against
//! closed forms.
//!
//! Every sample draws its matrices from its own ChaCha stream keyed by
//! (seed, sample, edge), and sums are taken in sample order, so the
//! estimate does not depend on the number of workers.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::dessin::{CyclicWord, SourceAssignment};
use crate::error::{arg_err, Error, Result};
use crate::expectation::{EdgeKind, EnsembleSpec};
use crate::partitions::Partition;
use crate::scalar::rational_to_f64;
use crate::symfunc::{power_sum_eval, schur_eval_matrix, trace_powers};

pub mod suites;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
    /// Worker threads; the result does not depend on it.
    pub workers: usize,
}

impl McConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
        McConfig { samples, seed, workers }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: Complex64,
    /// Standard errors of the real and imaginary parts.
    pub stderr_re: f64,
    pub stderr_im: f64,
    pub samples: usize,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The RNG stream for one (sample, edge) pair.
pub fn stream(seed: u64, sample: u64, edge: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut h = splitmix(seed ^ splitmix(sample ^ splitmix(edge.wrapping_add(0x5851_F42D_4C95_7F2D))));
    for chunk in key.chunks_mut(8) {
        h = splitmix(h);
        chunk.copy_from_slice(&h.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// i.i.d. complex Gaussian entries with E|z|² = ħ.
pub fn sample_ginibre(n: usize, hbar: f64, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let normal = Normal::new(0.0, (hbar / 2.0).sqrt()).expect("hbar > 0");
    DMatrix::from_fn(n, n, |_, _| Complex64::new(normal.sample(rng), normal.sample(rng)))
}

/// Haar unitary: QR of a Gaussian matrix with R's diagonal phases moved into Q.
pub fn sample_haar_unitary(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let g = sample_ginibre(n, 1.0, rng);
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

#[derive(Clone, Debug, PartialEq)]
pub enum FactorKind {
    /// p_Δ(W)
    Power(Partition),
    /// s_λ(W)
    Schur(Partition),
    /// s_λ(W) det(W)^α
    SchurDet(Partition, u32),
    /// exp(Σ_m c_m tr W^m / m)
    ExpTrace(Vec<Complex64>),
}

/// A function of one dressed word: W = X_{l1}C_{l1} X_{l2}C_{l2} ⋯ with X_{−i} = X_i†.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub word: CyclicWord,
    pub kind: FactorKind,
}

/// Product of factors; the empty product is 1.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Observable {
    pub factors: Vec<Factor>,
}

impl Observable {
    pub fn new(factors: Vec<Factor>) -> Self {
        Observable { factors }
    }

    /// One factor per word, in order.
    pub fn on_words(words: &[CyclicWord], kinds: Vec<FactorKind>) -> Result<Self> {
        if words.len() != kinds.len() {
            return arg_err(format!("{} words but {} factor kinds", words.len(), kinds.len()));
        }
        Ok(Observable {
            factors: words.iter().cloned().zip(kinds).map(|(word, kind)| Factor { word, kind }).collect(),
        })
    }

    fn check(&self, n: usize, sources: &SourceAssignment<Complex64>) -> Result<()> {
        for f in &self.factors {
            for &l in f.word.letters() {
                if l.unsigned_abs() as usize > n {
                    return arg_err(format!("letter {} has no random matrix (n = {})", l, n));
                }
                sources.get(l)?;
            }
        }
        Ok(())
    }
}

fn eval_factor(kind: &FactorKind, w: &DMatrix<Complex64>) -> Result<Complex64> {
    Ok(match kind {
        FactorKind::Power(delta) => power_sum_eval(delta, w),
        FactorKind::Schur(lambda) => schur_eval_matrix(lambda, w)?,
        FactorKind::SchurDet(lambda, alpha) => schur_eval_matrix(lambda, w)? * w.determinant().powu(*alpha),
        FactorKind::ExpTrace(c) => {
            let tr = trace_powers(w, c.len());
            c.iter().zip(tr).enumerate().map(|(m, (cm, t))| cm * t / (m + 1) as f64).sum::<Complex64>().exp()
        }
    })
}

fn draw(ens: &EnsembleSpec, hbar: f64, seed: u64, sample: u64) -> Vec<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    ens.kinds
        .iter()
        .enumerate()
        .map(|(e, kind)| {
            let mut rng = stream(seed, sample, e as u64);
            let x = match kind {
                EdgeKind::Ginibre => sample_ginibre(ens.size, hbar, &mut rng),
                EdgeKind::Unitary => sample_haar_unitary(ens.size, &mut rng),
            };
            let xa = x.adjoint();
            (x, xa)
        })
        .collect()
}

fn one_sample(
    obs: &Observable,
    sources: &SourceAssignment<Complex64>,
    ens: &EnsembleSpec,
    hbar: f64,
    seed: u64,
    sample: u64,
) -> Result<Complex64> {
    let xs = draw(ens, hbar, seed, sample);
    let mut v = Complex64::new(1.0, 0.0);
    for f in &obs.factors {
        let mut w = DMatrix::<Complex64>::identity(ens.size, ens.size);
        for &l in f.word.letters() {
            let (x, xa) = &xs[l.unsigned_abs() as usize - 1];
            w = w * if l > 0 { x } else { xa } * sources.get(l)?;
        }
        v *= eval_factor(&f.kind, &w)?;
    }
    Ok(v)
}

/// Neumaier-compensated sum, in order.
fn compensated_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = compensated_sum(xs.iter().copied()) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = compensated_sum(xs.iter().map(|x| (x - mean) * (x - mean))) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Sample mean and standard error of the observable under the ensemble.
pub fn estimate(
    sources: &SourceAssignment<Complex64>,
    ens: &EnsembleSpec,
    obs: &Observable,
    cfg: &McConfig,
) -> Result<McEstimate> {
    if cfg.samples == 0 {
        return arg_err("need at least one sample");
    }
    if sources.size() != ens.size {
        return arg_err(format!("sources are {}x{}, ensemble N = {}", sources.size(), sources.size(), ens.size));
    }
    obs.check(ens.n(), sources)?;
    let hbar = rational_to_f64(&ens.hbar);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| Error::Numeric(format!("thread pool: {}", e)))?;
    let values: Vec<Complex64> = pool.install(|| {
        (0..cfg.samples as u64)
            .into_par_iter()
            .map(|k| one_sample(obs, sources, ens, hbar, cfg.seed, k))
            .collect::<Result<_>>()
    })?;
    let re: Vec<f64> = values.iter().map(|v| v.re).collect();
    let im: Vec<f64> = values.iter().map(|v| v.im).collect();
    let (mr, sr) = mean_and_stderr(&re);
    let (mi, si) = mean_and_stderr(&im);
    Ok(McEstimate { mean: Complex64::new(mr, mi), stderr_re: sr, stderr_im: si, samples: cfg.samples })
}

/// Default pass threshold on |closed − mean| / stderr, per component.
pub const Z_THRESHOLD: f64 = 4.0;

/// Closed form vs estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub closed: Complex64,
    pub estimate: McEstimate,
    pub z_re: f64,
    pub z_im: f64,
    pub pass: bool,
}

/// Relative round-off allowance added to the standard error. Observables that
/// are constant under the ensemble (s_(1^N)(UAU†B) = det A det B) have a
/// sample spread of a few ulps, which would otherwise turn rounding into z ≫ 4.
pub const ROUNDOFF: f64 = 1e-10;

fn zscore(diff: f64, se: f64, scale: f64) -> f64 {
    let se = se.hypot(ROUNDOFF * (1.0 + scale));
    diff.abs() / se
}

pub fn compare(name: impl Into<String>, closed: Complex64, est: McEstimate, threshold: f64) -> Check {
    let scale = closed.norm().max(est.mean.norm());
    let z_re = zscore(closed.re - est.mean.re, est.stderr_re, scale);
    let z_im = zscore(closed.im - est.mean.im, est.stderr_im, scale);
    Check { name: name.into(), closed, estimate: est, z_re, z_im, pass: z_re <= threshold && z_im <= threshold }
}
