//! Fixtures shared by the benchmarks.

use std::collections::BTreeMap;

use dessin_core::dessin::examples::words;
use dessin_core::dessin::{random_model, DessinModel};
use dessin_core::mc::{FactorKind, Observable};
use dessin_core::{Partition, SourceAssignment};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn models(count: usize, n: usize, seed: u64) -> Vec<DessinModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_model(n, &mut rng)).collect()
}

/// Torus face (1,2,−1,−2) with s_(2) observed, N×N sources near the identity.
pub fn torus_case(size: usize) -> (SourceAssignment<Complex64>, Observable) {
    let m: BTreeMap<i32, DMatrix<Complex64>> = [1, -1, 2, -2]
        .into_iter()
        .map(|l| {
            let mat = DMatrix::from_fn(size, size, |i, j| {
                let v = if i == j { 1.0 } else { 0.1 * (l as f64) / (1 + i + j) as f64 };
                Complex64::new(v, 0.0)
            });
            (l, mat)
        })
        .collect();
    let obs = Observable::on_words(&words(&[&[1, 2, -1, -2]]), vec![FactorKind::Schur(Partition::row(2))])
        .expect("one word, one factor");
    (SourceAssignment::new(m).expect("square"), obs)
}
