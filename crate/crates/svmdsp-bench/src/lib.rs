//! Shared helpers for the criterion benchmarks.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use svmdsp::qp::{DualProblem, GramMatrix, GramProvenance};
use svmdsp::types::EpsHuberParams;

/// Random well-conditioned dual problem of the given size.
pub fn random_problem(seed: u64, n: usize, eps: f64) -> DualProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let mut k = &a * a.transpose() / n as f64;
    for i in 0..n {
        k[(i, i)] += 0.1;
    }
    let gram = GramMatrix::new(k, GramProvenance::Composite).unwrap();
    let targets: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let loss = EpsHuberParams::new(eps, 0.05, 5.0).unwrap();
    DualProblem::new(gram, targets, loss).unwrap()
}
