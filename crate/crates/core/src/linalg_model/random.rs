use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{decompose, FiniteModel};

/// Random model with `E = BᵀB + D` (B of random height, D a nonnegative
/// diagonal) and a dense `J` with `1 ≤ m < n`. Candidates whose Dirichlet
/// operator is singular are rejected and redrawn. Returns the generator
/// positioned after the model so callers can keep drawing data.
pub fn random_model(seed: u64, n: usize) -> (FiniteModel, ChaCha8Rng) {
    random_model_with(seed, n, None)
}

/// As [`random_model`] with the trace dimension fixed when `m` is given.
pub fn random_model_with(seed: u64, n: usize, m: Option<usize>) -> (FiniteModel, ChaCha8Rng) {
    assert!(n >= 2, "random models need n ≥ 2");
    if let Some(m) = m {
        assert!((1..n).contains(&m), "need 1 ≤ m < n");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let m = m.unwrap_or_else(|| rng.gen_range(1..n));
        let k = rng.gen_range(1..=n);
        let b = DMatrix::from_fn(k, n, |_, _| rng.gen_range(-1.0..1.0));
        let mut e = b.transpose() * b;
        for i in 0..n {
            e[(i, i)] += rng.gen_range(0.0..0.5);
        }
        let e = (&e + e.transpose()) * 0.5;
        let j = DMatrix::from_fn(m, n, |_, _| rng.gen_range(-1.0..1.0));
        if let Ok(model) = FiniteModel::new(e, j) {
            if decompose(&model).is_ok() {
                return (model.with_seed(seed), rng);
            }
        }
    }
}

/// Tridiagonal symmetric M-matrix form (nonpositive off-diagonals, weakly
/// diagonally dominant) with `J` reading a random set of coordinates that
/// always includes both ends.
pub fn m_matrix_model(seed: u64, n: usize) -> (FiniteModel, ChaCha8Rng) {
    assert!(n >= 3, "M-matrix models need n ≥ 3");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bonds: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.5..1.5)).collect();
    let mut e = DMatrix::zeros(n, n);
    for (i, a) in bonds.iter().enumerate() {
        e[(i, i + 1)] = -a;
        e[(i + 1, i)] = -a;
        e[(i, i)] += a;
        e[(i + 1, i + 1)] += a;
    }
    for i in 0..n {
        e[(i, i)] += rng.gen_range(0.0..0.1);
    }
    let mut coords = vec![0, n - 1];
    for i in 1..n - 1 {
        if rng.gen_bool(0.25) {
            coords.push(i);
        }
    }
    coords.sort_unstable();
    let j = DMatrix::from_fn(coords.len(), n, |r, c| if coords[r] == c { 1.0 } else { 0.0 });
    let model = FiniteModel::new(e, j).expect("M-matrix model is valid by construction");
    (model.with_seed(seed), rng)
}

pub fn random_psi(rng: &mut ChaCha8Rng, m: usize) -> DVector<f64> {
    DVector::from_fn(m, |_, _| rng.gen_range(-1.0..1.0))
}
