//! Shared helpers for the integration test binaries.

use dsplit::{Result, Scalar, VectorField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic RNG so every test run sees the same random trials.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random autonomous polynomial field with constant, full linear, and
/// per-component quadratic and cubic terms:
/// `f_i(x) = c_i + Σ_j A_ij x_j + q_i x_i² + k_i x_i³`.
#[derive(Debug, Clone)]
pub struct CubicField {
    dim: usize,
    constant: Vec<f64>,
    linear: Vec<f64>,
    quadratic: Vec<f64>,
    cubic: Vec<f64>,
}

impl CubicField {
    pub fn random(rng: &mut ChaCha8Rng, dim: usize) -> Self {
        let mut draw = |n: usize| -> Vec<f64> {
            (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
        };
        Self {
            dim,
            constant: draw(dim),
            linear: draw(dim * dim),
            quadratic: draw(dim),
            cubic: draw(dim),
        }
    }
}

impl<S: Scalar> VectorField<S> for CubicField {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn accumulate(&mut self, _t: S, x: &[S], c: S, y: &mut [S]) -> Result<()> {
        for i in 0..self.dim {
            let mut f = S::from_re(self.constant[i]);
            for (j, &xj) in x.iter().enumerate() {
                f += S::from_re(self.linear[i * self.dim + j]) * xj;
            }
            f += S::from_re(self.quadratic[i]) * x[i] * x[i];
            f += S::from_re(self.cubic[i]) * x[i] * x[i] * x[i];
            y[i] += c * f;
        }
        Ok(())
    }
}

/// Random state with entries in `(-1, 1)`.
pub fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
}
