//! The planar two-body (Kepler) problem.
//!
//! State layout `(q₁, q₂, p₁, p₂)` with unit masses and gravitational
//! parameter: `q' = p`, `p' = −q/r³`, `r = ‖q‖`. The standard eccentric
//! initial condition starts at perihelion with energy `H = −1/2` and
//! period `2π` for every eccentricity `e ∈ [0, 1)`. An independent
//! reference solution comes from solving Kepler's equation, giving a
//! ground truth the integrators never touch.

use crate::error::{Error, Result};
use crate::rhs::VectorField;
use crate::scalar::Scalar;

/// Distance below which the force law is considered singular.
pub const COLLISION_RADIUS: f64 = 1e-12;

/// Gravitational two-body field over real or complex scalars.
///
/// Complex support exists so complex-coefficient schemes can run the
/// problem; the trajectory then lives on the real slice with round-off
/// imaginary dust.
#[derive(Debug, Clone, Copy, Default)]
pub struct KeplerField;

impl<S: Scalar> VectorField<S> for KeplerField {
    fn dimension(&self) -> usize {
        4
    }

    fn accumulate(&mut self, _t: S, x: &[S], c: S, y: &mut [S]) -> Result<()> {
        let (q1, q2, p1, p2) = (x[0], x[1], x[2], x[3]);
        let r2 = q1 * q1 + q2 * q2;
        let r = r2.sqrt();
        let r_abs = r.abs();
        if !(r_abs > COLLISION_RADIUS) {
            return Err(Error::Collision { r: r_abs });
        }
        let inv_r3 = S::one() / (r2 * r);
        y[0] += c * p1;
        y[1] += c * p2;
        y[2] -= c * q1 * inv_r3;
        y[3] -= c * q2 * inv_r3;
        Ok(())
    }
}

/// Perihelion initial condition with eccentricity `e`:
/// `q = (1−e, 0)`, `p = (0, √((1+e)/(1−e)))`.
pub fn kepler_initial(e: f64) -> Result<[f64; 4]> {
    check_eccentricity(e)?;
    Ok([1.0 - e, 0.0, 0.0, ((1.0 + e) / (1.0 - e)).sqrt()])
}

/// Total energy `H = ‖p‖²/2 − 1/‖q‖`.
pub fn kepler_energy(x: &[f64]) -> Result<f64> {
    let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
    if !(r > COLLISION_RADIUS) {
        return Err(Error::Collision { r });
    }
    Ok(0.5 * (x[2] * x[2] + x[3] * x[3]) - 1.0 / r)
}

/// Angular momentum `L = q₁p₂ − q₂p₁` (conserved, `√(1−e²)` on the
/// standard orbit).
pub fn kepler_angular_momentum(x: &[f64]) -> f64 {
    x[0] * x[3] - x[1] * x[2]
}

fn check_eccentricity(e: f64) -> Result<()> {
    if !(0.0..1.0).contains(&e) {
        return Err(Error::Config(format!(
            "eccentricity must lie in [0, 1), got {e}"
        )));
    }
    Ok(())
}

const KEPLER_EQ_TOL: f64 = 1e-14;
const KEPLER_MAX_ITERS: usize = 50;

/// Exact state at time `t` on the orbit started from [`kepler_initial`].
///
/// Solves Kepler's equation `E − e·sin E = t (mod 2π)` by Newton
/// iteration from the Danby starting guess, then maps the eccentric
/// anomaly to position and momentum on the `a = 1` ellipse.
pub fn kepler_reference(t: f64, e: f64) -> Result<[f64; 4]> {
    check_eccentricity(e)?;
    let two_pi = 2.0 * std::f64::consts::PI;
    let m = t.rem_euclid(two_pi);

    let mut ecc = if m.sin() >= 0.0 {
        m + 0.85 * e
    } else {
        m - 0.85 * e
    };
    let mut residual = ecc - e * ecc.sin() - m;
    let mut converged = residual.abs() <= KEPLER_EQ_TOL;
    for _ in 0..KEPLER_MAX_ITERS {
        if converged {
            break;
        }
        ecc -= residual / (1.0 - e * ecc.cos());
        residual = ecc - e * ecc.sin() - m;
        converged = residual.abs() <= KEPLER_EQ_TOL;
    }
    if !converged {
        return Err(Error::NoConvergence {
            iters: KEPLER_MAX_ITERS,
            residual: residual.abs(),
        });
    }

    let (sin_e, cos_e) = ecc.sin_cos();
    let r = 1.0 - e * cos_e;
    let beta = (1.0 - e * e).sqrt();
    Ok([cos_e - e, beta * sin_e, -sin_e / r, beta * cos_e / r])
}
