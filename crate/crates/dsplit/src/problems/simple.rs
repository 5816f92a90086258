//! Desk-scale fields with closed-form solutions, used by order tests and
//! the CLI's `exp`/`oscillator` problems.

use crate::rhs::VectorField;
use crate::scalar::Scalar;
use crate::Result;

/// `x' = rate·x`, solution `x₀·e^{rate·t}`.
#[derive(Debug, Clone, Copy)]
pub struct ExponentialField {
    pub rate: f64,
}

impl<S: Scalar> VectorField<S> for ExponentialField {
    fn dimension(&self) -> usize {
        1
    }

    fn accumulate(&mut self, _t: S, x: &[S], c: S, y: &mut [S]) -> Result<()> {
        y[0] += c * S::from_re(self.rate) * x[0];
        Ok(())
    }
}

impl ExponentialField {
    pub fn exact(&self, x0: f64, t: f64) -> f64 {
        x0 * (self.rate * t).exp()
    }
}

/// Harmonic oscillator `(x, v)' = (v, −ω²x)`.
#[derive(Debug, Clone, Copy)]
pub struct OscillatorField {
    pub omega: f64,
}

impl<S: Scalar> VectorField<S> for OscillatorField {
    fn dimension(&self) -> usize {
        2
    }

    fn accumulate(&mut self, _t: S, x: &[S], c: S, y: &mut [S]) -> Result<()> {
        let w2 = S::from_re(self.omega * self.omega);
        y[0] += c * x[1];
        y[1] -= c * w2 * x[0];
        Ok(())
    }
}

impl OscillatorField {
    /// Exact state from `(x₀, v₀)` after time `t`.
    pub fn exact(&self, x0: [f64; 2], t: f64) -> [f64; 2] {
        let (s, c) = (self.omega * t).sin_cos();
        [
            x0[0] * c + x0[1] * s / self.omega,
            -x0[0] * self.omega * s + x0[1] * c,
        ]
    }
}

/// `x' = t`, solution `x₀ + (t² − t₀²)/2`; the simplest genuinely
/// time-dependent field.
#[derive(Debug, Clone, Copy, Default)]
pub struct RampField;

impl<S: Scalar> VectorField<S> for RampField {
    fn dimension(&self) -> usize {
        1
    }

    fn autonomous(&self) -> bool {
        false
    }

    fn accumulate(&mut self, t: S, _x: &[S], c: S, y: &mut [S]) -> Result<()> {
        y[0] += c * t;
        Ok(())
    }
}

impl RampField {
    pub fn exact(&self, x0: f64, t0: f64, t: f64) -> f64 {
        x0 + 0.5 * (t * t - t0 * t0)
    }
}

/// `x' = sin(t)·x`, solution `x₀·exp(cos t₀ − cos t)`; smooth
/// non-autonomous field for order measurements.
#[derive(Debug, Clone, Copy, Default)]
pub struct ModulatedGrowthField;

impl<S: Scalar> VectorField<S> for ModulatedGrowthField {
    fn dimension(&self) -> usize {
        1
    }

    fn autonomous(&self) -> bool {
        false
    }

    fn accumulate(&mut self, t: S, x: &[S], c: S, y: &mut [S]) -> Result<()> {
        y[0] += c * t.sin() * x[0];
        Ok(())
    }
}

impl ModulatedGrowthField {
    pub fn exact(&self, x0: f64, t0: f64, t: f64) -> f64 {
        x0 * (t0.cos() - t.cos()).exp()
    }
}
