//! Benchmark problems and their supporting machinery.
//!
//! * [`fft`] — in-house radix-2 FFT with a naive-DFT fallback.
//! * [`spectral`] — periodic advection with Fourier collocation.
//! * [`kepler`] — the planar two-body problem with an independent
//!   reference solution.
//! * [`simple`] — closed-form scalar and planar fields for order tests.

pub mod fft;
pub mod kepler;
pub mod simple;
pub mod spectral;

pub use fft::{fft, ifft};
pub use kepler::{
    kepler_angular_momentum, kepler_energy, kepler_initial, kepler_reference, KeplerField,
    COLLISION_RADIUS,
};
pub use simple::{ExponentialField, ModulatedGrowthField, OscillatorField, RampField};
pub use spectral::{wave_exact, wave_initial, AdvectionField, SpectralGrid, WAVE_MODE};
