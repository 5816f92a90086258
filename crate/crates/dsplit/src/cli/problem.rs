//! Named initial-value problems available to the command-line driver.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::problems::{
    kepler_initial, kepler_reference, wave_exact, wave_initial, AdvectionField, ExponentialField,
    KeplerField, ModulatedGrowthField, OscillatorField, RampField, SpectralGrid,
};
use crate::rhs::RhsSystem;
use crate::scalar::Scalar;
use crate::state::StateVector;

/// Problems the command-line driver can construct by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    /// `x' = −x`, scalar decay.
    Exponential,
    /// Harmonic oscillator with unit frequency.
    Oscillator,
    /// `x' = t`: state-independent and non-autonomous.
    Ramp,
    /// `x' = sin(t)·x`: non-autonomous growth.
    Modulated,
    /// Planar two-body orbit.
    Kepler,
    /// Periodic advection via spectral collocation (complex state).
    Wave,
}

impl Problem {
    pub fn parse(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "exp" | "exponential" => Ok(Self::Exponential),
            "osc" | "oscillator" => Ok(Self::Oscillator),
            "ramp" => Ok(Self::Ramp),
            "modulated" => Ok(Self::Modulated),
            "kepler" => Ok(Self::Kepler),
            "wave" => Ok(Self::Wave),
            other => Err(Error::Config(format!(
                "unknown problem `{other}` (expected exp, oscillator, ramp, modulated, kepler, or wave)"
            ))),
        }
    }

    /// Whether the state is complex regardless of the method.
    pub fn complex_state(self) -> bool {
        matches!(self, Self::Wave)
    }

    /// Integration span used when the config leaves `tf` unset.
    pub fn default_span(self) -> f64 {
        match self {
            Self::Wave => 50.0,
            Self::Kepler => 2000.0,
            _ => 1.0,
        }
    }
}

/// Parameters consumed by the problem constructors; fields irrelevant to a
/// given problem are ignored.
#[derive(Debug, Clone, Copy)]
pub struct ProblemParams {
    pub t0: f64,
    /// Grid size (wave).
    pub n: usize,
    /// Eccentricity (Kepler).
    pub e: f64,
}

/// A constructed problem: right-hand side, initial state, and the exact
/// solution as a function of absolute time.
pub struct ProblemSetup<S: Scalar> {
    pub rhs: RhsSystem<S>,
    pub x0: StateVector<S>,
    pub exact: Box<dyn Fn(f64) -> Result<StateVector<S>>>,
}

fn real_exact<S: Scalar>(values: &[f64]) -> StateVector<S> {
    StateVector::from_re_slice(values)
}

/// Builds any problem with real-representable state over the scalar type
/// the method requires; the wave problem needs [`build_wave_problem`].
pub fn build_problem<S: Scalar>(problem: Problem, params: &ProblemParams) -> Result<ProblemSetup<S>> {
    let t0 = params.t0;
    match problem {
        Problem::Exponential => {
            let field = ExponentialField { rate: -1.0 };
            Ok(ProblemSetup {
                rhs: RhsSystem::new(field),
                x0: StateVector::from_re_slice(&[1.0]),
                exact: Box::new(move |t| Ok(real_exact(&[field.exact(1.0, t - t0)]))),
            })
        }
        Problem::Oscillator => {
            let field = OscillatorField { omega: 1.0 };
            Ok(ProblemSetup {
                rhs: RhsSystem::new(field),
                x0: StateVector::from_re_slice(&[1.0, 0.0]),
                exact: Box::new(move |t| Ok(real_exact(&field.exact([1.0, 0.0], t - t0)))),
            })
        }
        Problem::Ramp => Ok(ProblemSetup {
            rhs: RhsSystem::new(RampField),
            x0: StateVector::from_re_slice(&[1.0]),
            exact: Box::new(move |t| Ok(real_exact(&[RampField.exact(1.0, t0, t)]))),
        }),
        Problem::Modulated => Ok(ProblemSetup {
            rhs: RhsSystem::new(ModulatedGrowthField),
            x0: StateVector::from_re_slice(&[1.0]),
            exact: Box::new(move |t| Ok(real_exact(&[ModulatedGrowthField.exact(1.0, t0, t)]))),
        }),
        Problem::Kepler => {
            let e = params.e;
            Ok(ProblemSetup {
                rhs: RhsSystem::new(KeplerField),
                x0: StateVector::from_re_slice(&kepler_initial(e)?),
                exact: Box::new(move |t| Ok(real_exact(&kepler_reference(t - t0, e)?))),
            })
        }
        Problem::Wave => Err(Error::Config(
            "the wave problem uses complex state; construct it via its dedicated builder".into(),
        )),
    }
}

/// Builds the spectral advection problem (always over `Complex64`).
pub fn build_wave_problem(params: &ProblemParams) -> Result<ProblemSetup<Complex64>> {
    let grid = SpectralGrid::new(params.n)?;
    let exact_grid = grid.clone();
    let t0 = params.t0;
    let x0 = wave_initial(&grid);
    Ok(ProblemSetup {
        rhs: RhsSystem::new(AdvectionField::new(grid)),
        x0,
        exact: Box::new(move |t| Ok(wave_exact(&exact_grid, t - t0))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ProblemParams {
        ProblemParams { t0: 0.0, n: 8, e: 0.5 }
    }

    #[test]
    fn names_parse_to_the_expected_problems() {
        assert_eq!(Problem::parse("exp").unwrap(), Problem::Exponential);
        assert_eq!(Problem::parse(" Oscillator ").unwrap(), Problem::Oscillator);
        assert_eq!(Problem::parse("WAVE").unwrap(), Problem::Wave);
        assert!(Problem::parse("pendulum").is_err());
    }

    #[test]
    fn exponential_exact_matches_the_closed_form() {
        let setup = build_problem::<f64>(Problem::Exponential, &params()).unwrap();
        let x = setup.exact.as_ref()(1.0).unwrap();
        assert!((x.as_slice()[0] - (-1.0f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn exact_respects_a_shifted_start_time() {
        let shifted = ProblemParams { t0: 2.0, ..params() };
        let setup = build_problem::<f64>(Problem::Exponential, &shifted).unwrap();
        let x = setup.exact.as_ref()(2.0).unwrap();
        assert_eq!(x.as_slice()[0], 1.0);
    }

    #[test]
    fn kepler_exact_at_start_matches_the_initial_state() {
        let setup = build_problem::<f64>(Problem::Kepler, &params()).unwrap();
        let x = setup.exact.as_ref()(0.0).unwrap();
        for (got, want) in x.as_slice().iter().zip(setup.x0.as_slice()) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn wave_builder_produces_matching_initial_and_exact_states() {
        let setup = build_wave_problem(&params()).unwrap();
        let x = setup.exact.as_ref()(0.0).unwrap();
        assert_eq!(x.len(), 8);
        for (got, want) in x.as_slice().iter().zip(setup.x0.as_slice()) {
            assert!((got - want).norm() < 1e-15);
        }
        assert!(build_problem::<Complex64>(Problem::Wave, &params()).is_err());
    }
}
