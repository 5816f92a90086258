//! The two-register stepper.
//!
//! A splitting scheme `(a, b)` is applied to the duplicated system
//! `u' = f(v)`, `v' = f(u)` started from `u = v = xₙ`:
//!
//! ```text
//! for i in 1..=s {
//!     v += h · aᵢ · f(u);
//!     u += h · bᵢ · f(v);
//! }
//! ```
//!
//! Both registers then hold an order-`p_component` approximation of
//! `x(tₙ+h)`, the average `(u+v)/2` an order-`q_averaged` one, and
//! `‖u − v‖` serves as an embedded error estimate. The sweep touches no
//! storage beyond the two registers (plus two time scalars), whatever the
//! stage count.
//!
//! For fields that depend on time, each register carries its own time
//! coordinate, advanced alongside it: the `i`-th `v`-update evaluates `f`
//! at `u`'s time `tₙ + h·Σ_{j<i} bⱼ`, and the `i`-th `u`-update at `v`'s
//! time `tₙ + h·Σ_{j≤i} aⱼ`. The time labels are derived from compensated
//! prefix sums of the coefficients, not accumulated, so they end at
//! `tₙ + h` to within one rounding of `h`.
//!
//! Running the loop in reverse order with negated coefficients undoes a
//! step exactly in exact arithmetic (to round-off in floating point),
//! which lets an adaptive driver reject a step without keeping a copy of
//! the state.

use crate::error::{Error, Result};
use crate::rhs::{is_zero, RhsSystem};
use crate::scalar::Scalar;
use crate::schemes::SplittingScheme;
use crate::state::StateVector;

/// Which collapsed output a driver chains between steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputRegister {
    /// `(u + v)/2` — the recommended output, accurate to `q_averaged`.
    #[default]
    Average,
    /// The `u` register alone, accurate to `p_component`.
    U,
    /// The `v` register alone, accurate to `p_component`.
    V,
}

impl OutputRegister {
    /// Short tag used in CSV headers and CLI arguments.
    pub fn tag(self) -> &'static str {
        match self {
            Self::Average => "avg",
            Self::U => "u",
            Self::V => "v",
        }
    }
}

/// The duplicated state: the only two vector registers the stepper owns.
#[derive(Debug, Clone)]
pub struct DualState<S: Scalar> {
    u: StateVector<S>,
    v: StateVector<S>,
}

impl<S: Scalar> DualState<S> {
    /// Both registers initialized to `x`.
    pub fn from_initial(x: &[S]) -> Self {
        Self {
            u: StateVector::from_slice(x),
            v: StateVector::from_slice(x),
        }
    }

    pub fn zeros(dimension: usize) -> Self {
        Self {
            u: StateVector::zeros(dimension),
            v: StateVector::zeros(dimension),
        }
    }

    pub fn dimension(&self) -> usize {
        self.u.len()
    }

    /// Overwrites both registers with `x` (step-start configuration).
    pub fn reset(&mut self, x: &[S]) {
        assert_eq!(x.len(), self.u.len(), "state dimension");
        self.u.as_mut_slice().copy_from_slice(x);
        self.v.as_mut_slice().copy_from_slice(x);
    }

    pub fn u(&self) -> &StateVector<S> {
        &self.u
    }

    pub fn v(&self) -> &StateVector<S> {
        &self.v
    }

    /// `‖u − v‖₂`, computed by a fused traversal (no difference vector).
    pub fn register_distance(&self) -> f64 {
        self.u.distance_l2(&self.v)
    }

    /// `‖(u + v)/2‖₂`, computed by a fused traversal (no average vector).
    pub fn average_norm_l2(&self) -> f64 {
        let half = S::from_re(0.5);
        self.u
            .iter()
            .zip(self.v.iter())
            .map(|(&a, &b)| ((a + b) * half).abs_sq())
            .sum::<f64>()
            .sqrt()
    }

    /// Writes `(u + v)/2` into `out` without touching the registers.
    pub fn average_into(&self, out: &mut [S]) {
        assert_eq!(out.len(), self.u.len(), "output buffer length");
        let half = S::from_re(0.5);
        for ((o, &a), &b) in out.iter_mut().zip(self.u.iter()).zip(self.v.iter()) {
            *o = (a + b) * half;
        }
    }

    /// Writes the selected output into `out` without touching the registers.
    pub fn write_output(&self, which: OutputRegister, out: &mut [S]) {
        match which {
            OutputRegister::Average => self.average_into(out),
            OutputRegister::U => out.copy_from_slice(self.u.as_slice()),
            OutputRegister::V => out.copy_from_slice(self.v.as_slice()),
        }
    }

    /// Sets `u = v = ` the selected output, in place, ready for the next
    /// step. Collapsing to the average uses no third register: `u` is
    /// averaged in place and copied into `v`.
    pub fn collapse(&mut self, which: OutputRegister) {
        let Self { u, v } = self;
        match which {
            OutputRegister::Average => {
                let half = S::from_re(0.5);
                for (a, &b) in u.as_mut_slice().iter_mut().zip(v.iter()) {
                    *a = (*a + b) * half;
                }
                v.copy_from(u);
            }
            OutputRegister::U => v.copy_from(u),
            OutputRegister::V => u.copy_from(v),
        }
    }
}

/// Per-step diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct StepReport {
    /// `‖u_s − v_s‖₂` — the embedded error estimate (absolute).
    pub err_est: f64,
    /// Field evaluations this step actually performed.
    pub nfev: u64,
}

/// Persistent storage a stepper/field pair needs, in units of N-length
/// registers and auxiliary scalars.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StorageReport {
    /// N-length vectors held across a step: the two registers plus any
    /// internal workspace the field reports.
    pub persistent_registers: usize,
    /// Per-register time coordinates.
    pub auxiliary_scalars: usize,
}

/// Reports the storage footprint of stepping `rhs`: always the two state
/// registers and two time scalars, plus whatever workspace the field
/// itself declares. Independent of scheme and dimension.
pub fn storage_report<S: Scalar>(rhs: &RhsSystem<S>) -> StorageReport {
    StorageReport {
        persistent_registers: 2 + rhs.scratch_registers(),
        auxiliary_scalars: 2,
    }
}

/// One register update `target += (h·coef) · f(t_eval, source)`.
fn half_update<S: Scalar>(
    rhs: &mut RhsSystem<S>,
    t_eval: S,
    source: &StateVector<S>,
    c: S,
    target: &mut StateVector<S>,
    nfev: &mut u64,
) -> Result<()> {
    rhs.accumulate_rhs(t_eval, source, c, target)?;
    *nfev += 1;
    Ok(())
}

/// The stage sweep shared by all four entry points.
///
/// `duplicated_time = false` evaluates `f` at the frozen time `t0`
/// throughout; `true` pairs each evaluation with the source register's own
/// time coordinate. The register arithmetic is identical either way, so on
/// autonomous fields the two paths produce bitwise-identical registers.
///
/// `forward = false` runs the stages in reverse order with negated
/// coefficients; `t0` is then still the time at which the *forward* step
/// began, so evaluation times retrace the forward sweep.
fn sweep<S: Scalar>(
    scheme: &SplittingScheme<S>,
    rhs: &mut RhsSystem<S>,
    state: &mut DualState<S>,
    t0: f64,
    h: f64,
    duplicated_time: bool,
    forward: bool,
) -> Result<u64> {
    state.u.check_len(rhs.dimension())?;
    let s = scheme.stages();
    let base = S::from_re(t0);
    let hs = S::from_re(h);
    let mut nfev = 0u64;
    let DualState { u, v } = state;

    // Evaluation times for stage i (0-based): the v-update reads u at
    // t0 + h·Σ_{j<i} bⱼ, the u-update reads v at t0 + h·Σ_{j≤i} aⱼ.
    let u_time = |i: usize| {
        if duplicated_time {
            base + hs * scheme.node_b_before(i)
        } else {
            base
        }
    };
    let v_time = |i: usize| {
        if duplicated_time {
            base + hs * scheme.node_a(i)
        } else {
            base
        }
    };

    if forward {
        for i in 0..s {
            let a_i = scheme.a()[i];
            if !is_zero(a_i) {
                half_update(rhs, u_time(i), u, hs * a_i, v, &mut nfev)?;
            }
            let b_i = scheme.b()[i];
            if !is_zero(b_i) {
                half_update(rhs, v_time(i), v, hs * b_i, u, &mut nfev)?;
            }
            if !(u.is_finite() && v.is_finite()) {
                return Err(Error::Diverged { stage: i + 1, t: t0 });
            }
        }
    } else {
        for i in (0..s).rev() {
            let b_i = scheme.b()[i];
            if !is_zero(b_i) {
                half_update(rhs, v_time(i), v, -(hs * b_i), u, &mut nfev)?;
            }
            let a_i = scheme.a()[i];
            if !is_zero(a_i) {
                half_update(rhs, u_time(i), u, -(hs * a_i), v, &mut nfev)?;
            }
            if !(u.is_finite() && v.is_finite()) {
                return Err(Error::Diverged { stage: i + 1, t: t0 });
            }
        }
    }
    Ok(nfev)
}

/// One forward step for an autonomous field: `f` is evaluated at the frozen
/// time `t0` throughout. Registers must hold the step-start configuration
/// `u = v = xₙ` (see [`DualState::reset`]); on return they hold
/// `(u_s, v_s)` and the caller chooses what to [`DualState::collapse`] to.
pub fn dstep<S: Scalar>(
    scheme: &SplittingScheme<S>,
    rhs: &mut RhsSystem<S>,
    state: &mut DualState<S>,
    t0: f64,
    h: f64,
) -> Result<StepReport> {
    let nfev = sweep(scheme, rhs, state, t0, h, false, true)?;
    Ok(StepReport {
        err_est: state.register_distance(),
        nfev,
    })
}

/// One forward step with duplicated time coordinates: each evaluation uses
/// the source register's own time. On autonomous fields this is
/// bitwise-identical to [`dstep`]; on time-dependent fields it is the path
/// that attains the scheme's declared orders.
pub fn dstep_nonautonomous<S: Scalar>(
    scheme: &SplittingScheme<S>,
    rhs: &mut RhsSystem<S>,
    state: &mut DualState<S>,
    t0: f64,
    h: f64,
) -> Result<StepReport> {
    let nfev = sweep(scheme, rhs, state, t0, h, true, true)?;
    Ok(StepReport {
        err_est: state.register_distance(),
        nfev,
    })
}

/// Undoes a [`dstep`]: runs the stages in reverse order with negated
/// coefficients. `t0` is the time at which the forward step began (not
/// `t0 + h`). After the call both registers hold `xₙ` up to round-off, so
/// `err_est` of the returned report measures the recovery quality.
pub fn dstep_inverse<S: Scalar>(
    scheme: &SplittingScheme<S>,
    rhs: &mut RhsSystem<S>,
    state: &mut DualState<S>,
    t0: f64,
    h: f64,
) -> Result<StepReport> {
    let nfev = sweep(scheme, rhs, state, t0, h, false, false)?;
    Ok(StepReport {
        err_est: state.register_distance(),
        nfev,
    })
}

/// Undoes a [`dstep_nonautonomous`]; see [`dstep_inverse`].
pub fn dstep_inverse_nonautonomous<S: Scalar>(
    scheme: &SplittingScheme<S>,
    rhs: &mut RhsSystem<S>,
    state: &mut DualState<S>,
    t0: f64,
    h: f64,
) -> Result<StepReport> {
    let nfev = sweep(scheme, rhs, state, t0, h, true, false)?;
    Ok(StepReport {
        err_est: state.register_distance(),
        nfev,
    })
}
