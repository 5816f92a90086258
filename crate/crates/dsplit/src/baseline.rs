//! Reference integrators.
//!
//! Three conventional steppers serve as baselines for the two-register
//! scheme:
//!
//! * [`RkStepper`] — a generic explicit tableau stepper. It stores one
//!   slope vector per stage (plus one argument buffer required by the
//!   accumulate contract) and evaluates the field exactly once per stage,
//!   zero weights included. It is the oracle the two-register stepper is
//!   tested against via scheme-to-tableau expansion.
//! * [`WilliamsonStepper`] — the two-register increment format
//!   `Δy ← A_i Δy + h f(y)`, `y ← y + B_i Δy`. Holds one workspace vector
//!   (`Δy`) beyond the caller's state.
//! * [`VdhStepper`] — the two-register format whose tableau repeats the
//!   weights below the subdiagonal. Under the accumulate contract the
//!   field cannot overwrite its own input, so this stepper honestly holds
//!   two workspace vectors (slope and stage argument) beyond the state —
//!   one more than an in-place formulation would use — plus one more when
//!   an embedded estimate is requested.

use crate::error::{Error, Result};
use crate::rhs::{is_zero, RhsSystem};
use crate::scalar::Scalar;
use crate::schemes::{ButcherTableau, VdhScheme, WilliamsonScheme};
use crate::state::StateVector;

/// Outcome of one baseline step.
#[derive(Debug, Clone, Copy)]
pub struct BaselineStep {
    /// `‖x_next − x̂_next‖₂` when the tableau carries embedded weights.
    pub err_est: Option<f64>,
    /// Field evaluations performed (always the stage count).
    pub nfev: u64,
}

/// Generic explicit Runge-Kutta stepper over an arbitrary tableau.
#[derive(Debug)]
pub struct RkStepper<S: Scalar> {
    tableau: ButcherTableau<S>,
    slopes: Vec<StateVector<S>>,
    arg: StateVector<S>,
}

impl<S: Scalar> RkStepper<S> {
    pub fn new(tableau: ButcherTableau<S>, dimension: usize) -> Self {
        let slopes = (0..tableau.stages())
            .map(|_| StateVector::zeros(dimension))
            .collect();
        Self {
            tableau,
            slopes,
            arg: StateVector::zeros(dimension),
        }
    }

    pub fn tableau(&self) -> &ButcherTableau<S> {
        &self.tableau
    }

    /// Slope vectors held across a step (one per stage).
    pub fn slope_vectors(&self) -> usize {
        self.slopes.len()
    }

    /// Advances `x` by one step of size `h` from time `t0`.
    pub fn step(
        &mut self,
        rhs: &mut RhsSystem<S>,
        x: &mut StateVector<S>,
        t0: f64,
        h: f64,
    ) -> Result<BaselineStep> {
        let Self { tableau, slopes, arg } = self;
        let s = tableau.stages();
        let base = S::from_re(t0);
        let hs = S::from_re(h);
        let mut nfev = 0u64;

        for i in 0..s {
            arg.copy_from(x);
            for (j, &a_ij) in tableau.a()[i].iter().enumerate() {
                if !is_zero(a_ij) {
                    arg.axpy(hs * a_ij, &slopes[j]);
                }
            }
            let t_eval = base + hs * tableau.c()[i];
            slopes[i].set_zero();
            rhs.accumulate_rhs(t_eval, arg, S::one(), &mut slopes[i])?;
            nfev += 1;
            if !slopes[i].is_finite() {
                return Err(Error::Diverged { stage: i + 1, t: t0 });
            }
        }

        // Embedded estimate before the state update: ‖h·Σ (bᵢ − b̂ᵢ) kᵢ‖,
        // accumulated per component so no difference vector is formed.
        let err_est = tableau.embedded_weights().map(|b_hat| {
            let b = tableau.weights();
            let mut sq = 0.0;
            for j in 0..x.len() {
                let mut acc = S::zero();
                for i in 0..s {
                    let d = b[i] - b_hat[i];
                    if !is_zero(d) {
                        acc += d * slopes[i][j];
                    }
                }
                sq += (hs * acc).abs_sq();
            }
            sq.sqrt()
        });

        for (i, &b_i) in tableau.weights().iter().enumerate() {
            if !is_zero(b_i) {
                x.axpy(hs * b_i, &slopes[i]);
            }
        }
        if !x.is_finite() {
            return Err(Error::Diverged { stage: s, t: t0 });
        }
        Ok(BaselineStep { err_est, nfev })
    }
}

/// One-shot convenience: allocates a workspace, takes a single step.
pub fn rk_step<S: Scalar>(
    tableau: &ButcherTableau<S>,
    rhs: &mut RhsSystem<S>,
    x: &mut StateVector<S>,
    t0: f64,
    h: f64,
) -> Result<BaselineStep> {
    RkStepper::new(tableau.clone(), x.len()).step(rhs, x, t0, h)
}

/// Two-register stepper for the Williamson increment format.
#[derive(Debug)]
pub struct WilliamsonStepper<S: Scalar> {
    scheme: WilliamsonScheme<S>,
    /// Stage nodes of the expanded tableau.
    c: Vec<S>,
    dy: StateVector<S>,
}

impl<S: Scalar> WilliamsonStepper<S> {
    pub fn new(scheme: WilliamsonScheme<S>, dimension: usize) -> Self {
        let c = scheme.to_butcher().c().to_vec();
        Self {
            scheme,
            c,
            dy: StateVector::zeros(dimension),
        }
    }

    pub fn scheme(&self) -> &WilliamsonScheme<S> {
        &self.scheme
    }

    /// Workspace vectors beyond the caller's state.
    pub fn workspace_vectors(&self) -> usize {
        1
    }

    /// Advances `x` by one step of size `h` from time `t0`.
    pub fn step(
        &mut self,
        rhs: &mut RhsSystem<S>,
        x: &mut StateVector<S>,
        t0: f64,
        h: f64,
    ) -> Result<BaselineStep> {
        let Self { scheme, c, dy } = self;
        let base = S::from_re(t0);
        let hs = S::from_re(h);
        let mut nfev = 0u64;

        for i in 0..scheme.stages() {
            // Δy ← A_i Δy + h f(y). A_1 = 0 restarts the increment, so the
            // workspace needs no initialization between steps.
            let a_i = scheme.a()[i];
            if is_zero(a_i) {
                dy.set_zero();
            } else {
                dy.scale(a_i);
            }
            rhs.accumulate_rhs(base + hs * c[i], x, hs, dy)?;
            nfev += 1;
            // y ← y + B_i Δy (the h is already inside Δy).
            x.axpy(scheme.b()[i], dy);
            if !(x.is_finite() && dy.is_finite()) {
                return Err(Error::Diverged { stage: i + 1, t: t0 });
            }
        }
        Ok(BaselineStep { err_est: None, nfev })
    }
}

/// Two-register-plus-slope stepper for the van der Houwen format.
#[derive(Debug)]
pub struct VdhStepper<S: Scalar> {
    scheme: VdhScheme<S>,
    /// Stage nodes of the expanded tableau.
    c: Vec<S>,
    k: StateVector<S>,
    arg: StateVector<S>,
    /// Running `h·Σ (bᵢ − b̂ᵢ) kᵢ` when the scheme has embedded weights.
    err_acc: Option<StateVector<S>>,
}

impl<S: Scalar> VdhStepper<S> {
    pub fn new(scheme: VdhScheme<S>, dimension: usize) -> Self {
        let c = scheme.to_butcher().c().to_vec();
        let err_acc = scheme.b_hat().map(|_| StateVector::zeros(dimension));
        Self {
            scheme,
            c,
            k: StateVector::zeros(dimension),
            arg: StateVector::zeros(dimension),
            err_acc,
        }
    }

    pub fn scheme(&self) -> &VdhScheme<S> {
        &self.scheme
    }

    /// Workspace vectors beyond the caller's state.
    pub fn workspace_vectors(&self) -> usize {
        2 + usize::from(self.err_acc.is_some())
    }

    /// Advances `x` by one step of size `h` from time `t0`.
    pub fn step(
        &mut self,
        rhs: &mut RhsSystem<S>,
        x: &mut StateVector<S>,
        t0: f64,
        h: f64,
    ) -> Result<BaselineStep> {
        let Self { scheme, c, k, arg, err_acc } = self;
        let s = scheme.stages();
        let b = scheme.b();
        let base = S::from_re(t0);
        let hs = S::from_re(h);
        let mut nfev = 0u64;
        if let Some(acc) = err_acc.as_mut() {
            acc.set_zero();
        }

        for i in 0..s {
            if i == 0 {
                k.set_zero();
                rhs.accumulate_rhs(base, x, S::one(), k)?;
            } else {
                // Stage argument: y_{i−1} + h (a_{i,i−1} − b_{i−1}) k_{i−1},
                // which equals y_{i−2} + h·a_{i,i−1}·k_{i−1}.
                arg.copy_from(x);
                arg.axpy(hs * (scheme.a_sub()[i - 1] - b[i - 1]), k);
                k.set_zero();
                rhs.accumulate_rhs(base + hs * c[i], arg, S::one(), k)?;
            }
            nfev += 1;
            if let Some(acc) = err_acc.as_mut() {
                let d = b[i] - scheme.b_hat().expect("accumulator implies embedded")[i];
                if !is_zero(d) {
                    acc.axpy(hs * d, k);
                }
            }
            x.axpy(hs * b[i], k);
            if !(x.is_finite() && k.is_finite()) {
                return Err(Error::Diverged { stage: i + 1, t: t0 });
            }
        }
        Ok(BaselineStep {
            err_est: err_acc.as_ref().map(|acc| acc.norm_l2()),
            nfev,
        })
    }
}
