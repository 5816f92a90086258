//! Fixed-step time integration over any supported method.
//!
//! [`TimeStepper`] is the uniform stepping interface the drivers and the
//! CLI work against; it is implemented by the two-register pair stepper
//! and by all three baselines. [`integrate_fixed`] owns the clock: step
//! times are computed as `t0 + i·h` so long runs accumulate no time
//! drift, the final step is clipped to land exactly on `tf`, and a
//! divergence or a norm blow-up ends the run with an
//! [`RunStatus::Unstable`] marker rather than an error so sweeps can
//! traverse unstable step sizes.

use crate::baseline::{RkStepper, VdhStepper, WilliamsonStepper};
use crate::error::{Error, Result};
use crate::rhs::RhsSystem;
use crate::scalar::Scalar;
use crate::schemes::{ButcherTableau, LowStorageScheme, SplittingScheme};
use crate::state::{norm_l2, StateVector};
use crate::stepper::{dstep_nonautonomous, DualState, OutputRegister};

/// Result of advancing a [`TimeStepper`] by one step.
#[derive(Debug, Clone, Copy)]
pub struct StepOutcome {
    /// Embedded local error estimate, when the method provides one.
    pub err_est: Option<f64>,
    /// Field evaluations spent on this step.
    pub nfev: u64,
}

/// A method with internal state advancing one step at a time.
///
/// The driver is the time authority: `step` receives the step's start
/// time and size and must not keep its own clock.
pub trait TimeStepper<S: Scalar> {
    fn name(&self) -> &str;
    fn dimension(&self) -> usize;
    /// Current solution values.
    fn state(&self) -> &[S];
    /// Loads a new initial state (and clears internal registers).
    fn reset(&mut self, x0: &[S]);
    /// Field evaluations a single step costs.
    fn evals_per_step(&self) -> u64;
    fn step(&mut self, rhs: &mut RhsSystem<S>, t0: f64, h: f64) -> Result<StepOutcome>;
}

/// Two-register pair stepper behind the [`TimeStepper`] interface.
///
/// Each step sweeps the register pair from the duplicated current state,
/// records `‖u − v‖` as the error estimate, then collapses the pair to
/// the configured output register so the next step starts duplicated.
/// Time enters through the stage-node schedule, so non-autonomous fields
/// are handled and autonomous fields see bit-identical arithmetic.
#[derive(Debug)]
pub struct DsplitIntegrator<S: Scalar> {
    scheme: SplittingScheme<S>,
    output: OutputRegister,
    pair: DualState<S>,
}

impl<S: Scalar> DsplitIntegrator<S> {
    pub fn new(scheme: SplittingScheme<S>, output: OutputRegister, dimension: usize) -> Self {
        Self {
            scheme,
            output,
            pair: DualState::zeros(dimension),
        }
    }

    pub fn scheme(&self) -> &SplittingScheme<S> {
        &self.scheme
    }

    pub fn output(&self) -> OutputRegister {
        self.output
    }
}

impl<S: Scalar> TimeStepper<S> for DsplitIntegrator<S> {
    fn name(&self) -> &str {
        self.scheme.name()
    }

    fn dimension(&self) -> usize {
        self.pair.dimension()
    }

    fn state(&self) -> &[S] {
        // collapse() leaves the selected output in both registers.
        self.pair.u().as_slice()
    }

    fn reset(&mut self, x0: &[S]) {
        self.pair.reset(x0);
    }

    fn evals_per_step(&self) -> u64 {
        self.scheme.evals_per_step() as u64
    }

    fn step(&mut self, rhs: &mut RhsSystem<S>, t0: f64, h: f64) -> Result<StepOutcome> {
        let report = dstep_nonautonomous(&self.scheme, rhs, &mut self.pair, t0, h)?;
        self.pair.collapse(self.output);
        Ok(StepOutcome {
            err_est: Some(report.err_est),
            nfev: report.nfev,
        })
    }
}

/// Generic tableau stepper behind the [`TimeStepper`] interface.
#[derive(Debug)]
pub struct RkIntegrator<S: Scalar> {
    stepper: RkStepper<S>,
    x: StateVector<S>,
}

impl<S: Scalar> RkIntegrator<S> {
    pub fn new(tableau: ButcherTableau<S>, dimension: usize) -> Self {
        Self {
            stepper: RkStepper::new(tableau, dimension),
            x: StateVector::zeros(dimension),
        }
    }
}

impl<S: Scalar> TimeStepper<S> for RkIntegrator<S> {
    fn name(&self) -> &str {
        self.stepper.tableau().name()
    }

    fn dimension(&self) -> usize {
        self.x.len()
    }

    fn state(&self) -> &[S] {
        self.x.as_slice()
    }

    fn reset(&mut self, x0: &[S]) {
        assert_eq!(x0.len(), self.x.len(), "state dimension");
        self.x.as_mut_slice().copy_from_slice(x0);
    }

    fn evals_per_step(&self) -> u64 {
        self.stepper.tableau().stages() as u64
    }

    fn step(&mut self, rhs: &mut RhsSystem<S>, t0: f64, h: f64) -> Result<StepOutcome> {
        let report = self.stepper.step(rhs, &mut self.x, t0, h)?;
        Ok(StepOutcome {
            err_est: report.err_est,
            nfev: report.nfev,
        })
    }
}

/// Williamson-format stepper behind the [`TimeStepper`] interface.
#[derive(Debug)]
pub struct WilliamsonIntegrator<S: Scalar> {
    stepper: WilliamsonStepper<S>,
    x: StateVector<S>,
}

impl<S: Scalar> WilliamsonIntegrator<S> {
    pub fn new(scheme: crate::schemes::WilliamsonScheme<S>, dimension: usize) -> Self {
        Self {
            stepper: WilliamsonStepper::new(scheme, dimension),
            x: StateVector::zeros(dimension),
        }
    }
}

impl<S: Scalar> TimeStepper<S> for WilliamsonIntegrator<S> {
    fn name(&self) -> &str {
        self.stepper.scheme().name()
    }

    fn dimension(&self) -> usize {
        self.x.len()
    }

    fn state(&self) -> &[S] {
        self.x.as_slice()
    }

    fn reset(&mut self, x0: &[S]) {
        assert_eq!(x0.len(), self.x.len(), "state dimension");
        self.x.as_mut_slice().copy_from_slice(x0);
    }

    fn evals_per_step(&self) -> u64 {
        self.stepper.scheme().stages() as u64
    }

    fn step(&mut self, rhs: &mut RhsSystem<S>, t0: f64, h: f64) -> Result<StepOutcome> {
        let report = self.stepper.step(rhs, &mut self.x, t0, h)?;
        Ok(StepOutcome {
            err_est: report.err_est,
            nfev: report.nfev,
        })
    }
}

/// Van der Houwen-format stepper behind the [`TimeStepper`] interface.
#[derive(Debug)]
pub struct VdhIntegrator<S: Scalar> {
    stepper: VdhStepper<S>,
    x: StateVector<S>,
}

impl<S: Scalar> VdhIntegrator<S> {
    pub fn new(scheme: crate::schemes::VdhScheme<S>, dimension: usize) -> Self {
        Self {
            stepper: VdhStepper::new(scheme, dimension),
            x: StateVector::zeros(dimension),
        }
    }
}

impl<S: Scalar> TimeStepper<S> for VdhIntegrator<S> {
    fn name(&self) -> &str {
        self.stepper.scheme().name()
    }

    fn dimension(&self) -> usize {
        self.x.len()
    }

    fn state(&self) -> &[S] {
        self.x.as_slice()
    }

    fn reset(&mut self, x0: &[S]) {
        assert_eq!(x0.len(), self.x.len(), "state dimension");
        self.x.as_mut_slice().copy_from_slice(x0);
    }

    fn evals_per_step(&self) -> u64 {
        self.stepper.scheme().stages() as u64
    }

    fn step(&mut self, rhs: &mut RhsSystem<S>, t0: f64, h: f64) -> Result<StepOutcome> {
        let report = self.stepper.step(rhs, &mut self.x, t0, h)?;
        Ok(StepOutcome {
            err_est: report.err_est,
            nfev: report.nfev,
        })
    }
}

/// Any method the drivers can run, with enough information to build a
/// stepper for a given state dimension.
#[derive(Debug, Clone)]
pub enum AnyMethod<S: Scalar> {
    /// A splitting scheme run through the two-register pair stepper.
    Splitting {
        scheme: SplittingScheme<S>,
        output: OutputRegister,
    },
    /// An explicit tableau run through the generic stepper.
    Tableau(ButcherTableau<S>),
    /// A two-register format run through its dedicated recursion.
    LowStorage(LowStorageScheme<S>),
}

impl<S: Scalar> AnyMethod<S> {
    pub fn name(&self) -> &str {
        match self {
            Self::Splitting { scheme, .. } => scheme.name(),
            Self::Tableau(t) => t.name(),
            Self::LowStorage(l) => l.name(),
        }
    }

    pub fn evals_per_step(&self) -> u64 {
        match self {
            Self::Splitting { scheme, .. } => scheme.evals_per_step() as u64,
            Self::Tableau(t) => t.stages() as u64,
            Self::LowStorage(l) => l.stages() as u64,
        }
    }

    pub fn build_stepper(&self, dimension: usize) -> Box<dyn TimeStepper<S>> {
        match self {
            Self::Splitting { scheme, output } => Box::new(DsplitIntegrator::new(
                scheme.clone(),
                *output,
                dimension,
            )),
            Self::Tableau(t) => Box::new(RkIntegrator::new(t.clone(), dimension)),
            Self::LowStorage(LowStorageScheme::Williamson(w)) => {
                Box::new(WilliamsonIntegrator::new(w.clone(), dimension))
            }
            Self::LowStorage(LowStorageScheme::VanDerHouwen(v)) => {
                Box::new(VdhIntegrator::new(v.clone(), dimension))
            }
        }
    }
}

/// Options for a fixed-step run.
#[derive(Debug, Clone, Copy)]
pub struct FixedRunOptions {
    pub t0: f64,
    pub tf: f64,
    pub h: f64,
    /// Observe every `stride`-th step (the initial and final states are
    /// always observed).
    pub stride: usize,
    /// Declare the run unstable once `‖x‖` exceeds this multiple of the
    /// initial norm. `f64::INFINITY` disables the check.
    pub blowup_factor: f64,
}

impl FixedRunOptions {
    pub fn new(t0: f64, tf: f64, h: f64) -> Self {
        Self {
            t0,
            tf,
            h,
            stride: 1,
            blowup_factor: f64::INFINITY,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride.max(1);
        self
    }

    pub fn with_blowup_factor(mut self, factor: f64) -> Self {
        self.blowup_factor = factor;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::Config(format!("step size must be positive, got {}", self.h)));
        }
        if !(self.tf >= self.t0) || !self.t0.is_finite() || !self.tf.is_finite() {
            return Err(Error::Config(format!(
                "need t0 <= tf with both finite, got t0 = {}, tf = {}",
                self.t0, self.tf
            )));
        }
        Ok(())
    }
}

/// How a fixed-step run ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunStatus {
    Completed,
    /// The state diverged or its norm crossed the blow-up threshold; `t`
    /// is the end of the offending step.
    Unstable { t: f64 },
}

/// Outcome of a fixed-step run.
#[derive(Debug)]
pub struct FixedRun<S: Scalar> {
    pub status: RunStatus,
    pub t_final: f64,
    pub x_final: StateVector<S>,
    pub steps: u64,
    pub nfev: u64,
}

/// Callback receiving sampled states during a run.
pub trait Observer<S: Scalar> {
    fn observe(&mut self, t: f64, x: &[S], nfev: u64);
}

/// Observer that discards every sample.
pub struct NoObserver;

impl<S: Scalar> Observer<S> for NoObserver {
    fn observe(&mut self, _t: f64, _x: &[S], _nfev: u64) {}
}

impl<S: Scalar, F: FnMut(f64, &[S], u64)> Observer<S> for F {
    fn observe(&mut self, t: f64, x: &[S], nfev: u64) {
        self(t, x, nfev)
    }
}

/// Integrates from `t0` to `tf` with nominal step `h`.
///
/// Step `i` starts at `t0 + i·h` (recomputed, not accumulated); the last
/// step is clipped so the run ends at exactly `tf`. Divergence inside a
/// step and norm blow-up both end the run early with
/// [`RunStatus::Unstable`]; other errors propagate.
pub fn integrate_fixed<S: Scalar>(
    stepper: &mut dyn TimeStepper<S>,
    rhs: &mut RhsSystem<S>,
    x0: &[S],
    opts: &FixedRunOptions,
    observer: &mut dyn Observer<S>,
) -> Result<FixedRun<S>> {
    opts.validate()?;
    if x0.len() != stepper.dimension() {
        return Err(Error::DimensionMismatch {
            expected: stepper.dimension(),
            got: x0.len(),
        });
    }
    stepper.reset(x0);
    let nfev_start = rhs.eval_count();
    let initial_norm = norm_l2(x0);
    let threshold = if initial_norm > 0.0 {
        opts.blowup_factor * initial_norm
    } else {
        opts.blowup_factor
    };

    let finish = |status: RunStatus, t: f64, steps: u64, stepper: &dyn TimeStepper<S>, nfev: u64| FixedRun {
        status,
        t_final: t,
        x_final: StateVector::from_slice(stepper.state()),
        steps,
        nfev,
    };

    if opts.tf == opts.t0 {
        observer.observe(opts.t0, stepper.state(), 0);
        return Ok(finish(RunStatus::Completed, opts.t0, 0, stepper, 0));
    }

    observer.observe(opts.t0, stepper.state(), 0);
    let mut t = opts.t0;
    let mut i: u64 = 0;
    loop {
        let t_next_nominal = opts.t0 + (i as f64 + 1.0) * opts.h;
        // Clip when the nominal endpoint reaches tf (up to round-off).
        let last = t_next_nominal >= opts.tf - 1e-9 * opts.h;
        let h_i = if last { opts.tf - t } else { t_next_nominal - t };
        match stepper.step(rhs, t, h_i) {
            Ok(_) => {}
            Err(Error::Diverged { .. }) => {
                let t_end = if last { opts.tf } else { t_next_nominal };
                let nfev = rhs.eval_count() - nfev_start;
                return Ok(finish(RunStatus::Unstable { t: t_end }, t_end, i, stepper, nfev));
            }
            Err(e) => return Err(e),
        }
        i += 1;
        t = if last { opts.tf } else { t_next_nominal };

        let norm = norm_l2(stepper.state());
        if !norm.is_finite() || norm > threshold {
            let nfev = rhs.eval_count() - nfev_start;
            observer.observe(t, stepper.state(), nfev);
            return Ok(finish(RunStatus::Unstable { t }, t, i, stepper, nfev));
        }
        let nfev = rhs.eval_count() - nfev_start;
        if last || i as usize % opts.stride == 0 {
            observer.observe(t, stepper.state(), nfev);
        }
        if last {
            return Ok(finish(RunStatus::Completed, opts.tf, i, stepper, nfev));
        }
    }
}
