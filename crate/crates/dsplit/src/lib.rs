//! Low-storage embedded Runge-Kutta integration in a duplicated phase space.
//!
//! The central idea: take a splitting method with coefficients
//! `(a₁…a_s, b₁…b_s)` and apply it to the *duplicated* system
//! `u' = f(v)`, `v' = f(u)` with `u(t₀) = v(t₀) = x₀`. One step is the
//! two-register sweep
//!
//! ```text
//! for i in 1..=s {
//!     v += h · aᵢ · f(u);
//!     u += h · bᵢ · f(v);
//! }
//! ```
//!
//! Both registers approximate the flow of `x' = f(x)`; their average
//! `(u + v)/2` is accurate to a higher order than either register alone, and
//! `‖u − v‖` is a free embedded error estimate. The sweep needs only the two
//! registers regardless of stage count, and it can be run backwards exactly,
//! so a rejected adaptive step is undone without a stored copy of the state.
//!
//! The crate bundles the coefficient catalogue ([`schemes`]), the
//! two-register stepper, conventional fixed-storage baselines for
//! comparison, adaptive and fixed-step drivers, benchmark problems
//! (advection by spectral differences, the two-body problem), convergence
//! analysis helpers, and a CLI for running the experiments.

pub mod adaptive;
pub mod analysis;
pub mod baseline;
pub mod cli;
pub mod driver;
pub mod error;
pub mod problems;
pub mod scalar;
pub mod state;
pub mod rhs;
pub mod schemes;
pub mod stepper;

pub use adaptive::{
    integrate_adaptive, propose_step, AdaptiveRun, AdaptiveStatus, ControllerConfig, RecoveryMode,
};
pub use analysis::{
    convergence_slope, convergence_slope_scaled, energy_drift, linear_fit, norm_error,
    relative_error, IntegrationTrace, SlopeFit, TraceRow,
};
pub use baseline::{rk_step, BaselineStep, RkStepper, VdhStepper, WilliamsonStepper};
pub use driver::{
    integrate_fixed, AnyMethod, DsplitIntegrator, FixedRun, FixedRunOptions, NoObserver, Observer,
    RkIntegrator, RunStatus, StepOutcome, TimeStepper, VdhIntegrator, WilliamsonIntegrator,
};
pub use error::{Error, Result};
pub use scalar::Scalar;
pub use state::{allocation_count, norm_l2, StateVector};
pub use rhs::{accumulate_rhs, RhsSystem, VectorField};
pub use schemes::{
    builtin_scheme_info, builtin_tableau, dsplit_to_butcher, load_scheme, load_scheme_file,
    parse_scheme_json, scheme_to_json, ButcherTableau, LoadedScheme, LowStorageScheme,
    SchemeCatalog, SplittingScheme,
};
pub use stepper::{
    dstep, dstep_inverse, dstep_inverse_nonautonomous, dstep_nonautonomous, storage_report,
    DualState, OutputRegister, StepReport, StorageReport,
};
