//! Command implementations: each consumes a merged config and writes one CSV.

use std::path::Path;

use num_complex::Complex64;

use super::config::ExperimentConfig;
use super::methods::{method_needs_complex, resolve_method};
use super::output::{format_float, CsvWriter};
use super::problem::{build_problem, build_wave_problem, Problem, ProblemParams, ProblemSetup};
use crate::adaptive::{integrate_adaptive, AdaptiveStatus, ControllerConfig};
use crate::analysis::{
    convergence_slope, energy_drift, norm_error, relative_error, SLOPE_FIT_MIN_POINTS,
};
use crate::driver::{integrate_fixed, AnyMethod, FixedRunOptions, NoObserver, RunStatus};
use crate::error::{Error, Result};
use crate::problems::{kepler_energy, kepler_reference};
use crate::scalar::Scalar;
use crate::schemes::builtin_scheme_info;
use crate::state::norm_l2;
use crate::stepper::OutputRegister;

/// Default evaluation budget for the orbit benchmark.
pub const DEFAULT_KEPLER_BUDGET: u64 = 520_000;
/// Default eccentricity for the orbit benchmark.
pub const DEFAULT_KEPLER_ECCENTRICITY: f64 = 0.8;
/// Default sampling stride for the orbit benchmark.
pub const DEFAULT_KEPLER_STRIDE: usize = 100;
/// Default grid size for the advection benchmark.
pub const DEFAULT_WAVE_GRID: usize = 128;
/// Norm growth factor beyond which a sweep cell is flagged unstable.
pub const WAVE_BLOWUP_FACTOR: f64 = 1e3;
/// Halvings applied when a sweep receives a single base step size.
pub const DEFAULT_SWEEP_LEVELS: usize = 5;

fn time_window(cfg: &ExperimentConfig, problem: Problem) -> (f64, f64) {
    let t0 = cfg.t0.unwrap_or(0.0);
    let tf = cfg.tf.unwrap_or(t0 + problem.default_span());
    (t0, tf)
}

fn problem_params(cfg: &ExperimentConfig, t0: f64) -> ProblemParams {
    ProblemParams {
        t0,
        n: cfg.n.unwrap_or(DEFAULT_WAVE_GRID),
        e: cfg.e.unwrap_or(DEFAULT_KEPLER_ECCENTRICITY),
    }
}

/// Step sizes for a convergence sweep: a single configured `h` is expanded
/// into `levels` halvings; an empty list cannot support a slope fit.
fn sweep_step_sizes(cfg: &ExperimentConfig) -> Result<Vec<f64>> {
    let hs = cfg.step_sizes();
    match hs.len() {
        0 => Err(Error::InsufficientData {
            have: 0,
            need: SLOPE_FIT_MIN_POINTS,
        }),
        1 => {
            let levels = cfg.levels.unwrap_or(DEFAULT_SWEEP_LEVELS).max(1);
            Ok((0..levels).map(|k| hs[0] / (1u64 << k) as f64).collect())
        }
        _ => Ok(hs),
    }
}

/// Lists the bundled splitting schemes with their storage and order data.
pub fn cmd_list_methods(out: Option<&Path>) -> Result<()> {
    let mut w = CsvWriter::create(out)?;
    w.header(&[
        "name",
        "stages",
        "p_component",
        "q_averaged",
        "evals_per_step",
        "symmetric",
        "complex",
    ])?;
    for info in builtin_scheme_info() {
        w.row(&[
            info.name,
            info.stages.to_string(),
            info.p_component.to_string(),
            info.q_averaged.to_string(),
            info.evals_per_step.to_string(),
            info.symmetric.to_string(),
            info.complex.to_string(),
        ])?;
    }
    w.finish()
}

/// Fixed-step convergence sweep reporting averaged and per-register errors.
pub fn cmd_converge(cfg: &ExperimentConfig) -> Result<()> {
    cfg.reject_tol("converge")?;
    let method = cfg.single_method()?;
    let problem = Problem::parse(cfg.problem.as_deref().unwrap_or("exp"))?;
    let hs = sweep_step_sizes(cfg)?;
    let (t0, tf) = time_window(cfg, problem);
    let params = problem_params(cfg, t0);
    let out = cfg.output.as_deref();
    if problem.complex_state() || method_needs_complex(&method)? {
        let setup = if problem == Problem::Wave {
            build_wave_problem(&params)?
        } else {
            build_problem::<Complex64>(problem, &params)?
        };
        converge_with(&method, setup, t0, tf, &hs, out)
    } else {
        let setup = build_problem::<f64>(problem, &params)?;
        converge_with(&method, setup, t0, tf, &hs, out)
    }
}

struct ConvergeCell {
    h: f64,
    /// Errors of the averaged, u-, and v-register outputs; the latter two
    /// stay NaN for methods without paired registers.
    errs: [f64; 3],
    nfev: u64,
}

fn converge_with<S: Scalar>(
    method: &str,
    mut setup: ProblemSetup<S>,
    t0: f64,
    tf: f64,
    hs: &[f64],
    out: Option<&Path>,
) -> Result<()> {
    let base = resolve_method::<S>(method)?;
    let dimension = setup.x0.len();
    let exact_tf = (setup.exact)(tf)?;
    let mut cells = Vec::with_capacity(hs.len());
    for &h in hs {
        let opts = FixedRunOptions::new(t0, tf, h);
        let mut errs = [f64::NAN; 3];
        let mut nfev = 0;
        match &base {
            AnyMethod::Splitting { scheme, .. } => {
                let outputs = [OutputRegister::Average, OutputRegister::U, OutputRegister::V];
                for (slot, output) in outputs.into_iter().enumerate() {
                    let variant = AnyMethod::Splitting {
                        scheme: scheme.clone(),
                        output,
                    };
                    let mut stepper = variant.build_stepper(dimension);
                    let run = integrate_fixed(
                        stepper.as_mut(),
                        &mut setup.rhs,
                        setup.x0.as_slice(),
                        &opts,
                        &mut NoObserver,
                    )?;
                    if matches!(run.status, RunStatus::Completed) {
                        errs[slot] = relative_error(&run.x_final, &exact_tf)?;
                    }
                    nfev = run.nfev;
                }
            }
            single_output => {
                let mut stepper = single_output.build_stepper(dimension);
                let run = integrate_fixed(
                    stepper.as_mut(),
                    &mut setup.rhs,
                    setup.x0.as_slice(),
                    &opts,
                    &mut NoObserver,
                )?;
                if matches!(run.status, RunStatus::Completed) {
                    errs[0] = relative_error(&run.x_final, &exact_tf)?;
                }
                nfev = run.nfev;
            }
        }
        cells.push(ConvergeCell { h, errs, nfev });
    }

    let mut w = CsvWriter::create(out)?;
    w.header(&["h", "err_avg", "err_u", "err_v", "nfev"])?;
    for cell in &cells {
        w.row(&[
            format_float(cell.h),
            format_float(cell.errs[0]),
            format_float(cell.errs[1]),
            format_float(cell.errs[2]),
            cell.nfev.to_string(),
        ])?;
    }
    let hs_col: Vec<f64> = cells.iter().map(|c| c.h).collect();
    let column = |slot: usize| -> Vec<f64> { cells.iter().map(|c| c.errs[slot]).collect() };
    // The averaged-output fit must succeed; the register fits may have no
    // usable points (single-output methods) and then report NaN.
    let slope_avg = convergence_slope(&hs_col, &column(0))?.slope;
    let optional_slope = |slot: usize| -> f64 {
        convergence_slope(&hs_col, &column(slot))
            .map(|fit| fit.slope)
            .unwrap_or(f64::NAN)
    };
    w.row(&[
        "slope".to_string(),
        format_float(slope_avg),
        format_float(optional_slope(1)),
        format_float(optional_slope(2)),
        "nan".to_string(),
    ])?;
    w.finish()
}

/// Advection benchmark: accuracy and norm drift per (method, h) cell.
pub fn cmd_wave(cfg: &ExperimentConfig) -> Result<()> {
    cfg.reject_tol("wave")?;
    let methods = cfg.methods();
    if methods.is_empty() {
        return Err(Error::Config("wave needs at least one method".into()));
    }
    let hs = cfg.step_sizes();
    if hs.is_empty() {
        return Err(Error::Config("wave needs at least one h".into()));
    }
    let (t0, tf) = time_window(cfg, Problem::Wave);
    let params = problem_params(cfg, t0);
    let mut w = CsvWriter::create(cfg.output.as_deref())?;
    w.header(&["method", "h", "nfev", "error", "norm_error", "stable"])?;
    for method in &methods {
        let any = resolve_method::<Complex64>(method)?;
        for &h in &hs {
            let mut setup = build_wave_problem(&params)?;
            let exact_tf = (setup.exact)(tf)?;
            let mut stepper = any.build_stepper(setup.x0.len());
            let opts = FixedRunOptions::new(t0, tf, h).with_blowup_factor(WAVE_BLOWUP_FACTOR);
            let run = integrate_fixed(
                stepper.as_mut(),
                &mut setup.rhs,
                setup.x0.as_slice(),
                &opts,
                &mut NoObserver,
            )?;
            let stable = matches!(run.status, RunStatus::Completed);
            let (error, norm_err) = if stable {
                (
                    relative_error(&run.x_final, &exact_tf)?,
                    norm_error(&run.x_final, &setup.x0)?,
                )
            } else {
                (f64::NAN, f64::NAN)
            };
            w.row(&[
                method.clone(),
                format_float(h),
                run.nfev.to_string(),
                format_float(error),
                format_float(norm_err),
                stable.to_string(),
            ])?;
        }
    }
    w.finish()
}

/// Orbit benchmark: every method gets the same evaluation budget, and each
/// sampled row reports energy drift and position error against the
/// closed-form orbit.
pub fn cmd_kepler(cfg: &ExperimentConfig) -> Result<()> {
    cfg.reject_tol("kepler")?;
    let methods = cfg.methods();
    if methods.is_empty() {
        return Err(Error::Config("kepler needs at least one method".into()));
    }
    let (t0, tf) = time_window(cfg, Problem::Kepler);
    if !(tf > t0) {
        return Err(Error::Config(format!(
            "kepler needs tf > t0, got [{t0}, {tf}]"
        )));
    }
    let params = problem_params(cfg, t0);
    let budget = cfg.budget.unwrap_or(DEFAULT_KEPLER_BUDGET);
    let stride = cfg.sample_stride.unwrap_or(DEFAULT_KEPLER_STRIDE).max(1);
    let mut w = CsvWriter::create(cfg.output.as_deref())?;
    w.header(&["method", "t", "energy_drift", "position_error"])?;
    for method in &methods {
        let rows = if method_needs_complex(method)? {
            kepler_cell::<Complex64>(method, &params, t0, tf, budget, stride)?
        } else {
            kepler_cell::<f64>(method, &params, t0, tf, budget, stride)?
        };
        for (t, drift, pos_err) in rows {
            w.row(&[
                method.clone(),
                format_float(t),
                format_float(drift),
                format_float(pos_err),
            ])?;
        }
    }
    w.finish()
}

fn kepler_cell<S: Scalar>(
    method: &str,
    params: &ProblemParams,
    t0: f64,
    tf: f64,
    budget: u64,
    stride: usize,
) -> Result<Vec<(f64, f64, f64)>> {
    let any = resolve_method::<S>(method)?;
    let evals = any.evals_per_step();
    if budget < evals {
        return Err(Error::Config(format!(
            "budget {budget} does not cover one step of {} ({evals} evaluations)",
            any.name()
        )));
    }
    let steps = budget / evals;
    let h = (tf - t0) / steps as f64;
    let mut setup = build_problem::<S>(Problem::Kepler, params)?;
    let e = params.e;
    let mut energies: Vec<(f64, f64)> = Vec::new();
    let mut position_errors: Vec<f64> = Vec::new();
    {
        let mut observer = |t: f64, x: &[S], _nfev: u64| {
            let xr = [x[0].re(), x[1].re(), x[2].re(), x[3].re()];
            energies.push((t, kepler_energy(&xr).unwrap_or(f64::NAN)));
            let pos_err = match kepler_reference(t - t0, e) {
                Ok(r) => ((xr[0] - r[0]).powi(2) + (xr[1] - r[1]).powi(2)).sqrt(),
                Err(_) => f64::NAN,
            };
            position_errors.push(pos_err);
        };
        let mut stepper = any.build_stepper(4);
        let opts = FixedRunOptions::new(t0, tf, h).with_stride(stride);
        match integrate_fixed(
            stepper.as_mut(),
            &mut setup.rhs,
            setup.x0.as_slice(),
            &opts,
            &mut observer,
        ) {
            Ok(run) => {
                if let RunStatus::Unstable { t } = run.status {
                    eprintln!(
                        "warning: {} became unstable at t = {t}; rows truncated",
                        any.name()
                    );
                }
            }
            Err(Error::Collision { r }) => {
                eprintln!(
                    "warning: {} reached the collision radius (r = {r:.3e}); rows truncated",
                    any.name()
                );
            }
            Err(e) => return Err(e),
        }
    }
    let drifts = energy_drift(&energies);
    Ok(drifts
        .into_iter()
        .zip(position_errors)
        .map(|((t, drift), pos_err)| (t, drift, pos_err))
        .collect())
}

enum Mode {
    Fixed(f64),
    Adaptive(f64),
}

const TRACE_COLUMNS: [&str; 6] = ["t", "h", "err_est", "accepted", "nfev_cumulative", "state_norm"];

fn trace_fields(
    t: f64,
    h: f64,
    err_est: Option<f64>,
    accepted: bool,
    nfev: u64,
    state_norm: f64,
) -> [String; 6] {
    [
        format_float(t),
        format_float(h),
        format_float(err_est.unwrap_or(f64::NAN)),
        accepted.to_string(),
        nfev.to_string(),
        format_float(state_norm),
    ]
}

/// Single integration run emitting the per-step trace.
pub fn cmd_integrate(cfg: &ExperimentConfig) -> Result<()> {
    let method = cfg.single_method()?;
    let problem = Problem::parse(cfg.problem.as_deref().unwrap_or("exp"))?;
    let (t0, tf) = time_window(cfg, problem);
    let params = problem_params(cfg, t0);
    let hs = cfg.step_sizes();
    let mode = match (hs.as_slice(), cfg.tol) {
        ([h], None) => Mode::Fixed(*h),
        ([], Some(tol)) => Mode::Adaptive(tol),
        ([], None) => {
            return Err(Error::Config(
                "integrate needs exactly one of h (fixed step) or tol (adaptive)".into(),
            ))
        }
        (_, Some(_)) => {
            return Err(Error::Config(
                "integrate takes either h or tol, not both".into(),
            ))
        }
        (many, None) => {
            return Err(Error::Config(format!(
                "integrate takes a single h, got {}",
                many.len()
            )))
        }
    };
    let stride = cfg.sample_stride.unwrap_or(1).max(1);
    let out = cfg.output.as_deref();
    if problem.complex_state() || method_needs_complex(&method)? {
        let setup = if problem == Problem::Wave {
            build_wave_problem(&params)?
        } else {
            build_problem::<Complex64>(problem, &params)?
        };
        integrate_with(&method, setup, t0, tf, mode, stride, out)
    } else {
        let setup = build_problem::<f64>(problem, &params)?;
        integrate_with(&method, setup, t0, tf, mode, stride, out)
    }
}

fn integrate_with<S: Scalar>(
    method: &str,
    mut setup: ProblemSetup<S>,
    t0: f64,
    tf: f64,
    mode: Mode,
    stride: usize,
    out: Option<&Path>,
) -> Result<()> {
    let any = resolve_method::<S>(method)?;
    match mode {
        Mode::Fixed(h) => fixed_trace(&any, &mut setup, t0, tf, h, stride, out),
        Mode::Adaptive(tol) => {
            let AnyMethod::Splitting { scheme, .. } = &any else {
                return Err(Error::Config(format!(
                    "adaptive integration needs a splitting scheme with a paired-register \
                     estimate; `{}` does not provide one",
                    any.name()
                )));
            };
            let ctrl = ControllerConfig::new(tol);
            let run = integrate_adaptive(scheme, &mut setup.rhs, t0, tf, setup.x0.as_slice(), &ctrl)?;
            let mut w = CsvWriter::create(out)?;
            w.header(&TRACE_COLUMNS)?;
            let rows = run.trace.rows();
            for (i, row) in rows.iter().enumerate() {
                if i % stride == 0 || i + 1 == rows.len() {
                    w.row(&trace_fields(
                        row.t,
                        row.h,
                        row.err_est,
                        row.accepted,
                        row.nfev,
                        row.state_norm,
                    ))?;
                }
            }
            w.finish()?;
            if let AdaptiveStatus::StepUnderflow { t, h } = run.status {
                return Err(Error::StepUnderflow { t, h });
            }
            Ok(())
        }
    }
}

/// Fixed-step trace driven directly through the stepper so each row can
/// carry the step's embedded estimate; uses the same drift-free clock and
/// final-step clipping as the sweep driver.
fn fixed_trace<S: Scalar>(
    any: &AnyMethod<S>,
    setup: &mut ProblemSetup<S>,
    t0: f64,
    tf: f64,
    h: f64,
    stride: usize,
    out: Option<&Path>,
) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Config(format!(
            "step size must be positive, got {h}"
        )));
    }
    if !(tf >= t0) || !t0.is_finite() || !tf.is_finite() {
        return Err(Error::Config(format!(
            "time window must satisfy tf >= t0, got [{t0}, {tf}]"
        )));
    }
    let mut stepper = any.build_stepper(setup.x0.len());
    stepper.reset(setup.x0.as_slice());
    let nfev0 = setup.rhs.eval_count();
    let mut w = CsvWriter::create(out)?;
    w.header(&TRACE_COLUMNS)?;
    w.row(&trace_fields(t0, 0.0, None, true, 0, norm_l2(stepper.state())))?;
    let mut t = t0;
    let mut i: u64 = 0;
    while t < tf {
        let t_next_nominal = t0 + (i as f64 + 1.0) * h;
        let last = t_next_nominal >= tf - 1e-9 * h;
        let h_i = if last { tf - t } else { t_next_nominal - t };
        match stepper.step(&mut setup.rhs, t, h_i) {
            Ok(outcome) => {
                t = if last { tf } else { t_next_nominal };
                i += 1;
                if last || i % stride as u64 == 0 {
                    w.row(&trace_fields(
                        t,
                        h_i,
                        outcome.err_est,
                        true,
                        setup.rhs.eval_count() - nfev0,
                        norm_l2(stepper.state()),
                    ))?;
                }
                if last {
                    break;
                }
            }
            Err(Error::Diverged { stage, t: t_div }) => {
                eprintln!("warning: state diverged at stage {stage}, t = {t_div}; trace truncated");
                break;
            }
            Err(e) => return Err(e),
        }
    }
    w.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::OneOrMany;

    fn read(path: &Path) -> Vec<String> {
        std::fs::read_to_string(path)
            .unwrap()
            .lines()
            .map(String::from)
            .collect()
    }

    #[test]
    fn list_methods_emits_one_row_per_bundled_scheme() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("methods.csv");
        cmd_list_methods(Some(&path)).unwrap();
        let lines = read(&path);
        assert_eq!(lines.len(), 8, "{lines:?}");
        assert_eq!(
            lines[0],
            "name,stages,p_component,q_averaged,evals_per_step,symmetric,complex"
        );
        let bm4 = lines.iter().find(|l| l.starts_with("BM4,")).unwrap();
        assert_eq!(bm4, "BM4,7,4,4,13,true,false");
    }

    #[test]
    fn converge_footer_reports_second_order_for_the_two_stage_scheme() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("converge.csv");
        let cfg = ExperimentConfig {
            method: Some(OneOrMany::One("S2".into())),
            h: Some(OneOrMany::One(0.1)),
            output: Some(path.clone()),
            ..Default::default()
        };
        cmd_converge(&cfg).unwrap();
        let lines = read(&path);
        assert_eq!(lines.len(), 7, "{lines:?}");
        assert_eq!(lines[0], "h,err_avg,err_u,err_v,nfev");
        let footer: Vec<&str> = lines[6].split(',').collect();
        assert_eq!(footer[0], "slope");
        let slope_avg: f64 = footer[1].parse().unwrap();
        let slope_u: f64 = footer[2].parse().unwrap();
        assert!((slope_avg - 2.0).abs() < 0.1, "slope_avg = {slope_avg}");
        assert!((slope_u - 2.0).abs() < 0.1, "slope_u = {slope_u}");
        assert_eq!(footer[4], "nan");
    }

    #[test]
    fn converge_with_no_step_sizes_is_an_insufficient_data_error() {
        let cfg = ExperimentConfig {
            method: Some(OneOrMany::One("S2".into())),
            ..Default::default()
        };
        let err = cmd_converge(&cfg).unwrap_err();
        assert!(matches!(err, Error::InsufficientData { .. }), "{err}");
    }

    #[test]
    fn integrate_fixed_trace_ends_exactly_at_tf() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        let cfg = ExperimentConfig {
            method: Some(OneOrMany::One("S2".into())),
            h: Some(OneOrMany::One(0.3)),
            tf: Some(1.0),
            output: Some(path.clone()),
            ..Default::default()
        };
        cmd_integrate(&cfg).unwrap();
        let lines = read(&path);
        assert_eq!(lines[0], TRACE_COLUMNS.join(","));
        let final_row: Vec<&str> = lines.last().unwrap().split(',').collect();
        assert_eq!(final_row[0], format_float(1.0));
        assert_eq!(final_row[3], "true");
        // 4 steps of 3 evaluations each for the two-stage scheme.
        assert_eq!(final_row[4], "12");
    }

    #[test]
    fn integrate_requires_exactly_one_stepping_mode() {
        let both = ExperimentConfig {
            method: Some(OneOrMany::One("S2".into())),
            h: Some(OneOrMany::One(0.1)),
            tol: Some(1e-6),
            ..Default::default()
        };
        assert!(matches!(cmd_integrate(&both), Err(Error::Config(_))));
        let neither = ExperimentConfig {
            method: Some(OneOrMany::One("S2".into())),
            ..Default::default()
        };
        assert!(matches!(cmd_integrate(&neither), Err(Error::Config(_))));
    }

    #[test]
    fn kepler_budget_sets_the_step_count() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("kepler.csv");
        let cfg = ExperimentConfig {
            method: Some(OneOrMany::One("BM4".into())),
            tf: Some(2.0),
            budget: Some(1300),
            sample_stride: Some(50),
            output: Some(path.clone()),
            ..Default::default()
        };
        // 1300 / 13 = 100 steps of h = 0.02; stride 50 samples the start,
        // t = 1 and the final time.
        cmd_kepler(&cfg).unwrap();
        let lines = read(&path);
        assert_eq!(lines[0], "method,t,energy_drift,position_error");
        assert_eq!(lines.len(), 4, "{lines:?}");
        let middle: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(middle[1], format_float(1.0));
        let last: Vec<&str> = lines[3].split(',').collect();
        assert_eq!(last[0], "BM4");
        assert_eq!(last[1], format_float(2.0));
        let drift: f64 = last[2].parse().unwrap();
        assert!(drift < 1e-4, "drift = {drift}");
    }
}
