//! Time loop with entropy logging, snapshots and failure capture.

use std::fmt;
use std::time::{Duration, Instant};

use super::cases::CaseSpec;
use super::norms::{scheme_error_norms, ErrorReport, Variable};
use super::sample::reference_solution;
use crate::error::{Error, Result};
use crate::physics::cons_to_prim;
use crate::solver::{Field, Scheme};
use crate::timestep::{advance_with_retry, clip_dt, compute_dt};

/// One line of the entropy log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyRecord {
    pub step: usize,
    pub t: f64,
    /// Size of the step that produced this state; zero for the initial record.
    pub dt: f64,
    pub total_entropy: f64,
    pub min_rho: f64,
    pub min_p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<const D: usize> {
    pub t: f64,
    pub field: Field<f64, D>,
}

#[derive(Debug, Clone)]
pub struct RunOutput<const D: usize> {
    pub field: Field<f64, D>,
    pub t: f64,
    pub steps: usize,
    pub log: Vec<EntropyRecord>,
    /// Requested snapshots followed by the final state.
    pub snapshots: Vec<Snapshot<D>>,
    pub min_rho: f64,
    pub min_p: f64,
    pub limited_cells: usize,
    /// Steps restarted with a smaller step size.
    pub retries: usize,
    pub wall_time: Duration,
}

impl<const D: usize> RunOutput<D> {
    /// Largest relative stepwise entropy increase, `max (U_{n+1} - U_n) / |U_n|`.
    pub fn max_entropy_increase(&self) -> f64 {
        max_relative_increase(&self.log)
    }
}

pub fn max_relative_increase(log: &[EntropyRecord]) -> f64 {
    log.windows(2)
        .map(|w| (w[1].total_entropy - w[0].total_entropy) / w[0].total_entropy.abs().max(f64::MIN_POSITIVE))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// A run that stopped before its final time.
#[derive(Debug)]
pub struct RunFailure {
    /// Index of the step that failed (the first step is 1).
    pub step: usize,
    /// Time at the start of the failed step.
    pub time: f64,
    pub dt: Option<f64>,
    pub error: Error,
    pub log: Vec<EntropyRecord>,
    pub wall_time: Duration,
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "run aborted in step {} at t = {:e}: {}", self.step, self.time, self.error)
    }
}

impl std::error::Error for RunFailure {}

#[derive(Debug)]
pub enum RunError {
    /// The case could not be set up.
    Setup(Error),
    /// The time loop aborted.
    Aborted(Box<RunFailure>),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Setup(e) => write!(f, "invalid setup: {e}"),
            Self::Aborted(fail) => fail.fmt(f),
        }
    }
}

impl std::error::Error for RunError {}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        Self::Setup(e)
    }
}

impl RunError {
    pub fn failure(&self) -> Option<&RunFailure> {
        match self {
            Self::Aborted(f) => Some(f),
            Self::Setup(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Abort with [`Error::TimeStepCollapse`] after this many steps.
    pub max_steps: usize,
    /// Evaluate the total entropy each step.
    pub log_entropy: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            max_steps: 10_000_000,
            log_entropy: true,
        }
    }
}

/// Minimum nodal density and pressure.
pub fn field_minima<const D: usize>(scheme: &Scheme<f64, D>, field: &Field<f64, D>) -> (f64, f64) {
    field.values.iter().fold((f64::INFINITY, f64::INFINITY), |(r, p), u| {
        let w = cons_to_prim(u, scheme.gas());
        (r.min(w.rho), p.min(w.p))
    })
}

fn record<const D: usize>(
    scheme: &Scheme<f64, D>,
    field: &Field<f64, D>,
    step: usize,
    t: f64,
    dt: f64,
    opts: &RunOptions,
) -> Result<EntropyRecord> {
    let (min_rho, min_p) = field_minima(scheme, field);
    let total_entropy = if opts.log_entropy {
        scheme.total_entropy(field)?
    } else {
        f64::NAN
    };
    Ok(EntropyRecord {
        step,
        t,
        dt,
        total_entropy,
        min_rho,
        min_p,
    })
}

/// Advances `field` from `t = 0` to `spec.t_final` on `scheme`.
pub fn run_scheme<const D: usize>(
    scheme: &Scheme<f64, D>,
    spec: &CaseSpec<D>,
    initial: Field<f64, D>,
    opts: &RunOptions,
) -> std::result::Result<RunOutput<D>, RunFailure> {
    let start = Instant::now();
    let control = spec.control;
    let mut field = initial;
    let mut t = 0.0;
    let mut log = Vec::new();
    let mut stops: Vec<f64> = spec.snapshots.clone();
    stops.sort_by(f64::total_cmp);
    stops.push(spec.t_final);
    let mut snapshots = Vec::new();
    let mut limited_cells = 0;
    let mut retries = 0;
    let mut step = 0;

    let fail = |step, time, dt, error, log: &mut Vec<EntropyRecord>| RunFailure {
        step,
        time,
        dt,
        error,
        log: std::mem::take(log),
        wall_time: start.elapsed(),
    };

    match record(scheme, &field, 0, t, 0.0, opts) {
        Ok(r) => log.push(r),
        Err(e) => return Err(fail(0, t, None, e, &mut log)),
    }
    let (mut min_rho, mut min_p) = (log[0].min_rho, log[0].min_p);

    for &stop in &stops {
        while t < stop {
            step += 1;
            if step > opts.max_steps {
                return Err(fail(step, t, None, Error::TimeStepCollapse { dt: 0.0, time: t }, &mut log));
            }
            let est = match compute_dt(scheme, &field, t, &control) {
                Ok(e) => e,
                Err(e) => return Err(fail(step, t, None, e, &mut log)),
            };
            let dt = clip_dt(t, est.dt, stop);
            if dt < control.min_dt && dt < stop - t {
                return Err(fail(step, t, Some(dt), Error::TimeStepCollapse { dt, time: t }, &mut log));
            }
            let (next, dt, stats) = match advance_with_retry(scheme, &field, t, dt, &control) {
                Ok(v) => v,
                Err(e) => return Err(fail(step, t, Some(dt), e, &mut log)),
            };
            retries += stats.retries;
            let t_next = if dt == stop - t { stop } else { t + dt };
            let rec = match record(scheme, &next, step, t_next, dt, opts) {
                Ok(r) => r,
                Err(e) => return Err(fail(step, t, Some(dt), e, &mut log)),
            };
            min_rho = min_rho.min(rec.min_rho);
            min_p = min_p.min(rec.min_p);
            log.push(rec);
            limited_cells += stats.limited_cells;
            field = next;
            t = t_next;
        }
        snapshots.push(Snapshot {
            t,
            field: field.clone(),
        });
    }

    Ok(RunOutput {
        field,
        t,
        steps: step,
        log,
        snapshots,
        min_rho,
        min_p,
        limited_cells,
        retries,
        wall_time: start.elapsed(),
    })
}

/// Builds the scheme of `spec` and runs it from its initial condition.
pub fn run_case<const D: usize>(
    spec: &CaseSpec<D>,
    opts: &RunOptions,
) -> std::result::Result<(Scheme<f64, D>, RunOutput<D>), RunError> {
    let scheme = spec.build_scheme()?;
    let init = spec.initial_field(&scheme);
    let out = run_scheme(&scheme, spec, init, opts).map_err(|f| RunError::Aborted(Box::new(f)))?;
    Ok((scheme, out))
}

/// `U - U^e` at every node.
pub fn perturbation_fields<const D: usize>(scheme: &Scheme<f64, D>, field: &Field<f64, D>) -> Result<Field<f64, D>> {
    let eq = scheme
        .equilibrium_field()
        .ok_or_else(|| Error::Config("case has no equilibrium attached".into()))?;
    if eq.len() != field.len() {
        return Err(Error::ShapeMismatch {
            expected: eq.len(),
            found: field.len(),
        });
    }
    Ok(Field::new(
        field.values.iter().zip(&eq.values).map(|(u, e)| *u - *e).collect(),
    ))
}

/// `p - p^e` at every node.
pub fn pressure_perturbation<const D: usize>(scheme: &Scheme<f64, D>, field: &Field<f64, D>) -> Result<Vec<f64>> {
    let eq = scheme
        .equilibrium_field()
        .ok_or_else(|| Error::Config("case has no equilibrium attached".into()))?;
    let gas = scheme.gas();
    Ok(field
        .values
        .iter()
        .zip(&eq.values)
        .map(|(u, e)| u.pressure(gas) - e.pressure(gas))
        .collect())
}

/// Largest `|rho - rho_ref|` over nodes whose coordinate satisfies `region`.
pub fn max_density_deviation<const D: usize>(
    scheme: &Scheme<f64, D>,
    field: &Field<f64, D>,
    reference: &Field<f64, D>,
    region: impl Fn(&[f64; D]) -> bool,
) -> f64 {
    scheme
        .coords()
        .iter()
        .zip(field.values.iter().zip(&reference.values))
        .filter(|(x, _)| region(x))
        .map(|(_, (u, r))| (u.rho - r.rho).abs())
        .fold(0.0, f64::max)
}

/// Error of a finished run against the case reference (exact solution,
/// equilibrium, or a fine-mesh run with `refine` times the cells).
pub fn final_error<const D: usize>(
    spec: &CaseSpec<D>,
    scheme: &Scheme<f64, D>,
    out: &RunOutput<D>,
    var: Variable,
    refine: usize,
    opts: &RunOptions,
) -> std::result::Result<super::norms::ErrorNorms, RunError> {
    let reference = match spec.reference_field(scheme, out.t) {
        Some(r) => r,
        None => reference_solution(spec, scheme, refine, opts)?,
    };
    Ok(scheme_error_norms(scheme, &out.field, &reference, var)?)
}

/// Runs `spec` on each cell count in `levels` and tabulates the errors of `var`.
pub fn convergence<const D: usize>(
    spec: &CaseSpec<D>,
    levels: &[usize],
    var: Variable,
    opts: &RunOptions,
) -> std::result::Result<ErrorReport, RunError> {
    let mut report = ErrorReport::new(&spec.name, spec.variant.name(), spec.degree, &var.name());
    for &n in levels {
        let level = spec.clone().with_cells(n);
        let (scheme, out) = run_case(&level, opts)?;
        let norms = final_error(&level, &scheme, &out, var, 4, opts)?;
        report.push(n, norms);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::cases;
    use crate::solver::SchemeVariant;

    #[test]
    fn equilibrium_run_logs_every_step() {
        let spec = cases::eqbm1().with_cells(8).with_t_final(0.05);
        let (scheme, out) = run_case(&spec, &RunOptions::default()).unwrap();
        assert_eq!(out.log.len(), out.steps + 1);
        assert_eq!(out.t, 0.05);
        assert_eq!(out.snapshots.len(), 1);
        let pert = perturbation_fields(&scheme, &out.field).unwrap();
        assert!(pert.max_abs() < 1e-13);
    }

    #[test]
    fn snapshots_land_on_requested_times() {
        let mut spec = cases::sod().with_cells(10).with_t_final(0.02);
        spec.snapshots = vec![0.01, 0.005];
        let (_, out) = run_case(&spec, &RunOptions::default()).unwrap();
        let times: Vec<f64> = out.snapshots.iter().map(|s| s.t).collect();
        assert_eq!(times, vec![0.005, 0.01, 0.02]);
    }

    #[test]
    fn no_equilibrium_rejected() {
        let spec = cases::accuracy_2d().with_cells(4);
        let scheme = spec.build_scheme().unwrap();
        let f = spec.initial_field(&scheme);
        assert!(perturbation_fields(&scheme, &f).is_err());
    }

    #[test]
    fn non_pp_failure_is_captured() {
        let spec = cases::double_rarefaction_1d()
            .with_cells(100)
            .with_variant(SchemeVariant::NonPp);
        let err = run_case(&spec, &RunOptions::default()).unwrap_err();
        let fail = err.failure().expect("aborted, not rejected");
        assert!(fail.step >= 1);
        assert!(fail.time < 0.6);
    }
}
