//! Time-step selection and explicit SSP integrators with positivity limiting.

use std::cell::Cell;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::limiter::{limit_field, LimiterParams};
use crate::scalar::Real;
use crate::solver::{Field, Scheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    /// Ketcheson's ten-stage fourth-order low-storage SSP method.
    Ssprk104,
    ForwardEuler,
}

impl Integrator {
    /// Largest multiple of the forward-Euler step the method can take while
    /// remaining a convex combination of forward-Euler steps.
    pub fn ssp_coefficient(self) -> f64 {
        match self {
            Self::Ssprk104 => 6.0,
            Self::ForwardEuler => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Ssprk104 => "ssprk104",
            Self::ForwardEuler => "euler",
        }
    }
}

impl fmt::Display for Integrator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Integrator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ssprk104" | "ssprk(10,4)" | "ssp104" => Ok(Self::Ssprk104),
            "euler" | "forward-euler" | "fe" => Ok(Self::ForwardEuler),
            other => Err(Error::Config(format!("unknown integrator `{other}`"))),
        }
    }
}

/// When the positivity limiter is applied inside a Runge–Kutta step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimiterPolicy {
    PerStage,
    PerStep,
}

impl LimiterPolicy {
    pub fn name(self) -> &'static str {
        match self {
            Self::PerStage => "per-stage",
            Self::PerStep => "per-step",
        }
    }
}

impl fmt::Display for LimiterPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LimiterPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "per-stage" | "stage" => Ok(Self::PerStage),
            "per-step" | "step" => Ok(Self::PerStep),
            other => Err(Error::Config(format!("unknown limiter policy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl<T> {
    pub cfl: T,
    pub integrator: Integrator,
    pub policy: LimiterPolicy,
    pub limiter: LimiterParams<T>,
    /// Cap the step by the positivity bound (scaled by the SSP coefficient).
    pub enforce_pp_bound: bool,
    /// Steps below this size abort the run.
    pub min_dt: T,
    /// Reject a limited step whose stage states have a positivity bound
    /// below `dt`.
    pub check_stages: bool,
    /// Times a limited step is restarted with half the step size after an
    /// inadmissible stage.
    pub max_retries: usize,
}

impl<T: Real> Default for StepControl<T> {
    fn default() -> Self {
        Self {
            cfl: T::half(),
            integrator: Integrator::Ssprk104,
            policy: LimiterPolicy::PerStage,
            limiter: LimiterParams::default(),
            enforce_pp_bound: true,
            min_dt: T::lit(1e-12),
            check_stages: false,
            max_retries: 10,
        }
    }
}

impl<T: Real> StepControl<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > T::zero() && self.cfl.is_finite()) {
            return Err(Error::Config(format!("CFL must be positive, got {}", self.cfl)));
        }
        if !(self.min_dt >= T::zero()) {
            return Err(Error::Config("min_dt must be non-negative".into()));
        }
        Ok(())
    }
}

/// Components of a time-step estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtEstimate<T, const D: usize> {
    pub dt: T,
    /// `CFL / sum_d (alpha_d / h_d)`.
    pub cfl_dt: T,
    /// Forward-Euler positivity bound times the SSP coefficient.
    pub pp_dt: T,
    pub alpha: [T; D],
}

/// Forward-Euler step bound that keeps cell averages admissible: per direction
/// `dt / h_d < min(w_0 / (4 D alpha_d), min_nodes sqrt(1 / (D (gamma - 1) beta)) / (4 |Theta_d|))`.
pub fn pp_forward_euler_bound<T: Real, const D: usize>(
    scheme: &Scheme<T, D>,
    field: &Field<T, D>,
    alpha: &[T; D],
) -> T {
    let gas = scheme.gas();
    let w0 = scheme.basis().weights()[0];
    let dim = T::from_count(D);
    let four = T::lit(4.0);
    let h = scheme.grid().spacing();
    let mut lam = [T::infinity(); D];
    for d in 0..D {
        if alpha[d] > T::zero() {
            lam[d] = w0 / (four * dim * alpha[d]);
        }
    }
    for (u, th) in field.values.iter().zip(scheme.source_bounds()) {
        let beta = u.rho / (T::two() * u.pressure(gas));
        let root = (T::one() / (dim * (gas.gamma - T::one()) * beta)).sqrt();
        for d in 0..D {
            if th[d] > T::zero() {
                lam[d] = lam[d].min(root / (four * th[d]));
            }
        }
    }
    (0..D).fold(T::infinity(), |m, d| m.min(lam[d] * h[d]))
}

/// Time step for the current field.
pub fn compute_dt<T: Real, const D: usize>(
    scheme: &Scheme<T, D>,
    field: &Field<T, D>,
    t: T,
    control: &StepControl<T>,
) -> Result<DtEstimate<T, D>> {
    let alpha = scheme.wave_speeds(field, t)?;
    let h = scheme.grid().spacing();
    let rate = (0..D).fold(T::zero(), |s, d| s + alpha[d] / h[d]);
    let cfl_dt = control.cfl / rate;
    let pp_dt = T::lit(control.integrator.ssp_coefficient()) * pp_forward_euler_bound(scheme, field, &alpha);
    let dt = if control.enforce_pp_bound {
        cfl_dt.min(pp_dt)
    } else {
        cfl_dt
    };
    if !(dt > T::zero() && dt.is_finite()) {
        return Err(Error::InvalidTimeStep(dt.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(DtEstimate {
        dt,
        cfl_dt,
        pp_dt,
        alpha,
    })
}

/// Shortens `dt` so that `t + dt` does not pass `stop`; a step that would end
/// within a tiny fraction of `stop` lands on it exactly.
pub fn clip_dt<T: Real>(t: T, dt: T, stop: T) -> T {
    let remaining = stop - t;
    if dt >= remaining * (T::one() - T::lit(1e-12)) {
        remaining
    } else {
        dt
    }
}

/// `u + dt L(u)`, then `limit`.
pub fn step_forward_euler<T: Real, const D: usize>(
    field: &Field<T, D>,
    t: T,
    dt: T,
    mut rhs: impl FnMut(&Field<T, D>, T) -> Result<Field<T, D>>,
    mut limit: impl FnMut(&mut Field<T, D>) -> Result<()>,
) -> Result<Field<T, D>> {
    let mut out = field.clone();
    let k = rhs(field, t).map_err(|e| stage_error(0, e))?;
    out.axpy(dt, &k);
    limit(&mut out).map_err(|e| stage_error(0, e))?;
    Ok(out)
}

fn stage_error(stage: usize, e: Error) -> Error {
    Error::Stage {
        stage,
        source: Box::new(e),
    }
}

/// One step of the ten-stage fourth-order SSP method. `limit_stage` runs
/// after every stage update and `limit_final` after the last combination.
pub fn step_ssprk104<T: Real, const D: usize>(
    field: &Field<T, D>,
    t: T,
    dt: T,
    mut rhs: impl FnMut(&Field<T, D>, T) -> Result<Field<T, D>>,
    mut limit_stage: impl FnMut(&mut Field<T, D>) -> Result<()>,
    mut limit_final: impl FnMut(&mut Field<T, D>) -> Result<()>,
) -> Result<Field<T, D>> {
    let sixth = dt / T::lit(6.0);
    let mut q1 = field.clone();
    let mut tq1 = t;
    let mut stage = 0;
    let mut update = |q1: &mut Field<T, D>, tq1: &mut T, stage: &mut usize| -> Result<()> {
        let k = rhs(q1, *tq1).map_err(|e| stage_error(*stage, e))?;
        q1.axpy(sixth, &k);
        *tq1 = *tq1 + sixth;
        limit_stage(q1).map_err(|e| stage_error(*stage, e))?;
        *stage += 1;
        Ok(())
    };
    for _ in 0..5 {
        update(&mut q1, &mut tq1, &mut stage)?;
    }
    // Combinations are formed on increments from `u` so that a vanishing
    // tendency leaves the field bitwise unchanged.
    let mut delta5 = q1.clone();
    delta5.axpy(-T::one(), field);
    q1 = field.clone();
    q1.axpy(T::lit(0.4), &delta5);
    tq1 = t + dt / T::lit(3.0);
    for _ in 0..4 {
        update(&mut q1, &mut tq1, &mut stage)?;
    }
    drop(update);
    let k = rhs(&q1, tq1).map_err(|e| stage_error(9, e))?;
    let mut inc = q1;
    inc.axpy(-T::one(), field);
    inc.combine(T::lit(0.6), T::lit(9.0 / 25.0), &delta5);
    inc.axpy(dt / T::lit(10.0), &k);
    let mut q2 = field.clone();
    q2.axpy(T::one(), &inc);
    limit_final(&mut q2).map_err(|e| stage_error(9, e))?;
    Ok(q2)
}

/// Statistics of one step of a scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepStats {
    /// Cell limitings summed over stages.
    pub limited_cells: usize,
    /// Restarts with a halved step.
    pub retries: usize,
}

/// Advances `field` by `dt` with the integrator and limiter of `control`.
pub fn advance<T: Real, const D: usize>(
    scheme: &Scheme<T, D>,
    field: &Field<T, D>,
    t: T,
    dt: T,
    control: &StepControl<T>,
) -> Result<(Field<T, D>, StepStats)> {
    let params = LimiterParams {
        enabled: control.limiter.enabled && scheme.variant().limits(),
        ..control.limiter
    };
    let grid = scheme.grid();
    let weights = scheme.basis().weights();
    let gas = scheme.gas();
    let limited = Cell::new(0usize);
    let lim = |f: &mut Field<T, D>| -> Result<()> {
        limited.set(limited.get() + limit_field(f, grid, weights, &params, gas)?);
        Ok(())
    };
    let ssp = T::lit(control.integrator.ssp_coefficient());
    let check_stage = params.enabled && control.enforce_pp_bound && control.check_stages;
    let rhs = |f: &Field<T, D>, tt: T| {
        let k = scheme.rhs(f, tt)?;
        if check_stage && !std::ptr::eq(f, field) {
            let alpha = scheme.wave_speeds(f, tt)?;
            let bound = ssp * pp_forward_euler_bound(scheme, f, &alpha);
            if dt > bound {
                return Err(Error::StageBound {
                    dt: dt.to_f64().unwrap_or(f64::NAN),
                    bound: bound.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(k)
    };
    let out = match (control.integrator, control.policy) {
        (Integrator::ForwardEuler, _) => step_forward_euler(field, t, dt, rhs, lim)?,
        (Integrator::Ssprk104, LimiterPolicy::PerStage) => step_ssprk104(field, t, dt, rhs, lim, lim)?,
        (Integrator::Ssprk104, LimiterPolicy::PerStep) => step_ssprk104(field, t, dt, rhs, |_| Ok(()), lim)?,
    };
    let stats = StepStats {
        limited_cells: limited.get(),
        retries: 0,
    };
    Ok((out, stats))
}

/// Like [`advance`], but when the limiter is active and a stage produces an
/// inadmissible state, or a stage state whose positivity bound is below `dt`,
/// the step is restarted with half of `dt`, at most `control.max_retries`
/// times. Returns the step size actually taken.
pub fn advance_with_retry<T: Real, const D: usize>(
    scheme: &Scheme<T, D>,
    field: &Field<T, D>,
    t: T,
    dt: T,
    control: &StepControl<T>,
) -> Result<(Field<T, D>, T, StepStats)> {
    let limiting = control.limiter.enabled && scheme.variant().limits();
    let mut dt = dt;
    let mut retries = 0;
    loop {
        match advance(scheme, field, t, dt, control) {
            Ok((out, mut stats)) => {
                stats.retries = retries;
                return Ok((out, dt, stats));
            }
            Err(e)
                if limiting
                    && retries < control.max_retries
                    && (e.is_inadmissible() || matches!(e.root(), Error::StageBound { .. })) =>
            {
                retries += 1;
                dt = match e.root() {
                    Error::StageBound { bound, .. } if T::lit(*bound) < dt => T::lit(0.9 * bound),
                    _ => dt * T::half(),
                };
                if dt < control.min_dt {
                    return Err(e);
                }
            }
            Err(e) => return Err(e),
        }
    }
}
