//! Scaling positivity limiter: contracts the nodal values of a cell toward
//! its average until every node has density and pressure at least `eps`.

use crate::error::{Error, Result};
use crate::physics::{entropy_function, Conserved, GasModel};
use crate::scalar::Real;
use crate::solver::{Field, Grid};

const BISECTION_STEPS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimiterParams<T> {
    pub eps: T,
    pub enabled: bool,
}

impl<T: Real> Default for LimiterParams<T> {
    fn default() -> Self {
        Self {
            eps: T::lit(1e-13),
            enabled: true,
        }
    }
}

impl<T: Real> LimiterParams<T> {
    pub fn with_eps(eps: T) -> Result<Self> {
        if !(eps > T::zero() && eps < T::lit(1e-3)) {
            return Err(Error::Config(format!("limiter eps must lie in (0, 1e-3), got {eps}")));
        }
        Ok(Self { eps, enabled: true })
    }

    pub fn disabled() -> Self {
        Self {
            enabled: false,
            ..Self::default()
        }
    }
}

/// Scaling factors applied to one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitOutcome<T> {
    pub theta_density: T,
    pub theta_pressure: T,
}

impl<T: Real> LimitOutcome<T> {
    pub fn identity() -> Self {
        Self {
            theta_density: T::one(),
            theta_pressure: T::one(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.theta_density == T::one() && self.theta_pressure == T::one()
    }
}

/// Weighted average `sum w U / sum w`.
pub fn cell_average<T: Real, const D: usize>(states: &[Conserved<T, D>], weights: &[T]) -> Conserved<T, D> {
    let mut sum = Conserved::zero();
    let mut wsum = T::zero();
    for (u, &w) in states.iter().zip(weights) {
        sum += *u * w;
        wsum = wsum + w;
    }
    sum * (T::one() / wsum)
}

/// `sum w entropy(U)` over the nodes of one cell.
pub fn total_cell_entropy<T: Real, const D: usize>(
    states: &[Conserved<T, D>],
    weights: &[T],
    gas: &GasModel<T>,
) -> Result<T> {
    let mut s = T::zero();
    for (u, &w) in states.iter().zip(weights) {
        s = s + w * entropy_function(u, gas)?;
    }
    Ok(s)
}

/// Limits one cell in place. `weights` are the tensor quadrature weights of
/// the cell. The floor is lowered to the average density or pressure when the
/// average itself lies below `eps`.
pub fn limit_cell<T: Real, const D: usize>(
    states: &mut [Conserved<T, D>],
    weights: &[T],
    params: &LimiterParams<T>,
    gas: &GasModel<T>,
) -> Result<LimitOutcome<T>> {
    if !params.enabled {
        return Ok(LimitOutcome::identity());
    }
    let eps = params.eps;
    let all_fine = states
        .iter()
        .all(|u| u.rho >= eps && u.pressure(gas) >= eps);
    if all_fine {
        return Ok(LimitOutcome::identity());
    }

    let avg = cell_average(states, weights);
    let p_avg = avg.pressure(gas);
    if !(avg.rho > T::zero() && p_avg > T::zero()) {
        return Err(Error::InadmissibleAverage {
            cell: 0,
            rho: avg.rho.to_f64().unwrap_or(f64::NAN),
            p: p_avg.to_f64().unwrap_or(f64::NAN),
        });
    }
    let eps = eps.min(avg.rho).min(p_avg);

    let rho_min = states.iter().fold(T::infinity(), |m, u| m.min(u.rho));
    let mut theta1 = T::one();
    if rho_min < eps {
        theta1 = ((avg.rho - eps) / (avg.rho - rho_min)).min(T::one()).max(T::zero());
        for u in states.iter_mut() {
            *u = avg + (*u - avg) * theta1;
        }
    }

    let mut theta2 = T::one();
    for u in states.iter() {
        if u.pressure(gas) < eps {
            theta2 = theta2.min(pressure_root(&avg, u, eps, gas));
        }
    }
    if theta2 < T::one() {
        let ok = |t: T| {
            states
                .iter()
                .all(|u| (avg + (*u - avg) * t).pressure(gas) >= eps)
        };
        // Near vacuum the quadratic can be off by more than `eps`.
        if !ok(theta2) {
            let (mut lo, mut hi) = (T::zero(), theta2);
            for _ in 0..BISECTION_STEPS {
                let mid = T::half() * (lo + hi);
                if ok(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            theta2 = lo;
        }
        for u in states.iter_mut() {
            *u = avg + (*u - avg) * theta2;
        }
    }
    Ok(LimitOutcome {
        theta_density: theta1,
        theta_pressure: theta2,
    })
}

/// `t` in `[0, 1)` with `p((1 - t) avg + t u) = eps`, where `p(avg) >= eps > p(u)`.
fn pressure_root<T: Real, const D: usize>(
    avg: &Conserved<T, D>,
    u: &Conserved<T, D>,
    eps: T,
    gas: &GasModel<T>,
) -> T {
    let gm1 = gas.gamma - T::one();
    let diff = *u - *avg;
    let mut dm2 = T::zero();
    let mut mdm = T::zero();
    let mut m2 = T::zero();
    for d in 0..D {
        dm2 = dm2 + diff.mom[d] * diff.mom[d];
        mdm = mdm + avg.mom[d] * diff.mom[d];
        m2 = m2 + avg.mom[d] * avg.mom[d];
    }
    let a = diff.rho * diff.energy - T::half() * dm2;
    let b = avg.rho * diff.energy + avg.energy * diff.rho - mdm - eps * diff.rho / gm1;
    let c = avg.rho * avg.energy - T::half() * m2 - eps * avg.rho / gm1;
    let q = |t: T| c + t * (b + t * a);

    let in_range = |t: T| t.is_finite() && t >= T::zero() && t <= T::one();
    let candidate = if a == T::zero() {
        if b < T::zero() {
            Some(-c / b)
        } else {
            None
        }
    } else {
        let disc = b * b - T::lit(4.0) * a * c;
        if disc >= T::zero() {
            let sq = disc.sqrt();
            let qq = -T::half() * (b + if b >= T::zero() { sq } else { -sq });
            let r1 = qq / a;
            let r2 = if qq != T::zero() { c / qq } else { T::nan() };
            match (in_range(r1), in_range(r2)) {
                (true, true) => Some(r1.min(r2)),
                (true, false) => Some(r1),
                (false, true) => Some(r2),
                (false, false) => None,
            }
        } else {
            None
        }
    };
    match candidate {
        Some(t) if in_range(t) => t,
        _ => {
            let (mut lo, mut hi) = (T::zero(), T::one());
            for _ in 0..BISECTION_STEPS {
                let mid = T::half() * (lo + hi);
                if q(mid) >= T::zero() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        }
    }
}

/// Limits every cell of a field; returns the number of cells modified.
pub fn limit_field<T: Real, const D: usize>(
    field: &mut Field<T, D>,
    grid: &Grid<T, D>,
    weights: &[T],
    params: &LimiterParams<T>,
    gas: &GasModel<T>,
) -> Result<usize> {
    if !params.enabled {
        return Ok(0);
    }
    let npc = grid.nodes_per_cell();
    let tw = grid.tensor_weights(weights);
    let mut count = 0;
    for (c, cell) in field.values.chunks_mut(npc).enumerate() {
        let out = limit_cell(cell, &tw, params, gas).map_err(|e| match e {
            Error::InadmissibleAverage { rho, p, .. } => Error::InadmissibleAverage { cell: c, rho, p },
            other => other,
        })?;
        if !out.is_identity() {
            count += 1;
        }
    }
    Ok(count)
}
