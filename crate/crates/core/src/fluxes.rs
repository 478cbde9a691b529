//! Physical fluxes, the Chandrashekar entropy-conservative two-point flux and
//! the entropy-stable Lax–Friedrichs interface flux.

use crate::error::{Error, Result};
use crate::physics::{checked_prim, rrf_wave_speed_prim, Conserved, GasModel, Primitive};
use crate::scalar::Real;

/// Below this value of `((a - b) / (a + b))^2` the logarithmic mean switches
/// to its series expansion.
const LOG_MEAN_SERIES_SWITCH: f64 = 1e-4;

/// Per-node quantities reused by every two-point flux touching the node.
#[derive(Debug, Clone, Copy)]
pub struct NodeState<T, const D: usize> {
    pub cons: Conserved<T, D>,
    pub prim: Primitive<T, D>,
    pub beta: T,
    pub ln_rho: T,
    pub ln_beta: T,
}

impl<T: Real, const D: usize> NodeState<T, D> {
    pub fn new(u: &Conserved<T, D>, gas: &GasModel<T>) -> Result<Self> {
        let prim = checked_prim(u, gas)?;
        Ok(Self::from_parts(*u, prim))
    }

    pub(crate) fn from_parts(cons: Conserved<T, D>, prim: Primitive<T, D>) -> Self {
        let beta = prim.beta();
        Self {
            cons,
            prim,
            beta,
            ln_rho: prim.rho.ln(),
            ln_beta: beta.ln(),
        }
    }

    #[inline]
    pub fn sound_speed(&self, gas: &GasModel<T>) -> T {
        (gas.gamma * self.prim.p / self.prim.rho).sqrt()
    }
}

/// Physical flux of an admissible state in direction `dir`.
pub fn physical_flux<T: Real, const D: usize>(
    u: &Conserved<T, D>,
    gas: &GasModel<T>,
    dir: usize,
) -> Result<Conserved<T, D>> {
    let w = checked_prim(u, gas)?;
    Ok(physical_flux_prim(u, &w, dir))
}

#[inline]
pub(crate) fn physical_flux_prim<T: Real, const D: usize>(
    u: &Conserved<T, D>,
    w: &Primitive<T, D>,
    dir: usize,
) -> Conserved<T, D> {
    let un = w.vel[dir];
    let mut mom = [T::zero(); D];
    for d in 0..D {
        mom[d] = u.mom[d] * un;
    }
    mom[dir] = mom[dir] + w.p;
    Conserved {
        rho: u.mom[dir],
        mom,
        energy: un * (u.energy + w.p),
    }
}

/// Logarithmic mean `(b - a) / (ln b - ln a)`.
pub fn log_mean<T: Real>(a: T, b: T) -> Result<T> {
    if !(a > T::zero() && b > T::zero()) {
        return Err(Error::NonPositiveMean(
            a.to_f64().unwrap_or(f64::NAN),
            b.to_f64().unwrap_or(f64::NAN),
        ));
    }
    Ok(log_mean_with_logs(a, b, a.ln(), b.ln()))
}

/// Logarithmic mean with precomputed logarithms of the arguments.
#[inline]
pub(crate) fn log_mean_with_logs<T: Real>(a: T, b: T, ln_a: T, ln_b: T) -> T {
    let sum = a + b;
    let diff = a - b;
    let zeta = (diff * diff) / (sum * sum);
    if zeta < T::lit(LOG_MEAN_SERIES_SWITCH) {
        let series = T::one()
            + zeta * (T::one() / T::lit(3.0) + zeta * (T::lit(0.2) + zeta / T::lit(7.0)));
        sum / (T::two() * series)
    } else {
        diff / (ln_a - ln_b)
    }
}

/// Entropy-conservative flux between two node states in direction `dir`.
#[inline]
pub fn ec_flux_nodes<T: Real, const D: usize>(
    l: &NodeState<T, D>,
    r: &NodeState<T, D>,
    gas: &GasModel<T>,
    dir: usize,
) -> Conserved<T, D> {
    let half = T::half();
    let rho_log = log_mean_with_logs(l.prim.rho, r.prim.rho, l.ln_rho, r.ln_rho);
    let beta_log = log_mean_with_logs(l.beta, r.beta, l.ln_beta, r.ln_beta);
    let rho_avg = half * (l.prim.rho + r.prim.rho);
    let beta_avg = half * (l.beta + r.beta);
    let p_tilde = rho_avg / (T::two() * beta_avg);

    let mut vel_avg = [T::zero(); D];
    let mut vel_sq_avg = T::zero();
    for d in 0..D {
        vel_avg[d] = half * (l.prim.vel[d] + r.prim.vel[d]);
        vel_sq_avg = vel_sq_avg + half * (l.prim.vel[d] * l.prim.vel[d] + r.prim.vel[d] * r.prim.vel[d]);
    }

    let mass = rho_log * vel_avg[dir];
    let mut mom = [T::zero(); D];
    for d in 0..D {
        mom[d] = vel_avg[d] * mass;
    }
    mom[dir] = mom[dir] + p_tilde;

    let mut energy = (T::one() / (T::two() * (gas.gamma - T::one()) * beta_log) - half * vel_sq_avg) * mass;
    for d in 0..D {
        energy = energy + vel_avg[d] * mom[d];
    }
    Conserved {
        rho: mass,
        mom,
        energy,
    }
}

/// Chandrashekar entropy-conservative flux. Symmetric and consistent.
pub fn ec_flux<T: Real, const D: usize>(
    left: &Conserved<T, D>,
    right: &Conserved<T, D>,
    gas: &GasModel<T>,
    dir: usize,
) -> Result<Conserved<T, D>> {
    let l = NodeState::new(left, gas)?;
    let r = NodeState::new(right, gas)?;
    Ok(ec_flux_nodes(&l, &r, gas, dir))
}

/// Dissipation coefficient `max(|u_L| + c_L, |u_R| + c_R, alpha_rrf)`.
#[inline]
pub(crate) fn lf_alpha<T: Real, const D: usize>(
    l: &Primitive<T, D>,
    r: &Primitive<T, D>,
    gas: &GasModel<T>,
    dir: usize,
) -> T {
    let cl = (gas.gamma * l.p / l.rho).sqrt();
    let cr = (gas.gamma * r.p / r.rho).sqrt();
    let a = (l.vel[dir].abs() + cl).max(r.vel[dir].abs() + cr);
    a.max(rrf_wave_speed_prim(l, r, gas, dir))
}

#[inline]
pub(crate) fn es_flux_lf_prim<T: Real, const D: usize>(
    ul: &Conserved<T, D>,
    wl: &Primitive<T, D>,
    ur: &Conserved<T, D>,
    wr: &Primitive<T, D>,
    gas: &GasModel<T>,
    dir: usize,
) -> Conserved<T, D> {
    let alpha = lf_alpha(wl, wr, gas, dir);
    let fl = physical_flux_prim(ul, wl, dir);
    let fr = physical_flux_prim(ur, wr, dir);
    (fr + fl) * T::half() - (*ur - *ul) * (T::half() * alpha)
}

/// Entropy-stable Lax–Friedrichs flux with two-rarefaction dissipation.
pub fn es_flux_lf<T: Real, const D: usize>(
    left: &Conserved<T, D>,
    right: &Conserved<T, D>,
    gas: &GasModel<T>,
    dir: usize,
) -> Result<Conserved<T, D>> {
    let wl = checked_prim(left, gas)?;
    let wr = checked_prim(right, gas)?;
    Ok(es_flux_lf_prim(left, &wl, right, &wr, gas, dir))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{entropy_vars, potential_flux, prim_to_cons};

    fn gas() -> GasModel<f64> {
        GasModel::default()
    }

    fn cons1(rho: f64, u: f64, p: f64) -> Conserved<f64, 1> {
        prim_to_cons(&Primitive::new(rho, [u], p), &gas())
    }

    #[test]
    fn rest_flux_is_pressure() {
        let f = physical_flux(&cons1(1.0, 0.0, 1.0), &gas(), 0).unwrap();
        assert_eq!(f, Conserved::new(0.0, [1.0], 0.0));
    }

    #[test]
    fn moving_flux() {
        let f = physical_flux(&cons1(1.0, 1.0, 0.2), &gas(), 0).unwrap();
        for (a, b) in f.to_vec().iter().zip([1.0, 1.2, 1.2]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn rest_flux_2d_y() {
        let u = prim_to_cons(&Primitive::<f64, 2>::at_rest(1.3, 0.7), &gas());
        let g = physical_flux(&u, &gas(), 1).unwrap();
        assert_eq!(g, Conserved::new(0.0, [0.0, 0.7], 0.0));
    }

    #[test]
    fn log_mean_values() {
        assert_eq!(log_mean(2.0, 2.0).unwrap(), 2.0);
        let e = std::f64::consts::E;
        assert!((log_mean(1.0, e).unwrap() - (e - 1.0)).abs() < 1e-15);
        let v = log_mean(1.0, 1.0 + 1e-12).unwrap();
        assert!(v >= 1.0 && v <= 1.0 + 1e-12, "{v}");
        assert!(log_mean(0.0, 1.0).is_err());
        assert!(log_mean(-1.0, 1.0).is_err());
    }

    #[test]
    fn log_mean_branches_agree_near_switch() {
        // zeta just above and below the switch point
        for b in [1.0202, 1.0198, 1.5, 1.001] {
            let direct = (b - 1.0) / f64::ln(b);
            assert!((log_mean(1.0, b).unwrap() - direct).abs() < 1e-14 * direct);
        }
    }

    #[test]
    fn ec_flux_consistency_and_symmetry() {
        let l = cons1(1.0, 0.3, 1.0);
        let r = cons1(0.125, -0.2, 0.1);
        let f = ec_flux(&l, &l, &gas(), 0).unwrap();
        let pf = physical_flux(&l, &gas(), 0).unwrap();
        assert!((f - pf).max_abs() < 1e-14);
        assert_eq!(ec_flux(&l, &r, &gas(), 0).unwrap(), ec_flux(&r, &l, &gas(), 0).unwrap());
    }

    #[test]
    fn ec_identity_on_sod_pair() {
        let g = gas();
        let l = cons1(1.0, 0.0, 1.0);
        let r = cons1(0.125, 0.0, 0.1);
        let f = ec_flux(&l, &r, &g, 0).unwrap();
        let dv = entropy_vars(&r, &g).unwrap() - entropy_vars(&l, &g).unwrap();
        let res = dv.dot(&f) - (potential_flux(&r, 0) - potential_flux(&l, 0));
        assert!(res.abs() <= 1e-12, "{res:e}");
    }

    #[test]
    fn lf_flux_consistency_and_dissipation_sign() {
        let g = gas();
        let l = cons1(1.0, 0.0, 1.0);
        let r = cons1(0.125, 0.0, 0.1);
        let f = es_flux_lf(&l, &l, &g, 0).unwrap();
        assert!((f - physical_flux(&l, &g, 0).unwrap()).max_abs() < 1e-15);
        let central = (physical_flux(&l, &g, 0).unwrap() + physical_flux(&r, &g, 0).unwrap()) * 0.5;
        let diss = es_flux_lf(&l, &r, &g, 0).unwrap() - central;
        let jump = r - l;
        for i in 0..3 {
            let (d, j) = (diss.get(i), jump.get(i));
            assert!(d * j <= 0.0, "component {i}");
        }
    }
}
