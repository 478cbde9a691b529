//! Ideal-gas state algebra, admissibility, the entropy pair and wave-speed
//! estimates for the Euler equations in `D` space dimensions.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Ideal gas closure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasModel<T> {
    /// Adiabatic index.
    pub gamma: T,
    /// Specific gas constant, J/(kg K). Only temperature-based setups need it.
    pub r_gas: T,
}

impl<T: Real> GasModel<T> {
    pub fn new(gamma: T) -> Result<Self> {
        if !(gamma > T::one()) {
            return Err(Error::Config(format!(
                "adiabatic index must exceed 1, got {}",
                gamma
            )));
        }
        Ok(Self {
            gamma,
            r_gas: T::one(),
        })
    }

    pub fn with_gas_constant(mut self, r_gas: T) -> Self {
        self.r_gas = r_gas;
        self
    }

    /// Whether the two-rarefaction bound is known to make the Lax–Friedrichs
    /// flux entropy stable (`1 < gamma <= 5/3`).
    pub fn in_entropy_stable_range(&self) -> bool {
        self.gamma > T::one() && self.gamma <= T::lit(5.0 / 3.0) + T::epsilon()
    }
}

impl<T: Real> Default for GasModel<T> {
    fn default() -> Self {
        Self {
            gamma: T::lit(1.4),
            r_gas: T::one(),
        }
    }
}

/// Conserved variables `(rho, rho u, E)` at one node; `D` momentum components.
///
/// Also used for flux vectors and entropy variables, which share the arity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conserved<T, const D: usize> {
    pub rho: T,
    pub mom: [T; D],
    pub energy: T,
}

/// Primitive variables `(rho, u, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive<T, const D: usize> {
    pub rho: T,
    pub vel: [T; D],
    pub p: T,
}

impl<T: Real, const D: usize> Conserved<T, D> {
    pub const LEN: usize = D + 2;

    pub fn new(rho: T, mom: [T; D], energy: T) -> Self {
        Self { rho, mom, energy }
    }

    pub fn zero() -> Self {
        Self {
            rho: T::zero(),
            mom: [T::zero(); D],
            energy: T::zero(),
        }
    }

    /// Component `i` in the order `(rho, mom_0, .., mom_{D-1}, E)`.
    pub fn get(&self, i: usize) -> T {
        match i {
            0 => self.rho,
            i if i <= D => self.mom[i - 1],
            _ => self.energy,
        }
    }

    pub fn set(&mut self, i: usize, v: T) {
        match i {
            0 => self.rho = v,
            i if i <= D => self.mom[i - 1] = v,
            _ => self.energy = v,
        }
    }

    pub fn to_vec(&self) -> Vec<T> {
        (0..Self::LEN).map(|i| self.get(i)).collect()
    }

    pub fn dot(&self, other: &Self) -> T {
        let mut s = self.rho * other.rho + self.energy * other.energy;
        for d in 0..D {
            s = s + self.mom[d] * other.mom[d];
        }
        s
    }

    pub fn max_abs(&self) -> T {
        (0..Self::LEN).fold(T::zero(), |m, i| m.max(self.get(i).abs()))
    }

    pub fn is_finite(&self) -> bool {
        (0..Self::LEN).all(|i| self.get(i).is_finite())
    }

    pub fn kinetic_energy(&self) -> T {
        let m2 = self.mom.iter().fold(T::zero(), |s, &m| s + m * m);
        T::half() * m2 / self.rho
    }

    /// Pressure from the ideal gas law; no admissibility check.
    #[inline]
    pub fn pressure(&self, gas: &GasModel<T>) -> T {
        (gas.gamma - T::one()) * (self.energy - self.kinetic_energy())
    }
}

impl<T: Real, const D: usize> Primitive<T, D> {
    pub fn new(rho: T, vel: [T; D], p: T) -> Self {
        Self { rho, vel, p }
    }

    pub fn at_rest(rho: T, p: T) -> Self {
        Self {
            rho,
            vel: [T::zero(); D],
            p,
        }
    }

    /// `beta = rho / (2 p)`.
    #[inline]
    pub fn beta(&self) -> T {
        self.rho / (T::two() * self.p)
    }

    pub fn speed_squared(&self) -> T {
        self.vel.iter().fold(T::zero(), |s, &u| s + u * u)
    }

    pub fn is_admissible(&self) -> bool {
        self.rho > T::zero() && self.p > T::zero()
    }
}

macro_rules! impl_elementwise {
    ($tr:ident, $f:ident, $op:tt) => {
        impl<T: Real, const D: usize> $tr for Conserved<T, D> {
            type Output = Self;
            #[inline]
            fn $f(self, o: Self) -> Self {
                let mut mom = self.mom;
                for d in 0..D {
                    mom[d] = mom[d] $op o.mom[d];
                }
                Self { rho: self.rho $op o.rho, mom, energy: self.energy $op o.energy }
            }
        }
    };
}
impl_elementwise!(Add, add, +);
impl_elementwise!(Sub, sub, -);

impl<T: Real, const D: usize> Mul<T> for Conserved<T, D> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        let mut mom = self.mom;
        for m in &mut mom {
            *m = *m * s;
        }
        Self {
            rho: self.rho * s,
            mom,
            energy: self.energy * s,
        }
    }
}

impl<T: Real, const D: usize> Neg for Conserved<T, D> {
    type Output = Self;
    fn neg(self) -> Self {
        self * (-T::one())
    }
}

impl<T: Real, const D: usize> AddAssign for Conserved<T, D> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real, const D: usize> SubAssign for Conserved<T, D> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

fn inadmissible<T: Real>(rho: T, p: T) -> Error {
    Error::Inadmissible {
        rho: rho.to_f64().unwrap_or(f64::NAN),
        p: p.to_f64().unwrap_or(f64::NAN),
    }
}

/// Conserved to primitive. Never fails for `rho != 0`; the caller checks
/// admissibility of the result.
pub fn cons_to_prim<T: Real, const D: usize>(u: &Conserved<T, D>, gas: &GasModel<T>) -> Primitive<T, D> {
    let mut vel = [T::zero(); D];
    for d in 0..D {
        vel[d] = u.mom[d] / u.rho;
    }
    Primitive {
        rho: u.rho,
        vel,
        p: u.pressure(gas),
    }
}

pub fn prim_to_cons<T: Real, const D: usize>(w: &Primitive<T, D>, gas: &GasModel<T>) -> Conserved<T, D> {
    let mut mom = [T::zero(); D];
    for d in 0..D {
        mom[d] = w.rho * w.vel[d];
    }
    Conserved {
        rho: w.rho,
        mom,
        energy: w.p / (gas.gamma - T::one()) + T::half() * w.rho * w.speed_squared(),
    }
}

/// Membership in the admissible set: `rho > 0` and `p > 0`.
pub fn is_admissible<T: Real, const D: usize>(u: &Conserved<T, D>, gas: &GasModel<T>) -> bool {
    u.rho > T::zero() && u.pressure(gas) > T::zero()
}

/// Primitive state, or an error if it is not admissible.
pub fn checked_prim<T: Real, const D: usize>(
    u: &Conserved<T, D>,
    gas: &GasModel<T>,
) -> Result<Primitive<T, D>> {
    if !(u.rho > T::zero()) {
        return Err(inadmissible(u.rho, u.pressure(gas)));
    }
    let w = cons_to_prim(u, gas);
    if !(w.p > T::zero()) {
        return Err(inadmissible(w.rho, w.p));
    }
    Ok(w)
}

/// Physical specific entropy `s = ln(p rho^-gamma)`.
#[inline]
pub fn specific_entropy<T: Real, const D: usize>(w: &Primitive<T, D>, gas: &GasModel<T>) -> T {
    w.p.ln() - gas.gamma * w.rho.ln()
}

/// Mathematical entropy `-rho s / (gamma - 1)`.
pub fn entropy_function<T: Real, const D: usize>(u: &Conserved<T, D>, gas: &GasModel<T>) -> Result<T> {
    let w = checked_prim(u, gas)?;
    Ok(-w.rho * specific_entropy(&w, gas) / (gas.gamma - T::one()))
}

/// Entropy variables `V = dU/dU`, laid out like a conserved vector.
pub fn entropy_vars<T: Real, const D: usize>(
    u: &Conserved<T, D>,
    gas: &GasModel<T>,
) -> Result<Conserved<T, D>> {
    let w = checked_prim(u, gas)?;
    Ok(entropy_vars_prim(&w, gas))
}

pub(crate) fn entropy_vars_prim<T: Real, const D: usize>(
    w: &Primitive<T, D>,
    gas: &GasModel<T>,
) -> Conserved<T, D> {
    let s = specific_entropy(w, gas);
    let gm1 = gas.gamma - T::one();
    let rho_over_p = w.rho / w.p;
    let mut mom = [T::zero(); D];
    for d in 0..D {
        mom[d] = rho_over_p * w.vel[d];
    }
    Conserved {
        rho: (gas.gamma - s) / gm1 - T::half() * rho_over_p * w.speed_squared(),
        mom,
        energy: -rho_over_p,
    }
}

/// Entropy potential `phi = rho` (satisfies `V.U - entropy = phi`).
pub fn entropy_potential<T: Real, const D: usize>(u: &Conserved<T, D>) -> T {
    u.rho
}

/// Potential flux `psi_d = rho u_d`.
#[inline]
pub fn potential_flux<T: Real, const D: usize>(u: &Conserved<T, D>, dir: usize) -> T {
    u.mom[dir]
}

/// Gravity source `(0, -rho grad phi, -m . grad phi)`.
pub fn gravity_source<T: Real, const D: usize>(u: &Conserved<T, D>, grad_phi: &[T; D]) -> Conserved<T, D> {
    let mut mom = [T::zero(); D];
    let mut energy = T::zero();
    for d in 0..D {
        mom[d] = -u.rho * grad_phi[d];
        energy = energy - u.mom[d] * grad_phi[d];
    }
    Conserved {
        rho: T::zero(),
        mom,
        energy,
    }
}

/// `c = sqrt(gamma p / rho)`.
pub fn sound_speed<T: Real, const D: usize>(u: &Conserved<T, D>, gas: &GasModel<T>) -> Result<T> {
    let w = checked_prim(u, gas)?;
    Ok((gas.gamma * w.p / w.rho).sqrt())
}

/// `|u_dir| + c`.
pub fn max_signal<T: Real, const D: usize>(u: &Conserved<T, D>, gas: &GasModel<T>, dir: usize) -> Result<T> {
    let w = checked_prim(u, gas)?;
    Ok(w.vel[dir].abs() + (gas.gamma * w.p / w.rho).sqrt())
}

/// Two-rarefaction upper bound on the Riemann fan speed for primitive face
/// states, in direction `dir`.
pub fn rrf_wave_speed_prim<T: Real, const D: usize>(
    left: &Primitive<T, D>,
    right: &Primitive<T, D>,
    gas: &GasModel<T>,
    dir: usize,
) -> T {
    let g = gas.gamma;
    let gm1 = g - T::one();
    let z = gm1 / (T::two() * g);
    let cl = (g * left.p / left.rho).sqrt();
    let cr = (g * right.p / right.rho).sqrt();
    let ul = left.vel[dir];
    let ur = right.vel[dir];

    let num = cl + cr - T::half() * gm1 * (ur - ul);
    let den = cl * left.p.powf(-z) + cr * right.p.powf(-z);
    let floor = T::lit(1e-300).max(T::min_positive_value());
    let p_star = if num > T::zero() {
        (num / den).powf(T::one() / z).max(floor)
    } else {
        floor
    };

    let coef = (g + T::one()) / (T::two() * g);
    let lam_l = ul - cl * (T::one() + coef * ((p_star - left.p) / left.p).max(T::zero())).sqrt();
    let lam_r = ur + cr * (T::one() + coef * ((p_star - right.p) / right.p).max(T::zero())).sqrt();
    lam_l.abs().max(lam_r.abs())
}

/// Two-rarefaction wave-speed estimate for conserved face traces.
pub fn rrf_wave_speed<T: Real, const D: usize>(
    left: &Conserved<T, D>,
    right: &Conserved<T, D>,
    gas: &GasModel<T>,
    dir: usize,
) -> Result<T> {
    let wl = checked_prim(left, gas)?;
    let wr = checked_prim(right, gas)?;
    Ok(rrf_wave_speed_prim(&wl, &wr, gas, dir))
}

#[cfg(test)]
mod tests {
    use super::*;

    type U1 = Conserved<f64, 1>;
    type U2 = Conserved<f64, 2>;

    fn gas() -> GasModel<f64> {
        GasModel::default()
    }

    #[test]
    fn rest_state_pressure() {
        let w = cons_to_prim(&U1::new(1.0, [0.0], 2.5), &gas());
        assert_eq!((w.rho, w.vel), (1.0, [0.0]));
        assert!((w.p - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sod_states_pressure() {
        let g = gas();
        assert!((U1::new(1.0, [0.0], 2.5).pressure(&g) - 1.0).abs() < 1e-15);
        assert!((U1::new(0.125, [0.0], 0.25).pressure(&g) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn moving_state_pressure() {
        let p = U1::new(1.0, [1.0], 1.0).pressure(&gas());
        assert!((p - 0.2).abs() < 1e-15);
    }

    #[test]
    fn admissibility() {
        let g = gas();
        assert!(is_admissible(&U1::new(1.0, [0.0], 1.0), &g));
        assert!(!is_admissible(&U1::new(1.0, [2.0], 1.0), &g));
        assert!(!is_admissible(&U1::new(-1.0, [0.0], 1.0), &g));
        assert!(entropy_vars(&U1::new(-1.0, [0.0], 1.0), &g).is_err());
    }

    #[test]
    fn entropy_vars_at_unit_rest_state() {
        let g = gas();
        let u = prim_to_cons(&Primitive::new(1.0, [0.0], 1.0), &g);
        let v = entropy_vars(&u, &g).unwrap();
        assert!((v.rho - 3.5).abs() < 1e-15);
        assert_eq!(v.mom, [0.0]);
        assert_eq!(v.energy, -1.0);
    }

    #[test]
    fn legendre_duality_and_source_orthogonality() {
        let g = gas();
        let w = Primitive::new(0.7, [0.3, -1.2], 2.1);
        let u: U2 = prim_to_cons(&w, &g);
        let v = entropy_vars(&u, &g).unwrap();
        let ent = entropy_function(&u, &g).unwrap();
        assert!((v.dot(&u) - ent - entropy_potential(&u)).abs() < 1e-13);
        let s = gravity_source(&u, &[0.4, -2.0]);
        assert!(v.dot(&s).abs() < 1e-14);
    }

    #[test]
    fn sound_speeds() {
        let g = gas();
        let c = sound_speed(&U1::new(1.0, [0.0], 2.5), &g).unwrap();
        assert!((c - 1.4f64.sqrt()).abs() < 1e-15);
        let c = sound_speed(&U1::new(0.125, [0.0], 0.25), &g).unwrap();
        assert!((c - 1.12f64.sqrt()).abs() < 1e-15);
        let scaled = prim_to_cons(&Primitive::new(3.0, [0.0], 3.0), &g);
        let c3 = sound_speed::<f64, 1>(&scaled, &g).unwrap();
        assert!((c3 - 1.4f64.sqrt()).abs() < 1e-15);
        let s = max_signal(&U1::new(1.0, [-0.5], 2.5 + 0.125), &g, 0).unwrap();
        assert!((s - (0.5 + 1.4f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn rrf_equal_states() {
        let g = gas();
        let u = U1::new(1.0, [0.0], 2.5);
        let a = rrf_wave_speed(&u, &u, &g, 0).unwrap();
        assert!((a - 1.4f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rrf_near_vacuum_pair_is_finite() {
        let g = gas();
        let l = prim_to_cons(&Primitive::new(7.0, [-1.0], 0.2), &g);
        let r = prim_to_cons(&Primitive::new(7.0, [1.0], 0.2), &g);
        let a = rrf_wave_speed(&l, &r, &g, 0).unwrap();
        assert!(a.is_finite() && a > 0.0);
        // Both rarefactions: fan edges are u -/+ c.
        let c = (1.4f64 * 0.2 / 7.0).sqrt();
        assert!((a - (1.0 + c)).abs() < 1e-14);
    }

    #[test]
    fn rrf_rejects_inadmissible() {
        let g = gas();
        let bad = U1::new(1.0, [2.0], 1.0);
        assert!(rrf_wave_speed(&bad, &bad, &g, 0).is_err());
    }

    #[test]
    fn gamma_range() {
        assert!(GasModel::new(1.4).unwrap().in_entropy_stable_range());
        assert!(GasModel::new(5.0 / 3.0).unwrap().in_entropy_stable_range());
        assert!(!GasModel::new(1.9).unwrap().in_entropy_stable_range());
        assert!(GasModel::new(1.0).is_err());
    }
}
