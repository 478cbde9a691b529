//! Hydrostatic equilibria, their Gauss–Lobatto interpolants and the
//! precomputed well-balanced source factors.

use crate::basis::GlBasis;
use crate::error::{Error, Result};
use crate::fluxes::{ec_flux_nodes, physical_flux_prim, NodeState};
use crate::physics::{prim_to_cons, Conserved, GasModel, Primitive};
use crate::scalar::Real;
use crate::solver::Grid;

/// Time-independent gravitational potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GravityPotential<T, const D: usize> {
    /// `phi = slope . x`; covers `g x`, `g (x + y)` and `g y`.
    Linear { slope: [T; D] },
    /// `phi = scale |x|^2 / 2`.
    QuadraticRadial { scale: T },
    /// `phi = |x|`.
    Radial,
}

impl<T: Real, const D: usize> GravityPotential<T, D> {
    pub fn flat() -> Self {
        Self::Linear {
            slope: [T::zero(); D],
        }
    }

    /// `phi = g x_{D-1}`: gravity along the last axis.
    pub fn vertical(g: T) -> Self {
        let mut slope = [T::zero(); D];
        slope[D - 1] = g;
        Self::Linear { slope }
    }

    pub fn value(&self, x: &[T; D]) -> T {
        match self {
            Self::Linear { slope } => (0..D).fold(T::zero(), |s, d| s + slope[d] * x[d]),
            Self::QuadraticRadial { scale } => T::half() * *scale * norm_sq(x),
            Self::Radial => norm_sq(x).sqrt(),
        }
    }

    pub fn gradient(&self, x: &[T; D]) -> [T; D] {
        match self {
            Self::Linear { slope } => *slope,
            Self::QuadraticRadial { scale } => {
                let mut g = *x;
                for v in &mut g {
                    *v = *v * *scale;
                }
                g
            }
            Self::Radial => {
                let r = norm_sq(x).sqrt();
                let mut g = *x;
                for v in &mut g {
                    *v = *v / r;
                }
                g
            }
        }
    }

    /// Whether the gradient is defined at `x`.
    pub fn is_regular_at(&self, x: &[T; D]) -> bool {
        !matches!(self, Self::Radial) || norm_sq(x) > T::zero()
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, Self::Linear { slope } if slope.iter().all(|s| *s == T::zero()))
    }
}

fn norm_sq<T: Real, const D: usize>(x: &[T; D]) -> T {
    x.iter().fold(T::zero(), |s, &v| s + v * v)
}

/// Zero-velocity hydrostatic profile, written as a function of the local
/// potential value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HydrostaticProfile<T> {
    /// `rho = rho0 exp(-phi / RT0)`, `p = p0 exp(-phi / RT0)`, `RT0 = p0 / rho0`.
    Isothermal { rho0: T, p0: T },
    /// `rho = ((gamma - 1)(C - phi) / (K0 gamma))^(1 / (gamma - 1))`, `p = K0 rho^gamma`.
    Isentropic { k0: T, c: T },
    /// Stratified atmosphere with constant Brunt–Väisälä frequency; `phi = g y`.
    InertiaGravity {
        p0: T,
        t0: T,
        brunt: T,
        r_gas: T,
        g: T,
    },
}

impl<T: Real> HydrostaticProfile<T> {
    pub fn isothermal(rho0: T, p0: T) -> Result<Self> {
        positive("rho0", rho0)?;
        positive("p0", p0)?;
        Ok(Self::Isothermal { rho0, p0 })
    }

    /// Isothermal profile from a gas constant and temperature, `p0 = rho0 R T0`.
    pub fn isothermal_from_temperature(rho0: T, r_gas: T, t0: T) -> Result<Self> {
        positive("R", r_gas)?;
        positive("T0", t0)?;
        Self::isothermal(rho0, rho0 * r_gas * t0)
    }

    /// Isentropic profile with density `rho0` where `phi = 0`.
    pub fn isentropic(rho0: T, k0: T, gamma: T) -> Result<Self> {
        positive("rho0", rho0)?;
        positive("K0", k0)?;
        let c = k0 * gamma * rho0.powf(gamma - T::one()) / (gamma - T::one());
        Ok(Self::Isentropic { k0, c })
    }

    pub fn inertia_gravity(p0: T, t0: T, brunt: T, r_gas: T, g: T) -> Result<Self> {
        for (name, v) in [("p0", p0), ("T0", t0), ("N", brunt), ("R", r_gas), ("g", g)] {
            positive(name, v)?;
        }
        Ok(Self::InertiaGravity {
            p0,
            t0,
            brunt,
            r_gas,
            g,
        })
    }

    /// `(rho, p)` at potential value `phi`.
    pub fn density_pressure(&self, phi: T, gas: &GasModel<T>) -> Result<(T, T)> {
        let gm1 = gas.gamma - T::one();
        match *self {
            Self::Isothermal { rho0, p0 } => {
                let e = (-phi * rho0 / p0).exp();
                Ok((rho0 * e, p0 * e))
            }
            Self::Isentropic { k0, c } => {
                if !(c - phi > T::zero()) {
                    return Err(Error::Equilibrium(format!(
                        "isentropic profile requires C - phi > 0, got C = {c}, phi = {phi}"
                    )));
                }
                let rho = (gm1 * (c - phi) / (k0 * gas.gamma)).powf(T::one() / gm1);
                Ok((rho, k0 * rho.powf(gas.gamma)))
            }
            Self::InertiaGravity {
                p0,
                t0,
                brunt,
                r_gas,
                g,
            } => {
                let y = phi / g;
                let (theta, exner) = inertia_gravity_exner(y, p0, t0, brunt, r_gas, g, gas.gamma)?;
                let rho = p0 * exner.powf(T::one() / gm1) / (r_gas * theta);
                let p = p0 * exner.powf(gas.gamma / gm1);
                Ok((rho, p))
            }
        }
    }
}

fn positive<T: Real>(name: &'static str, v: T) -> Result<()> {
    if v > T::zero() {
        Ok(())
    } else {
        Err(Error::NonPositiveParameter {
            name,
            value: v.to_f64().unwrap_or(f64::NAN),
        })
    }
}

/// Background potential temperature and Exner function at height `y`.
fn inertia_gravity_exner<T: Real>(
    y: T,
    _p0: T,
    t0: T,
    brunt: T,
    r_gas: T,
    g: T,
    gamma: T,
) -> Result<(T, T)> {
    let n2 = brunt * brunt;
    let theta = t0 * (n2 * y / g).exp();
    let coef = (gamma - T::one()) * g * g / (gamma * r_gas * t0 * n2);
    let exner = T::one() + coef * ((-n2 * y / g).exp() - T::one());
    if !(exner > T::zero()) {
        return Err(Error::Equilibrium(format!(
            "Exner function non-positive at y = {y}"
        )));
    }
    Ok((theta, exner))
}

/// A potential together with the hydrostatic profile balancing it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticEquilibrium<T, const D: usize> {
    pub potential: GravityPotential<T, D>,
    pub profile: HydrostaticProfile<T>,
}

impl<T: Real, const D: usize> AnalyticEquilibrium<T, D> {
    pub fn new(potential: GravityPotential<T, D>, profile: HydrostaticProfile<T>) -> Self {
        Self { potential, profile }
    }

    pub fn primitive(&self, x: &[T; D], gas: &GasModel<T>) -> Result<Primitive<T, D>> {
        let (rho, p) = self
            .profile
            .density_pressure(self.potential.value(x), gas)?;
        Ok(Primitive::at_rest(rho, p))
    }
}

/// Isothermal equilibrium at a point.
pub fn isothermal_equilibrium<T: Real, const D: usize>(
    x: &[T; D],
    potential: &GravityPotential<T, D>,
    rho0: T,
    p0: T,
    gas: &GasModel<T>,
) -> Result<Primitive<T, D>> {
    AnalyticEquilibrium::new(*potential, HydrostaticProfile::isothermal(rho0, p0)?).primitive(x, gas)
}

/// Isentropic equilibrium at a point, parametrized by the density where `phi = 0`.
pub fn isentropic_equilibrium<T: Real, const D: usize>(
    x: &[T; D],
    potential: &GravityPotential<T, D>,
    rho0: T,
    k0: T,
    gas: &GasModel<T>,
) -> Result<Primitive<T, D>> {
    AnalyticEquilibrium::new(*potential, HydrostaticProfile::isentropic(rho0, k0, gas.gamma)?)
        .primitive(x, gas)
}

/// Background state of the inertia-gravity wave setup at height `y`.
pub fn inertia_gravity_background<T: Real>(
    y: T,
    p0: T,
    t0: T,
    brunt: T,
    r_gas: T,
    g: T,
    gas: &GasModel<T>,
) -> Result<Primitive<T, 2>> {
    let profile = HydrostaticProfile::inertia_gravity(p0, t0, brunt, r_gas, g)?;
    let (rho, p) = profile.density_pressure(g * y, gas)?;
    Ok(Primitive::at_rest(rho, p))
}

/// Background potential temperature `T0 exp(N^2 y / g)`.
pub fn inertia_gravity_theta<T: Real>(y: T, t0: T, brunt: T, g: T) -> T {
    t0 * (brunt * brunt * y / g).exp()
}

/// Nodal equilibrium interpolant and the source factors derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumData<T, const D: usize> {
    /// `U^e` at every node, field order.
    pub states: Vec<Conserved<T, D>>,
    /// Well-balanced source factor per node and direction (`Theta`, `Xi`):
    /// `(1 / rho^e) sum_l 2 D_{a,l} F^S_{mom,d}(U^e_a, U^e_l)` along the line in direction `d`.
    pub theta: Vec<[T; D]>,
    /// Strong-form counterpart `(1 / rho^e) sum_l D_{a,l} p^e_l`.
    pub theta_strong: Vec<[T; D]>,
}

impl<T: Real, const D: usize> EquilibriumData<T, D> {
    pub fn density(&self, node: usize) -> T {
        self.states[node].rho
    }

    pub fn max_abs_theta(&self) -> [T; D] {
        let mut m = [T::zero(); D];
        for t in &self.theta {
            for d in 0..D {
                m[d] = m[d].max(t[d].abs());
            }
        }
        m
    }
}

/// Interpolates the equilibrium at every node and precomputes the source factors.
pub fn build_equilibrium_data<T: Real, const D: usize>(
    grid: &Grid<T, D>,
    basis: &GlBasis<T>,
    eq: &AnalyticEquilibrium<T, D>,
    gas: &GasModel<T>,
) -> Result<EquilibriumData<T, D>> {
    let coords = grid.all_coords(basis.nodes());
    let mut states = Vec::with_capacity(coords.len());
    for x in &coords {
        if !eq.potential.is_regular_at(x) {
            return Err(Error::Equilibrium(format!(
                "potential gradient undefined at node {:?}; shift the mesh so no node sits at the origin",
                x.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect::<Vec<_>>()
            )));
        }
        let w = eq.primitive(x, gas)?;
        if !w.is_admissible() {
            return Err(Error::Equilibrium(format!(
                "equilibrium not admissible at {:?}",
                x.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect::<Vec<_>>()
            )));
        }
        states.push(prim_to_cons(&w, gas));
    }
    let (theta, theta_strong) = source_factors(grid, basis, &states, gas)?;
    Ok(EquilibriumData {
        states,
        theta,
        theta_strong,
    })
}

/// Source factors for a given nodal equilibrium.
pub fn source_factors<T: Real, const D: usize>(
    grid: &Grid<T, D>,
    basis: &GlBasis<T>,
    states: &[Conserved<T, D>],
    gas: &GasModel<T>,
) -> Result<(Vec<[T; D]>, Vec<[T; D]>)> {
    let nodes = states
        .iter()
        .map(|u| NodeState::new(u, gas))
        .collect::<Result<Vec<_>>>()?;
    let npc = grid.nodes_per_cell();
    let n1 = grid.nodes_1d();
    let mut theta = vec![[T::zero(); D]; states.len()];
    let mut theta_strong = vec![[T::zero(); D]; states.len()];
    for c in 0..grid.num_cells() {
        let base = c * npc;
        for a in 0..npc {
            let am = grid.node_multi(a);
            let me = &nodes[base + a];
            for d in 0..D {
                let stride = grid.node_stride(d);
                let line0 = base + a - am[d] * stride;
                let mut ec = T::zero();
                let mut strong = T::zero();
                for l in 0..n1 {
                    let other = &nodes[line0 + l * stride];
                    let dal = basis.d(am[d], l);
                    let f = if l == am[d] {
                        physical_flux_prim(&me.cons, &me.prim, d)
                    } else {
                        ec_flux_nodes(me, other, gas, d)
                    };
                    ec = ec + T::two() * dal * f.mom[d];
                    strong = strong + dal * other.prim.p;
                }
                theta[base + a][d] = ec / me.prim.rho;
                theta_strong[base + a][d] = strong / me.prim.rho;
            }
        }
    }
    Ok((theta, theta_strong))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gas() -> GasModel<f64> {
        GasModel::default()
    }

    #[test]
    fn isothermal_unit_profile() {
        let pot = GravityPotential::Linear { slope: [1.0] };
        for x in [0.0, 0.5, 2.0] {
            let w = isothermal_equilibrium(&[x], &pot, 1.0, 1.0, &gas()).unwrap();
            assert!((w.rho - (-x as f64).exp()).abs() < 1e-15);
            assert!((w.p - (-x as f64).exp()).abs() < 1e-15);
            assert_eq!(w.vel, [0.0]);
        }
    }

    #[test]
    fn flat_potential_gives_constant_state() {
        let pot = GravityPotential::<f64, 1>::flat();
        let w = isothermal_equilibrium(&[3.0], &pot, 2.0, 5.0, &gas()).unwrap();
        assert_eq!((w.rho, w.p), (2.0, 5.0));
        let g = GasModel::new(5.0 / 3.0).unwrap();
        let prof = HydrostaticProfile::isentropic(1.0, 1.0, g.gamma).unwrap();
        let c = match prof {
            HydrostaticProfile::Isentropic { c, .. } => c,
            _ => unreachable!(),
        };
        let w = isentropic_equilibrium(&[0.7], &pot, 1.0, 1.0, &g).unwrap();
        let expected = ((g.gamma - 1.0) * c / g.gamma).powf(1.0 / (g.gamma - 1.0));
        assert!((w.rho - expected).abs() < 1e-15);
    }

    #[test]
    fn isothermal_2d_profile() {
        let pot = GravityPotential::Linear { slope: [1.0, 1.0] };
        let w = isothermal_equilibrium(&[0.2, 0.3], &pot, 1.21, 1.0, &gas()).unwrap();
        assert!((w.rho - 1.21 * (-1.21 * 0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn isentropic_polytrope() {
        let g = GasModel::new(5.0 / 3.0).unwrap();
        let pot = GravityPotential::Linear { slope: [1.0] };
        for x in [0.0f64, 0.4, 1.9] {
            let w: Primitive<f64, 1> = isentropic_equilibrium(&[x], &pot, 1.0, 1.0, &g).unwrap();
            let expected = (1.0 - 0.4 * x).powf(1.5);
            assert!((w.rho - expected).abs() < 1e-14, "{x}: {} {expected}", w.rho);
            assert!((w.p - w.rho.powf(5.0 / 3.0)).abs() < 1e-14);
        }
        assert!(isentropic_equilibrium(&[3.0], &pot, 1.0, 1.0, &g).is_err());
    }

    #[test]
    fn rejects_bad_constants() {
        assert!(HydrostaticProfile::isothermal(0.0, 1.0).is_err());
        assert!(HydrostaticProfile::isothermal(1.0, -1.0).is_err());
        assert!(HydrostaticProfile::isentropic(1.0, 0.0, 1.4).is_err());
    }

    #[test]
    fn inertia_gravity_ground_values() {
        let w = inertia_gravity_background(0.0, 1e5, 300.0, 0.01, 287.058, 9.8, &gas()).unwrap();
        assert_eq!(w.p, 1e5);
        assert!((w.rho - 1e5 / (287.058 * 300.0)).abs() < 1e-12);
        assert!((w.rho - 1.1614).abs() < 5e-4);
        let top = inertia_gravity_background(1e4, 1e5, 300.0, 0.01, 287.058, 9.8, &gas()).unwrap();
        assert!(top.p < 1e5);
    }

    #[test]
    fn potential_gradients() {
        let q = GravityPotential::QuadraticRadial { scale: 1.0 };
        assert_eq!(q.gradient(&[0.3, -0.2]), [0.3, -0.2]);
        let r = GravityPotential::<f64, 2>::Radial;
        let g = r.gradient(&[3.0, 4.0]);
        assert!((g[0] - 0.6).abs() < 1e-15 && (g[1] - 0.8).abs() < 1e-15);
        assert!(!r.is_regular_at(&[0.0, 0.0]));
        assert_eq!(GravityPotential::<f64, 2>::vertical(9.8).gradient(&[1.0, 2.0]), [0.0, 9.8]);
    }

    #[test]
    fn radial_builder_rejects_origin_node() {
        let b = GlBasis::<f64>::new(2).unwrap();
        // Odd cell count with k = 2 puts the midpoint node at 0.
        let grid = Grid::new([-1.0, -1.0], [1.0, 1.0], [3, 3], 2).unwrap();
        let eq = AnalyticEquilibrium::new(
            GravityPotential::Radial,
            HydrostaticProfile::isothermal(1.0, 1.0).unwrap(),
        );
        assert!(build_equilibrium_data(&grid, &b, &eq, &gas()).is_err());
        let grid = Grid::new([-1.0, -1.0], [1.0, 1.0], [4, 4], 1).unwrap();
        assert!(build_equilibrium_data(&grid, &GlBasis::new(1).unwrap(), &eq, &gas()).is_err());
        let grid = Grid::new([-1.0, -1.0], [1.0, 1.0], [4, 4], 2).unwrap();
        // Even cell count, k = 2: faces at 0 carry nodes too.
        assert!(build_equilibrium_data(&grid, &b, &eq, &gas()).is_err());
        let grid = Grid::new([-1.0, -1.0], [1.0, 1.0], [5, 5], 1).unwrap();
        assert!(build_equilibrium_data(&grid, &GlBasis::new(1).unwrap(), &eq, &gas()).is_ok());
    }

    #[test]
    fn constant_equilibrium_has_zero_theta() {
        let b = GlBasis::<f64>::new(3).unwrap();
        let grid = Grid::new([0.0], [1.0], [5], 3).unwrap();
        let eq = AnalyticEquilibrium::new(
            GravityPotential::flat(),
            HydrostaticProfile::isothermal(1.3, 0.7).unwrap(),
        );
        let data = build_equilibrium_data(&grid, &b, &eq, &gas()).unwrap();
        assert!(data.theta.iter().all(|t| t[0].abs() < 1e-15));
    }

    #[test]
    fn interface_values_are_continuous() {
        let b = GlBasis::<f64>::new(2).unwrap();
        let grid = Grid::new([0.0], [2.0], [17], 2).unwrap();
        let eq = AnalyticEquilibrium::new(
            GravityPotential::Linear { slope: [1.0] },
            HydrostaticProfile::isothermal(1.0, 1.0).unwrap(),
        );
        let data = build_equilibrium_data(&grid, &b, &eq, &gas()).unwrap();
        for c in 0..16 {
            assert_eq!(data.states[c * 3 + 2], data.states[(c + 1) * 3]);
        }
    }
}
