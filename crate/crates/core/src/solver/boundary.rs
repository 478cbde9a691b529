use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::physics::{Conserved, GasModel};
use crate::scalar::Real;

/// Time signal, e.g. a prescribed boundary velocity `u(t)`.
pub type Signal<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// State prescribed at a boundary point `x` and time `t`.
pub type StateFn<T, const D: usize> = Arc<dyn Fn(&[T; D], T) -> Conserved<T, D> + Send + Sync>;

/// Condition imposed on one side of the domain through a ghost trace.
#[derive(Clone)]
pub enum BoundaryCondition<T, const D: usize> {
    Periodic,
    /// Ghost copies the interior trace.
    Outflow,
    /// Ghost mirrors the normal momentum.
    Reflective,
    /// Ghost carries the nodal equilibrium density and pressure, moving with
    /// the optional normal velocity signal (at rest when `None`).
    EquilibriumInflow { velocity: Option<Signal<T>> },
    /// Ghost is a prescribed state, typically an exact solution.
    Dirichlet(StateFn<T, D>),
}

impl<T, const D: usize> BoundaryCondition<T, D> {
    pub fn equilibrium() -> Self {
        Self::EquilibriumInflow { velocity: None }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Periodic => "periodic",
            Self::Outflow => "outflow",
            Self::Reflective => "reflective",
            Self::EquilibriumInflow { .. } => "equilibrium",
            Self::Dirichlet(_) => "dirichlet",
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, Self::Periodic)
    }
}

impl<T, const D: usize> fmt::Debug for BoundaryCondition<T, D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EquilibriumInflow { velocity } => f
                .debug_struct("EquilibriumInflow")
                .field("signal", &velocity.is_some())
                .finish(),
            other => f.write_str(other.name()),
        }
    }
}

/// Lower/upper side of a direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
}

/// Conditions on both sides of every direction: `sides[d][0]` is the lower
/// side of direction `d`, `sides[d][1]` the upper one.
#[derive(Debug, Clone)]
pub struct BoundarySpec<T, const D: usize> {
    pub sides: [[BoundaryCondition<T, D>; 2]; D],
}

impl<T: Real, const D: usize> BoundarySpec<T, D> {
    pub fn new(sides: [[BoundaryCondition<T, D>; 2]; D]) -> Result<Self> {
        let spec = Self { sides };
        spec.validate()?;
        Ok(spec)
    }

    /// Same condition on every side.
    pub fn uniform(bc: BoundaryCondition<T, D>) -> Self {
        Self {
            sides: std::array::from_fn(|_| [bc.clone(), bc.clone()]),
        }
    }

    pub fn periodic() -> Self {
        Self::uniform(BoundaryCondition::Periodic)
    }

    pub fn validate(&self) -> Result<()> {
        for (d, pair) in self.sides.iter().enumerate() {
            if pair[0].is_periodic() != pair[1].is_periodic() {
                return Err(Error::Config(format!(
                    "periodic boundary in direction {d} must be paired, got {} and {}",
                    pair[0].name(),
                    pair[1].name()
                )));
            }
        }
        Ok(())
    }

    pub fn is_periodic(&self, dir: usize) -> bool {
        self.sides[dir][0].is_periodic()
    }

    pub fn get(&self, dir: usize, side: Side) -> &BoundaryCondition<T, D> {
        &self.sides[dir][side as usize]
    }

    pub fn needs_equilibrium(&self) -> bool {
        self.sides
            .iter()
            .flatten()
            .any(|bc| matches!(bc, BoundaryCondition::EquilibriumInflow { .. }))
    }

    /// Ghost state facing the interior trace `interior` at face point `x`.
    pub fn ghost(
        &self,
        dir: usize,
        side: Side,
        interior: &Conserved<T, D>,
        equilibrium: Option<&Conserved<T, D>>,
        x: &[T; D],
        t: T,
        gas: &GasModel<T>,
    ) -> Result<Conserved<T, D>> {
        match self.get(dir, side) {
            BoundaryCondition::Periodic => Err(Error::Config(format!(
                "no ghost for periodic direction {dir}"
            ))),
            BoundaryCondition::Outflow => Ok(*interior),
            BoundaryCondition::Reflective => {
                let mut g = *interior;
                g.mom[dir] = -g.mom[dir];
                Ok(g)
            }
            BoundaryCondition::EquilibriumInflow { velocity } => {
                let eq = equilibrium.ok_or_else(|| {
                    Error::Config("equilibrium boundary requires equilibrium data".into())
                })?;
                match velocity {
                    None => Ok(*eq),
                    Some(signal) => {
                        let u = signal(t);
                        let mut g = *eq;
                        let p = eq.pressure(gas);
                        g.mom[dir] = eq.rho * u;
                        g.energy = p / (gas.gamma - T::one()) + T::half() * eq.rho * u * u;
                        Ok(g)
                    }
                }
            }
            BoundaryCondition::Dirichlet(f) => Ok(f(x, t)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{prim_to_cons, Primitive};

    #[test]
    fn reflective_mirrors_normal_velocity() {
        let gas = GasModel::default();
        let spec = BoundarySpec::<f64, 1>::uniform(BoundaryCondition::Reflective);
        let u = prim_to_cons(&Primitive::new(1.0, [0.3], 1.0), &gas);
        let g = spec.ghost(0, Side::Lower, &u, None, &[0.0], 0.0, &gas).unwrap();
        assert_eq!(g, prim_to_cons(&Primitive::new(1.0, [-0.3], 1.0), &gas));
    }

    #[test]
    fn reflective_2d_keeps_tangential() {
        let gas = GasModel::default();
        let spec = BoundarySpec::<f64, 2>::uniform(BoundaryCondition::Reflective);
        let u = prim_to_cons(&Primitive::new(1.0, [0.3, 0.2], 1.0), &gas);
        let g = spec.ghost(1, Side::Upper, &u, None, &[0.0, 1.0], 0.0, &gas).unwrap();
        assert_eq!(g.mom, [u.mom[0], -u.mom[1]]);
        assert_eq!(g.energy, u.energy);
    }

    #[test]
    fn unmatched_periodic_rejected() {
        let spec = BoundarySpec::<f64, 2>::new([
            [BoundaryCondition::Periodic, BoundaryCondition::Reflective],
            [BoundaryCondition::Outflow, BoundaryCondition::Outflow],
        ]);
        assert!(spec.is_err());
        assert!(BoundarySpec::<f64, 1>::new([[BoundaryCondition::Periodic, BoundaryCondition::Periodic]]).is_ok());
    }

    #[test]
    fn equilibrium_inflow_signal() {
        let gas = GasModel::new(5.0 / 3.0).unwrap();
        let eq = prim_to_cons(&Primitive::at_rest(0.5, 0.4), &gas);
        let signal: Signal<f64> = Arc::new(|t| 2.0 * t);
        let spec = BoundarySpec::<f64, 1>::uniform(BoundaryCondition::EquilibriumInflow {
            velocity: Some(signal),
        });
        let g = spec.ghost(0, Side::Lower, &eq, Some(&eq), &[0.0], 0.25, &gas).unwrap();
        assert_eq!(g.rho, 0.5);
        assert_eq!(g.mom[0], 0.25);
        assert!((g.pressure(&gas) - 0.4).abs() < 1e-15);
        let at_rest = BoundarySpec::<f64, 1>::uniform(BoundaryCondition::equilibrium());
        assert!(at_rest.ghost(0, Side::Lower, &eq, None, &[0.0], 0.0, &gas).is_err());
    }
}
