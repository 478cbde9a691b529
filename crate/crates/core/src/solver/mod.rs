//! Semi-discrete nodal DG operator on uniform tensor-product meshes.
//!
//! The tendency of every node is
//!
//! ```text
//! dU/dt = sum_d (2/h_d) [ -sum_l 2 D_{a,l} F^S_d(U_a, U_l) - (tau_a/w_a)(F*_d - F_d(U_a)) ] + S
//! ```
//!
//! with the well-balanced source `S` built from the precomputed factors in
//! [`EquilibriumData`]. Ablation variants swap the volume term or the source.

mod boundary;
mod grid;

use std::fmt;
use std::str::FromStr;

pub use boundary::{BoundaryCondition, BoundarySpec, Side, Signal, StateFn};
pub use grid::{Field, Grid};

use crate::basis::{GlBasis, MAX_DEGREE};
use crate::equilibrium::{build_equilibrium_data, AnalyticEquilibrium, EquilibriumData, GravityPotential};
use crate::error::{Error, Result};
use crate::fluxes::{ec_flux_nodes, es_flux_lf_prim, lf_alpha, physical_flux_prim, NodeState};
use crate::physics::{checked_prim, entropy_function, entropy_vars_prim, Conserved, GasModel, Primitive};
use crate::scalar::Real;

/// Scheme and its three ablations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeVariant {
    /// Flux differencing, balanced source, positivity limiter.
    WbEsPp,
    /// Pointwise source `-rho grad phi` instead of the balanced one.
    NonWb,
    /// Strong-form divergence `sum_l D_{a,l} F_l` with the matching source.
    NonEs,
    /// No positivity limiter.
    NonPp,
}

impl SchemeVariant {
    pub const ALL: [SchemeVariant; 4] = [Self::WbEsPp, Self::NonWb, Self::NonEs, Self::NonPp];

    pub fn name(self) -> &'static str {
        match self {
            Self::WbEsPp => "wbespp",
            Self::NonWb => "non-wb",
            Self::NonEs => "non-es",
            Self::NonPp => "non-pp",
        }
    }

    pub fn limits(self) -> bool {
        self != Self::NonPp
    }

    pub fn flux_differencing(self) -> bool {
        self != Self::NonEs
    }
}

impl fmt::Display for SchemeVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "wbespp" | "wb-es-pp" => Ok(Self::WbEsPp),
            "non-wb" | "nonwb" => Ok(Self::NonWb),
            "non-es" | "nones" => Ok(Self::NonEs),
            "non-pp" | "nonpp" => Ok(Self::NonPp),
            other => Err(Error::Config(format!("unknown scheme variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SourceKind {
    Balanced,
    Strong,
    Pointwise,
}

/// Face trace: either a node of the field or a boundary ghost.
#[derive(Debug, Clone, Copy)]
struct Trace<T, const D: usize> {
    cons: Conserved<T, D>,
    prim: Primitive<T, D>,
    node: Option<usize>,
}

/// Ghost state produced by a boundary condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhostTrace<T, const D: usize> {
    pub dir: usize,
    pub side: Side,
    /// Interior node the ghost faces.
    pub node: usize,
    pub state: Conserved<T, D>,
}

/// Discretization of one case: mesh, operators, gravity and boundary data.
#[derive(Debug, Clone)]
pub struct Scheme<T, const D: usize> {
    grid: Grid<T, D>,
    basis: GlBasis<T>,
    gas: GasModel<T>,
    variant: SchemeVariant,
    boundary: BoundarySpec<T, D>,
    potential: GravityPotential<T, D>,
    equilibrium: Option<EquilibriumData<T, D>>,
    source: SourceKind,
    coords: Vec<[T; D]>,
    grad_phi: Vec<[T; D]>,
    /// `|source factor|` per node and direction in the scaled form used by the
    /// positivity time-step bound.
    source_bounds: Vec<[T; D]>,
    line_starts: [Vec<usize>; D],
    scale: [T; D],
}

impl<T: Real, const D: usize> Scheme<T, D> {
    pub fn new(
        grid: Grid<T, D>,
        gas: GasModel<T>,
        potential: GravityPotential<T, D>,
        equilibrium: Option<&AnalyticEquilibrium<T, D>>,
        boundary: BoundarySpec<T, D>,
        variant: SchemeVariant,
    ) -> Result<Self> {
        let basis = GlBasis::new(grid.degree())?;
        let eq_data = match equilibrium {
            Some(eq) => {
                if eq.potential != potential {
                    return Err(Error::Config(
                        "equilibrium potential differs from the scheme potential".into(),
                    ));
                }
                Some(build_equilibrium_data(&grid, &basis, eq, &gas)?)
            }
            None => None,
        };
        Self::from_parts(grid, basis, gas, potential, eq_data, boundary, variant)
    }

    /// Builds a scheme around precomputed equilibrium data.
    pub fn from_parts(
        grid: Grid<T, D>,
        basis: GlBasis<T>,
        gas: GasModel<T>,
        potential: GravityPotential<T, D>,
        equilibrium: Option<EquilibriumData<T, D>>,
        boundary: BoundarySpec<T, D>,
        variant: SchemeVariant,
    ) -> Result<Self> {
        boundary.validate()?;
        if basis.degree() != grid.degree() {
            return Err(Error::Config("basis degree differs from grid degree".into()));
        }
        if boundary.needs_equilibrium() && equilibrium.is_none() {
            return Err(Error::Config(
                "equilibrium boundary condition without an equilibrium".into(),
            ));
        }
        if let Some(eq) = &equilibrium {
            if eq.states.len() != grid.num_nodes() {
                return Err(Error::ShapeMismatch {
                    expected: grid.num_nodes(),
                    found: eq.states.len(),
                });
            }
        }
        let coords = grid.all_coords(basis.nodes());
        if let Some(x) = coords.iter().find(|x| !potential.is_regular_at(x)) {
            return Err(Error::Equilibrium(format!(
                "potential gradient undefined at node {:?}",
                x.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect::<Vec<_>>()
            )));
        }
        let grad_phi: Vec<[T; D]> = coords.iter().map(|x| potential.gradient(x)).collect();

        let source = match (&equilibrium, variant) {
            (None, _) | (_, SchemeVariant::NonWb) => SourceKind::Pointwise,
            (Some(_), SchemeVariant::NonEs) => SourceKind::Strong,
            (Some(_), _) => SourceKind::Balanced,
        };
        let spacing = grid.spacing();
        let source_bounds = (0..coords.len())
            .map(|i| {
                std::array::from_fn(|d| match (source, &equilibrium) {
                    (SourceKind::Balanced, Some(eq)) => eq.theta[i][d].abs(),
                    (SourceKind::Strong, Some(eq)) => eq.theta_strong[i][d].abs(),
                    _ => (T::half() * spacing[d] * grad_phi[i][d]).abs(),
                })
            })
            .collect();

        let line_starts = std::array::from_fn(|d| {
            (0..grid.nodes_per_cell())
                .filter(|&a| grid.node_multi(a)[d] == 0)
                .collect()
        });
        let scale = std::array::from_fn(|d| T::two() / spacing[d]);
        Ok(Self {
            grid,
            basis,
            gas,
            variant,
            boundary,
            potential,
            equilibrium,
            source,
            coords,
            grad_phi,
            source_bounds,
            line_starts,
            scale,
        })
    }

    pub fn grid(&self) -> &Grid<T, D> {
        &self.grid
    }

    pub fn basis(&self) -> &GlBasis<T> {
        &self.basis
    }

    pub fn gas(&self) -> &GasModel<T> {
        &self.gas
    }

    pub fn variant(&self) -> SchemeVariant {
        self.variant
    }

    pub fn boundary(&self) -> &BoundarySpec<T, D> {
        &self.boundary
    }

    pub fn potential(&self) -> &GravityPotential<T, D> {
        &self.potential
    }

    pub fn equilibrium(&self) -> Option<&EquilibriumData<T, D>> {
        self.equilibrium.as_ref()
    }

    /// Node coordinates in field order.
    pub fn coords(&self) -> &[[T; D]] {
        &self.coords
    }

    pub fn source_bounds(&self) -> &[[T; D]] {
        &self.source_bounds
    }

    /// Whether the source is the balanced (or strong-form balanced) one.
    pub fn is_well_balanced(&self) -> bool {
        self.source != SourceKind::Pointwise
    }

    /// The nodal equilibrium interpolant as a field.
    pub fn equilibrium_field(&self) -> Option<Field<T, D>> {
        self.equilibrium
            .as_ref()
            .map(|eq| Field::new(eq.states.clone()))
    }

    /// Nodal interpolant of a pointwise function.
    pub fn project(&self, f: impl Fn(&[T; D]) -> Conserved<T, D>) -> Field<T, D> {
        Field::new(self.coords.iter().map(f).collect())
    }

    fn check_len(&self, field: &Field<T, D>) -> Result<()> {
        if field.len() != self.grid.num_nodes() {
            return Err(Error::ShapeMismatch {
                expected: self.grid.num_nodes(),
                found: field.len(),
            });
        }
        Ok(())
    }

    fn node_states(&self, field: &Field<T, D>, t: T) -> Result<Vec<NodeState<T, D>>> {
        let npc = self.grid.nodes_per_cell();
        field
            .values
            .iter()
            .enumerate()
            .map(|(g, u)| {
                checked_prim(u, &self.gas)
                    .map(|w| NodeState::from_parts(*u, w))
                    .map_err(|_| Error::InadmissibleNode {
                        cell: g / npc,
                        node: g % npc,
                        time: t.to_f64().unwrap_or(f64::NAN),
                        rho: u.rho.to_f64().unwrap_or(f64::NAN),
                        p: u.pressure(&self.gas).to_f64().unwrap_or(f64::NAN),
                    })
            })
            .collect()
    }

    fn ghost_trace(
        &self,
        dir: usize,
        side: Side,
        node: usize,
        interior: &Conserved<T, D>,
        t: T,
    ) -> Result<Trace<T, D>> {
        let eq = self.equilibrium.as_ref().map(|e| &e.states[node]);
        let cons = self
            .boundary
            .ghost(dir, side, interior, eq, &self.coords[node], t, &self.gas)?;
        let prim = checked_prim(&cons, &self.gas).map_err(|_| Error::InadmissibleNode {
            cell: node / self.grid.nodes_per_cell(),
            node: node % self.grid.nodes_per_cell(),
            time: t.to_f64().unwrap_or(f64::NAN),
            rho: cons.rho.to_f64().unwrap_or(f64::NAN),
            p: cons.pressure(&self.gas).to_f64().unwrap_or(f64::NAN),
        })?;
        Ok(Trace {
            cons,
            prim,
            node: None,
        })
    }

    /// Calls `f(dir, left, right)` once for every face node of the mesh.
    fn visit_faces(
        &self,
        nodes: &[NodeState<T, D>],
        t: T,
        mut f: impl FnMut(usize, &Trace<T, D>, &Trace<T, D>),
    ) -> Result<()> {
        let npc = self.grid.nodes_per_cell();
        let k = self.grid.degree();
        let cells = self.grid.cells();
        let trace = |g: usize| Trace {
            cons: nodes[g].cons,
            prim: nodes[g].prim,
            node: Some(g),
        };
        for d in 0..D {
            let stride = self.grid.node_stride(d);
            let cell_stride: usize = cells[..d].iter().product();
            let periodic = self.boundary.is_periodic(d);
            for c in 0..self.grid.num_cells() {
                let m = self.grid.cell_multi(c);
                let upper = if m[d] + 1 < cells[d] {
                    Some(c + cell_stride)
                } else if periodic {
                    Some(c - (cells[d] - 1) * cell_stride)
                } else {
                    None
                };
                for &a0 in &self.line_starts[d] {
                    let inner_hi = c * npc + a0 + k * stride;
                    let left = trace(inner_hi);
                    match upper {
                        Some(nb) => f(d, &left, &trace(nb * npc + a0)),
                        None => {
                            let ghost = self.ghost_trace(d, Side::Upper, inner_hi, &left.cons, t)?;
                            f(d, &left, &ghost);
                        }
                    }
                    if m[d] == 0 && !periodic {
                        let inner_lo = c * npc + a0;
                        let right = trace(inner_lo);
                        let ghost = self.ghost_trace(d, Side::Lower, inner_lo, &right.cons, t)?;
                        f(d, &ghost, &right);
                    }
                }
            }
        }
        Ok(())
    }

    /// Ghost states of every boundary face node at time `t`.
    pub fn ghost_traces(&self, field: &Field<T, D>, t: T) -> Result<Vec<GhostTrace<T, D>>> {
        self.check_len(field)?;
        let nodes = self.node_states(field, t)?;
        let mut out = Vec::new();
        self.visit_faces(&nodes, t, |dir, l, r| {
            if let (None, Some(node)) = (l.node, r.node) {
                out.push(GhostTrace { dir, side: Side::Lower, node, state: l.cons });
            }
            if let (Some(node), None) = (l.node, r.node) {
                out.push(GhostTrace { dir, side: Side::Upper, node, state: r.cons });
            }
        })?;
        Ok(out)
    }

    /// Semi-discrete tendency `dU/dt` at time `t`.
    pub fn rhs(&self, field: &Field<T, D>, t: T) -> Result<Field<T, D>> {
        self.check_len(field)?;
        let nodes = self.node_states(field, t)?;
        let mut out = vec![Conserved::zero(); nodes.len()];
        self.volume_term(&nodes, &mut out);
        self.surface_term(&nodes, t, &mut out)?;
        self.source_term(&nodes, &mut out);
        Ok(Field::new(out))
    }

    fn volume_term(&self, nodes: &[NodeState<T, D>], out: &mut [Conserved<T, D>]) {
        let npc = self.grid.nodes_per_cell();
        let n1 = self.grid.nodes_1d();
        let two = T::two();
        let mut idx = [0usize; MAX_DEGREE + 1];
        let mut acc = [Conserved::<T, D>::zero(); MAX_DEGREE + 1];
        let mut flux = [Conserved::<T, D>::zero(); MAX_DEGREE + 1];
        for c in 0..self.grid.num_cells() {
            let base = c * npc;
            for d in 0..D {
                let stride = self.grid.node_stride(d);
                let s = self.scale[d];
                for &a0 in &self.line_starts[d] {
                    for l in 0..n1 {
                        idx[l] = base + a0 + l * stride;
                    }
                    if self.variant.flux_differencing() {
                        for i in 0..n1 {
                            let ni = &nodes[idx[i]];
                            acc[i] = physical_flux_prim(&ni.cons, &ni.prim, d) * (two * self.basis.d(i, i));
                        }
                        for i in 0..n1 {
                            for j in i + 1..n1 {
                                let f = ec_flux_nodes(&nodes[idx[i]], &nodes[idx[j]], &self.gas, d);
                                acc[i] += f * (two * self.basis.d(i, j));
                                acc[j] += f * (two * self.basis.d(j, i));
                            }
                        }
                    } else {
                        for l in 0..n1 {
                            let nl = &nodes[idx[l]];
                            flux[l] = physical_flux_prim(&nl.cons, &nl.prim, d);
                        }
                        for i in 0..n1 {
                            let mut sum = Conserved::zero();
                            for l in 0..n1 {
                                sum += flux[l] * self.basis.d(i, l);
                            }
                            acc[i] = sum;
                        }
                    }
                    for i in 0..n1 {
                        out[idx[i]] -= acc[i] * s;
                    }
                }
            }
        }
    }

    fn surface_term(&self, nodes: &[NodeState<T, D>], t: T, out: &mut [Conserved<T, D>]) -> Result<()> {
        let w_end = self.basis.weights()[0];
        let gas = self.gas;
        let scale = self.scale;
        self.visit_faces(nodes, t, |d, l, r| {
            let fstar = es_flux_lf_prim(&l.cons, &l.prim, &r.cons, &r.prim, &gas, d);
            let coef = scale[d] / w_end;
            if let Some(i) = l.node {
                out[i] -= (fstar - physical_flux_prim(&l.cons, &l.prim, d)) * coef;
            }
            if let Some(j) = r.node {
                out[j] += (fstar - physical_flux_prim(&r.cons, &r.prim, d)) * coef;
            }
        })
    }

    fn source_term(&self, nodes: &[NodeState<T, D>], out: &mut [Conserved<T, D>]) {
        match (self.source, &self.equilibrium) {
            (SourceKind::Balanced, Some(eq)) => self.balanced_source(&eq.theta, nodes, out),
            (SourceKind::Strong, Some(eq)) => self.balanced_source(&eq.theta_strong, nodes, out),
            _ => {
                for (g, n) in nodes.iter().enumerate() {
                    let gp = &self.grad_phi[g];
                    for d in 0..D {
                        out[g].mom[d] = out[g].mom[d] - n.cons.rho * gp[d];
                        out[g].energy = out[g].energy - n.cons.mom[d] * gp[d];
                    }
                }
            }
        }
    }

    fn balanced_source(&self, theta: &[[T; D]], nodes: &[NodeState<T, D>], out: &mut [Conserved<T, D>]) {
        for (g, n) in nodes.iter().enumerate() {
            for d in 0..D {
                let th = self.scale[d] * theta[g][d];
                out[g].mom[d] = out[g].mom[d] + n.cons.rho * th;
                out[g].energy = out[g].energy + n.cons.mom[d] * th;
            }
        }
    }

    /// Largest dissipation speed per direction: nodal `|u_d| + c` and the
    /// interface coefficients of the Lax–Friedrichs flux.
    pub fn wave_speeds(&self, field: &Field<T, D>, t: T) -> Result<[T; D]> {
        self.check_len(field)?;
        let nodes = self.node_states(field, t)?;
        let mut alpha = [T::zero(); D];
        for n in &nodes {
            let c = n.sound_speed(&self.gas);
            for d in 0..D {
                alpha[d] = alpha[d].max(n.prim.vel[d].abs() + c);
            }
        }
        let gas = self.gas;
        self.visit_faces(&nodes, t, |d, l, r| {
            alpha[d] = alpha[d].max(lf_alpha(&l.prim, &r.prim, &gas, d));
        })?;
        Ok(alpha)
    }

    /// Quadrature weight of every node including the Jacobian.
    pub fn node_weights(&self) -> Vec<T> {
        let tw = self.grid.tensor_weights(self.basis.weights());
        let jac = self.grid.cell_volume() / T::lit(2f64.powi(D as i32));
        let npc = tw.len();
        (0..self.grid.num_nodes()).map(|g| tw[g % npc] * jac).collect()
    }

    /// Quadrature of the mathematical entropy over the domain.
    pub fn total_entropy(&self, field: &Field<T, D>) -> Result<T> {
        self.check_len(field)?;
        let w = self.node_weights();
        let mut sum = T::zero();
        for (u, wi) in field.values.iter().zip(&w) {
            sum = sum + *wi * entropy_function(u, &self.gas)?;
        }
        Ok(sum)
    }

    /// Domain integral of every conserved component.
    pub fn total_conserved(&self, field: &Field<T, D>) -> Conserved<T, D> {
        let w = self.node_weights();
        field
            .values
            .iter()
            .zip(&w)
            .fold(Conserved::zero(), |acc, (u, wi)| acc + *u * *wi)
    }

    /// Semi-discrete entropy production `sum w V . dU/dt`.
    pub fn entropy_rate(&self, field: &Field<T, D>, t: T) -> Result<T> {
        let rhs = self.rhs(field, t)?;
        let w = self.node_weights();
        let mut sum = T::zero();
        for ((u, du), wi) in field.values.iter().zip(&rhs.values).zip(&w) {
            let v = entropy_vars_prim(&checked_prim(u, &self.gas)?, &self.gas);
            sum = sum + *wi * v.dot(du);
        }
        Ok(sum)
    }
}
