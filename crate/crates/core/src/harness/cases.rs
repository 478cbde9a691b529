//! Benchmark catalog. Every case is a plain [`CaseSpec`] whose fields can be
//! overridden before running.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::equilibrium::{AnalyticEquilibrium, GravityPotential, HydrostaticProfile};
use crate::error::{Error, Result};
use crate::physics::{prim_to_cons, Conserved, GasModel, Primitive};
use crate::solver::{BoundaryCondition, BoundarySpec, Field, Grid, Scheme, SchemeVariant, Signal};
use crate::timestep::StepControl;

/// Initial state at a node, given the node coordinate and the centre of the
/// cell that owns it. The centre picks the side of a jump that lies exactly on
/// a face, so that each cell interpolates its own one-sided limit.
pub type InitialFn<const D: usize> = Arc<dyn Fn(&[f64; D], &[f64; D]) -> Conserved<f64, D> + Send + Sync>;
pub type ExactFn<const D: usize> = Arc<dyn Fn(&[f64; D], f64) -> Conserved<f64, D> + Send + Sync>;

/// Complete description of one run.
#[derive(Clone)]
pub struct CaseSpec<const D: usize> {
    pub name: String,
    pub gas: GasModel<f64>,
    pub lower: [f64; D],
    pub upper: [f64; D],
    pub cells: [usize; D],
    pub degree: usize,
    pub potential: GravityPotential<f64, D>,
    pub equilibrium: Option<AnalyticEquilibrium<f64, D>>,
    pub boundary: BoundarySpec<f64, D>,
    pub initial: InitialFn<D>,
    /// Exact solution, when known.
    pub exact: Option<ExactFn<D>>,
    pub t_final: f64,
    /// Extra output times strictly before `t_final`.
    pub snapshots: Vec<f64>,
    pub variant: SchemeVariant,
    pub control: StepControl<f64>,
}

impl<const D: usize> fmt::Debug for CaseSpec<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CaseSpec")
            .field("name", &self.name)
            .field("gamma", &self.gas.gamma)
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .field("cells", &self.cells)
            .field("degree", &self.degree)
            .field("potential", &self.potential)
            .field("equilibrium", &self.equilibrium)
            .field("boundary", &self.boundary)
            .field("t_final", &self.t_final)
            .field("variant", &self.variant)
            .finish()
    }
}

impl<const D: usize> CaseSpec<D> {
    /// Same number of cells in every direction.
    pub fn with_cells(mut self, n: usize) -> Self {
        self.cells = [n; D];
        self
    }

    pub fn with_cell_counts(mut self, cells: [usize; D]) -> Self {
        self.cells = cells;
        self
    }

    pub fn with_degree(mut self, k: usize) -> Self {
        self.degree = k;
        self
    }

    pub fn with_variant(mut self, v: SchemeVariant) -> Self {
        self.variant = v;
        self
    }

    pub fn with_t_final(mut self, t: f64) -> Self {
        self.t_final = t;
        self.snapshots.retain(|&s| s < t);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.control.validate()?;
        self.boundary.validate()?;
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::Config(format!("final time must be positive, got {}", self.t_final)));
        }
        if let Some(s) = self.snapshots.iter().find(|&&s| !(s > 0.0 && s < self.t_final)) {
            return Err(Error::Config(format!("snapshot time {s} outside (0, T)")));
        }
        if self.gas.gamma <= 1.0 {
            return Err(Error::Config("gamma must exceed 1".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid<f64, D>> {
        Grid::new(self.lower, self.upper, self.cells, self.degree)
    }

    pub fn build_scheme(&self) -> Result<Scheme<f64, D>> {
        self.validate()?;
        Scheme::new(
            self.grid()?,
            self.gas,
            self.potential,
            self.equilibrium.as_ref(),
            self.boundary.clone(),
            self.variant,
        )
    }

    pub fn initial_field(&self, scheme: &Scheme<f64, D>) -> Field<f64, D> {
        let grid = scheme.grid();
        let npc = grid.nodes_per_cell();
        let lower = grid.lower();
        let h = grid.spacing();
        let values = scheme
            .coords()
            .iter()
            .enumerate()
            .map(|(g, x)| {
                let ci = grid.cell_multi(g / npc);
                let centre: [f64; D] = std::array::from_fn(|d| lower[d] + (ci[d] as f64 + 0.5) * h[d]);
                (self.initial)(x, &centre)
            })
            .collect();
        Field::new(values)
    }

    /// Nodal reference at time `t`: the exact solution if known, otherwise the
    /// equilibrium interpolant.
    pub fn reference_field(&self, scheme: &Scheme<f64, D>, t: f64) -> Option<Field<f64, D>> {
        match &self.exact {
            Some(exact) => Some(scheme.project(|x| exact(x, t))),
            None => scheme.equilibrium_field(),
        }
    }
}

/// A catalog entry of either dimension.
#[derive(Debug, Clone)]
pub enum Case {
    One(CaseSpec<1>),
    Two(CaseSpec<2>),
}

pub const CASE_NAMES: [&str; 11] = [
    "eqbm1",
    "eqbm2",
    "eqbm2-pert",
    "sod1d",
    "rarefaction1d",
    "wb2d",
    "wb2d-pert",
    "accuracy2d",
    "rarefaction2d",
    "rayleigh-taylor",
    "inertia-gravity",
];

impl Case {
    pub fn by_name(name: &str) -> Result<Self> {
        Ok(match name {
            "eqbm1" => Case::One(eqbm1()),
            "eqbm2" => Case::One(eqbm2()),
            "eqbm2-pert" => Case::One(eqbm2_perturbed()),
            "sod1d" => Case::One(sod()),
            "rarefaction1d" => Case::One(double_rarefaction_1d()),
            "wb2d" => Case::Two(wb_2d()),
            "wb2d-pert" => Case::Two(wb_2d_perturbed()),
            "accuracy2d" => Case::Two(accuracy_2d()),
            "rarefaction2d" => Case::Two(double_rarefaction_2d()),
            "rayleigh-taylor" => Case::Two(rayleigh_taylor()),
            "inertia-gravity" => Case::Two(inertia_gravity()),
            other => {
                return Err(Error::Config(format!(
                    "unknown case `{other}`; known cases: {}",
                    CASE_NAMES.join(", ")
                )))
            }
        })
    }

    pub fn name(&self) -> &str {
        match self {
            Case::One(c) => &c.name,
            Case::Two(c) => &c.name,
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Case::One(_) => 1,
            Case::Two(_) => 2,
        }
    }
}

fn at_rest_field<const D: usize>(eq: AnalyticEquilibrium<f64, D>, gas: GasModel<f64>) -> InitialFn<D> {
    Arc::new(move |x, _| {
        prim_to_cons(
            &eq.primitive(x, &gas).expect("equilibrium admissible on the case domain"),
            &gas,
        )
    })
}

/// Side of a jump at `at` for a node at `x` in the cell centred at `centre`.
fn left_of(x: f64, centre: f64, at: f64) -> bool {
    x < at || (x == at && centre < at)
}

fn linear_1d(g: f64) -> GravityPotential<f64, 1> {
    GravityPotential::Linear { slope: [g] }
}

fn eqbm_case(name: &str, profile: HydrostaticProfile<f64>) -> CaseSpec<1> {
    let gas = GasModel::new(5.0 / 3.0).expect("valid gamma");
    let pot = linear_1d(1.0);
    let eq = AnalyticEquilibrium::new(pot, profile);
    CaseSpec {
        name: name.into(),
        gas,
        lower: [0.0],
        upper: [2.0],
        cells: [20],
        degree: 2,
        potential: pot,
        equilibrium: Some(eq),
        boundary: BoundarySpec::uniform(BoundaryCondition::equilibrium()),
        initial: at_rest_field(eq, gas),
        exact: None,
        t_final: 4.0,
        snapshots: Vec::new(),
        variant: SchemeVariant::WbEsPp,
        control: StepControl::default(),
    }
}

/// Isothermal equilibrium `rho = p = exp(-x)` on `[0, 2]`, gamma = 5/3.
pub fn eqbm1() -> CaseSpec<1> {
    eqbm_case("eqbm1", HydrostaticProfile::isothermal(1.0, 1.0).expect("valid constants"))
}

/// Isentropic equilibrium `rho = (1 - 0.4 x)^1.5`, `p = rho^(5/3)` on `[0, 2]`.
pub fn eqbm2() -> CaseSpec<1> {
    eqbm_case(
        "eqbm2",
        HydrostaticProfile::isentropic(1.0, 1.0, 5.0 / 3.0).expect("valid constants"),
    )
}

/// `eqbm2` driven by the inflow velocity `1e-6 sin(4 pi t)` at `x = 0`.
pub fn eqbm2_perturbed() -> CaseSpec<1> {
    let mut c = eqbm2();
    c.name = "eqbm2-pert".into();
    let signal: Signal<f64> = Arc::new(|t| 1e-6 * (4.0 * PI * t).sin());
    c.boundary.sides[0][0] = BoundaryCondition::EquilibriumInflow { velocity: Some(signal) };
    c.cells = [200];
    c.t_final = 1.5;
    c
}

/// Sod shock tube under `phi = x` on `[-1, 1]` with reflective walls.
pub fn sod() -> CaseSpec<1> {
    let gas = GasModel::default();
    let pot = linear_1d(1.0);
    let eq = AnalyticEquilibrium::new(pot, HydrostaticProfile::isothermal(1.0, 1.0).expect("valid constants"));
    CaseSpec {
        name: "sod1d".into(),
        gas,
        lower: [-1.0],
        upper: [1.0],
        cells: [200],
        degree: 2,
        potential: pot,
        equilibrium: Some(eq),
        boundary: BoundarySpec::uniform(BoundaryCondition::Reflective),
        initial: Arc::new(move |x, c| {
            let w = if left_of(x[0], c[0], 0.0) {
                Primitive::new(1.0, [0.0], 1.0)
            } else {
                Primitive::new(0.125, [0.0], 0.1)
            };
            prim_to_cons(&w, &gas)
        }),
        exact: None,
        t_final: 0.4,
        snapshots: Vec::new(),
        variant: SchemeVariant::WbEsPp,
        control: StepControl::default(),
    }
}

/// Double rarefaction `(7, -+1, 0.2)` under `phi = x^2 / 2` on `[-1, 1]`.
pub fn double_rarefaction_1d() -> CaseSpec<1> {
    let gas = GasModel::default();
    let pot = GravityPotential::QuadraticRadial { scale: 1.0 };
    let eq = AnalyticEquilibrium::new(pot, HydrostaticProfile::isothermal(1.0, 1.0).expect("valid constants"));
    CaseSpec {
        name: "rarefaction1d".into(),
        gas,
        lower: [-1.0],
        upper: [1.0],
        cells: [800],
        degree: 2,
        potential: pot,
        equilibrium: Some(eq),
        boundary: BoundarySpec::uniform(BoundaryCondition::Outflow),
        initial: Arc::new(move |x, c| {
            let u = if left_of(x[0], c[0], 0.0) { -1.0 } else { 1.0 };
            prim_to_cons(&Primitive::new(7.0, [u], 0.2), &gas)
        }),
        exact: None,
        t_final: 0.6,
        snapshots: Vec::new(),
        variant: SchemeVariant::WbEsPp,
        control: StepControl::default(),
    }
}

fn wb_2d_equilibrium() -> AnalyticEquilibrium<f64, 2> {
    AnalyticEquilibrium::new(
        GravityPotential::Linear { slope: [1.0, 1.0] },
        HydrostaticProfile::isothermal(1.21, 1.0).expect("valid constants"),
    )
}

/// Isothermal equilibrium `rho0 = 1.21, p0 = 1` under `phi = x + y` on the unit square.
pub fn wb_2d() -> CaseSpec<2> {
    let gas = GasModel::default();
    let eq = wb_2d_equilibrium();
    CaseSpec {
        name: "wb2d".into(),
        gas,
        lower: [0.0, 0.0],
        upper: [1.0, 1.0],
        cells: [20, 20],
        degree: 2,
        potential: eq.potential,
        equilibrium: Some(eq),
        boundary: BoundarySpec::uniform(BoundaryCondition::equilibrium()),
        initial: at_rest_field(eq, gas),
        exact: None,
        t_final: 1.0,
        snapshots: Vec::new(),
        variant: SchemeVariant::WbEsPp,
        control: StepControl::default(),
    }
}

/// `wb2d` plus the pressure bump `0.001 exp(-100((x - 0.3)^2 + (y - 0.3)^2))`.
pub fn wb_2d_perturbed() -> CaseSpec<2> {
    let mut c = wb_2d();
    c.name = "wb2d-pert".into();
    c.cells = [100, 100];
    c.t_final = 0.15;
    let eq = wb_2d_equilibrium();
    let gas = c.gas;
    c.initial = Arc::new(move |x, _| {
        let mut w = eq.primitive(x, &gas).expect("admissible equilibrium");
        w.p += 0.001 * (-100.0 * ((x[0] - 0.3).powi(2) + (x[1] - 0.3).powi(2))).exp();
        prim_to_cons(&w, &gas)
    });
    c
}

/// Smooth travelling wave under `phi = x + y` with known exact solution.
pub fn accuracy_2d() -> CaseSpec<2> {
    let gas = GasModel::default();
    let exact: ExactFn<2> = Arc::new(move |x, t| {
        let s = x[0] + x[1] - 2.0 * t;
        let w = Primitive::new(
            1.0 + 0.2 * s.sin(),
            [1.0, 1.0],
            20.0 - x[0] - x[1] + 2.0 * t + 0.2 * s.cos(),
        );
        prim_to_cons(&w, &gas)
    });
    let init = exact.clone();
    let ghost = exact.clone();
    CaseSpec {
        name: "accuracy2d".into(),
        gas,
        lower: [0.0, 0.0],
        upper: [2.0 * PI, 2.0 * PI],
        cells: [20, 20],
        degree: 2,
        potential: GravityPotential::Linear { slope: [1.0, 1.0] },
        equilibrium: None,
        boundary: BoundarySpec::uniform(BoundaryCondition::Dirichlet(Arc::new(move |x, t| ghost(x, t)))),
        initial: Arc::new(move |x, _| init(x, 0.0)),
        exact: Some(exact),
        t_final: 0.5,
        snapshots: Vec::new(),
        variant: SchemeVariant::WbEsPp,
        control: StepControl::default(),
    }
}

/// Two-dimensional double rarefaction under `phi = (x^2 + y^2) / 2`.
pub fn double_rarefaction_2d() -> CaseSpec<2> {
    let gas = GasModel::default();
    let pot = GravityPotential::QuadraticRadial { scale: 1.0 };
    let eq = AnalyticEquilibrium::new(pot, HydrostaticProfile::isothermal(1.0, 0.4).expect("valid constants"));
    CaseSpec {
        name: "rarefaction2d".into(),
        gas,
        lower: [-0.5, -0.5],
        upper: [0.5, 0.5],
        cells: [200, 200],
        degree: 2,
        potential: pot,
        equilibrium: Some(eq),
        boundary: BoundarySpec::uniform(BoundaryCondition::Outflow),
        initial: Arc::new(move |x, c| {
            let mut w = eq.primitive(x, &gas).expect("admissible equilibrium");
            w.vel = [if left_of(x[0], c[0], 0.0) { -2.0 } else { 2.0 }, 0.0];
            prim_to_cons(&w, &gas)
        }),
        exact: None,
        t_final: 0.1,
        snapshots: Vec::new(),
        variant: SchemeVariant::WbEsPp,
        control: StepControl::default(),
    }
}

/// Parameters of the radial Rayleigh–Taylor setup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayleighTaylorParams {
    pub r0: f64,
    pub eta: f64,
    pub delta_rho: f64,
    pub modes: f64,
}

impl Default for RayleighTaylorParams {
    fn default() -> Self {
        Self {
            r0: 6.0,
            eta: 0.02,
            delta_rho: 0.1,
            modes: 20.0,
        }
    }
}

impl RayleighTaylorParams {
    pub fn alpha(&self) -> f64 {
        self.r0.exp() / (self.r0.exp() + self.delta_rho)
    }

    /// Perturbed interface radius at polar angle `theta`.
    pub fn interface(&self, theta: f64) -> f64 {
        self.r0 * (1.0 + self.eta * (self.modes * theta).cos())
    }

    /// Initial `(rho, p)`: `exp(-r)` inside. Density switches to the outer
    /// profile at `r0`, pressure at the perturbed interface with an extra
    /// factor `1 / alpha`.
    pub fn state(&self, x: &[f64; 2]) -> (f64, f64) {
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let theta = x[1].atan2(x[0]);
        let a = self.alpha();
        let outer = (-r / a + self.r0 * (1.0 - a) / a).exp();
        let rho = if r <= self.r0 { (-r).exp() } else { outer };
        let p = if r < self.interface(theta) { (-r).exp() } else { outer / a };
        (rho, p)
    }
}

/// Radial Rayleigh–Taylor instability under `phi = r`. The mesh is offset so
/// that no node sits at the origin.
pub fn rayleigh_taylor() -> CaseSpec<2> {
    let gas = GasModel::default();
    let pot = GravityPotential::Radial;
    let eq = AnalyticEquilibrium::new(pot, HydrostaticProfile::isothermal(1.0, 1.0).expect("valid constants"));
    let params = RayleighTaylorParams::default();
    let state = move |x: &[f64; 2]| {
        let (rho, p) = params.state(x);
        prim_to_cons(&Primitive::at_rest(rho, p), &gas)
    };
    CaseSpec {
        name: "rayleigh-taylor".into(),
        gas,
        lower: [-10.05, -10.05],
        upper: [9.95, 9.95],
        cells: [120, 120],
        degree: 2,
        potential: pot,
        equilibrium: Some(eq),
        boundary: BoundarySpec::uniform(BoundaryCondition::Dirichlet(Arc::new(move |x, _| state(x)))),
        initial: Arc::new(move |x, _| state(x)),
        exact: None,
        t_final: 5.0,
        snapshots: vec![2.9, 3.8],
        variant: SchemeVariant::WbEsPp,
        control: StepControl::default(),
    }
}

/// Parameters of the inertia-gravity wave channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertiaGravityParams {
    pub p0: f64,
    pub t0: f64,
    pub brunt: f64,
    pub r_gas: f64,
    pub g: f64,
    pub theta_c: f64,
    pub h_c: f64,
    pub x_c: f64,
    pub a_c: f64,
    pub u0: f64,
}

impl Default for InertiaGravityParams {
    fn default() -> Self {
        Self {
            p0: 1e5,
            t0: 300.0,
            brunt: 0.01,
            r_gas: 287.058,
            g: 9.8,
            theta_c: 0.01,
            h_c: 1e4,
            x_c: 1e5,
            a_c: 5e3,
            u0: 20.0,
        }
    }
}

impl InertiaGravityParams {
    pub fn profile(&self) -> HydrostaticProfile<f64> {
        HydrostaticProfile::inertia_gravity(self.p0, self.t0, self.brunt, self.r_gas, self.g)
            .expect("valid constants")
    }

    /// Background potential temperature.
    pub fn theta_background(&self, y: f64) -> f64 {
        crate::equilibrium::inertia_gravity_theta(y, self.t0, self.brunt, self.g)
    }

    /// Initial potential temperature perturbation.
    pub fn theta_perturbation(&self, x: &[f64; 2]) -> f64 {
        self.theta_c * (PI * x[1] / self.h_c).sin() / (1.0 + ((x[0] - self.x_c) / self.a_c).powi(2))
    }

    /// Potential temperature of a state at height `y`: `p0 Pi^(1/(gamma-1)) / (R rho)`
    /// with the Exner function taken from the pressure.
    pub fn potential_temperature(&self, rho: f64, p: f64, gamma: f64) -> f64 {
        p / (self.r_gas * rho) * (self.p0 / p).powf((gamma - 1.0) / gamma)
    }
}

/// Inertia-gravity waves in a stratified channel, periodic in `x`, walls in `y`.
pub fn inertia_gravity() -> CaseSpec<2> {
    let params = InertiaGravityParams::default();
    let gas = GasModel::default().with_gas_constant(params.r_gas);
    let pot = GravityPotential::vertical(params.g);
    let eq = AnalyticEquilibrium::new(pot, params.profile());
    CaseSpec {
        name: "inertia-gravity".into(),
        gas,
        lower: [0.0, 0.0],
        upper: [3e5, 1e4],
        cells: [1200, 40],
        degree: 2,
        potential: pot,
        equilibrium: Some(eq),
        boundary: BoundarySpec::new([
            [BoundaryCondition::Periodic, BoundaryCondition::Periodic],
            [BoundaryCondition::Reflective, BoundaryCondition::Reflective],
        ])
        .expect("paired periodic sides"),
        initial: Arc::new(move |x, _| {
            let w = eq.primitive(x, &gas).expect("admissible background");
            let theta = params.theta_background(x[1]);
            // Same Exner function and pressure, perturbed potential temperature.
            let rho = w.rho * theta / (theta + params.theta_perturbation(x));
            prim_to_cons(&Primitive::new(rho, [params.u0, 0.0], w.p), &gas)
        }),
        exact: None,
        t_final: 3000.0,
        snapshots: Vec::new(),
        variant: SchemeVariant::WbEsPp,
        control: StepControl::default(),
    }
}
