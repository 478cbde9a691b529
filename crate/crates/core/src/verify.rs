//! Randomized property suites for the operators, fluxes and limiter, shared
//! by the `verify` command and the test suite.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::GlBasis;
use crate::error::Result;
use crate::fluxes::{ec_flux, es_flux_lf};
use crate::harness::{cases, run_case, RunError, RunOptions};
use crate::limiter::{cell_average, limit_cell, total_cell_entropy, LimiterParams};
use crate::physics::{entropy_vars, potential_flux, prim_to_cons, Conserved, GasModel, Primitive};

/// Deliberate defects used to check that the suites can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mutation {
    #[default]
    None,
    /// Negates the energy component of the entropy-conservative flux.
    FlipEnergyFlux,
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub pairs: usize,
    pub cells: usize,
    pub max_degree: usize,
    pub gammas: Vec<f64>,
    pub mutation: Mutation,
    /// Include the short Sod run in [`run_all`].
    pub entropy_run: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 20240613,
            pairs: 100_000,
            cells: 10_000,
            max_degree: 6,
            gammas: vec![1.4, 5.0 / 3.0],
            mutation: Mutation::None,
            entropy_run: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub samples: usize,
    /// Largest observed violation measure.
    pub worst: f64,
    pub tolerance: f64,
}

impl SuiteResult {
    fn new(name: &str, samples: usize, worst: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            passed: worst <= tolerance,
            samples,
            worst,
            tolerance,
        }
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<5} {:<28} samples {:>7}  worst {:>10.3e}  tol {:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.samples,
            self.worst,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub warnings: Vec<String>,
    pub results: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        for r in &self.results {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// Random admissible primitive state with density and pressure log-uniform
/// in `[0.05, 20]` and velocities in `[-3, 3]`.
pub fn random_state<const D: usize, R: Rng>(rng: &mut R, gas: &GasModel<f64>) -> Conserved<f64, D> {
    let (lo, hi) = (0.05f64.ln(), 20f64.ln());
    let rho = rng.gen_range(lo..hi).exp();
    let p = rng.gen_range(lo..hi).exp();
    let vel = std::array::from_fn(|_| rng.gen_range(-3.0..3.0));
    prim_to_cons(&Primitive::new(rho, vel, p), gas)
}

/// SBP identities for degrees `1..=max_degree`: the worst of
/// `|S + S^T - B|`, `|D 1|` and `|colsum S - tau|`.
pub fn sbp_suite(max_degree: usize) -> Result<SuiteResult> {
    let mut worst = 0.0f64;
    for k in 1..=max_degree {
        let b = GlBasis::<f64>::new(k)?;
        let n = b.len();
        for j in 0..n {
            let row: f64 = (0..n).map(|l| b.d(j, l)).sum();
            let col: f64 = (0..n).map(|l| b.s(l, j)).sum();
            worst = worst.max(row.abs()).max((col - b.tau()[j]).abs());
            for l in 0..n {
                worst = worst.max((b.s(j, l) + b.s(l, j) - b.b(j, l)).abs());
            }
        }
    }
    Ok(SuiteResult::new("sbp identities", max_degree, worst, 1e-13))
}

fn ec_residual<const D: usize>(
    l: &Conserved<f64, D>,
    r: &Conserved<f64, D>,
    gas: &GasModel<f64>,
    dir: usize,
    mutation: Mutation,
) -> Result<f64> {
    let mut f = ec_flux(l, r, gas, dir)?;
    if mutation == Mutation::FlipEnergyFlux {
        f.energy = -f.energy;
    }
    let dv = entropy_vars(r, gas)? - entropy_vars(l, gas)?;
    let res = dv.dot(&f) - (potential_flux(r, dir) - potential_flux(l, dir));
    Ok(res.abs() / f.max_abs().max(1.0))
}

/// Entropy-conservation identity of the two-point flux, both directions in
/// 2D, scaled by `max(1, |F|)`.
pub fn ec_suite(cfg: &VerifyConfig) -> Result<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst = 0.0f64;
    let mut samples = 0;
    for &g in &cfg.gammas {
        let gas = GasModel::new(g)?;
        for _ in 0..cfg.pairs {
            let l = random_state::<2, _>(&mut rng, &gas);
            let r = random_state::<2, _>(&mut rng, &gas);
            for dir in 0..2 {
                worst = worst.max(ec_residual(&l, &r, &gas, dir, cfg.mutation)?);
                samples += 1;
            }
        }
    }
    Ok(SuiteResult::new("ec flux identity", samples, worst, 1e-11))
}

/// Entropy inequality of the interface flux; `worst` is the largest value of
/// `dV.F - dpsi`, which must not be positive.
pub fn es_suite(cfg: &VerifyConfig) -> Result<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let mut worst = f64::NEG_INFINITY;
    let mut samples = 0;
    for &g in &cfg.gammas {
        let gas = GasModel::new(g)?;
        for _ in 0..cfg.pairs {
            let l = random_state::<2, _>(&mut rng, &gas);
            let r = random_state::<2, _>(&mut rng, &gas);
            let dv = entropy_vars(&r, &gas)? - entropy_vars(&l, &gas)?;
            for dir in 0..2 {
                let f = es_flux_lf(&l, &r, &gas, dir)?;
                worst = worst.max(dv.dot(&f) - (potential_flux(&r, dir) - potential_flux(&l, dir)));
                samples += 1;
            }
        }
    }
    Ok(SuiteResult::new("es flux inequality", samples, worst, 1e-12))
}

/// Tensor-product quadrature weights of one cell.
fn cell_weights<const D: usize>(w: &[f64]) -> Vec<f64> {
    let n = w.len();
    (0..n.pow(D as u32))
        .map(|a| {
            let mut rest = a;
            let mut prod = 1.0;
            for _ in 0..D {
                prod *= w[rest % n];
                rest /= n;
            }
            prod
        })
        .collect()
}

/// A cell whose average is admissible but with some nodes pushed below the
/// floor. With `admissible` the bad nodes keep small positive density and
/// pressure so that the entropy is defined everywhere.
fn random_cell<const D: usize, R: Rng>(
    rng: &mut R,
    gas: &GasModel<f64>,
    w: &[f64],
    admissible: bool,
) -> Vec<Conserved<f64, D>> {
    loop {
        let n = w.len();
        let mut states: Vec<Conserved<f64, D>> = (0..n).map(|_| random_state(rng, gas)).collect();
        let bad = rng.gen_range(1..=n.div_ceil(2));
        for _ in 0..bad {
            let i = rng.gen_range(0..n);
            let mut w = crate::physics::cons_to_prim(&states[i], gas);
            if admissible {
                if rng.gen_bool(0.5) {
                    w.rho = 10f64.powf(rng.gen_range(-16.0..-12.0));
                }
                w.p = 10f64.powf(rng.gen_range(-16.0..-12.0));
                w.vel = [0.0; D];
                states[i] = prim_to_cons(&w, gas);
            } else {
                let u = &mut states[i];
                if rng.gen_bool(0.5) {
                    u.rho = rng.gen_range(-0.5..1e-6);
                }
                u.energy = u.kinetic_energy() * rng.gen_range(-0.5..0.999) - rng.gen_range(0.0..0.1);
            }
        }
        let avg = cell_average(&states, w);
        if avg.rho > 1e-2 && avg.pressure(gas) > 1e-2 {
            return states;
        }
    }
}

fn limiter_case<const D: usize, R: Rng>(
    rng: &mut R,
    gas: &GasModel<f64>,
    params: &LimiterParams<f64>,
    degree: usize,
    worst: &mut [f64; 4],
) -> Result<()> {
    let basis = GlBasis::<f64>::new(degree)?;
    let w = cell_weights::<D>(basis.weights());
    let floor = params.eps * (1.0 - 1e-12);

    let mut cell = random_cell::<D, _>(rng, gas, &w, false);
    let avg = cell_average(&cell, &w);
    limit_cell(&mut cell, &w, params, gas)?;
    let after = cell_average(&cell, &w);
    worst[0] = worst[0].max((after - avg).max_abs() / avg.max_abs().max(1.0));
    for u in &cell {
        worst[3] = worst[3].max(floor - u.rho).max(floor - u.pressure(gas));
    }
    let once = cell.clone();
    limit_cell(&mut cell, &w, params, gas)?;
    for (a, b) in cell.iter().zip(&once) {
        worst[1] = worst[1].max((*a - *b).max_abs() / b.max_abs().max(1.0));
    }

    let mut cell = random_cell::<D, _>(rng, gas, &w, true);
    let before = total_cell_entropy(&cell, &w, gas)?;
    limit_cell(&mut cell, &w, params, gas)?;
    let after = total_cell_entropy(&cell, &w, gas)?;
    worst[2] = worst[2].max((after - before) / before.abs().max(1.0));
    Ok(())
}

/// Average invariance, idempotence, entropy non-increase and output floor of
/// the limiter over `cfg.cells` random 1D and 2D cells of degree 1 to 4.
pub fn limiter_suites(cfg: &VerifyConfig) -> Result<Vec<SuiteResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x1111);
    let params = LimiterParams::default();
    let mut worst = [0.0f64; 4];
    for (i, &g) in cfg.gammas.iter().cycle().take(cfg.cells).enumerate() {
        let gas = GasModel::new(g)?;
        let degree = 1 + i % 4;
        if i % 2 == 0 {
            limiter_case::<1, _>(&mut rng, &gas, &params, degree, &mut worst)?;
        } else {
            limiter_case::<2, _>(&mut rng, &gas, &params, degree, &mut worst)?;
        }
    }
    Ok(vec![
        SuiteResult::new("limiter average invariance", cfg.cells, worst[0], 1e-14),
        SuiteResult::new("limiter idempotence", cfg.cells, worst[1], 1e-12),
        SuiteResult::new("limiter entropy", cfg.cells, worst[2], 1e-12),
        SuiteResult::new("limiter floor", cfg.cells, worst[3], 0.0),
    ])
}

/// Stepwise total entropy of a coarse Sod run with gravity.
pub fn entropy_suite() -> Result<SuiteResult> {
    let spec = cases::sod().with_cells(50).with_t_final(0.1);
    let opts = RunOptions::default();
    match run_case(&spec, &opts) {
        Ok((_, out)) => Ok(SuiteResult::new(
            "entropy decay (sod, N=50)",
            out.steps,
            out.max_entropy_increase(),
            1e-10,
        )),
        Err(RunError::Aborted(f)) => Ok(SuiteResult::new("entropy decay (sod, N=50)", f.step, f64::INFINITY, 1e-10)),
        Err(RunError::Setup(e)) => Err(e),
    }
}

/// Warnings for configurations outside the range covered by the theory.
pub fn config_warnings(gammas: &[f64]) -> Vec<String> {
    gammas
        .iter()
        .filter(|&&g| !GasModel::new(g).is_ok_and(|gas| gas.in_entropy_stable_range()))
        .map(|g| format!("gamma = {g} lies outside (1, 5/3]; entropy stability is not guaranteed"))
        .collect()
}

pub fn run_all(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let mut report = VerifyReport {
        warnings: config_warnings(&cfg.gammas),
        results: vec![],
    };
    report.results.push(sbp_suite(cfg.max_degree)?);
    report.results.push(ec_suite(cfg)?);
    report.results.push(es_suite(cfg)?);
    report.results.extend(limiter_suites(cfg)?);
    if cfg.entropy_run {
        report.results.push(entropy_suite()?);
    }
    Ok(report)
}
