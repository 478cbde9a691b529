mod config;
mod manifest;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gravdg::harness::{convergence, io, run_case, Case, CaseSpec, RunError, RunOptions, Variable};
use gravdg::verify::{self, Mutation, VerifyConfig};
use gravdg::{Integrator, LimiterPolicy, SchemeVariant};

use config::RunConfig;

const EXIT_VALIDATION: u8 = 2;
const EXIT_ABORT: u8 = 3;
const EXIT_PROPERTY: u8 = 4;

#[derive(Parser)]
#[command(name = "gravdg", version, about = "Nodal DG solver for the Euler equations with gravity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one case and write the solution, entropy log and manifest.
    Run(RunArgs),
    /// Error table of one case over a sequence of meshes.
    Convergence(ConvergenceArgs),
    /// Operator, flux and limiter property suites.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct CaseArgs {
    /// Catalog case.
    #[arg(long)]
    case: Option<String>,
    /// Cells in x (or in every direction for a convergence sweep level).
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    /// Polynomial degree.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    cfl: Option<f64>,
    /// wbespp, non-wb, non-es or non-pp.
    #[arg(long)]
    scheme: Option<SchemeVariant>,
    /// Positivity floor of the limiter.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    t_final: Option<f64>,
    /// Comma-separated output times before the final time.
    #[arg(long, value_delimiter = ',')]
    snapshots: Option<Vec<f64>>,
    /// Output directory.
    #[arg(long, env = "GRAVDG_OUT")]
    out: Option<PathBuf>,
    /// ssprk104 or euler.
    #[arg(long)]
    integrator: Option<Integrator>,
    /// per-stage or per-step.
    #[arg(long)]
    limiter_policy: Option<LimiterPolicy>,
    /// Boundary conditions in x as `<lower>,<upper>`.
    #[arg(long)]
    bc_x: Option<String>,
    #[arg(long)]
    bc_y: Option<String>,
    /// key=value file; a section named after the case overrides global keys.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    case: CaseArgs,
}

#[derive(Args)]
struct ConvergenceArgs {
    #[command(flatten)]
    case: CaseArgs,
    /// Comma-separated cell counts.
    #[arg(long, value_delimiter = ',', default_value = "20,40,80")]
    levels: Vec<usize>,
    /// rho, mx, my, E, u, v or p.
    #[arg(long, default_value = "rho")]
    var: String,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 100_000)]
    pairs: usize,
    #[arg(long, default_value_t = 10_000)]
    cells: usize,
    #[arg(long, value_delimiter = ',', default_value = "1.4,1.6666666666666667")]
    gamma: Vec<f64>,
    #[arg(long, default_value_t = 20240613)]
    seed: u64,
    /// Negate the energy component of the two-point flux.
    #[arg(long)]
    mutate_flux: bool,
    /// Skip the short Sod run.
    #[arg(long)]
    skip_run: bool,
}

enum Failure {
    Validation(String),
    Abort(String),
    Property(String),
    Io(String),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl CaseArgs {
    fn to_config(&self) -> Result<RunConfig, String> {
        let flags = RunConfig {
            case: self.case.clone(),
            nx: self.nx,
            ny: self.ny,
            k: self.k,
            cfl: self.cfl,
            scheme: self.scheme,
            eps: self.eps,
            t_final: self.t_final,
            snapshots: self.snapshots.clone(),
            out: self.out.clone(),
            integrator: self.integrator,
            limiter_policy: self.limiter_policy,
            bc_x: self.bc_x.as_deref().map(config::parse_bc_pair).transpose()?,
            bc_y: self.bc_y.as_deref().map(config::parse_bc_pair).transpose()?,
        };
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path, self.case.as_deref())?,
            None => RunConfig::default(),
        };
        cfg.merge(&flags);
        Ok(cfg)
    }
}

fn out_dir(cfg: &RunConfig, case: &str) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| PathBuf::from("out").join(case))
}

fn cmd_run(args: &RunArgs) -> Result<(), Failure> {
    let cfg = args.case.to_config().map_err(Failure::Validation)?;
    let case = cfg.build_case().map_err(Failure::Validation)?;
    let dir = out_dir(&cfg, case.name());
    match case {
        Case::One(spec) => run_spec(&spec, &dir),
        Case::Two(spec) => run_spec(&spec, &dir),
    }
}

fn time_tag(t: f64) -> String {
    format!("{t:.6}").trim_end_matches('0').trim_end_matches('.').to_string()
}

fn run_spec<const D: usize>(spec: &CaseSpec<D>, dir: &Path) -> Result<(), Failure> {
    if !spec.gas.in_entropy_stable_range() {
        eprintln!(
            "warning: gamma = {} lies outside (1, 5/3]; entropy stability is not guaranteed",
            spec.gas.gamma
        );
    }
    let opts = RunOptions::default();
    match run_case(spec, &opts) {
        Ok((scheme, out)) => {
            fs::create_dir_all(dir)?;
            let mut files = vec![];
            for snap in &out.snapshots[..out.snapshots.len() - 1] {
                let name = format!("solution_t{}.csv", time_tag(snap.t));
                io::save_solution(&dir.join(&name), &scheme, &snap.field)?;
                files.push(name);
            }
            io::save_solution(&dir.join("solution.csv"), &scheme, &out.field)?;
            io::save_entropy_log(&dir.join("entropy.csv"), &out.log)?;
            files.extend(["solution.csv".into(), "entropy.csv".into()]);
            if let Ok(pert) = gravdg::harness::perturbation_fields(&scheme, &out.field) {
                io::save_solution(&dir.join("perturbation.csv"), &scheme, &pert)?;
                files.push("perturbation.csv".into());
            }
            let m = manifest::success(spec, &scheme, &out, &files).map_err(|e| Failure::Io(e.to_string()))?;
            manifest::write(&dir.join("manifest.json"), &m)?;
            println!(
                "{}: t = {} after {} steps, min rho {:.3e}, min p {:.3e}, {:.2} s -> {}",
                spec.name,
                out.t,
                out.steps,
                out.min_rho,
                out.min_p,
                out.wall_time.as_secs_f64(),
                dir.display()
            );
            Ok(())
        }
        Err(RunError::Setup(e)) => Err(Failure::Validation(e.to_string())),
        Err(RunError::Aborted(fail)) => {
            fs::create_dir_all(dir)?;
            io::save_entropy_log(&dir.join("entropy.csv"), &fail.log)?;
            let m = manifest::failure(spec, &fail);
            manifest::write(&dir.join("failure.json"), &m)?;
            manifest::write(&dir.join("manifest.json"), &m)?;
            Err(Failure::Abort(fail.to_string()))
        }
    }
}

fn cmd_convergence(args: &ConvergenceArgs) -> Result<(), Failure> {
    let cfg = args.case.to_config().map_err(Failure::Validation)?;
    let case = cfg.build_case().map_err(Failure::Validation)?;
    let var: Variable = args.var.parse().map_err(|e: gravdg::Error| Failure::Validation(e.to_string()))?;
    if let Variable::Momentum(d) | Variable::Velocity(d) = var {
        if d >= case.dimension() {
            return Err(Failure::Validation(format!(
                "variable `{}` needs a {}D case",
                args.var,
                d + 1
            )));
        }
    }
    if args.levels.is_empty() || args.levels.contains(&0) {
        return Err(Failure::Validation("levels must be positive cell counts".into()));
    }
    let dir = out_dir(&cfg, case.name());
    let opts = RunOptions::default();
    let report = match &case {
        Case::One(spec) => sweep(spec, &args.levels, var, &opts),
        Case::Two(spec) => sweep(spec, &args.levels, var, &opts),
    }?;
    print!("{report}");
    fs::create_dir_all(&dir)?;
    let name = format!("convergence_{}_k{}.csv", report.variant, report.degree);
    fs::write(dir.join(&name), report.to_csv())?;
    println!("-> {}", dir.join(name).display());
    Ok(())
}

fn sweep<const D: usize>(
    spec: &CaseSpec<D>,
    levels: &[usize],
    var: Variable,
    opts: &RunOptions,
) -> Result<gravdg::harness::ErrorReport, Failure> {
    if spec.exact.is_none() && spec.equilibrium.is_none() {
        return Err(Failure::Validation(format!(
            "case `{}` has neither an exact solution nor an equilibrium",
            spec.name
        )));
    }
    convergence(spec, levels, var, opts).map_err(|e| match e {
        RunError::Setup(e) => Failure::Validation(e.to_string()),
        RunError::Aborted(f) => Failure::Abort(f.to_string()),
    })
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    if args.gamma.iter().any(|&g| !(g > 1.0)) {
        return Err(Failure::Validation("gamma must exceed 1".into()));
    }
    let cfg = VerifyConfig {
        seed: args.seed,
        pairs: args.pairs,
        cells: args.cells,
        gammas: args.gamma.clone(),
        mutation: if args.mutate_flux {
            Mutation::FlipEnergyFlux
        } else {
            Mutation::None
        },
        entropy_run: !args.skip_run,
        ..VerifyConfig::default()
    };
    for w in verify::config_warnings(&cfg.gammas) {
        eprintln!("warning: {w}");
    }
    let report = verify::run_all(&cfg).map_err(|e| Failure::Validation(e.to_string()))?;
    for r in &report.results {
        println!("{r}");
    }
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report.results.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
        Err(Failure::Property(failed.join(", ")))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Convergence(a) => cmd_convergence(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Abort(msg)) => {
            eprintln!("aborted: {msg}");
            ExitCode::from(EXIT_ABORT)
        }
        Err(Failure::Property(msg)) => {
            eprintln!("property failure: {msg}");
            ExitCode::from(EXIT_PROPERTY)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("i/o error: {msg}");
            ExitCode::FAILURE
        }
    }
}
