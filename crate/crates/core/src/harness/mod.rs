//! Benchmark catalog, run driver, error norms and CSV output. Double precision only.

pub mod cases;
pub mod io;
pub mod norms;
pub mod run;
pub mod sample;

pub use cases::{Case, CaseSpec, CASE_NAMES};
pub use norms::{error_norms, observed_order, ErrorNorms, ErrorReport, Variable};
pub use run::{
    convergence, perturbation_fields, run_case, run_scheme, EntropyRecord, RunError, RunFailure, RunOptions,
    RunOutput,
};
pub use sample::{evaluate, reference_solution, sample_onto};
