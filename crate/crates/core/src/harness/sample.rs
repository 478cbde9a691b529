//! Evaluation of DG solutions at arbitrary points.

use super::cases::CaseSpec;
use super::run::{run_case, RunError, RunOptions};
use crate::physics::Conserved;
use crate::solver::{Field, Scheme, SchemeVariant};

/// Value of the piecewise polynomial `field` at `x`. Points on a face take
/// the value of the upper cell; points outside are clamped to the domain.
pub fn evaluate<const D: usize>(scheme: &Scheme<f64, D>, field: &Field<f64, D>, x: &[f64; D]) -> Conserved<f64, D> {
    let grid = scheme.grid();
    let lower = grid.lower();
    let h = grid.spacing();
    let cells = grid.cells();
    let mut ci = [0usize; D];
    let mut basis_vals: Vec<Vec<f64>> = Vec::with_capacity(D);
    for d in 0..D {
        let s = (x[d] - lower[d]) / h[d];
        let c = (s.floor().max(0.0) as usize).min(cells[d] - 1);
        ci[d] = c;
        let xi = (2.0 * (s - c as f64) - 1.0).clamp(-1.0, 1.0);
        basis_vals.push(scheme.basis().lagrange_values(xi));
    }
    let cell = field.cell(grid, grid.cell_index(ci));
    let mut out = Conserved::zero();
    for (a, u) in cell.iter().enumerate() {
        let w = grid
            .node_multi(a)
            .iter()
            .enumerate()
            .fold(1.0, |w, (d, &i)| w * basis_vals[d][i]);
        if w != 0.0 {
            out = out + *u * w;
        }
    }
    out
}

/// Samples `field` at the nodes of `target`.
pub fn sample_onto<const D: usize>(
    scheme: &Scheme<f64, D>,
    field: &Field<f64, D>,
    target: &Scheme<f64, D>,
) -> Field<f64, D> {
    Field::new(target.coords().iter().map(|x| evaluate(scheme, field, x)).collect())
}

/// Runs the full scheme on a mesh `factor` times finer than `coarse` and
/// samples the result at the coarse nodes.
pub fn reference_solution<const D: usize>(
    spec: &CaseSpec<D>,
    coarse: &Scheme<f64, D>,
    factor: usize,
    opts: &RunOptions,
) -> Result<Field<f64, D>, RunError> {
    let fine_spec = spec
        .clone()
        .with_cell_counts(coarse.grid().cells().map(|n| n * factor))
        .with_degree(coarse.grid().degree())
        .with_variant(SchemeVariant::WbEsPp);
    let (fine, out) = run_case(&fine_spec, opts)?;
    Ok(sample_onto(&fine, &out.field, coarse))
}
