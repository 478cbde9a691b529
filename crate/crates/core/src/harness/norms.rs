//! Discrete error norms and convergence tables.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::physics::{cons_to_prim, GasModel};
use crate::solver::{Field, Scheme};

/// Component of a nodal state a norm is taken of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variable {
    Density,
    Momentum(usize),
    Energy,
    Velocity(usize),
    Pressure,
}

impl Variable {
    pub fn name(self) -> String {
        match self {
            Self::Density => "rho".into(),
            Self::Momentum(d) => format!("m{}", ["x", "y"][d]),
            Self::Energy => "E".into(),
            Self::Velocity(d) => ["u", "v"][d].into(),
            Self::Pressure => "p".into(),
        }
    }

    pub fn extract<const D: usize>(self, u: &crate::physics::Conserved<f64, D>, gas: &GasModel<f64>) -> f64 {
        match self {
            Self::Density => u.rho,
            Self::Momentum(d) => u.mom[d],
            Self::Energy => u.energy,
            Self::Velocity(d) => u.mom[d] / u.rho,
            Self::Pressure => cons_to_prim(u, gas).p,
        }
    }
}

impl std::str::FromStr for Variable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "rho" | "density" => Self::Density,
            "mx" => Self::Momentum(0),
            "my" => Self::Momentum(1),
            "E" | "energy" => Self::Energy,
            "u" => Self::Velocity(0),
            "v" => Self::Velocity(1),
            "p" | "pressure" => Self::Pressure,
            other => return Err(Error::Config(format!("unknown variable `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorNorms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

impl ErrorNorms {
    pub fn as_array(&self) -> [f64; 3] {
        [self.l1, self.l2, self.linf]
    }
}

/// Quadrature norms of `field - reference` in one variable.
///
/// `weights` are the per-node quadrature weights including the Jacobian, as
/// returned by [`Scheme::node_weights`].
pub fn error_norms<const D: usize>(
    field: &Field<f64, D>,
    reference: &Field<f64, D>,
    weights: &[f64],
    var: Variable,
    gas: &GasModel<f64>,
) -> Result<ErrorNorms> {
    if field.len() != reference.len() || weights.len() != field.len() {
        return Err(Error::ShapeMismatch {
            expected: field.len(),
            found: if reference.len() != field.len() { reference.len() } else { weights.len() },
        });
    }
    let mut n = ErrorNorms::default();
    for ((u, r), w) in field.values.iter().zip(&reference.values).zip(weights) {
        let e = (var.extract(u, gas) - var.extract(r, gas)).abs();
        n.l1 += w * e;
        n.l2 += w * e * e;
        n.linf = n.linf.max(e);
    }
    n.l2 = n.l2.sqrt();
    Ok(n)
}

/// Norms on the mesh of `scheme`, per unit domain measure.
pub fn scheme_error_norms<const D: usize>(
    scheme: &Scheme<f64, D>,
    field: &Field<f64, D>,
    reference: &Field<f64, D>,
    var: Variable,
) -> Result<ErrorNorms> {
    let mut w = scheme.node_weights();
    let measure: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= measure);
    error_norms(field, reference, &w, var, scheme.gas())
}

/// `log2(e_coarse / e_fine)` for a mesh refined by two.
pub fn observed_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// One mesh level of a convergence table.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub cells: usize,
    pub norms: ErrorNorms,
    /// Orders with respect to the previous row; `None` on the first row.
    pub orders: Option<[f64; 3]>,
}

/// Errors and observed orders across a mesh sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub case: String,
    pub variant: String,
    pub degree: usize,
    pub variable: String,
    pub rows: Vec<ErrorRow>,
}

impl ErrorReport {
    pub fn new(case: &str, variant: &str, degree: usize, variable: &str) -> Self {
        Self {
            case: case.into(),
            variant: variant.into(),
            degree,
            variable: variable.into(),
            rows: Vec::new(),
        }
    }

    /// Appends a level; orders assume the cell count doubled.
    pub fn push(&mut self, cells: usize, norms: ErrorNorms) {
        let orders = self.rows.last().map(|prev| {
            let ratio = (cells as f64 / prev.cells as f64).log2();
            let a = prev.norms.as_array();
            let b = norms.as_array();
            [0, 1, 2].map(|i| (a[i] / b[i]).log2() / ratio)
        });
        self.rows.push(ErrorRow { cells, norms, orders });
    }

    pub fn last_orders(&self) -> Option<[f64; 3]> {
        self.rows.last().and_then(|r| r.orders)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("N,L1,L1_order,L2,L2_order,Linf,Linf_order\n");
        for r in &self.rows {
            let n = r.norms.as_array();
            let _ = write!(s, "{}", r.cells);
            for i in 0..3 {
                let o = r.orders.map(|o| format!("{:.16e}", o[i])).unwrap_or_default();
                let _ = write!(s, ",{:.16e},{}", n[i], o);
            }
            s.push('\n');
        }
        s
    }
}

impl fmt::Display for ErrorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} ({}, k = {}), errors in {}",
            self.case, self.variant, self.degree, self.variable
        )?;
        writeln!(
            f,
            "{:>6}  {:>10} {:>6}  {:>10} {:>6}  {:>10} {:>6}",
            "N", "L1", "order", "L2", "order", "Linf", "order"
        )?;
        for r in &self.rows {
            let n = r.norms.as_array();
            write!(f, "{:>6}", r.cells)?;
            for i in 0..3 {
                match r.orders {
                    Some(o) => write!(f, "  {:>10.2e} {:>6.2}", n[i], o[i])?,
                    None => write!(f, "  {:>10.2e} {:>6}", n[i], "")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
