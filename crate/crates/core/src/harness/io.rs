//! CSV output. Every number is written with 17 significant digits.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use super::run::EntropyRecord;
use crate::physics::cons_to_prim;
use crate::solver::{Field, Scheme};

const AXES: [&str; 2] = ["x", "y"];
const MOMENTA: [&str; 2] = ["mx", "my"];
const VELOCITIES: [&str; 2] = ["u", "v"];

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn solution_header(dim: usize) -> String {
    let mut cols: Vec<&str> = AXES[..dim].to_vec();
    cols.push("rho");
    cols.extend(&MOMENTA[..dim]);
    cols.push("E");
    cols.extend(&VELOCITIES[..dim]);
    cols.push("p");
    cols.join(",")
}

/// One row per node, in field order.
pub fn write_solution<W: Write, const D: usize>(
    mut w: W,
    scheme: &Scheme<f64, D>,
    field: &Field<f64, D>,
) -> io::Result<()> {
    writeln!(w, "{}", solution_header(D))?;
    let gas = scheme.gas();
    for (x, u) in scheme.coords().iter().zip(&field.values) {
        let p = cons_to_prim(u, gas);
        let mut row: Vec<f64> = x.to_vec();
        row.push(u.rho);
        row.extend(u.mom);
        row.push(u.energy);
        row.extend(p.vel);
        row.push(p.p);
        let line: Vec<String> = row.into_iter().map(num).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()
}

pub const ENTROPY_HEADER: &str = "step,t,dt,total_entropy,min_rho,min_p";

pub fn write_entropy_log<W: Write>(mut w: W, log: &[EntropyRecord]) -> io::Result<()> {
    writeln!(w, "{ENTROPY_HEADER}")?;
    for r in log {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.step,
            num(r.t),
            num(r.dt),
            num(r.total_entropy),
            num(r.min_rho),
            num(r.min_p)
        )?;
    }
    w.flush()
}

pub fn save_solution<const D: usize>(path: &Path, scheme: &Scheme<f64, D>, field: &Field<f64, D>) -> io::Result<()> {
    write_solution(BufWriter::new(File::create(path)?), scheme, field)
}

pub fn save_entropy_log(path: &Path, log: &[EntropyRecord]) -> io::Result<()> {
    write_entropy_log(BufWriter::new(File::create(path)?), log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::cases;

    #[test]
    fn headers() {
        assert_eq!(solution_header(1), "x,rho,mx,E,u,p");
        assert_eq!(solution_header(2), "x,y,rho,mx,my,E,u,v,p");
    }

    #[test]
    fn values_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn one_row_per_node() {
        let spec = cases::wb_2d().with_cells(3);
        let scheme = spec.build_scheme().unwrap();
        let f = spec.initial_field(&scheme);
        let mut buf = Vec::new();
        write_solution(&mut buf, &scheme, &f).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 1 + scheme.grid().num_nodes());
        assert!(lines[1..].iter().all(|l| l.split(',').count() == 9));
    }
}
