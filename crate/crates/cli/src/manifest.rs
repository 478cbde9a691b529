//! Run-summary manifests written next to the CSV output.

use std::fs;
use std::path::Path;

use gravdg::harness::norms::scheme_error_norms;
use gravdg::harness::{CaseSpec, ErrorNorms, RunFailure, RunOutput, Variable};
use gravdg::{Result, Scheme};
use serde_json::{json, Value};

fn norms(n: &ErrorNorms) -> Value {
    json!({ "l1": n.l1, "l2": n.l2, "linf": n.linf })
}

/// Every parameter needed to repeat the run.
fn parameters<const D: usize>(spec: &CaseSpec<D>) -> Value {
    let c = &spec.control;
    let boundary: Vec<[&str; 2]> = spec
        .boundary
        .sides
        .iter()
        .map(|s| [s[0].name(), s[1].name()])
        .collect();
    json!({
        "case": spec.name,
        "dimension": D,
        "lower": spec.lower.to_vec(),
        "upper": spec.upper.to_vec(),
        "cells": spec.cells.to_vec(),
        "degree": spec.degree,
        "gamma": spec.gas.gamma,
        "scheme": spec.variant.name(),
        "t_final": spec.t_final,
        "snapshots": spec.snapshots,
        "cfl": c.cfl,
        "eps": c.limiter.eps,
        "integrator": c.integrator.name(),
        "limiter_policy": c.policy.name(),
        "max_retries": c.max_retries,
        "boundary": boundary,
        "potential": format!("{:?}", spec.potential),
    })
}

pub fn success<const D: usize>(
    spec: &CaseSpec<D>,
    scheme: &Scheme<f64, D>,
    out: &RunOutput<D>,
    files: &[String],
) -> Result<Value> {
    let mut m = json!({
        "status": "completed",
        "version": env!("CARGO_PKG_VERSION"),
        "parameters": parameters(spec),
        "t": out.t,
        "steps": out.steps,
        "retries": out.retries,
        "limited_cells": out.limited_cells,
        "min_rho": out.min_rho,
        "min_p": out.min_p,
        "max_entropy_increase": out.max_entropy_increase(),
        "wall_time_s": out.wall_time.as_secs_f64(),
        "files": files,
    });
    if let Some(eq) = scheme.equilibrium_field() {
        m["equilibrium_deviation_rho"] = norms(&scheme_error_norms(scheme, &out.field, &eq, Variable::Density)?);
    }
    if let Some(exact) = &spec.exact {
        let reference = scheme.project(|x| exact(x, out.t));
        m["error_rho"] = norms(&scheme_error_norms(scheme, &out.field, &reference, Variable::Density)?);
    }
    Ok(m)
}

/// Machine-readable record of an aborted run.
pub fn failure<const D: usize>(spec: &CaseSpec<D>, fail: &RunFailure) -> Value {
    let last = fail.log.last();
    json!({
        "status": "aborted",
        "version": env!("CARGO_PKG_VERSION"),
        "parameters": parameters(spec),
        "failed_step": fail.step,
        "time": fail.time,
        "dt": fail.dt,
        "error": fail.error.to_string(),
        "inadmissible": fail.error.is_inadmissible(),
        "min_rho": last.map(|r| r.min_rho),
        "min_p": last.map(|r| r.min_p),
        "wall_time_s": fail.wall_time.as_secs_f64(),
    })
}

pub fn write(path: &Path, v: &Value) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(v).map_err(std::io::Error::other)?;
    fs::write(path, text + "\n")
}
