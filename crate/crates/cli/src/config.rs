//! Run configuration: catalog defaults, then the config file, then flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use gravdg::harness::{Case, CaseSpec};
use gravdg::{BoundaryCondition, Integrator, LimiterParams, LimiterPolicy, SchemeVariant};
use ini::Ini;

/// Optional overrides of a catalog case. Unset fields keep the catalog value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub case: Option<String>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub k: Option<usize>,
    pub cfl: Option<f64>,
    pub scheme: Option<SchemeVariant>,
    pub eps: Option<f64>,
    pub t_final: Option<f64>,
    pub snapshots: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub integrator: Option<Integrator>,
    pub limiter_policy: Option<LimiterPolicy>,
    pub bc_x: Option<[String; 2]>,
    pub bc_y: Option<[String; 2]>,
}

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    v.trim().parse().map_err(|e| format!("bad value `{v}` for `{key}`: {e}"))
}

pub fn parse_list(v: &str) -> Result<Vec<f64>, String> {
    v.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse("list", s))
        .collect()
}

pub fn parse_bc_pair(v: &str) -> Result<[String; 2], String> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [one] => Ok([one.to_string(), one.to_string()]),
        [lo, hi] => Ok([lo.to_string(), hi.to_string()]),
        _ => Err(format!("boundary pair `{v}` must be `<lower>,<upper>`")),
    }
}

impl RunConfig {
    /// Sets one key from a config file.
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        match key.replace('_', "-").as_str() {
            "case" => self.case = Some(v.trim().to_string()),
            "nx" | "n" => self.nx = Some(parse(key, v)?),
            "ny" => self.ny = Some(parse(key, v)?),
            "k" | "degree" => self.k = Some(parse(key, v)?),
            "cfl" => self.cfl = Some(parse(key, v)?),
            "scheme" => self.scheme = Some(parse(key, v)?),
            "eps" => self.eps = Some(parse(key, v)?),
            "t-final" => self.t_final = Some(parse(key, v)?),
            "snapshots" => self.snapshots = Some(parse_list(v)?),
            "out" => self.out = Some(PathBuf::from(v.trim())),
            "integrator" => self.integrator = Some(parse(key, v)?),
            "limiter-policy" => self.limiter_policy = Some(parse(key, v)?),
            "bc-x" => self.bc_x = Some(parse_bc_pair(v)?),
            "bc-y" => self.bc_y = Some(parse_bc_pair(v)?),
            other => return Err(format!("unknown config key `{other}`")),
        }
        Ok(())
    }

    /// Fields set in `other` replace those in `self`.
    pub fn merge(&mut self, other: &RunConfig) {
        macro_rules! take {
            ($($f:ident),*) => {$(
                if other.$f.is_some() {
                    self.$f = other.$f.clone();
                }
            )*};
        }
        take!(
            case,
            nx,
            ny,
            k,
            cfl,
            scheme,
            eps,
            t_final,
            snapshots,
            out,
            integrator,
            limiter_policy,
            bc_x,
            bc_y
        );
    }

    /// Reads the global keys of `path` and then the section named after the
    /// case, if any.
    pub fn from_file(path: &Path, case: Option<&str>) -> Result<RunConfig, String> {
        let ini = Ini::load_from_file(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut cfg = RunConfig::default();
        if let Some(general) = ini.section(None::<String>) {
            for (k, v) in general.iter() {
                cfg.set(k, v)?;
            }
        }
        let case = case.map(str::to_string).or_else(|| cfg.case.clone());
        if let Some(section) = case.as_deref().and_then(|c| ini.section(Some(c))) {
            for (k, v) in section.iter() {
                cfg.set(k, v)?;
            }
        }
        Ok(cfg)
    }

    /// Catalog case with every override applied and validated.
    pub fn build_case(&self) -> Result<Case, String> {
        let name = self.case.as_deref().ok_or("no case given (use --case)")?;
        let mut case = Case::by_name(name).map_err(|e| e.to_string())?;
        match &mut case {
            Case::One(spec) => {
                if self.ny.is_some() || self.bc_y.is_some() {
                    return Err(format!("case `{name}` is one-dimensional; y options do not apply"));
                }
                self.apply(spec)?;
            }
            Case::Two(spec) => {
                self.apply(spec)?;
                if let Some(ny) = self.ny {
                    spec.cells[1] = ny;
                }
                if let Some(pair) = &self.bc_y {
                    spec.boundary.sides[1] = [boundary(&pair[0])?, boundary(&pair[1])?];
                }
            }
        }
        match &case {
            Case::One(s) => s.validate(),
            Case::Two(s) => s.validate(),
        }
        .map_err(|e| e.to_string())?;
        Ok(case)
    }

    fn apply<const D: usize>(&self, spec: &mut CaseSpec<D>) -> Result<(), String> {
        if let Some(nx) = self.nx {
            if nx == 0 {
                return Err("cell count must be positive".into());
            }
            spec.cells[0] = nx;
        }
        if self.ny == Some(0) {
            return Err("cell count must be positive".into());
        }
        if let Some(k) = self.k {
            spec.degree = k;
        }
        if let Some(v) = self.scheme {
            spec.variant = v;
        }
        if let Some(t) = self.t_final {
            *spec = spec.clone().with_t_final(t);
        }
        if let Some(s) = &self.snapshots {
            spec.snapshots = s.clone();
        }
        if let Some(cfl) = self.cfl {
            spec.control.cfl = cfl;
        }
        if let Some(eps) = self.eps {
            spec.control.limiter = LimiterParams::with_eps(eps).map_err(|e| e.to_string())?;
        }
        if let Some(i) = self.integrator {
            spec.control.integrator = i;
        }
        if let Some(p) = self.limiter_policy {
            spec.control.policy = p;
        }
        if let Some(pair) = &self.bc_x {
            spec.boundary.sides[0] = [boundary(&pair[0])?, boundary(&pair[1])?];
        }
        Ok(())
    }
}

fn boundary<const D: usize>(name: &str) -> Result<BoundaryCondition<f64, D>, String> {
    match name.to_ascii_lowercase().as_str() {
        "periodic" => Ok(BoundaryCondition::Periodic),
        "outflow" => Ok(BoundaryCondition::Outflow),
        "reflective" | "wall" => Ok(BoundaryCondition::Reflective),
        "equilibrium" => Ok(BoundaryCondition::equilibrium()),
        other => Err(format!(
            "unknown boundary `{other}` (periodic, outflow, reflective, equilibrium)"
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let mut file = RunConfig::default();
        file.set("nx", "40").unwrap();
        file.set("cfl", "0.3").unwrap();
        let flags = RunConfig {
            nx: Some(80),
            ..RunConfig::default()
        };
        file.merge(&flags);
        assert_eq!(file.nx, Some(80));
        assert_eq!(file.cfl, Some(0.3));
    }

    #[test]
    fn sections_apply_to_their_case() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "k = 3\n[sod1d]\nnx = 64\n[eqbm1]\nnx = 10\n").unwrap();
        let cfg = RunConfig::from_file(&path, Some("sod1d")).unwrap();
        assert_eq!(cfg.k, Some(3));
        assert_eq!(cfg.nx, Some(64));
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(RunConfig::default().set("mesh", "3").is_err());
    }

    #[test]
    fn mixed_periodic_pair_rejected() {
        let cfg = RunConfig {
            case: Some("sod1d".into()),
            bc_x: Some(["periodic".into(), "reflective".into()]),
            ..RunConfig::default()
        };
        let err = cfg.build_case().unwrap_err();
        assert!(err.contains("periodic"), "{err}");
    }

    #[test]
    fn y_options_rejected_in_1d() {
        let cfg = RunConfig {
            case: Some("eqbm1".into()),
            ny: Some(4),
            ..RunConfig::default()
        };
        assert!(cfg.build_case().is_err());
    }

    #[test]
    fn overrides_reach_the_spec() {
        let cfg = RunConfig {
            case: Some("wb2d".into()),
            nx: Some(8),
            ny: Some(6),
            k: Some(3),
            scheme: Some(SchemeVariant::NonWb),
            t_final: Some(0.25),
            ..RunConfig::default()
        };
        let Case::Two(spec) = cfg.build_case().unwrap() else {
            panic!("expected a 2D case")
        };
        assert_eq!(spec.cells, [8, 6]);
        assert_eq!(spec.degree, 3);
        assert_eq!(spec.variant, SchemeVariant::NonWb);
        assert_eq!(spec.t_final, 0.25);
    }
}
