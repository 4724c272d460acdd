//! Job configuration and module descriptors.
//!
//! A descriptor names `q`, the rank and the coefficients `kappa_1..kappa_r`
//! as literals in `theta` (`"th^2 + 1"`, `"th^(-1/2) + O(th^(-20))"`,
//! coefficients of `F_q` written as polynomials in `g`). A job file is either
//! a bare descriptor or `{"module": {...}, ...}` with the job fields below.

use std::path::Path;

use drinfeld::gf::gf;
use drinfeld::module::{prime_power, DrinfeldModule, Precision};
use drinfeld::poly::{Poly, Var};
use drinfeld::puiseux::Px;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrecisionSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_trunc: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleDescriptor {
    pub q: u32,
    pub rank: usize,
    pub kappa: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<PrecisionSpec>,
}

pub const DEFAULT_HOM_DEGREE: usize = 4;
pub const DEFAULT_EXT_DEGREE: u32 = 2;
pub const DEFAULT_HEIGHT: usize = 3;

fn default_hom_degree() -> usize {
    DEFAULT_HOM_DEGREE
}
fn default_ext_degree() -> u32 {
    DEFAULT_EXT_DEGREE
}
fn default_height() -> usize {
    DEFAULT_HEIGHT
}

/// Everything that determines a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub module: ModuleDescriptor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    /// Torsion branch: index of the first seed root.
    #[serde(default)]
    pub branch: usize,
    /// Cap `B` on the tau-degree of endomorphisms.
    #[serde(default = "default_hom_degree")]
    pub hom_degree: usize,
    /// Endomorphism coefficients are searched in `F_(q^d)`.
    #[serde(default = "default_ext_degree")]
    pub ext_degree: u32,
    /// Height `D` for relation searches.
    #[serde(default = "default_height")]
    pub height: usize,
    /// Argument of `exp`, `log`, `agf`, `ext`; `ext` also accepts
    /// `omega` / `omega:i` and `log:<literal>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    /// Values for `relations`; empty means the period matrix entries.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<String>,
    /// Points whose logarithms enter `full-report` extension blocks.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub logs: Vec<String>,
}

impl JobConfig {
    pub fn new(module: ModuleDescriptor) -> JobConfig {
        JobConfig {
            module,
            command: None,
            branch: 0,
            hom_degree: DEFAULT_HOM_DEGREE,
            ext_degree: DEFAULT_EXT_DEGREE,
            height: DEFAULT_HEIGHT,
            input: None,
            values: Vec::new(),
            logs: Vec::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<JobConfig> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        if v.get("module").is_some() {
            Ok(serde_json::from_value(v)?)
        } else {
            Ok(JobConfig::new(serde_json::from_value(v)?))
        }
    }

    pub fn load(path: &Path) -> Result<JobConfig> {
        JobConfig::from_json(&std::fs::read_to_string(path)?)
    }

    /// Precision with descriptor overrides applied over the library defaults.
    pub fn precision(&self) -> Precision {
        let mut p = Precision::default();
        if let Some(s) = &self.module.precision {
            p.target = s.target.unwrap_or(p.target);
            p.guard = s.guard.unwrap_or(p.guard);
            p.t_trunc = s.t_trunc.unwrap_or(p.t_trunc);
        }
        p
    }

    /// Same config with every default written out.
    pub fn resolved(&self) -> JobConfig {
        let p = self.precision();
        let mut c = self.clone();
        c.module.precision = Some(PrecisionSpec { target: Some(p.target), guard: Some(p.guard), t_trunc: Some(p.t_trunc) });
        c
    }

    pub fn set_precision(&mut self, target: Option<i64>, t_trunc: Option<usize>) {
        let spec = self.module.precision.get_or_insert(PrecisionSpec { target: None, guard: None, t_trunc: None });
        if target.is_some() {
            spec.target = target;
        }
        if t_trunc.is_some() {
            spec.t_trunc = t_trunc;
        }
    }
}

/// `theta`-polynomial behind an exact literal with no negative powers.
fn as_theta_poly(x: &Px) -> Option<Poly> {
    if !x.is_exact() || x.ram() != 1 {
        return None;
    }
    if x.is_zero_to_prec() {
        return Some(Poly::zero(x.field(), Var::Theta));
    }
    if x.lo() + x.coeffs().len() as i64 - 1 > 0 {
        return None;
    }
    let deg = -x.lo();
    Some(Poly::new(x.field(), Var::Theta, (0..=deg).map(|i| x.coeff_at(-i)).collect()))
}

/// Build the module; polynomial coefficients keep their exact form so that
/// endomorphism searches are available.
pub fn build_module(d: &ModuleDescriptor, prec: Precision) -> Result<DrinfeldModule> {
    if d.kappa.len() != d.rank || d.rank == 0 {
        return Err(CliError::Parse(format!("rank {} but {} coefficients", d.rank, d.kappa.len())));
    }
    let (p, e) = prime_power(d.q).map_err(|err| CliError::stage("module", err))?;
    let f = gf(p, e).map_err(|err| CliError::stage("module", err))?;
    let vals = d
        .kappa
        .iter()
        .map(|s| Px::parse(&f, s).map_err(|err| CliError::Parse(format!("kappa `{s}`: {err}"))))
        .collect::<Result<Vec<_>>>()?;
    let polys: Option<Vec<Poly>> = vals.iter().map(as_theta_poly).collect();
    let m = match polys {
        Some(polys) => DrinfeldModule::from_polys(d.q, polys, prec),
        None => DrinfeldModule::new(d.q, vals, prec),
    };
    m.map_err(|err| CliError::stage("module", err))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bare_descriptor_and_job() {
        let a = JobConfig::from_json(r#"{"q": 2, "rank": 1, "kappa": ["1"]}"#).unwrap();
        let b = JobConfig::from_json(r#"{"module": {"q": 2, "rank": 1, "kappa": ["1"]}, "height": 3}"#).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.hom_degree, DEFAULT_HOM_DEGREE);
    }

    #[test]
    fn polynomial_kappa_stays_exact() {
        let d = ModuleDescriptor { q: 3, rank: 2, kappa: vec!["th + 1".into(), "1".into()], precision: None };
        let m = build_module(&d, Precision::default()).unwrap();
        let k = m.kappa_poly().unwrap();
        assert_eq!(k[0].coeffs(), &[1, 1]);
    }

    #[test]
    fn rank_mismatch() {
        let d = ModuleDescriptor { q: 2, rank: 2, kappa: vec!["1".into()], precision: None };
        assert!(matches!(build_module(&d, Precision::default()), Err(CliError::Parse(_))));
    }

    #[test]
    fn unknown_field_rejected() {
        assert!(JobConfig::from_json(r#"{"q": 2, "rank": 1, "kappa": ["1"], "bogus": 1}"#).is_err());
    }
}
