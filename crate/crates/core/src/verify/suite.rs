//! TOML suite files: scaling studies and named checks run together.
//!
//! ```toml
//! [domain]
//! dim = 1
//!
//! [family]
//! policy = "dyadic"
//! stride = 1
//!
//! [[experiment]]
//! name = "lip-box"
//! kind = "nc-lip"
//! alpha = 0.25
//! beta = 0.5
//! s = "const:1"
//! symbol = "lip_pos(0.5)"
//! resolutions = [128]
//! box_sizes = [1.0, 2.0, 4.0, 8.0]
//! expect = "bounded"
//! thresholds = { stable_rel = 0.15, growth_factor = 1.3 }
//!
//! [[check]]
//! name = "cube-lemma"
//! symbol = "random_lipschitz"
//! cells = 128
//! gamma = 0.5
//! ```

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checks::{run_check, CheckInputs, CheckName, CheckParams};
use super::study::{scaling_study, ExperimentConfig, Thresholds, Verdict, VerdictReport};
use crate::error::{Error, Result};
use crate::grid::{make_corpus, Cube, CubeFamily, Domain, ScalePolicy, Symbol};
use crate::oscfun::{DominationTarget, OscFunctionalSpec, OscKind, SExponent};
use crate::report::CheckReport;
use crate::varlex::ExponentSpec;

/// The suite shipped with the crate.
pub const DEFAULT_SUITE: &str = include_str!("../../suite/default.toml");

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSuite {
    #[serde(default)]
    domain: RawDomain,
    #[serde(default)]
    family: RawFamily,
    thresholds: Option<Thresholds>,
    #[serde(default)]
    experiment: Vec<RawExperiment>,
    #[serde(default)]
    check: Vec<RawCheck>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    #[serde(default = "one")]
    dim: usize,
    #[serde(default = "unit")]
    half_width: f64,
}

impl Default for RawDomain {
    fn default() -> Self {
        RawDomain {
            dim: 1,
            half_width: 1.0,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    #[serde(default = "dyadic")]
    policy: ScalePolicy,
    #[serde(default = "one")]
    stride: usize,
}

impl Default for RawFamily {
    fn default() -> Self {
        RawFamily {
            policy: ScalePolicy::Dyadic,
            stride: 1,
        }
    }
}

fn one() -> usize {
    1
}

fn unit() -> f64 {
    1.0
}

fn dyadic() -> ScalePolicy {
    ScalePolicy::Dyadic
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    name: String,
    kind: OscKind,
    #[serde(default)]
    alpha: f64,
    #[serde(default)]
    beta: f64,
    s: Option<String>,
    inner_q: Option<f64>,
    gamma: Option<f64>,
    symbol: String,
    resolutions: Vec<usize>,
    box_sizes: Vec<f64>,
    expect: Option<Verdict>,
    thresholds: Option<Thresholds>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCheck {
    name: CheckName,
    label: Option<String>,
    symbol: String,
    f: Option<String>,
    cells: usize,
    dim: Option<usize>,
    half_width: Option<f64>,
    gamma: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    r: Option<f64>,
    exponent: Option<String>,
    cube: Option<RawCube>,
    domination: Option<DominationTarget>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCube {
    anchor: Vec<usize>,
    side: usize,
}

/// A parsed check: how to build its inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckConfig {
    pub name: CheckName,
    pub label: String,
    pub symbol: Symbol,
    pub f: Option<Symbol>,
    pub dim: usize,
    pub cells: usize,
    pub half_width: f64,
    pub policy: ScalePolicy,
    pub stride: usize,
    pub exponent: Option<ExponentSpec>,
    pub params: CheckParams,
}

impl CheckConfig {
    fn inputs(&self) -> Result<CheckInputs> {
        let dom = Domain::symmetric(self.dim, self.half_width, self.cells)?;
        let b = make_corpus(&self.symbol, &dom)?;
        let f = self.f.as_ref().map(|s| make_corpus(s, &dom)).transpose()?;
        let fam = CubeFamily::from_policy(self.policy, &dom)?.with_stride(self.stride)?;
        let mut params = self.params.clone();
        params.exponent = self
            .exponent
            .as_ref()
            .map(|e| e.resolve(&dom))
            .transpose()?;
        Ok(CheckInputs { b, f, fam, params })
    }

    pub fn run(&self) -> Result<CheckReport> {
        let mut r = run_check(self.name, &self.inputs()?)?;
        r.check = self.label.clone();
        Ok(r)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub experiments: Vec<ExperimentConfig>,
    pub checks: Vec<CheckConfig>,
}

/// One record of a suite report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SuiteEntry {
    Experiment(VerdictReport),
    Check(CheckReport),
}

impl SuiteEntry {
    pub fn pass(&self) -> bool {
        match self {
            SuiteEntry::Experiment(r) => r.pass,
            SuiteEntry::Check(r) => r.pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub entries: Vec<SuiteEntry>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(SuiteEntry::pass)
    }
}

fn config_err(context: &str, e: impl std::fmt::Display) -> Error {
    Error::Config(format!("{context}: {e}"))
}

fn parse_s(s: Option<&str>, context: &str) -> Result<SExponent<f64>> {
    match s {
        None => Ok(SExponent::One),
        Some(text) => match text
            .parse::<ExponentSpec>()
            .map_err(|e| config_err(context, e))?
        {
            ExponentSpec::Const(v) => SExponent::constant(v).map_err(|e| config_err(context, e)),
            ExponentSpec::File(_) => Err(Error::Config(format!(
                "{context}: s must be a constant in a scaling study (domains vary)"
            ))),
        },
    }
}

/// Parses suite TOML. Errors carry the offending key and line.
pub fn parse_suite(text: &str) -> Result<SuiteConfig> {
    let raw: RawSuite = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    if !(raw.domain.dim == 1 || raw.domain.dim == 2) {
        return Err(Error::Config(format!(
            "domain.dim must be 1 or 2, got {}",
            raw.domain.dim
        )));
    }
    let base = raw.thresholds.unwrap_or_default();
    base.validate()?;
    let mut experiments = Vec::new();
    for e in raw.experiment {
        let ctx = format!("experiment `{}`", e.name);
        let symbol: Symbol = e
            .symbol
            .parse()
            .map_err(|err| config_err(&format!("{ctx}.symbol"), err))?;
        let mut spec = OscFunctionalSpec::new(e.kind)
            .with_alpha(e.alpha)
            .with_beta(e.beta)
            .with_s(parse_s(e.s.as_deref(), &format!("{ctx}.s"))?);
        if let Some(q) = e.inner_q {
            spec = spec.with_inner_q(q);
        }
        if let Some(g) = e.gamma {
            spec = spec.with_gamma_for_max(g);
        }
        let cfg = ExperimentConfig {
            name: e.name,
            symbol,
            spec,
            dim: raw.domain.dim,
            resolutions: e.resolutions,
            box_sizes: e.box_sizes,
            policy: raw.family.policy,
            stride: raw.family.stride,
            thresholds: e.thresholds.unwrap_or(base),
            expect: e.expect,
        };
        cfg.validate()?;
        experiments.push(cfg);
    }
    let mut checks = Vec::new();
    for c in raw.check {
        let label = c.label.clone().unwrap_or_else(|| c.name.name().to_string());
        let ctx = format!("check `{label}`");
        let symbol: Symbol = c
            .symbol
            .parse()
            .map_err(|err| config_err(&format!("{ctx}.symbol"), err))?;
        let f =
            c.f.as_deref()
                .map(str::parse::<Symbol>)
                .transpose()
                .map_err(|err| config_err(&format!("{ctx}.f"), err))?;
        let exponent = c
            .exponent
            .as_deref()
            .map(str::parse::<ExponentSpec>)
            .transpose()
            .map_err(|err| config_err(&format!("{ctx}.exponent"), err))?;
        let defaults = CheckParams::default();
        let cube = c
            .cube
            .map(|q| Cube::from_anchor(&q.anchor, q.side))
            .transpose()
            .map_err(|err| config_err(&format!("{ctx}.cube"), err))?;
        let params = CheckParams {
            gamma: c.gamma.unwrap_or(defaults.gamma),
            alpha: c.alpha.unwrap_or(defaults.alpha),
            beta: c.beta.unwrap_or(defaults.beta),
            r: c.r.unwrap_or(defaults.r),
            exponent: None,
            cube,
            domination: c.domination.unwrap_or(defaults.domination),
        };
        checks.push(CheckConfig {
            name: c.name,
            label,
            symbol,
            f,
            dim: c.dim.unwrap_or(raw.domain.dim),
            cells: c.cells,
            half_width: c.half_width.unwrap_or(raw.domain.half_width),
            policy: raw.family.policy,
            stride: raw.family.stride,
            exponent,
            params,
        });
    }
    Ok(SuiteConfig {
        experiments,
        checks,
    })
}

/// Runs every experiment, then every check, in config order.
pub fn run_suite_config(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let experiments: Vec<SuiteEntry> = cfg
        .experiments
        .par_iter()
        .map(|e| scaling_study(e).map(SuiteEntry::Experiment))
        .collect::<Result<_>>()?;
    let checks: Vec<SuiteEntry> = cfg
        .checks
        .par_iter()
        .map(|c| c.run().map(SuiteEntry::Check))
        .collect::<Result<_>>()?;
    Ok(SuiteReport {
        entries: experiments.into_iter().chain(checks).collect(),
    })
}

/// Reads, parses and runs a suite file.
pub fn run_suite(path: &Path) -> Result<SuiteReport> {
    let text = std::fs::read_to_string(path)?;
    run_suite_config(&parse_suite(&text)?)
}
