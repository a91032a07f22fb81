//! Named checks shared by the suite runner and the command line.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bound::standard_probes;
use crate::error::{Error, Result};
use crate::grid::{make_corpus, Cube, CubeFamily, GridFunction, Symbol};
use crate::maxop::{check_cube_lemma, FracParams};
use crate::oscfun::{
    check_commutator_identity, check_ef_balance, check_mc_lower_bound, check_nclip3_chain,
    check_oscillation_bound, check_pointwise_domination, DominationTarget,
};
use crate::report::CheckReport;
use crate::varlex::{
    check_chi_embedding, check_chi_product, check_holder, check_power_identity, Exponent,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckName {
    CubeLemma,
    Holder,
    Power,
    ChiProduct,
    ChiEmbedding,
    CommutatorIdentity,
    EfBalance,
    OscBound,
    Domination,
    McLower,
    Nclip3,
}

impl CheckName {
    pub const ALL: [CheckName; 11] = [
        CheckName::CubeLemma,
        CheckName::Holder,
        CheckName::Power,
        CheckName::ChiProduct,
        CheckName::ChiEmbedding,
        CheckName::CommutatorIdentity,
        CheckName::EfBalance,
        CheckName::OscBound,
        CheckName::Domination,
        CheckName::McLower,
        CheckName::Nclip3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckName::CubeLemma => "cube-lemma",
            CheckName::Holder => "holder",
            CheckName::Power => "power",
            CheckName::ChiProduct => "chi-product",
            CheckName::ChiEmbedding => "chi-embedding",
            CheckName::CommutatorIdentity => "commutator-identity",
            CheckName::EfBalance => "ef-balance",
            CheckName::OscBound => "osc-bound",
            CheckName::Domination => "domination",
            CheckName::McLower => "mc-lower",
            CheckName::Nclip3 => "nclip3",
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckName::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = CheckName::ALL.iter().map(|c| c.name()).collect();
                Error::param(
                    "name",
                    format!("unknown check `{s}`; expected one of {}", names.join(", ")),
                )
            })
    }
}

/// Numeric parameters of a check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckParams {
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Power of the power identity.
    pub r: f64,
    /// Exponent of the variable-norm checks; the bundled log-Hölder
    /// exponent when absent.
    pub exponent: Option<Exponent<f64>>,
    /// A single cube; every eligible family cube when absent.
    pub cube: Option<Cube>,
    pub domination: DominationTarget,
}

impl Default for CheckParams {
    fn default() -> Self {
        CheckParams {
            gamma: 0.25,
            alpha: 0.25,
            beta: 0.5,
            r: 0.5,
            exponent: None,
            cube: None,
            domination: DominationTarget::Both,
        }
    }
}

/// Inputs of a check: the symbol `b`, an optional second function `f`
/// (probes or a bump stand in when absent) and the cube family.
#[derive(Debug, Clone)]
pub struct CheckInputs {
    pub b: GridFunction<f64>,
    pub f: Option<GridFunction<f64>>,
    pub fam: CubeFamily,
    pub params: CheckParams,
}

/// Relative tolerance for quantities that equal one exactly for constant
/// exponents.
const CONSTANT_EXPONENT_RTOL: f64 = 1e-8;

impl CheckInputs {
    fn cubes(&self, replacement_closed: bool) -> Result<Vec<Cube>> {
        let dom = self.b.domain();
        if let Some(q) = self.params.cube {
            dom.check_cube(&q)?;
            return Ok(vec![q]);
        }
        let cubes: Vec<Cube> = self
            .fam
            .cubes(dom)
            .into_iter()
            .filter(|q| !replacement_closed || self.fam.is_replacement_closed_for(q))
            .collect();
        if cubes.is_empty() {
            return Err(Error::NoEligibleCubes(
                "no family cube meets the cube-lemma precondition".into(),
            ));
        }
        Ok(cubes)
    }

    fn exponent(&self) -> Result<Exponent<f64>> {
        match &self.params.exponent {
            Some(p) => {
                self.b.ensure_same_domain(p.values())?;
                Ok(p.clone())
            }
            None => Exponent::log_holder_default(self.b.domain().clone()),
        }
    }

    fn second(&self) -> Result<GridFunction<f64>> {
        match &self.f {
            Some(f) => Ok(f.clone()),
            None => make_corpus(&Symbol::Bump, self.b.domain()),
        }
    }
}

fn sweep(
    name: &str,
    cubes: &[Cube],
    run: impl Fn(&Cube) -> Result<Vec<CheckReport>> + Sync + Send,
) -> Result<CheckReport> {
    let per: Vec<Vec<CheckReport>> = cubes.par_iter().map(run).collect::<Result<_>>()?;
    let flat: Vec<CheckReport> = per.into_iter().flatten().collect();
    Ok(CheckReport::merge(name, &flat))
}

fn unit_or_finite(name: &str, value: f64, constant: bool) -> CheckReport {
    if constant {
        CheckReport::new(name, (value - 1.0).abs(), CONSTANT_EXPONENT_RTOL)
    } else {
        // Variable exponents: only finiteness is asserted here.
        CheckReport::new(name, value, f64::MAX)
    }
}

/// Runs a named check and folds it into one worst-case report.
pub fn run_check(name: CheckName, inputs: &CheckInputs) -> Result<CheckReport> {
    let b = &inputs.b;
    let fam = &inputs.fam;
    let pr = &inputs.params;
    fam.validate_for(b.domain())?;
    let label = name.name();
    match name {
        CheckName::CubeLemma => {
            let gp = FracParams::new(pr.gamma)?;
            sweep(label, &inputs.cubes(true)?, |q| {
                Ok(check_cube_lemma(b, q, &gp, fam)?
                    .to_check_reports()
                    .to_vec())
            })
        }
        CheckName::Holder => {
            let r = check_holder(b, &inputs.second()?, &inputs.exponent()?)?;
            Ok(r.to_check_report(label))
        }
        CheckName::Power => {
            let mut r = check_power_identity(b, &inputs.exponent()?, pr.r)?;
            r.check = label.into();
            Ok(r)
        }
        CheckName::ChiProduct => {
            let p = inputs.exponent()?;
            let s = check_chi_product(&p, fam)?;
            Ok(unit_or_finite(label, s.sup_value, p.is_constant()))
        }
        CheckName::ChiEmbedding => {
            let p = inputs.exponent()?;
            let s = check_chi_embedding(&p, &FracParams::new(pr.gamma)?, fam)?;
            Ok(unit_or_finite(label, s.sup_value, p.is_constant()))
        }
        CheckName::CommutatorIdentity => sweep(label, &inputs.cubes(true)?, |q| {
            Ok(vec![check_commutator_identity(b, q, pr.alpha, fam)?])
        }),
        CheckName::EfBalance => sweep(label, &inputs.cubes(true)?, |q| {
            Ok(check_ef_balance(b, q, pr.gamma, fam)?
                .to_check_reports()
                .to_vec())
        }),
        CheckName::OscBound => sweep(label, &inputs.cubes(true)?, |q| {
            Ok(vec![
                check_oscillation_bound(b, q, pr.beta, pr.gamma, fam)?.to_check_report()
            ])
        }),
        CheckName::Domination => {
            let probes: Vec<GridFunction<f64>> = match &inputs.f {
                Some(f) => vec![f.clone()],
                None => standard_probes(b.domain())?
                    .into_iter()
                    .map(|p| p.f)
                    .collect(),
            };
            let mut reports = Vec::new();
            for f in &probes {
                let r = check_pointwise_domination(b, f, pr.alpha, pr.beta, fam, pr.domination)?;
                reports.extend(r.to_check_reports());
            }
            Ok(CheckReport::merge(label, &reports))
        }
        CheckName::McLower => sweep(label, &inputs.cubes(false)?, |q| {
            Ok(vec![check_mc_lower_bound(b, q, pr.alpha, fam)?])
        }),
        CheckName::Nclip3 => sweep(label, &inputs.cubes(true)?, |q| {
            Ok(vec![check_nclip3_chain(b, q, pr.alpha, fam)?])
        }),
    }
}
