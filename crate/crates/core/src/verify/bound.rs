//! Empirical lower bounds for commutator operator norms between variable
//! Lebesgue spaces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{indicator, make_corpus, Cube, CubeFamily, Domain, GridFunction, Symbol};
use crate::maxop::{maximal_commutator, nonlinear_commutator, CommutatorMode, FracParams};
use crate::scalar::Real;
use crate::varlex::{luxemburg_norm, Exponent};

/// Which commutator to bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommutatorKind {
    /// `[b, M_α]`
    Nonlinear,
    /// `M_{α,b}`
    MaximalComm,
}

/// A named test input.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe<T> {
    pub name: String,
    pub f: GridFunction<T>,
}

/// Indicators of centered dyadic cubes (half, quarter and eighth of the
/// box side), the indicator of the box, and the bump.
pub fn standard_probes<T: Real>(dom: &Domain<T>) -> Result<Vec<Probe<T>>> {
    let n = dom.min_cells();
    let mut out = Vec::new();
    let mut side = n;
    while side >= 1 && out.len() < 4 {
        let a = (n - side) / 2;
        let anchor: Vec<usize> = vec![a; dom.dim()];
        let q = Cube::from_anchor(&anchor, side)?;
        out.push(Probe {
            name: format!("chi[{a}+{side}]"),
            f: indicator(&q, dom)?,
        });
        side /= 2;
    }
    out.push(Probe {
        name: "bump".into(),
        f: make_corpus(&Symbol::Bump, dom)?,
    });
    Ok(out)
}

/// The bound and the probe attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormBound {
    pub value: f64,
    pub probe: String,
    /// Ratio per probe, in probe order; probes with `f ≡ 0` are left out.
    pub ratios: Vec<(String, f64)>,
}

/// `max over probes f ≢ 0 of ‖Op(b, f)‖_{q(·)} / ‖f‖_{p(·)}`.
///
/// `1/p − 1/q` must be one constant `γ/n ≥ α/n` on the grid.
pub fn operator_norm_lower_bound<T: Real>(
    b: &GridFunction<T>,
    alpha: T,
    p: &Exponent<T>,
    q: &Exponent<T>,
    probes: &[Probe<T>],
    fam: &CubeFamily,
    which: CommutatorKind,
) -> Result<NormBound> {
    if probes.is_empty() {
        return Err(Error::param("probes", "the probe list is empty"));
    }
    b.ensure_same_domain(p.values())?;
    b.ensure_same_domain(q.values())?;
    let dom = b.domain();
    let gp = FracParams::new(alpha)?;
    gp.validate_for(dom)?;
    let shifts: Vec<T> = p
        .values()
        .samples()
        .iter()
        .zip(q.values().samples())
        .map(|(&pv, &qv)| T::one() / pv - T::one() / qv)
        .collect();
    let (lo, hi) = shifts
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(l, h), &s| {
            (l.min(s), h.max(s))
        });
    let floor = alpha / T::from_usize_exact(dom.dim());
    if hi - lo > T::tol(1e-9) || lo < floor - T::tol(1e-12) {
        return Err(Error::Precondition(format!(
            "need 1/p - 1/q constant and at least alpha/n = {floor}; found range [{lo}, {hi}]"
        )));
    }
    let mut ratios = Vec::new();
    let mut best: Option<(f64, String)> = None;
    for probe in probes {
        b.ensure_same_domain(&probe.f)?;
        let denom = luxemburg_norm(&probe.f, p)?.value;
        if denom == T::zero() {
            continue;
        }
        let image = match which {
            CommutatorKind::Nonlinear => nonlinear_commutator(b, &probe.f, &gp, fam)?,
            CommutatorKind::MaximalComm => {
                maximal_commutator(b, &probe.f, &gp, fam, CommutatorMode::Fast)?
            }
        };
        let ratio = (luxemburg_norm(&image, q)?.value / denom).to_f64_lossy();
        ratios.push((probe.name.clone(), ratio));
        if best.as_ref().is_none_or(|(v, _)| ratio > *v) {
            best = Some((ratio, probe.name.clone()));
        }
    }
    let (value, probe) =
        best.ok_or_else(|| Error::param("probes", "every probe is identically zero"))?;
    Ok(NormBound {
        value,
        probe,
        ratios,
    })
}
