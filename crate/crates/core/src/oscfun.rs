//! Mean-oscillation seminorms, the commutator characterization functionals
//! and per-cube checks of the identities and inequalities behind them.
//!
//! Every functional has the shape `sup_Q value(b, Q)`. The per-cube value
//! is [`cube_functional_value`]; [`sup_functional`] scans a cube family and
//! keeps per-scale maxima and the smallest `(side, anchor)` maximizer.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{
    indicator, pointwise_lipschitz_seminorm, Cube, CubeFamily, Domain, GridFunction, PairBudget,
};
use crate::maxop::{
    maximal, maximal_commutator_at, maximal_local, nonlinear_commutator, CommutatorMode, FracParams,
};
use crate::report::CheckReport;
use crate::scalar::{compensated_sum, Real};
use crate::varlex::{luxemburg_raw, Exponent};

/// Which functional to evaluate on each cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OscKind {
    /// `|Q|^{−β/n} ‖(b − |Q|^{−α/n} M_{α,Q} b) χ_Q‖_s / ‖χ_Q‖_s`
    #[serde(rename = "nc-lip")]
    NcLip,
    /// `NcLip` with `β = 0`.
    #[serde(rename = "nc-bmo")]
    NcBmo,
    /// `|Q|^{−β/n} ‖(b − b_Q) χ_Q‖_s / ‖χ_Q‖_s`
    #[serde(rename = "mc-lip")]
    McLip,
    /// `McLip` with `β = 0`.
    #[serde(rename = "mc-bmo")]
    McBmo,
    /// `|Q|^{−β/n} (|Q|^{−1} ∫_Q |b − b_Q|^q)^{1/q}`
    #[serde(rename = "lip-q")]
    LipQ,
    /// `|Q|^{−1} ∫_Q |b − b_Q|`
    #[serde(rename = "bmo", alias = "bmo-seminorm")]
    BmoSeminorm,
    /// `|Q|^{−β/n} ‖(b − |Q|^{−γ/n} M_{γ,Q} b) χ_Q‖_s / ‖χ_Q‖_s`, `γ` the
    /// `gamma_for_max` parameter (`γ = 0` gives `M_Q`).
    #[serde(rename = "lip-max")]
    LipMax,
    /// `LipMax` with `β = 0`.
    #[serde(rename = "bmo-max")]
    BmoMax,
}

impl OscKind {
    pub const ALL: [OscKind; 8] = [
        OscKind::NcLip,
        OscKind::NcBmo,
        OscKind::McLip,
        OscKind::McBmo,
        OscKind::LipQ,
        OscKind::BmoSeminorm,
        OscKind::LipMax,
        OscKind::BmoMax,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OscKind::NcLip => "nc-lip",
            OscKind::NcBmo => "nc-bmo",
            OscKind::McLip => "mc-lip",
            OscKind::McBmo => "mc-bmo",
            OscKind::LipQ => "lip-q",
            OscKind::BmoSeminorm => "bmo",
            OscKind::LipMax => "lip-max",
            OscKind::BmoMax => "bmo-max",
        }
    }

    /// Kinds carrying a Lipschitz order `0 < β < 1`.
    pub fn is_lipschitz(self) -> bool {
        matches!(
            self,
            OscKind::NcLip | OscKind::McLip | OscKind::LipQ | OscKind::LipMax
        )
    }

    /// Kinds built on a localized maximal function, which need cubes meeting
    /// the cube-lemma precondition.
    pub fn needs_local_maximal(self) -> bool {
        matches!(
            self,
            OscKind::NcLip | OscKind::NcBmo | OscKind::LipMax | OscKind::BmoMax
        )
    }

    /// Kinds depending on `b` only through `b − b_Q`.
    pub fn is_mean_based(self) -> bool {
        matches!(
            self,
            OscKind::McLip | OscKind::McBmo | OscKind::LipQ | OscKind::BmoSeminorm
        )
    }
}

impl fmt::Display for OscKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OscKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        if norm == "bmo-seminorm" {
            return Ok(OscKind::BmoSeminorm);
        }
        OscKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| {
                Error::param(
                    "kind",
                    format!(
                        "unknown kind `{s}`; expected one of nc-lip, nc-bmo, mc-lip, mc-bmo, lip-q, bmo, lip-max, bmo-max"
                    ),
                )
            })
    }
}

/// The exponent `s(·)` of a norm-quotient functional.
#[derive(Debug, Clone, PartialEq)]
pub enum SExponent<T> {
    /// `s ≡ 1`: the quotient is the plain mean of `|D|`.
    One,
    /// Constant `s ≥ 1`: the power mean `(mean |D|^s)^{1/s}`.
    Const(T),
    /// A variable exponent on the grid of `b`.
    Field(Exponent<T>),
}

impl<T: Real> SExponent<T> {
    pub fn constant(s: T) -> Result<Self> {
        if !(s.is_finite() && s >= T::one()) {
            return Err(Error::OutOfClass(format!("need constant s >= 1, got {s}")));
        }
        Ok(if s == T::one() {
            SExponent::One
        } else {
            SExponent::Const(s)
        })
    }

    pub fn label(&self) -> String {
        match self {
            SExponent::One => "const:1".into(),
            SExponent::Const(s) => format!("const:{s}"),
            SExponent::Field(p) => format!("field[{}, {}]", p.p_minus(), p.p_plus()),
        }
    }
}

/// A functional: its kind and parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct OscFunctionalSpec<T> {
    pub kind: OscKind,
    pub alpha: T,
    pub beta: T,
    pub s: SExponent<T>,
    /// `q ≥ 1` of [`OscKind::LipQ`].
    pub inner_q: T,
    /// `γ` of [`OscKind::LipMax`] and [`OscKind::BmoMax`].
    pub gamma_for_max: T,
}

impl<T: Real> OscFunctionalSpec<T> {
    /// Parameters default to `α = β = γ = 0`, `s ≡ 1`, `q = 1`.
    pub fn new(kind: OscKind) -> Self {
        OscFunctionalSpec {
            kind,
            alpha: T::zero(),
            beta: T::zero(),
            s: SExponent::One,
            inner_q: T::one(),
            gamma_for_max: T::zero(),
        }
    }

    pub fn with_alpha(mut self, alpha: T) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_beta(mut self, beta: T) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_s(mut self, s: SExponent<T>) -> Self {
        self.s = s;
        self
    }

    pub fn with_inner_q(mut self, q: T) -> Self {
        self.inner_q = q;
        self
    }

    pub fn with_gamma_for_max(mut self, gamma: T) -> Self {
        self.gamma_for_max = gamma;
        self
    }

    /// Checks the parameter ranges for a grid of dimension `dim`.
    pub fn validate(&self, dim: usize) -> Result<()> {
        let n = T::from_usize_exact(dim);
        let k = self.kind;
        let finite = |v: T| v.is_finite();
        if !(finite(self.alpha)
            && finite(self.beta)
            && finite(self.inner_q)
            && finite(self.gamma_for_max))
        {
            return Err(Error::param("spec", "parameters must be finite"));
        }
        if k.is_lipschitz() {
            if !(self.beta > T::zero() && self.beta < T::one()) {
                return Err(Error::param(
                    "beta",
                    format!("{k} needs 0 < beta < 1, got {}", self.beta),
                ));
            }
        } else if self.beta != T::zero() {
            return Err(Error::param(
                "beta",
                format!("{k} takes beta = 0, got {}", self.beta),
            ));
        }
        match k {
            OscKind::NcLip | OscKind::NcBmo => {
                if self.alpha <= T::zero() {
                    return Err(Error::param(
                        "alpha",
                        format!("{k} needs alpha > 0, got {}", self.alpha),
                    ));
                }
            }
            OscKind::McLip | OscKind::McBmo if self.alpha < T::zero() => {
                return Err(Error::param(
                    "alpha",
                    format!("{k} needs alpha >= 0, got {}", self.alpha),
                ));
            }
            _ => {}
        }
        if self.alpha + self.beta >= n {
            return Err(Error::param(
                "alpha",
                format!(
                    "need alpha + beta < n = {dim}, got {} + {}",
                    self.alpha, self.beta
                ),
            ));
        }
        if k == OscKind::LipQ && self.inner_q < T::one() {
            return Err(Error::param(
                "inner_q",
                format!("need q >= 1, got {}", self.inner_q),
            ));
        }
        if matches!(k, OscKind::LipMax | OscKind::BmoMax)
            && !(self.gamma_for_max >= T::zero() && self.gamma_for_max < n)
        {
            return Err(Error::param(
                "gamma",
                format!("need 0 <= gamma < n, got {}", self.gamma_for_max),
            ));
        }
        if let SExponent::Const(s) = self.s {
            if s < T::one() {
                return Err(Error::OutOfClass(format!("need s >= 1, got {s}")));
            }
        }
        Ok(())
    }

    /// Order of the localized maximal function, if the kind uses one.
    fn local_gamma(&self) -> Option<T> {
        match self.kind {
            OscKind::NcLip | OscKind::NcBmo => Some(self.alpha),
            OscKind::LipMax | OscKind::BmoMax => Some(self.gamma_for_max),
            _ => None,
        }
    }
}

/// `b_Q` as a compensated mean with one refinement step.
fn mean<T: Real>(values: &[T]) -> T {
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        return first;
    }
    let n = T::from_usize_exact(values.len());
    let m = compensated_sum(values.iter().copied()) / n;
    m + compensated_sum(values.iter().map(|&v| v - m)) / n
}

fn mean_abs_pow<T: Real>(values: &[T], q: T) -> T {
    let n = T::from_usize_exact(values.len());
    if q == T::one() {
        compensated_sum(values.iter().map(|v| v.abs())) / n
    } else {
        (compensated_sum(values.iter().map(|v| v.abs().powf(q))) / n).powf(T::one() / q)
    }
}

fn check_domain<T: Real>(b: &GridFunction<T>, s: &SExponent<T>) -> Result<()> {
    if let SExponent::Field(p) = s {
        b.ensure_same_domain(p.values())?;
    }
    Ok(())
}

/// `b(x) − |Q|^{−γ/n} M_{γ,Q} b(x)` on the cells of `Q`.
fn local_deviation<T: Real>(
    b: &GridFunction<T>,
    q: &Cube,
    gamma: T,
    fam: &CubeFamily,
) -> Result<Vec<T>> {
    let dom = b.domain();
    let local = maximal_local(b, &FracParams::new(gamma)?, q, fam)?;
    let norm = q.measure(dom).powf(-gamma / T::from_usize_exact(dom.dim()));
    Ok(q.cells(dom)
        .zip(local.values())
        .map(|(i, &m)| b.samples()[i] - norm * m)
        .collect())
}

/// `b − b_Q` on the cells of `Q`.
fn mean_deviation<T: Real>(b: &GridFunction<T>, q: &Cube) -> Result<Vec<T>> {
    let vals = b.restrict(q)?;
    let m = mean(&vals);
    Ok(vals.into_iter().map(|v| v - m).collect())
}

/// `‖D χ_Q‖_s / ‖χ_Q‖_s` for `D` given on the cells of `Q`.
fn s_quotient<T: Real>(dev: &[T], q: &Cube, s: &SExponent<T>, dom: &Domain<T>) -> Result<T> {
    match s {
        SExponent::One => Ok(mean_abs_pow(dev, T::one())),
        SExponent::Const(p) => Ok(mean_abs_pow(dev, *p)),
        SExponent::Field(p) => {
            let exps: Vec<T> = q.cells(dom).map(|i| p.values().samples()[i]).collect();
            let h = dom.cell_measure();
            let num = luxemburg_raw(dev, &exps, h)?.value;
            let den = luxemburg_raw(&vec![T::one(); exps.len()], &exps, h)?.value;
            Ok(num / den)
        }
    }
}

/// The functional's value on one cube. `fam` supplies the cubes of the
/// inner localized maximal function.
pub fn cube_functional_value<T: Real>(
    b: &GridFunction<T>,
    q: &Cube,
    spec: &OscFunctionalSpec<T>,
    fam: &CubeFamily,
) -> Result<T> {
    let dom = b.domain();
    spec.validate(dom.dim())?;
    check_domain(b, &spec.s)?;
    dom.check_cube(q)?;
    fam.validate_for(dom)?;
    if spec.kind.needs_local_maximal() {
        fam.require_replacement_closed(q)?;
    }
    value_unchecked(b, q, spec, fam)
}

fn value_unchecked<T: Real>(
    b: &GridFunction<T>,
    q: &Cube,
    spec: &OscFunctionalSpec<T>,
    fam: &CubeFamily,
) -> Result<T> {
    let dom = b.domain();
    let n = T::from_usize_exact(dom.dim());
    let scale = q.measure(dom).powf(-spec.beta / n);
    let value = match spec.kind {
        OscKind::BmoSeminorm => mean_abs_pow(&mean_deviation(b, q)?, T::one()),
        OscKind::LipQ => scale * mean_abs_pow(&mean_deviation(b, q)?, spec.inner_q),
        OscKind::McLip | OscKind::McBmo => {
            scale * s_quotient(&mean_deviation(b, q)?, q, &spec.s, dom)?
        }
        OscKind::NcLip | OscKind::NcBmo | OscKind::LipMax | OscKind::BmoMax => {
            let gamma = spec.local_gamma().unwrap_or_else(T::zero);
            scale * s_quotient(&local_deviation(b, q, gamma, fam)?, q, &spec.s, dom)?
        }
    };
    Ok(value)
}

/// Maximum over the cubes of one side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleMax<T> {
    pub side: usize,
    pub max: T,
}

/// Result of a supremum scan.
#[derive(Debug, Clone, PartialEq)]
pub struct SupReport<T> {
    pub kind: OscKind,
    pub sup_value: T,
    pub argmax_cube: Cube,
    pub per_scale_max: Vec<ScaleMax<T>>,
    pub cubes_evaluated: usize,
    /// Outer cubes left out because they fail the cube-lemma precondition.
    pub cubes_skipped: usize,
}

/// A per-cube value; `None` for a cube skipped on the precondition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubeValue<T> {
    pub cube: Cube,
    pub value: Option<T>,
}

/// The functional on every outer family cube, ordered by side then anchor.
pub fn evaluate_cubes<T: Real>(
    b: &GridFunction<T>,
    spec: &OscFunctionalSpec<T>,
    inner: &CubeFamily,
    outer: &CubeFamily,
) -> Result<Vec<CubeValue<T>>> {
    let dom = b.domain();
    spec.validate(dom.dim())?;
    check_domain(b, &spec.s)?;
    inner.validate_for(dom)?;
    outer.validate_for(dom)?;
    let cubes = outer.cubes(dom);
    cubes
        .par_iter()
        .map(|q| {
            let eligible = !spec.kind.needs_local_maximal() || inner.is_replacement_closed_for(q);
            let value = if eligible {
                Some(value_unchecked(b, q, spec, inner)?)
            } else {
                None
            };
            Ok(CubeValue { cube: *q, value })
        })
        .collect()
}

/// `sup_Q` of the functional over `fam`, which is also the inner family.
pub fn sup_functional<T: Real>(
    b: &GridFunction<T>,
    spec: &OscFunctionalSpec<T>,
    fam: &CubeFamily,
) -> Result<SupReport<T>> {
    sup_functional_over(b, spec, fam, fam)
}

/// `sup_Q` over the `outer` family with localized maxima taken over `inner`.
pub fn sup_functional_over<T: Real>(
    b: &GridFunction<T>,
    spec: &OscFunctionalSpec<T>,
    inner: &CubeFamily,
    outer: &CubeFamily,
) -> Result<SupReport<T>> {
    let values = evaluate_cubes(b, spec, inner, outer)?;
    summarize(spec.kind, &values)
}

/// Reduces per-cube values to a [`SupReport`]; ties go to the first cube
/// in (side, anchor) order.
pub fn summarize<T: Real>(kind: OscKind, values: &[CubeValue<T>]) -> Result<SupReport<T>> {
    let mut best: Option<(T, Cube)> = None;
    let mut per_scale: Vec<ScaleMax<T>> = Vec::new();
    let mut skipped = 0;
    for cv in values {
        let Some(v) = cv.value else {
            skipped += 1;
            continue;
        };
        match per_scale.last_mut() {
            Some(sm) if sm.side == cv.cube.side => sm.max = sm.max.max(v),
            _ => per_scale.push(ScaleMax {
                side: cv.cube.side,
                max: v,
            }),
        }
        if best.as_ref().is_none_or(|(m, _)| v > *m) {
            best = Some((v, cv.cube));
        }
    }
    let (sup_value, argmax_cube) = best.ok_or_else(|| {
        Error::NoEligibleCubes(format!(
            "{kind}: all {skipped} family cubes fail the cube-lemma precondition"
        ))
    })?;
    Ok(SupReport {
        kind,
        sup_value,
        argmax_cube,
        per_scale_max: per_scale,
        cubes_evaluated: values.len() - skipped,
        cubes_skipped: skipped,
    })
}

/// Serialized form of a [`SupReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub kind: OscKind,
    pub alpha: f64,
    pub beta: f64,
    pub s: String,
    pub sup_value: f64,
    pub argmax: CubeRecord,
    pub per_scale: Vec<ScaleRecord>,
    pub cubes_evaluated: usize,
    pub cubes_skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeRecord {
    pub anchor: Vec<usize>,
    pub side: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleRecord {
    pub side: usize,
    pub max: f64,
}

impl<T: Real> SupReport<T> {
    pub fn to_report(&self, spec: &OscFunctionalSpec<T>, dim: usize) -> FunctionalReport {
        FunctionalReport {
            kind: spec.kind,
            alpha: spec.alpha.to_f64_lossy(),
            beta: spec.beta.to_f64_lossy(),
            s: spec.s.label(),
            sup_value: self.sup_value.to_f64_lossy(),
            argmax: CubeRecord {
                anchor: self.argmax_cube.anchor[..dim].to_vec(),
                side: self.argmax_cube.side,
            },
            per_scale: self
                .per_scale_max
                .iter()
                .map(|s| ScaleRecord {
                    side: s.side,
                    max: s.max.to_f64_lossy(),
                })
                .collect(),
            cubes_evaluated: self.cubes_evaluated,
            cubes_skipped: self.cubes_skipped,
        }
    }
}

/// Writes per-cube values as CSV: `side,anchor0[,anchor1],value`, with an
/// empty value for skipped cubes.
pub fn write_cube_csv<T: Real, W: Write>(
    values: &[CubeValue<T>],
    dim: usize,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["side".to_string()];
    header.extend((0..dim).map(|a| format!("anchor{a}")));
    header.push("value".into());
    w.write_record(&header)
        .map_err(|e| Error::Format(e.to_string()))?;
    for cv in values {
        let mut rec = vec![cv.cube.side.to_string()];
        rec.extend(cv.cube.anchor[..dim].iter().map(|a| a.to_string()));
        rec.push(
            cv.value
                .map_or(String::new(), |v| format!("{:e}", v.to_f64_lossy())),
        );
        w.write_record(&rec)
            .map_err(|e| Error::Format(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn sup_abs_on<T: Real>(b: &GridFunction<T>, q: &Cube) -> T {
    q.cells(b.domain())
        .fold(T::zero(), |m, i| m.max(b.samples()[i].abs()))
}

/// Tolerance of the commutator identity, relative to `1 + sup_Q |b|`.
pub const COMMUTATOR_IDENTITY_RTOL: f64 = 1e-10;

/// On `Q`: `b − |Q|^{−α/n} M_{α,Q} b = |Q|^{−α/n} [b, M_α](χ_Q)`.
pub fn check_commutator_identity<T: Real>(
    b: &GridFunction<T>,
    q: &Cube,
    alpha: T,
    fam: &CubeFamily,
) -> Result<CheckReport> {
    let dom = b.domain();
    dom.check_cube(q)?;
    fam.require_replacement_closed(q)?;
    let gp = FracParams::new(alpha)?;
    let lhs = local_deviation(b, q, alpha, fam)?;
    let chi = indicator(q, dom)?;
    let comm = nonlinear_commutator(b, &chi, &gp, fam)?;
    let norm = q.measure(dom).powf(-alpha / T::from_usize_exact(dom.dim()));
    let dev = q.cells(dom).zip(&lhs).fold(T::zero(), |m, (i, &l)| {
        m.max((l - norm * comm.samples()[i]).abs())
    });
    let tol = COMMUTATOR_IDENTITY_RTOL * (1.0 + sup_abs_on(b, q).to_f64_lossy());
    Ok(CheckReport::new(
        "commutator-identity",
        dev.to_f64_lossy(),
        tol,
    ))
}

/// Both halves of the E/F argument on one cube.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EfBalanceReport {
    /// `|∫_E |b − b_Q| − ∫_F |b − b_Q||`
    pub balance_deviation: f64,
    /// `1e-12 · ∫_Q |b − b_Q|`
    pub balance_tolerance: f64,
    /// `max_{x∈E} (|b − b_Q| − |b − |Q|^{−γ/n} M_{γ,Q} b|)`
    pub pointwise_margin: f64,
    pub pointwise_tolerance: f64,
    pub pass: bool,
}

impl EfBalanceReport {
    pub fn to_check_reports(&self) -> [CheckReport; 2] {
        [
            CheckReport::new("ef-balance", self.balance_deviation, self.balance_tolerance),
            CheckReport::new(
                "ef-pointwise",
                self.pointwise_margin,
                self.pointwise_tolerance,
            ),
        ]
    }
}

pub const EF_BALANCE_RTOL: f64 = 1e-12;
pub const EF_POINTWISE_ATOL: f64 = 1e-12;

/// With `E = {x ∈ Q : b ≤ b_Q}` and `F = Q ∖ E`: the two halves of
/// `∫_Q |b − b_Q|` agree, and on `E`, `|b − b_Q| ≤ |b − |Q|^{−γ/n} M_{γ,Q} b|`.
pub fn check_ef_balance<T: Real>(
    b: &GridFunction<T>,
    q: &Cube,
    gamma: T,
    fam: &CubeFamily,
) -> Result<EfBalanceReport> {
    let dom = b.domain();
    dom.check_cube(q)?;
    fam.require_replacement_closed(q)?;
    let vals = b.restrict(q)?;
    // b_Q as an unevaluated sum hi + lo: rounding b_Q to one float leaves a
    // residual that dominates the balance on nearly flat cubes.
    let hi = mean(&vals);
    let n = T::from_usize_exact(vals.len());
    let lo = compensated_sum(vals.iter().map(|&v| v - hi)) / n;
    let dev: Vec<T> = vals.iter().map(|&v| (v - hi) - lo).collect();
    let local = local_deviation(b, q, gamma, fam)?;
    let h = dom.cell_measure();
    let in_e: Vec<bool> = dev.iter().map(|&d| d <= T::zero()).collect();
    let part = |want: bool| {
        compensated_sum(
            dev.iter()
                .zip(&in_e)
                .filter(|(_, &e)| e == want)
                .map(|(&d, _)| d.abs()),
        ) * h
    };
    let (ie, iff) = (part(true), part(false));
    let total = ie + iff;
    let mut margin = f64::NEG_INFINITY;
    for ((&d, &e), &l) in dev.iter().zip(&in_e).zip(&local) {
        if e {
            margin = margin.max((d.abs() - l.abs()).to_f64_lossy());
        }
    }
    let balance_deviation = (ie - iff).abs().to_f64_lossy();
    let balance_tolerance = EF_BALANCE_RTOL * total.to_f64_lossy();
    let pointwise_tolerance = EF_POINTWISE_ATOL;
    Ok(EfBalanceReport {
        balance_deviation,
        balance_tolerance,
        pointwise_margin: margin,
        pointwise_tolerance,
        pass: balance_deviation <= balance_tolerance && margin <= pointwise_tolerance,
    })
}

/// `|Q|^{−1−β/n} ∫_Q |b − b_Q|` against twice the same with
/// `|Q|^{−γ/n} M_{γ,Q} b` in place of `b_Q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillationBoundReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, `None` when both sides vanish.
    pub ratio: Option<f64>,
    pub pass: bool,
}

impl OscillationBoundReport {
    pub fn to_check_report(&self) -> CheckReport {
        CheckReport::new("osc-bound", self.lhs - self.rhs, OSC_BOUND_ATOL)
    }
}

pub const OSC_BOUND_ATOL: f64 = 1e-12;

pub fn check_oscillation_bound<T: Real>(
    b: &GridFunction<T>,
    q: &Cube,
    beta: T,
    gamma: T,
    fam: &CubeFamily,
) -> Result<OscillationBoundReport> {
    let dom = b.domain();
    dom.check_cube(q)?;
    fam.require_replacement_closed(q)?;
    let h = dom.cell_measure();
    let n = T::from_usize_exact(dom.dim());
    let w = q.measure(dom).powf(-T::one() - beta / n);
    let mean_dev = mean_deviation(b, q)?;
    let local = local_deviation(b, q, gamma, fam)?;
    let lhs = w * compensated_sum(mean_dev.iter().map(|v| v.abs())) * h;
    let rhs = T::lit(2.0) * w * compensated_sum(local.iter().map(|v| v.abs())) * h;
    let (lhs, rhs) = (lhs.to_f64_lossy(), rhs.to_f64_lossy());
    Ok(OscillationBoundReport {
        lhs,
        rhs,
        ratio: (rhs > 0.0).then(|| lhs / rhs),
        pass: lhs <= rhs + OSC_BOUND_ATOL,
    })
}

/// Which commutators a domination check covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DominationTarget {
    Nonlinear,
    Maximal,
    Both,
}

/// `|[b, M_α] f| ≤ C L M_{α+β} f` and `M_{α,b} f ≤ C L M_{α+β} f` at every
/// cell, with `L` the grid Lipschitz seminorm of `b` and `C = n^{β/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominationReport {
    pub seminorm: f64,
    /// `n^{β/2}`: the diameter of a unit cube to the power `β`.
    pub constant: f64,
    pub nonlinear_margin: Option<f64>,
    pub maximal_margin: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl DominationReport {
    pub fn to_check_reports(&self) -> Vec<CheckReport> {
        let mut out = Vec::new();
        if let Some(m) = self.nonlinear_margin {
            out.push(CheckReport::new("domination-nonlinear", m, self.tolerance));
        }
        if let Some(m) = self.maximal_margin {
            out.push(CheckReport::new("domination-maximal", m, self.tolerance));
        }
        out
    }
}

pub const DOMINATION_RTOL: f64 = 1e-10;

pub fn check_pointwise_domination<T: Real>(
    b: &GridFunction<T>,
    f: &GridFunction<T>,
    alpha: T,
    beta: T,
    fam: &CubeFamily,
    target: DominationTarget,
) -> Result<DominationReport> {
    b.ensure_same_domain(f)?;
    let dom = b.domain();
    let n = T::from_usize_exact(dom.dim());
    if !(beta > T::zero() && beta < T::one()) {
        return Err(Error::param(
            "beta",
            format!("need 0 < beta < 1, got {beta}"),
        ));
    }
    if alpha + beta >= n {
        return Err(Error::param(
            "alpha",
            format!(
                "need alpha + beta < n = {}, got {alpha} + {beta}",
                dom.dim()
            ),
        ));
    }
    let check_nonlinear = matches!(target, DominationTarget::Nonlinear | DominationTarget::Both);
    if check_nonlinear {
        if let Some(i) = b.samples().iter().position(|&v| v < T::zero()) {
            return Err(Error::Hypothesis(format!(
                "the nonlinear commutator bound needs b >= 0; b({i}) = {}",
                b.samples()[i]
            )));
        }
    }
    let gp = FracParams::new(alpha)?;
    let lifted = maximal(f, &FracParams::new(alpha + beta)?, fam)?;
    let l = pointwise_lipschitz_seminorm(b, beta, PairBudget::default())?;
    let c = n.powf(beta / T::lit(2.0));
    let bound: Vec<T> = lifted.samples().iter().map(|&m| c * l * m).collect();
    let margin = |vals: &[T]| {
        vals.iter()
            .zip(&bound)
            .fold(f64::NEG_INFINITY, |acc, (&v, &bd)| {
                acc.max((v.abs() - bd).to_f64_lossy())
            })
    };
    let nonlinear_margin = if check_nonlinear {
        Some(margin(nonlinear_commutator(b, f, &gp, fam)?.samples()))
    } else {
        None
    };
    let maximal_margin = if target != DominationTarget::Nonlinear {
        let cells: Vec<usize> = (0..dom.len()).collect();
        Some(margin(&maximal_commutator_at(
            b,
            f,
            &gp,
            fam,
            CommutatorMode::Fast,
            &cells,
        )?))
    } else {
        None
    };
    let seminorm = l.to_f64_lossy();
    let tolerance = DOMINATION_RTOL * seminorm;
    let pass = nonlinear_margin.is_none_or(|m| m <= tolerance)
        && maximal_margin.is_none_or(|m| m <= tolerance);
    Ok(DominationReport {
        seminorm,
        constant: c.to_f64_lossy(),
        nonlinear_margin,
        maximal_margin,
        tolerance,
        pass,
    })
}

pub const MC_LOWER_BOUND_RTOL: f64 = 1e-12;

/// On `Q`: `|b − b_Q| ≤ |Q|^{−α/n} M_{α,b}(χ_Q)`.
pub fn check_mc_lower_bound<T: Real>(
    b: &GridFunction<T>,
    q: &Cube,
    alpha: T,
    fam: &CubeFamily,
) -> Result<CheckReport> {
    let dom = b.domain();
    dom.check_cube(q)?;
    if !fam.contains(dom, q) {
        return Err(Error::Precondition(format!(
            "cube (side {}, anchor {:?}) is not in the family",
            q.side,
            &q.anchor[..dom.dim()]
        )));
    }
    let gp = FracParams::new(alpha)?;
    let chi = indicator(q, dom)?;
    let cells: Vec<usize> = q.cells(dom).collect();
    let mc = maximal_commutator_at(b, &chi, &gp, fam, CommutatorMode::Fast, &cells)?;
    let dev = mean_deviation(b, q)?;
    let norm = q.measure(dom).powf(-alpha / T::from_usize_exact(dom.dim()));
    let margin = dev
        .iter()
        .zip(&mc)
        .fold(f64::NEG_INFINITY, |acc, (&d, &m)| {
            acc.max((d.abs() - norm * m).to_f64_lossy())
        });
    let tol = MC_LOWER_BOUND_RTOL * (1.0 + b.sup_abs().to_f64_lossy());
    Ok(CheckReport::new("mc-lower", margin, tol))
}

pub const NCLIP3_ATOL: f64 = 1e-10;

/// On `Q`: `||Q|^{−α/n} M_{α,Q} b − M_Q b| ≤ |Q|^{−α/n} |[|b|, M_α](χ_Q)|
/// + |[|b|, M](χ_Q)|`.
pub fn check_nclip3_chain<T: Real>(
    b: &GridFunction<T>,
    q: &Cube,
    alpha: T,
    fam: &CubeFamily,
) -> Result<CheckReport> {
    let dom = b.domain();
    dom.check_cube(q)?;
    fam.require_replacement_closed(q)?;
    let gp = FracParams::new(alpha)?;
    let hl = FracParams::hardy_littlewood();
    let norm = q.measure(dom).powf(-alpha / T::from_usize_exact(dom.dim()));
    let local_a = maximal_local(b, &gp, q, fam)?;
    let local_0 = maximal_local(b, &hl, q, fam)?;
    let chi = indicator(q, dom)?;
    let abs_b = b.abs();
    let comm_a = nonlinear_commutator(&abs_b, &chi, &gp, fam)?;
    let comm_0 = nonlinear_commutator(&abs_b, &chi, &hl, fam)?;
    let mut margin = f64::NEG_INFINITY;
    for (k, i) in q.cells(dom).enumerate() {
        let lhs = (norm * local_a.values()[k] - local_0.values()[k]).abs();
        let rhs = norm * comm_a.samples()[i].abs() + comm_0.samples()[i].abs();
        margin = margin.max((lhs - rhs).to_f64_lossy());
    }
    Ok(CheckReport::new("nclip3", margin, NCLIP3_ATOL))
}
