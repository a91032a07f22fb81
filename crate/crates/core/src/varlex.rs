//! Variable exponents, the modular `∫|f|^{p(x)}` and the Luxemburg norm
//! `‖f‖_{p(·)} = inf{λ > 0 : ∫(|f|/λ)^{p(x)} ≤ 1}`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{io, Cube, CubeFamily, Domain, GridFunction};
use crate::maxop::FracParams;
use crate::report::CheckReport;
use crate::scalar::{compensated_sum, Real};

/// Maximum bisection steps of the Luxemburg solver.
pub const MAX_BISECTION_STEPS: usize = 256;
/// Maximum doubling or halving steps while bracketing the root.
const MAX_BRACKET_STEPS: usize = 2200;

/// A grid-sampled exponent `p(·)` with `1 < p₋ ≤ p₊ < ∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct Exponent<T> {
    values: GridFunction<T>,
    p_minus: T,
    p_plus: T,
}

impl<T: Real> Exponent<T> {
    pub fn new(values: GridFunction<T>) -> Result<Self> {
        let (p_minus, p_plus) = (values.min(), values.max());
        if p_minus <= T::one() {
            return Err(Error::OutOfClass(format!(
                "need p_minus > 1, got {p_minus}"
            )));
        }
        Ok(Exponent {
            values,
            p_minus,
            p_plus,
        })
    }

    pub fn constant(domain: Domain<T>, p: T) -> Result<Self> {
        Self::new(GridFunction::constant(domain, p)?)
    }

    pub fn from_fn(domain: Domain<T>, p: impl Fn(&[T]) -> T) -> Result<Self> {
        Self::new(GridFunction::from_fn(domain, p)?)
    }

    /// The bundled log-Hölder exponent `p(x) = 1.5 + 1/(1 + |x|)`.
    pub fn log_holder_default(domain: Domain<T>) -> Result<Self> {
        Self::from_fn(domain, |x| {
            let r = x.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt();
            T::lit(1.5) + T::one() / (T::one() + r)
        })
    }

    pub fn values(&self) -> &GridFunction<T> {
        &self.values
    }

    pub fn domain(&self) -> &Domain<T> {
        self.values.domain()
    }

    pub fn p_minus(&self) -> T {
        self.p_minus
    }

    pub fn p_plus(&self) -> T {
        self.p_plus
    }

    pub fn is_constant(&self) -> bool {
        self.p_minus == self.p_plus
    }

    /// Pointwise `p/(p − 1)`.
    pub fn conjugate(&self) -> Result<Self> {
        conjugate(self)
    }
}

/// Pointwise `p' = p/(p − 1)`.
pub fn conjugate<T: Real>(p: &Exponent<T>) -> Result<Exponent<T>> {
    Exponent::new(p.values.map(|v| v / (v - T::one()))?)
}

/// `q` with `1/q = 1/p − γ/n`; needs `p₊ < n/γ`.
pub fn sobolev_shift<T: Real>(p: &Exponent<T>, gp: &FracParams<T>) -> Result<Exponent<T>> {
    let dom = p.domain();
    gp.validate_for(dom)?;
    let ratio = gp.gamma() / T::from_usize_exact(dom.dim());
    if ratio == T::zero() {
        return Ok(p.clone());
    }
    if p.p_plus >= T::one() / ratio {
        return Err(Error::Precondition(format!(
            "sobolev shift needs p_plus < n/gamma = {}, got p_plus = {}",
            T::one() / ratio,
            p.p_plus
        )));
    }
    Exponent::new(p.values.map(|v| T::one() / (T::one() / v - ratio))?)
}

/// `Σ |f_i|^{p_i} h^n`.
pub fn modular<T: Real>(f: &GridFunction<T>, p: &Exponent<T>) -> Result<T> {
    f.ensure_same_domain(&p.values)?;
    let h = f.domain().cell_measure();
    Ok(raw_modular(f.samples(), p.values.samples(), T::one(), h))
}

fn raw_modular<T: Real>(abs: &[T], exps: &[T], lambda: T, cell: T) -> T {
    compensated_sum(
        abs.iter()
            .zip(exps)
            .filter(|(a, _)| **a != T::zero())
            .map(|(&a, &e)| (a.abs() / lambda).powf(e)),
    ) * cell
}

/// Outcome of the Luxemburg root search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormResult<T> {
    pub value: T,
    /// Bracketing plus bisection steps.
    pub iterations: usize,
    pub bracket: (T, T),
    pub modular_at_value: T,
}

/// `‖f‖_{p(·)}`.
pub fn luxemburg_norm<T: Real>(f: &GridFunction<T>, p: &Exponent<T>) -> Result<NormResult<T>> {
    f.ensure_same_domain(&p.values)?;
    luxemburg_raw(f.samples(), p.values.samples(), f.domain().cell_measure())
}

/// Luxemburg functional of samples `values` against positive exponents
/// `exps`, each cell weighing `cell`. Exponents below one are admitted,
/// which gives the quasi-norm of the same formula.
///
/// Brackets the root by doubling or halving from `λ = 1`, then bisects.
/// The returned value is the upper end of the final bracket, so the
/// modular there never exceeds one.
pub fn luxemburg_raw<T: Real>(values: &[T], exps: &[T], cell: T) -> Result<NormResult<T>> {
    if values.len() != exps.len() {
        return Err(Error::DomainMismatch(format!(
            "{} samples against {} exponents",
            values.len(),
            exps.len()
        )));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    if let Some(i) = exps.iter().position(|e| !(e.is_finite() && *e > T::zero())) {
        return Err(Error::OutOfClass(format!("exponent at {i} is {}", exps[i])));
    }
    if values.iter().all(|v| *v == T::zero()) {
        return Ok(NormResult {
            value: T::zero(),
            iterations: 0,
            bracket: (T::zero(), T::zero()),
            modular_at_value: T::zero(),
        });
    }
    let m = |lambda: T| raw_modular(values, exps, lambda, cell);
    let two = T::lit(2.0);
    let mut iterations = 0;
    let (mut lo, mut hi);
    if m(T::one()) > T::one() {
        lo = T::one();
        hi = two;
        while m(hi) > T::one() {
            lo = hi;
            hi = hi * two;
            iterations += 1;
            if iterations > MAX_BRACKET_STEPS || !hi.is_finite() {
                return Err(Error::NoConvergence(iterations));
            }
        }
    } else {
        hi = T::one();
        lo = T::lit(0.5);
        while m(lo) <= T::one() {
            hi = lo;
            lo = lo / two;
            iterations += 1;
            if iterations > MAX_BRACKET_STEPS || lo == T::zero() {
                return Err(Error::NoConvergence(iterations));
            }
        }
    }
    // Invariant: m(lo) > 1 ≥ m(hi).
    let rtol = T::tol(1e-15);
    for _ in 0..MAX_BISECTION_STEPS {
        if hi - lo <= rtol * hi {
            break;
        }
        let mid = lo + (hi - lo) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        if m(mid) > T::one() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(NormResult {
        value: hi,
        iterations,
        bracket: (lo, hi),
        modular_at_value: m(hi),
    })
}

/// `‖χ_Q‖_{p(·)}`.
pub fn chi_norm<T: Real>(q: &Cube, p: &Exponent<T>) -> Result<T> {
    let dom = p.domain();
    dom.check_cube(q)?;
    let exps: Vec<T> = q.cells(dom).map(|i| p.values.samples()[i]).collect();
    if p.is_constant() {
        return Ok(q.measure(dom).powf(T::one() / p.p_minus));
    }
    let ones = vec![T::one(); exps.len()];
    Ok(luxemburg_raw(&ones, &exps, dom.cell_measure())?.value)
}

/// Tolerance for Hölder ratios with a constant exponent.
pub const HOLDER_CONSTANT_SLACK: f64 = 1e-8;
/// Constant adopted for variable exponents.
pub const HOLDER_VARIABLE_BOUND: f64 = 2.0;

/// `∫|fg| / (‖f‖_{p} ‖g‖_{p'})`, `None` when a norm vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderReport<T> {
    pub ratio: Option<T>,
    pub bound: T,
    pub pass: bool,
}

impl<T: Real> HolderReport<T> {
    fn new(numerator: T, denominator: T, constant_exponents: bool) -> Self {
        let bound = if constant_exponents {
            T::one() + T::tol(HOLDER_CONSTANT_SLACK)
        } else {
            T::lit(HOLDER_VARIABLE_BOUND)
        };
        let ratio = (denominator > T::zero()).then(|| numerator / denominator);
        HolderReport {
            ratio,
            bound,
            pass: ratio.is_none_or(|r| r <= bound),
        }
    }

    pub fn to_check_report(&self, name: &str) -> CheckReport {
        CheckReport::new(
            name,
            self.ratio.map_or(0.0, |r| r.to_f64_lossy()),
            self.bound.to_f64_lossy(),
        )
    }
}

/// `∫|fg| ≤ C ‖f‖_{p(·)} ‖g‖_{p'(·)}`.
pub fn check_holder<T: Real>(
    f: &GridFunction<T>,
    g: &GridFunction<T>,
    p: &Exponent<T>,
) -> Result<HolderReport<T>> {
    f.ensure_same_domain(g)?;
    let pc = conjugate(p)?;
    let lhs = compensated_sum(
        f.samples()
            .iter()
            .zip(g.samples())
            .map(|(a, b)| (*a * *b).abs()),
    ) * f.domain().cell_measure();
    let denom = luxemburg_norm(f, p)?.value * luxemburg_norm(g, &pc)?.value;
    Ok(HolderReport::new(lhs, denom, p.is_constant()))
}

/// `‖fg‖_{p(·)} ≤ C ‖f‖_{p₁(·)} ‖g‖_{p₂(·)}` with `1/p = 1/p₁ + 1/p₂`.
pub fn check_holder_triple<T: Real>(
    f: &GridFunction<T>,
    g: &GridFunction<T>,
    p1: &Exponent<T>,
    p2: &Exponent<T>,
) -> Result<HolderReport<T>> {
    f.ensure_same_domain(g)?;
    p1.values.ensure_same_domain(&p2.values)?;
    f.ensure_same_domain(&p1.values)?;
    let h = f.domain().cell_measure();
    let p: Vec<T> = p1
        .values
        .samples()
        .iter()
        .zip(p2.values.samples())
        .map(|(&a, &b)| a * b / (a + b))
        .collect();
    let fg = f.mul(g)?;
    let lhs = luxemburg_raw(fg.samples(), &p, h)?.value;
    let denom = luxemburg_norm(f, p1)?.value * luxemburg_norm(g, p2)?.value;
    Ok(HolderReport::new(
        lhs,
        denom,
        p1.is_constant() && p2.is_constant(),
    ))
}

/// Relative tolerance of the power identity.
pub const POWER_IDENTITY_RTOL: f64 = 1e-7;

/// Checks `‖|f|^r‖_{p(·)} = ‖f‖^r_{rp(·)}`.
pub fn check_power_identity<T: Real>(
    f: &GridFunction<T>,
    p: &Exponent<T>,
    r: T,
) -> Result<CheckReport> {
    if !(r.is_finite() && r > T::zero()) {
        return Err(Error::param("r", format!("need r > 0, got {r}")));
    }
    f.ensure_same_domain(&p.values)?;
    let h = f.domain().cell_measure();
    let powered: Vec<T> = f.samples().iter().map(|v| v.abs().powf(r)).collect();
    let rp: Vec<T> = p.values.samples().iter().map(|&v| r * v).collect();
    let lhs = luxemburg_raw(&powered, p.values.samples(), h)?.value;
    let rhs = luxemburg_raw(f.samples(), &rp, h)?.value.powf(r);
    let dev = (lhs - rhs).abs().to_f64_lossy();
    let tol = POWER_IDENTITY_RTOL * (1.0 + rhs.to_f64_lossy());
    Ok(CheckReport::new("power-identity", dev, tol))
}

/// Supremum of a per-cube quantity over a family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CubeSup<T> {
    pub sup_value: T,
    pub argmax: Cube,
    pub per_scale: Vec<(usize, T)>,
    pub cubes_evaluated: usize,
}

fn sup_over_cubes<T: Real>(
    dom: &Domain<T>,
    fam: &CubeFamily,
    value: impl Fn(&Cube) -> Result<T> + Sync,
) -> Result<CubeSup<T>> {
    fam.validate_for(dom)?;
    let cubes = fam.cubes(dom);
    let values: Vec<T> = cubes.par_iter().map(&value).collect::<Result<_>>()?;
    let mut best: Option<(T, Cube)> = None;
    let mut per_scale: Vec<(usize, T)> = Vec::new();
    // Cubes are ordered by side then anchor, so strict comparison keeps the
    // smallest (side, anchor) on ties.
    for (q, v) in cubes.iter().zip(values) {
        match per_scale.last_mut() {
            Some((s, m)) if *s == q.side => *m = m.max(v),
            _ => per_scale.push((q.side, v)),
        }
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, *q));
        }
    }
    let (sup_value, argmax) = best.ok_or(Error::EmptyFamily)?;
    Ok(CubeSup {
        sup_value,
        argmax,
        per_scale,
        cubes_evaluated: cubes.len(),
    })
}

/// `sup_Q |Q|^{-1} ‖χ_Q‖_{p(·)} ‖χ_Q‖_{p'(·)}`.
pub fn check_chi_product<T: Real>(p: &Exponent<T>, fam: &CubeFamily) -> Result<CubeSup<T>> {
    let pc = conjugate(p)?;
    let dom = p.domain();
    sup_over_cubes(dom, fam, |q| {
        Ok(chi_norm(q, p)? * chi_norm(q, &pc)? / q.measure(dom))
    })
}

/// `sup_Q ‖χ_Q‖_{p(·)} / (|Q|^{γ/n} ‖χ_Q‖_{q(·)})` with `q` the Sobolev
/// shift of `p`.
pub fn check_chi_embedding<T: Real>(
    p: &Exponent<T>,
    gp: &FracParams<T>,
    fam: &CubeFamily,
) -> Result<CubeSup<T>> {
    let q_exp = sobolev_shift(p, gp)?;
    let dom = p.domain();
    let n = T::from_usize_exact(dom.dim());
    sup_over_cubes(dom, fam, |q| {
        let scale = q.measure(dom).powf(gp.gamma() / n);
        Ok(chi_norm(q, p)? / (scale * chi_norm(q, &q_exp)?))
    })
}

/// `max over grid pairs with 0 < |x − y| ≤ 1/2 of
/// |p(x) − p(y)| · log(e + 1/|x − y|)`.
pub fn log_holder_modulus<T: Real>(p: &Exponent<T>) -> T {
    let dom = p.domain();
    let h = dom.spacing();
    let reach = (T::lit(0.5) / h + T::lit(1e-9))
        .floor()
        .to_usize()
        .unwrap_or(0);
    let vals = p.values.samples();
    let e = T::lit(std::f64::consts::E);
    let (rows, cols) = (dom.rows(), dom.cols());
    let half = T::lit(0.5);
    (0..dom.len())
        .into_par_iter()
        .map(|a| {
            let (i, j) = (a / cols, a % cols);
            let mut best = T::zero();
            let r_hi = (i + reach).min(rows - 1);
            let c_lo = j.saturating_sub(reach);
            let c_hi = (j + reach).min(cols - 1);
            // Each unordered pair once: later rows, or same row to the right.
            for r in i..=r_hi {
                let c_start = if r == i { j + 1 } else { c_lo };
                for c in c_start..=c_hi {
                    let di = T::from_usize_exact(r - i);
                    let dj = T::from_usize_exact(c.abs_diff(j));
                    let dist = h * (di * di + dj * dj).sqrt();
                    if dist > half {
                        continue;
                    }
                    let v = (vals[a] - vals[r * cols + c]).abs() * (e + T::one() / dist).ln();
                    if v > best {
                        best = v;
                    }
                }
            }
            best
        })
        .reduce(T::zero, |x, y| x.max(y))
}

/// Exponent given on the command line or in a config: `const:<value>` or
/// `file:<path>`.
#[derive(Debug, Clone, PartialEq)]
pub enum ExponentSpec {
    Const(f64),
    File(PathBuf),
}

impl ExponentSpec {
    /// Materializes the exponent on `domain`. A file must carry exactly
    /// that grid.
    pub fn resolve(&self, domain: &Domain<f64>) -> Result<Exponent<f64>> {
        match self {
            ExponentSpec::Const(p) => Exponent::constant(domain.clone(), *p),
            ExponentSpec::File(path) => {
                let values = read_exponent(path)?;
                if !values.domain().same_grid(domain) {
                    return Err(Error::DomainMismatch(format!(
                        "exponent file {} is sampled on a different grid",
                        path.display()
                    )));
                }
                Exponent::new(values)
            }
        }
    }

    pub fn constant_value(&self) -> Option<f64> {
        match self {
            ExponentSpec::Const(p) => Some(*p),
            ExponentSpec::File(_) => None,
        }
    }
}

fn read_exponent(path: &Path) -> Result<GridFunction<f64>> {
    let (values, _flagged) = io::read_gfn(path)?;
    Ok(values)
}

impl FromStr for ExponentSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(v) = s.strip_prefix("const:") {
            let p: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::param("exponent", format!("bad constant `{v}`")))?;
            if !p.is_finite() {
                return Err(Error::param("exponent", format!("bad constant `{v}`")));
            }
            Ok(ExponentSpec::Const(p))
        } else if let Some(path) = s.strip_prefix("file:") {
            Ok(ExponentSpec::File(PathBuf::from(path)))
        } else {
            Err(Error::param(
                "exponent",
                format!("expected const:<value> or file:<path>, got `{s}`"),
            ))
        }
    }
}

impl fmt::Display for ExponentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExponentSpec::Const(p) => write!(f, "const:{p}"),
            ExponentSpec::File(path) => write!(f, "file:{}", path.display()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize) -> Domain<f64> {
        Domain::<f64>::interval(0.0, 1.0, n).unwrap()
    }

    #[test]
    fn exponent_class() {
        assert!(Exponent::constant(unit(4), 1.0).is_err());
        let p = Exponent::constant(unit(4), 2.0).unwrap();
        assert!(p.is_constant());
        assert_eq!((p.p_minus(), p.p_plus()), (2.0, 2.0));
    }

    #[test]
    fn conjugates() {
        let p = Exponent::constant(unit(4), 2.0).unwrap();
        assert_eq!(p.conjugate().unwrap().p_minus(), 2.0);
        let p = Exponent::constant(unit(4), 4.0).unwrap();
        assert!((p.conjugate().unwrap().p_plus() - 4.0 / 3.0).abs() < 1e-15);
        let d = Domain::<f64>::interval(0.0, 1.0, 16).unwrap();
        let p = Exponent::from_fn(d, |x| 1.5 + 1.5 * x[0]).unwrap();
        let pc = p.conjugate().unwrap();
        for (a, b) in p.values().samples().iter().zip(pc.values().samples()) {
            assert!((b - a / (a - 1.0)).abs() < 1e-15);
        }
        let back = pc.conjugate().unwrap();
        for (a, b) in p.values().samples().iter().zip(back.values().samples()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn sobolev_shift_examples() {
        let d = Domain::<f64>::square(0.0, 1.0, 4).unwrap();
        let p = Exponent::constant(d.clone(), 1.5).unwrap();
        let q = sobolev_shift(&p, &FracParams::new(0.5).unwrap()).unwrap();
        assert!((q.p_minus() - 2.4).abs() < 1e-12);
        let same = sobolev_shift(&p, &FracParams::hardy_littlewood()).unwrap();
        assert_eq!(same, p);
        let p2 = Exponent::constant(unit(4), 2.0).unwrap();
        assert!(matches!(
            sobolev_shift(&p2, &FracParams::new(0.5).unwrap()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn modular_examples() {
        let d = unit(8);
        let p = Exponent::from_fn(d.clone(), |x| 1.2 + x[0]).unwrap();
        let zero = GridFunction::constant(d.clone(), 0.0).unwrap();
        assert_eq!(modular(&zero, &p).unwrap(), 0.0);
        let chi = GridFunction::from_fn(d.clone(), |x| if x[0] < 0.5 { 1.0 } else { 0.0 }).unwrap();
        assert!((modular(&chi, &p).unwrap() - 0.5).abs() < 1e-15);
        let two = GridFunction::constant(d.clone(), 2.0).unwrap();
        let p2 = Exponent::constant(d, 2.0).unwrap();
        assert!((modular(&two, &p2).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn norm_examples() {
        let d = unit(16);
        let chi = GridFunction::constant(d.clone(), 1.0).unwrap();
        let p = Exponent::from_fn(d.clone(), |x| 1.3 + 2.0 * x[0]).unwrap();
        let r = luxemburg_norm(&chi, &p).unwrap();
        assert!((r.value - 1.0).abs() < 1e-14);
        assert!(r.modular_at_value <= 1.0);

        let d4 = Domain::<f64>::interval(0.0, 4.0, 8).unwrap();
        let one = GridFunction::constant(d4.clone(), 1.0).unwrap();
        let r = luxemburg_norm(&one, &Exponent::constant(d4.clone(), 2.0).unwrap()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        assert!(r.iterations <= MAX_BISECTION_STEPS + 8);

        let zero = GridFunction::constant(d4.clone(), 0.0).unwrap();
        let r = luxemburg_norm(&zero, &Exponent::constant(d4, 2.0).unwrap()).unwrap();
        assert_eq!((r.value, r.iterations), (0.0, 0));
    }

    #[test]
    fn norm_of_tiny_and_huge_functions() {
        let d = unit(8);
        let p = Exponent::constant(d.clone(), 3.0).unwrap();
        for c in [1e-200, 1e-3, 1e5, 1e200] {
            let f = GridFunction::constant(d.clone(), c).unwrap();
            let r = luxemburg_norm(&f, &p).unwrap();
            assert!((r.value / c - 1.0).abs() < 1e-12, "{c}: {}", r.value);
        }
    }

    #[test]
    fn holder_examples() {
        let d = Domain::<f64>::interval(0.0, 4.0, 16).unwrap();
        let q = Cube::interval(2, 8);
        let chi = crate::grid::indicator(&q, &d).unwrap();
        let p = Exponent::constant(d.clone(), 2.0).unwrap();
        let r = check_holder(&chi, &chi, &p).unwrap();
        assert!((r.ratio.unwrap() - 1.0).abs() < 1e-12 && r.pass);
        let other = crate::grid::indicator(&Cube::interval(10, 4), &d).unwrap();
        assert_eq!(check_holder(&chi, &other, &p).unwrap().ratio, Some(0.0));
        let zero = GridFunction::constant(d.clone(), 0.0).unwrap();
        let r = check_holder(&zero, &chi, &p).unwrap();
        assert!(r.ratio.is_none() && r.pass);
    }

    #[test]
    fn power_identity_examples() {
        let d = unit(32);
        let p = Exponent::from_fn(d.clone(), |x| 1.5 + x[0]).unwrap();
        let f = GridFunction::from_fn(d.clone(), |x| (7.0 * x[0]).sin() + 0.2).unwrap();
        assert!(check_power_identity(&f, &p, 1.0).unwrap().max_deviation < 1e-14);
        assert!(check_power_identity(&f, &p, 0.5).unwrap().pass);
        let two = GridFunction::constant(d.clone(), 2.0).unwrap();
        let p1 = Exponent::constant(d, 1.0 + 1e-6).unwrap();
        assert!(check_power_identity(&two, &p1, 2.0).unwrap().pass);
        assert!(check_power_identity(&f, &p, 0.0).is_err());
    }

    #[test]
    fn chi_lemmas_for_constant_exponents() {
        let d = Domain::<f64>::symmetric(1, 1.0, 32).unwrap();
        let fam = CubeFamily::dyadic(&d);
        for pv in [2.0, 3.0] {
            let p = Exponent::constant(d.clone(), pv).unwrap();
            let s = check_chi_product(&p, &fam).unwrap();
            assert!((s.sup_value - 1.0).abs() < 1e-12);
        }
        let p = Exponent::constant(d.clone(), 2.0).unwrap();
        let s = check_chi_embedding(&p, &FracParams::new(0.25).unwrap(), &fam).unwrap();
        assert!((s.sup_value - 1.0).abs() < 1e-12);
        let s = check_chi_embedding(&p, &FracParams::hardy_littlewood(), &fam).unwrap();
        assert!((s.sup_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_holder_moduli() {
        let d = Domain::<f64>::symmetric(1, 1.0, 64).unwrap();
        assert_eq!(
            log_holder_modulus(&Exponent::constant(d.clone(), 2.0).unwrap()),
            0.0
        );
        let smooth = |n| {
            let d = Domain::<f64>::symmetric(1, 1.0, n).unwrap();
            log_holder_modulus(&Exponent::from_fn(d, |x| 2.0 + 1.0 / (1.0 + x[0].abs())).unwrap())
        };
        let step = |n| {
            let d = Domain::<f64>::symmetric(1, 1.0, n).unwrap();
            log_holder_modulus(
                &Exponent::from_fn(d, |x| if x[0] > 0.0 { 3.0 } else { 2.0 }).unwrap(),
            )
        };
        assert!((smooth(256) / smooth(64) - 1.0).abs() < 0.1);
        assert!(step(256) - step(64) > 1.0);
    }

    #[test]
    fn exponent_spec_parsing() {
        assert_eq!(
            "const:2".parse::<ExponentSpec>().unwrap(),
            ExponentSpec::Const(2.0)
        );
        assert_eq!(
            "file:p.gfn".parse::<ExponentSpec>().unwrap(),
            ExponentSpec::File("p.gfn".into())
        );
        assert!("2".parse::<ExponentSpec>().is_err());
        assert!("const:x".parse::<ExponentSpec>().is_err());
        let d = unit(4);
        assert!(ExponentSpec::Const(1.0).resolve(&d).is_err());
    }
}
