//! Fractional maximal operators and their commutators.
//!
//! The supremum over cubes is taken over a [`CubeFamily`]. For each scale
//! the window integrals come from a summed-area table and the maximum over
//! windows containing a cell is a sliding-window maximum, so one scale
//! costs O(cells).

mod commutator;
mod engine;

pub use commutator::{maximal_commutator, maximal_commutator_at, CommutatorMode};
pub use engine::PrefixTable;

pub(crate) use engine::cube_weight;
use engine::{scan_maximal, Block};

use crate::error::{Error, Result};
use crate::grid::{indicator, Cube, CubeFamily, Domain, GridFunction};
use crate::scalar::Real;

/// Order `γ` of a fractional maximal operator, `0 ≤ γ < dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracParams<T> {
    gamma: T,
}

impl<T: Real> FracParams<T> {
    pub fn new(gamma: T) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= T::zero()) {
            return Err(Error::param(
                "gamma",
                format!("need 0 <= gamma, got {gamma}"),
            ));
        }
        Ok(FracParams { gamma })
    }

    /// The Hardy–Littlewood case `γ = 0`.
    pub fn hardy_littlewood() -> Self {
        FracParams { gamma: T::zero() }
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn validate_for(&self, dom: &Domain<T>) -> Result<()> {
        if self.gamma >= T::from_usize_exact(dom.dim()) {
            return Err(Error::param(
                "gamma",
                format!("need gamma < dim = {}, got {}", dom.dim(), self.gamma),
            ));
        }
        Ok(())
    }
}

fn prepare<T: Real>(f: &GridFunction<T>, gp: &FracParams<T>, fam: &CubeFamily) -> Result<()> {
    gp.validate_for(f.domain())?;
    fam.validate_for(f.domain())
}

/// `M_γ f(x) = max over family cubes Q ∋ x of |Q|^{γ/n−1} ∫_Q |f|`.
pub fn maximal<T: Real>(
    f: &GridFunction<T>,
    gp: &FracParams<T>,
    fam: &CubeFamily,
) -> Result<GridFunction<T>> {
    prepare(f, gp, fam)?;
    let dom = f.domain();
    let abs: Vec<T> = f.samples().iter().map(|v| v.abs()).collect();
    let out = scan_maximal(&abs, &Block::of_domain(dom), gp.gamma, fam);
    Ok(GridFunction::from_raw(dom.clone(), out))
}

/// `M_{γ,Q₀}f` on the cells of `Q₀`. Values outside `Q₀` are undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalMaximal<T> {
    cube: Cube,
    domain: Domain<T>,
    values: Vec<T>,
}

impl<T: Real> LocalMaximal<T> {
    pub fn cube(&self) -> &Cube {
        &self.cube
    }

    /// Values over the cells of `Q₀`, row-major within the cube.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Value at a global cell index, `None` outside `Q₀`.
    pub fn get(&self, index: usize) -> Option<T> {
        if !self.cube.contains_cell(&self.domain, index) {
            return None;
        }
        let [i0, i1] = self.domain.unflatten(index);
        let (_, ec) = self.domain.extent(self.cube.side);
        let local = (i0 - self.cube.anchor[0]) * ec + (i1 - self.cube.anchor[1]);
        Some(self.values[local])
    }

    /// Full-grid samples with `NaN` outside `Q₀`.
    pub fn to_full_nan(&self) -> Vec<T> {
        (0..self.domain.len())
            .map(|i| self.get(i).unwrap_or_else(T::nan))
            .collect()
    }

    /// The values as a grid function on the sub-box of `Q₀`.
    pub fn to_grid(&self) -> Result<GridFunction<T>> {
        GridFunction::new(self.domain.subdomain(&self.cube)?, self.values.clone())
    }
}

/// `M_{γ,Q₀}f(x) = max over family cubes Q with x ∈ Q ⊆ Q₀ of
/// |Q|^{γ/n−1} ∫_Q |f|`.
pub fn maximal_local<T: Real>(
    f: &GridFunction<T>,
    gp: &FracParams<T>,
    q0: &Cube,
    fam: &CubeFamily,
) -> Result<LocalMaximal<T>> {
    prepare(f, gp, fam)?;
    let dom = f.domain();
    let abs: Vec<T> = f.restrict(q0)?.into_iter().map(|v| v.abs()).collect();
    let values = scan_maximal(&abs, &Block::of_cube(dom, q0), gp.gamma, fam);
    Ok(LocalMaximal {
        cube: *q0,
        domain: dom.clone(),
        values,
    })
}

/// `[b, M_γ]f = b·M_γ f − M_γ(b f)`, both terms over the same family.
pub fn nonlinear_commutator<T: Real>(
    b: &GridFunction<T>,
    f: &GridFunction<T>,
    gp: &FracParams<T>,
    fam: &CubeFamily,
) -> Result<GridFunction<T>> {
    b.ensure_same_domain(f)?;
    let mf = maximal(f, gp, fam)?;
    let mbf = maximal(&b.mul(f)?, gp, fam)?;
    let out = b
        .samples()
        .iter()
        .zip(mf.samples())
        .zip(mbf.samples())
        .map(|((&bv, &m1), &m2)| bv * m1 - m2)
        .collect();
    Ok(GridFunction::from_raw(b.domain().clone(), out))
}

/// Deviations in the cube lemma on one cube.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubeLemmaReport<T> {
    /// `max_{x∈Q} |M_γ(fχ_Q)(x) − M_{γ,Q}f(x)|`
    pub restriction_deviation: T,
    /// `max_{x∈Q} |M_γ(χ_Q)(x) − |Q|^{γ/n}|`
    pub indicator_deviation: T,
    pub tolerance: T,
    pub pass: bool,
}

impl<T: Real> CubeLemmaReport<T> {
    pub fn to_check_reports(&self) -> [crate::report::CheckReport; 2] {
        use crate::report::CheckReport;
        let tol = self.tolerance.to_f64_lossy();
        [
            CheckReport::new(
                "cube-lemma-restriction",
                self.restriction_deviation.to_f64_lossy(),
                tol,
            ),
            CheckReport::new(
                "cube-lemma-indicator",
                self.indicator_deviation.to_f64_lossy(),
                tol,
            ),
        ]
    }
}

/// Relative tolerance of the discrete cube lemma.
pub const CUBE_LEMMA_RTOL: f64 = 1e-12;

/// Checks `M_γ(fχ_Q) = M_{γ,Q}f` and `M_γ(χ_Q) = |Q|^{γ/n}` on `Q`.
///
/// The identities are exact on the grid when the family has unit stride
/// and contains `Q`'s side; other families are rejected.
pub fn check_cube_lemma<T: Real>(
    f: &GridFunction<T>,
    q: &Cube,
    gp: &FracParams<T>,
    fam: &CubeFamily,
) -> Result<CubeLemmaReport<T>> {
    fam.require_replacement_closed(q)?;
    cube_lemma_deviations(f, q, gp, fam)
}

/// The cube-lemma deviations without the family precondition; with a
/// coarser family the identities may fail.
pub fn cube_lemma_deviations<T: Real>(
    f: &GridFunction<T>,
    q: &Cube,
    gp: &FracParams<T>,
    fam: &CubeFamily,
) -> Result<CubeLemmaReport<T>> {
    let dom = f.domain();
    dom.check_cube(q)?;
    let chi = indicator(q, dom)?;
    let global = maximal(&f.mul(&chi)?, gp, fam)?;
    let local = maximal_local(f, gp, q, fam)?;
    let m_chi = maximal(&chi, gp, fam)?;
    let measure = q.measure(dom);
    let n = T::from_usize_exact(dom.dim());
    let target = measure.powf(gp.gamma / n);
    let mut dev_restriction = T::zero();
    let mut dev_indicator = T::zero();
    for (k, i) in q.cells(dom).enumerate() {
        dev_restriction = dev_restriction.max((global.samples()[i] - local.values[k]).abs());
        dev_indicator = dev_indicator.max((m_chi.samples()[i] - target).abs());
    }
    let abs_integral = q
        .cells(dom)
        .fold(T::zero(), |acc, i| acc + f.samples()[i].abs())
        * dom.cell_measure();
    let tolerance = T::tol(CUBE_LEMMA_RTOL)
        * (T::one() + cube_weight(q.side, dom.spacing(), dom.dim(), gp.gamma) * abs_integral);
    Ok(CubeLemmaReport {
        restriction_deviation: dev_restriction,
        indicator_deviation: dev_indicator,
        tolerance,
        pass: dev_restriction <= tolerance && dev_indicator <= tolerance,
    })
}
