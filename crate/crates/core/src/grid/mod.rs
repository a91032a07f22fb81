//! Uniform box grids, grid functions, cubes and quadrature.
//!
//! A [`Domain`] is an isotropic box in one or two dimensions split into
//! equal cells. Functions are sampled at cell centers and stored row-major
//! (axis 0 is the slow axis). A [`Cube`] is an axis-parallel square of
//! whole cells that never crosses the domain boundary.

mod corpus;
pub mod io;

pub use corpus::{make_corpus, standard_corpus, Symbol};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

const ISOTROPY_RTOL: f64 = 1e-10;

/// Largest 1D grid for which the Lipschitz seminorm scans every pair.
pub const EXHAUSTIVE_PAIR_CELLS: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct Domain<T> {
    dim: usize,
    lo: [T; 2],
    hi: [T; 2],
    cells: [usize; 2],
    h: T,
}

impl<T: Real> Domain<T> {
    pub fn new(lo: &[T], hi: &[T], cells: &[usize]) -> Result<Self> {
        let dim = cells.len();
        if !(1..=2).contains(&dim) || lo.len() != dim || hi.len() != dim {
            return Err(Error::InvalidDomain(format!(
                "dimension must be 1 or 2 with one (lo, hi, cells) per axis, got {} / {} / {}",
                lo.len(),
                hi.len(),
                cells.len()
            )));
        }
        let mut out = Domain {
            dim,
            lo: [T::zero(); 2],
            hi: [T::one(); 2],
            cells: [1; 2],
            h: T::zero(),
        };
        for axis in 0..dim {
            if !(lo[axis].is_finite() && hi[axis].is_finite()) || hi[axis] <= lo[axis] {
                return Err(Error::InvalidDomain(format!(
                    "axis {axis}: need finite lo < hi, got [{}, {}]",
                    lo[axis], hi[axis]
                )));
            }
            if cells[axis] < 2 {
                return Err(Error::InvalidDomain(format!(
                    "axis {axis}: need at least 2 cells, got {}",
                    cells[axis]
                )));
            }
            out.lo[axis] = lo[axis];
            out.hi[axis] = hi[axis];
            out.cells[axis] = cells[axis];
        }
        let h0 = (hi[0] - lo[0]) / T::from_usize_exact(cells[0]);
        if dim == 2 {
            let h1 = (hi[1] - lo[1]) / T::from_usize_exact(cells[1]);
            if ((h1 - h0) / h0).abs() > T::lit(ISOTROPY_RTOL) {
                return Err(Error::InvalidDomain(format!(
                    "spacing differs between axes ({h0} vs {h1}); grids must be isotropic"
                )));
            }
        } else {
            out.hi[1] = h0;
        }
        out.h = h0;
        Ok(out)
    }

    pub fn interval(lo: T, hi: T, cells: usize) -> Result<Self> {
        Self::new(&[lo], &[hi], &[cells])
    }

    /// Square `[lo, hi]²` with `cells` cells per axis.
    pub fn square(lo: T, hi: T, cells: usize) -> Result<Self> {
        Self::new(&[lo, lo], &[hi, hi], &[cells, cells])
    }

    /// Box `[-half_width, half_width]^dim` with `cells` cells per axis.
    pub fn symmetric(dim: usize, half_width: T, cells: usize) -> Result<Self> {
        match dim {
            1 => Self::interval(-half_width, half_width, cells),
            2 => Self::square(-half_width, half_width, cells),
            _ => Err(Error::InvalidDomain(format!("unsupported dimension {dim}"))),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lo(&self) -> &[T] {
        &self.lo[..self.dim]
    }

    pub fn hi(&self) -> &[T] {
        &self.hi[..self.dim]
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells[..self.dim]
    }

    /// Grid spacing, identical on every axis.
    pub fn spacing(&self) -> T {
        self.h
    }

    /// Total number of cells.
    pub fn len(&self) -> usize {
        self.cells[0] * self.cells[1]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min_cells(&self) -> usize {
        self.cells().iter().copied().min().unwrap_or(0)
    }

    pub fn cell_measure(&self) -> T {
        self.h.powi(self.dim as i32)
    }

    pub(crate) fn rows(&self) -> usize {
        self.cells[0]
    }

    pub(crate) fn cols(&self) -> usize {
        self.cells[1]
    }

    /// Per-axis cell indices of a flat row-major index.
    pub fn unflatten(&self, index: usize) -> [usize; 2] {
        [index / self.cells[1], index % self.cells[1]]
    }

    pub fn flatten(&self, idx: [usize; 2]) -> usize {
        idx[0] * self.cells[1] + idx[1]
    }

    /// Cell-center coordinate along one axis.
    pub fn coordinate(&self, axis: usize, i: usize) -> T {
        self.lo[axis] + (T::from_usize_exact(i) + T::lit(0.5)) * self.h
    }

    /// Cell-center coordinates of a flat index; only the first `dim`
    /// entries are meaningful.
    pub fn center(&self, index: usize) -> [T; 2] {
        let [i0, i1] = self.unflatten(index);
        let c0 = self.coordinate(0, i0);
        let c1 = if self.dim == 2 {
            self.coordinate(1, i1)
        } else {
            T::zero()
        };
        [c0, c1]
    }

    /// Euclidean distance between two cell centers.
    pub fn distance(&self, a: usize, b: usize) -> T {
        let [a0, a1] = self.unflatten(a);
        let [b0, b1] = self.unflatten(b);
        let d0 = T::from_usize_exact(a0.abs_diff(b0));
        let d1 = T::from_usize_exact(a1.abs_diff(b1));
        (d0 * d0 + d1 * d1).sqrt() * self.h
    }

    /// `|Q| = (side·h)^dim`.
    pub fn cube_measure(&self, side: usize) -> T {
        (T::from_usize_exact(side) * self.h).powi(self.dim as i32)
    }

    /// Extent of a cube of the given side in (rows, cols).
    pub(crate) fn extent(&self, side: usize) -> (usize, usize) {
        if self.dim == 2 {
            (side, side)
        } else {
            (side, 1)
        }
    }

    pub fn check_cube(&self, q: &Cube) -> Result<()> {
        if q.side == 0 {
            return Err(Error::InvalidCube("side must be positive".into()));
        }
        for axis in 0..2 {
            let limit = self.cells[axis];
            let ext = if axis < self.dim { q.side } else { 1 };
            if axis >= self.dim && q.anchor[axis] != 0 {
                return Err(Error::InvalidCube(format!(
                    "anchor on axis {axis} must be 0 in dimension {}",
                    self.dim
                )));
            }
            if q.anchor[axis] + ext > limit {
                return Err(Error::DomainMismatch(format!(
                    "cube anchor {:?} side {} leaves the domain ({} cells on axis {axis})",
                    &q.anchor[..self.dim],
                    q.side,
                    limit
                )));
            }
        }
        Ok(())
    }

    /// The cube covering the whole domain, when the domain is a square.
    pub fn whole_cube(&self) -> Result<Cube> {
        if self.dim == 2 && self.cells[0] != self.cells[1] {
            return Err(Error::InvalidCube(
                "domain is not square; no cube covers it".into(),
            ));
        }
        Ok(Cube {
            side: self.cells[0],
            anchor: [0, 0],
        })
    }

    /// Sub-box spanned by a cube, with the same spacing.
    pub fn subdomain(&self, q: &Cube) -> Result<Domain<T>> {
        self.check_cube(q)?;
        let side = T::from_usize_exact(q.side) * self.h;
        let mut lo = [T::zero(); 2];
        let mut hi = [T::zero(); 2];
        for axis in 0..self.dim {
            lo[axis] = self.lo[axis] + T::from_usize_exact(q.anchor[axis]) * self.h;
            hi[axis] = lo[axis] + side;
        }
        let cells = [q.side; 2];
        Domain::new(&lo[..self.dim], &hi[..self.dim], &cells[..self.dim])
    }

    pub(crate) fn same_grid(&self, other: &Domain<T>) -> bool {
        self == other
    }
}

/// Real samples at the cell centers of a [`Domain`], row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T> {
    domain: Domain<T>,
    samples: Vec<T>,
}

impl<T: Real> GridFunction<T> {
    pub fn new(domain: Domain<T>, samples: Vec<T>) -> Result<Self> {
        if samples.len() != domain.len() {
            return Err(Error::DomainMismatch(format!(
                "{} samples for a grid of {} cells",
                samples.len(),
                domain.len()
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(GridFunction { domain, samples })
    }

    pub(crate) fn from_raw(domain: Domain<T>, samples: Vec<T>) -> Self {
        debug_assert_eq!(samples.len(), domain.len());
        GridFunction { domain, samples }
    }

    /// Samples `f` at every cell center. `f` receives `dim` coordinates.
    pub fn from_fn(domain: Domain<T>, f: impl Fn(&[T]) -> T) -> Result<Self> {
        let dim = domain.dim();
        let samples = (0..domain.len())
            .map(|i| f(&domain.center(i)[..dim]))
            .collect();
        Self::new(domain, samples)
    }

    pub fn constant(domain: Domain<T>, c: T) -> Result<Self> {
        let n = domain.len();
        Self::new(domain, vec![c; n])
    }

    pub fn domain(&self) -> &Domain<T> {
        &self.domain
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(
            self.domain.clone(),
            self.samples.iter().map(|&v| f(v)).collect(),
        )
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.ensure_same_domain(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::new(self.domain.clone(), samples)
    }

    pub fn abs(&self) -> Self {
        Self::from_raw(
            self.domain.clone(),
            self.samples.iter().map(|v| v.abs()).collect(),
        )
    }

    pub fn scaled(&self, c: T) -> Result<Self> {
        self.map(|v| v * c)
    }

    pub fn shifted(&self, c: T) -> Result<Self> {
        self.map(|v| v + c)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn sup_abs(&self) -> T {
        self.samples
            .iter()
            .fold(T::zero(), |m, v| if v.abs() > m { v.abs() } else { m })
    }

    pub fn min(&self) -> T {
        self.samples.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.samples.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|v| *v == T::zero())
    }

    /// Samples of the cells inside `q`, in row-major order of the cube.
    pub fn restrict(&self, q: &Cube) -> Result<Vec<T>> {
        self.domain.check_cube(q)?;
        Ok(q.cells(&self.domain).map(|i| self.samples[i]).collect())
    }

    pub(crate) fn ensure_same_domain(&self, other: &Self) -> Result<()> {
        if self.domain.same_grid(&other.domain) {
            Ok(())
        } else {
            Err(Error::DomainMismatch(
                "grid functions live on different grids".into(),
            ))
        }
    }

    /// Converts the scalar type, e.g. for serialization.
    pub fn cast<U: Real>(&self) -> GridFunction<U> {
        let d = &self.domain;
        let lo: Vec<U> = d.lo().iter().map(|v| U::lit(v.to_f64_lossy())).collect();
        let hi: Vec<U> = d.hi().iter().map(|v| U::lit(v.to_f64_lossy())).collect();
        let domain = Domain::new(&lo, &hi, d.cells()).expect("cast of a valid domain");
        GridFunction::from_raw(
            domain,
            self.samples
                .iter()
                .map(|v| U::lit(v.to_f64_lossy()))
                .collect(),
        )
    }
}

/// Axis-parallel discrete cube: `side` cells along every axis starting at
/// `anchor`. In 1D the second anchor entry is 0.
///
/// The derived ordering compares `side` first and then `anchor`, which is
/// the tie-break used for argmax reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cube {
    pub side: usize,
    pub anchor: [usize; 2],
}

impl Cube {
    pub fn interval(anchor: usize, side: usize) -> Self {
        Cube {
            side,
            anchor: [anchor, 0],
        }
    }

    pub fn square(a0: usize, a1: usize, side: usize) -> Self {
        Cube {
            side,
            anchor: [a0, a1],
        }
    }

    pub fn from_anchor(anchor: &[usize], side: usize) -> Result<Self> {
        match anchor {
            [a] => Ok(Cube::interval(*a, side)),
            [a, b] => Ok(Cube::square(*a, *b, side)),
            _ => Err(Error::InvalidCube(format!(
                "anchor must have 1 or 2 entries, got {}",
                anchor.len()
            ))),
        }
    }

    /// Flat indices of the cells in the cube, row-major.
    pub fn cells<'a, T: Real>(&self, dom: &'a Domain<T>) -> impl Iterator<Item = usize> + 'a {
        let (er, ec) = dom.extent(self.side);
        let [r0, c0] = self.anchor;
        (r0..r0 + er).flat_map(move |r| (c0..c0 + ec).map(move |c| dom.flatten([r, c])))
    }

    pub fn contains_cell<T: Real>(&self, dom: &Domain<T>, index: usize) -> bool {
        let [i0, i1] = dom.unflatten(index);
        let (er, ec) = dom.extent(self.side);
        (self.anchor[0]..self.anchor[0] + er).contains(&i0)
            && (self.anchor[1]..self.anchor[1] + ec).contains(&i1)
    }

    /// Whether `self ⊆ outer`.
    pub fn is_within(&self, outer: &Cube) -> bool {
        (0..2).all(|a| {
            self.anchor[a] >= outer.anchor[a]
                && self.anchor[a] + self.side <= outer.anchor[a] + outer.side
        })
    }

    pub fn measure<T: Real>(&self, dom: &Domain<T>) -> T {
        dom.cube_measure(self.side)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalePolicy {
    /// Sides `1, 2, 4, …` up to the smallest cell count.
    Dyadic,
    /// Every side from 1 to the smallest cell count.
    All,
    /// An explicit list of sides.
    Custom,
}

/// Discretization of the supremum over cubes: the allowed sides and the
/// anchor stride.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeFamily {
    scales: Vec<usize>,
    stride: usize,
    policy: ScalePolicy,
}

impl CubeFamily {
    pub fn dyadic<T: Real>(dom: &Domain<T>) -> Self {
        Self::dyadic_up_to(dom.min_cells())
    }

    pub fn dyadic_up_to(max_side: usize) -> Self {
        let scales = std::iter::successors(Some(1usize), |s| s.checked_mul(2))
            .take_while(|&s| s <= max_side)
            .collect();
        CubeFamily {
            scales,
            stride: 1,
            policy: ScalePolicy::Dyadic,
        }
    }

    pub fn all<T: Real>(dom: &Domain<T>) -> Self {
        CubeFamily {
            scales: (1..=dom.min_cells()).collect(),
            stride: 1,
            policy: ScalePolicy::All,
        }
    }

    pub fn from_policy<T: Real>(policy: ScalePolicy, dom: &Domain<T>) -> Result<Self> {
        match policy {
            ScalePolicy::Dyadic => Ok(Self::dyadic(dom)),
            ScalePolicy::All => Ok(Self::all(dom)),
            ScalePolicy::Custom => Err(Error::InvalidFamily(
                "a custom family needs an explicit scale list".into(),
            )),
        }
    }

    pub fn custom(scales: Vec<usize>, stride: usize) -> Result<Self> {
        if scales.is_empty() {
            return Err(Error::EmptyFamily);
        }
        if scales[0] == 0 || scales.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidFamily(format!(
                "scales must be positive and strictly increasing, got {scales:?}"
            )));
        }
        if stride == 0 {
            return Err(Error::InvalidFamily("stride must be at least 1".into()));
        }
        Ok(CubeFamily {
            scales,
            stride,
            policy: ScalePolicy::Custom,
        })
    }

    pub fn with_stride(mut self, stride: usize) -> Result<Self> {
        if stride == 0 {
            return Err(Error::InvalidFamily("stride must be at least 1".into()));
        }
        self.stride = stride;
        Ok(self)
    }

    pub fn scales(&self) -> &[usize] {
        &self.scales
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn policy(&self) -> ScalePolicy {
        self.policy
    }

    pub fn validate_for<T: Real>(&self, dom: &Domain<T>) -> Result<()> {
        if self.scales.is_empty() {
            return Err(Error::EmptyFamily);
        }
        let max = *self.scales.last().expect("non-empty");
        if max > dom.min_cells() {
            return Err(Error::InvalidFamily(format!(
                "scale {max} exceeds the smallest cell count {}",
                dom.min_cells()
            )));
        }
        Ok(())
    }

    /// Allowed anchors along one axis for a given side.
    pub(crate) fn anchors(&self, cells: usize, side: usize, phase: usize) -> Vec<usize> {
        if side > cells {
            return Vec::new();
        }
        (0..=cells - side)
            .filter(|a| (a + phase).is_multiple_of(self.stride))
            .collect()
    }

    /// Every family cube inside `dom`, ordered by side then anchor.
    pub fn cubes<T: Real>(&self, dom: &Domain<T>) -> Vec<Cube> {
        let mut out = Vec::new();
        for &s in &self.scales {
            let rows = self.anchors(dom.rows(), s, 0);
            let cols = if dom.dim() == 2 {
                self.anchors(dom.cols(), s, 0)
            } else {
                vec![0]
            };
            for &r in &rows {
                for &c in &cols {
                    out.push(Cube {
                        side: s,
                        anchor: [r, c],
                    });
                }
            }
        }
        out
    }

    pub fn contains<T: Real>(&self, dom: &Domain<T>, q: &Cube) -> bool {
        dom.check_cube(q).is_ok()
            && self.scales.binary_search(&q.side).is_ok()
            && (0..dom.dim()).all(|a| q.anchor[a].is_multiple_of(self.stride))
    }

    /// Whether the discrete cube lemma applies to `q`: any family cube
    /// meeting `q` can be replaced by a family cube inside `q` of side
    /// `min(s, q.side)` covering the intersection. That needs unit stride
    /// and `q.side` among the scales.
    pub fn is_replacement_closed_for(&self, q: &Cube) -> bool {
        self.stride == 1
            && self.scales.binary_search(&q.side).is_ok()
            && self
                .scales
                .iter()
                .all(|&s| self.scales.binary_search(&s.min(q.side)).is_ok())
    }

    pub(crate) fn require_replacement_closed(&self, q: &Cube) -> Result<()> {
        if self.is_replacement_closed_for(q) {
            Ok(())
        } else {
            Err(Error::NotReplacementClosed(format!(
                "need stride 1 and side {} among scales {:?} (stride {})",
                q.side, self.scales, self.stride
            )))
        }
    }
}

/// `Σ_{cells in Q} f · h^dim`.
pub fn integrate<T: Real>(f: &GridFunction<T>, q: &Cube) -> Result<T> {
    let dom = f.domain();
    dom.check_cube(q)?;
    let sum = q.cells(dom).fold(T::zero(), |acc, i| acc + f.samples()[i]);
    Ok(sum * dom.cell_measure())
}

/// `f_Q = |Q|⁻¹ ∫_Q f`.
pub fn average<T: Real>(f: &GridFunction<T>, q: &Cube) -> Result<T> {
    let dom = f.domain();
    dom.check_cube(q)?;
    let sum = q.cells(dom).fold(T::zero(), |acc, i| acc + f.samples()[i]);
    Ok(sum / T::from_usize_exact(q.cells(dom).count()))
}

/// `χ_Q` on `dom`.
pub fn indicator<T: Real>(q: &Cube, dom: &Domain<T>) -> Result<GridFunction<T>> {
    dom.check_cube(q)?;
    let mut samples = vec![T::zero(); dom.len()];
    for i in q.cells(dom) {
        samples[i] = T::one();
    }
    Ok(GridFunction::from_raw(dom.clone(), samples))
}

/// Splits `b = b⁺ − b⁻` with `b⁻ = max(−b, 0)` and `b⁺ = |b| − b⁻`.
pub fn decompose<T: Real>(b: &GridFunction<T>) -> (GridFunction<T>, GridFunction<T>) {
    let minus: Vec<T> = b
        .samples()
        .iter()
        .map(|&v| if v < T::zero() { -v } else { T::zero() })
        .collect();
    let plus = b
        .samples()
        .iter()
        .zip(&minus)
        .map(|(&v, &m)| v.abs() - m)
        .collect();
    (
        GridFunction::from_raw(b.domain().clone(), plus),
        GridFunction::from_raw(b.domain().clone(), minus),
    )
}

/// How many point pairs the Lipschitz seminorm may inspect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairBudget {
    pub max_pairs: usize,
    pub seed: u64,
}

impl Default for PairBudget {
    fn default() -> Self {
        PairBudget {
            max_pairs: 4_000_000,
            seed: 0x05ee_d1a5,
        }
    }
}

/// `sup_{x≠y} |b(x) − b(y)| / |x − y|^β` over cell centers.
///
/// Exhaustive for 1D grids up to [`EXHAUSTIVE_PAIR_CELLS`] cells and for
/// any grid whose pair count fits the budget; otherwise `max_pairs`
/// uniformly drawn pairs from a seeded generator.
pub fn pointwise_lipschitz_seminorm<T: Real>(
    b: &GridFunction<T>,
    beta: T,
    budget: PairBudget,
) -> Result<T> {
    if !(beta > T::zero() && beta < T::one()) {
        return Err(Error::param(
            "beta",
            format!("need 0 < beta < 1, got {beta}"),
        ));
    }
    let dom = b.domain();
    let n = dom.len();
    let s = b.samples();
    let pairs = n * (n - 1) / 2;
    let exhaustive = (dom.dim() == 1 && n <= EXHAUSTIVE_PAIR_CELLS) || pairs <= budget.max_pairs;
    let ratio = |i: usize, j: usize| (s[i] - s[j]).abs() / dom.distance(i, j).powf(beta);
    let mut best = T::zero();
    if exhaustive {
        if dom.dim() == 1 {
            // 1D distances depend on the offset only.
            let h = dom.spacing();
            for d in 1..n {
                let w = (T::from_usize_exact(d) * h).powf(beta);
                for i in 0..n - d {
                    let r = (s[i] - s[i + d]).abs() / w;
                    if r > best {
                        best = r;
                    }
                }
            }
        } else {
            for i in 0..n {
                for j in i + 1..n {
                    let r = ratio(i, j);
                    if r > best {
                        best = r;
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        for _ in 0..budget.max_pairs {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            if i != j {
                let r = ratio(i, j);
                if r > best {
                    best = r;
                }
            }
        }
    }
    Ok(best)
}
