//! Multiscale engine: summed-area tables for window sums and a monotone
//! queue for the per-scale maximum over windows containing each cell.

use std::collections::VecDeque;

use crate::grid::{Cube, CubeFamily, Domain, GridFunction};
use crate::scalar::Real;

/// Summed-area table over a `rows × cols` block (1D uses `cols = 1`),
/// scaled by a per-cell weight on lookup.
#[derive(Debug, Clone)]
pub struct PrefixTable<T> {
    rows: usize,
    cols: usize,
    table: Vec<T>,
    weight: T,
}

impl<T: Real> PrefixTable<T> {
    /// Table of `f`'s samples weighted by the cell measure `h^dim`.
    pub fn new(f: &GridFunction<T>) -> Self {
        let d = f.domain();
        Self::from_values(f.samples(), d.rows(), d.cols(), d.cell_measure())
    }

    pub(crate) fn from_values(values: &[T], rows: usize, cols: usize, weight: T) -> Self {
        debug_assert_eq!(values.len(), rows * cols);
        let stride = cols + 1;
        let mut table = vec![T::zero(); (rows + 1) * stride];
        for i in 0..rows {
            let mut acc = T::zero();
            for j in 0..cols {
                acc = acc + values[i * cols + j];
                table[(i + 1) * stride + j + 1] = table[i * stride + j + 1] + acc;
            }
        }
        PrefixTable {
            rows,
            cols,
            table,
            weight,
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> T {
        self.table[i * (self.cols + 1) + j]
    }

    /// Unweighted sum over rows `r0..r0+er`, columns `c0..c0+ec`.
    #[inline]
    pub(crate) fn raw_window(&self, r0: usize, c0: usize, er: usize, ec: usize) -> T {
        let (r1, c1) = (r0 + er, c0 + ec);
        debug_assert!(r1 <= self.rows && c1 <= self.cols);
        (self.at(r1, c1) - self.at(r0, c1)) - (self.at(r1, c0) - self.at(r0, c0))
    }

    /// Weighted sum over a window: the integral over that block.
    pub fn window_integral(&self, r0: usize, c0: usize, er: usize, ec: usize) -> T {
        self.raw_window(r0, c0, er, ec) * self.weight
    }

    /// `∫_Q f` for a cube of the table's domain.
    pub fn cube_integral(&self, dom: &Domain<T>, q: &Cube) -> T {
        let (er, ec) = dom.extent(q.side);
        self.window_integral(q.anchor[0], q.anchor[1], er, ec)
    }
}

/// `|Q|^{γ/n − 1}` for a cube of the given side.
pub(crate) fn cube_weight<T: Real>(side: usize, h: T, dim: usize, gamma: T) -> T {
    let measure = (T::from_usize_exact(side) * h).powi(dim as i32);
    measure.powf(gamma / T::from_usize_exact(dim) - T::one())
}

/// A rectangular block of cells the engine scans: either a whole domain or
/// the cells of a cube. `phase` is the global offset of the block, used so
/// that anchor strides refer to global cell indices.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Block<T> {
    pub rows: usize,
    pub cols: usize,
    pub dim: usize,
    pub h: T,
    pub phase: [usize; 2],
}

impl<T: Real> Block<T> {
    pub fn of_domain(dom: &Domain<T>) -> Self {
        Block {
            rows: dom.rows(),
            cols: dom.cols(),
            dim: dom.dim(),
            h: dom.spacing(),
            phase: [0, 0],
        }
    }

    pub fn of_cube(dom: &Domain<T>, q: &Cube) -> Self {
        let (rows, cols) = dom.extent(q.side);
        Block {
            rows,
            cols,
            dim: dom.dim(),
            h: dom.spacing(),
            phase: q.anchor,
        }
    }

    pub fn extent(&self, side: usize) -> (usize, usize) {
        if self.dim == 2 {
            (side, side)
        } else {
            (side, 1)
        }
    }

    pub fn anchors(&self, fam: &CubeFamily, side: usize) -> (Vec<usize>, Vec<usize>) {
        let (er, ec) = self.extent(side);
        let rows = fam.anchors(self.rows, er, self.phase[0]);
        let cols = if self.dim == 2 {
            fam.anchors(self.cols, ec, self.phase[1])
        } else if ec <= self.cols {
            vec![0]
        } else {
            Vec::new()
        };
        (rows, cols)
    }
}

/// For each position `i < n`, the maximum of `vals[k]` over windows
/// `[anchors[k], anchors[k] + ext)` containing `i`, or `-∞` when none does.
/// `anchors` must be increasing.
pub(crate) fn sliding_max<T: Real>(vals: &[T], anchors: &[usize], ext: usize, out: &mut [T]) {
    debug_assert_eq!(vals.len(), anchors.len());
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut next = 0;
    for (i, slot) in out.iter_mut().enumerate() {
        while next < anchors.len() && anchors[next] <= i {
            while queue.back().is_some_and(|&k| vals[k] <= vals[next]) {
                queue.pop_back();
            }
            queue.push_back(next);
            next += 1;
        }
        while queue.front().is_some_and(|&k| anchors[k] + ext <= i) {
            queue.pop_front();
        }
        *slot = queue.front().map_or(T::neg_infinity(), |&k| vals[k]);
    }
}

/// `max over family cubes Q ∋ x inside the block of |Q|^{γ/n−1} Σ_Q v·h^n`
/// for nonnegative `values` laid out row-major over the block. Cells not
/// covered by any family cube get 0.
pub(crate) fn scan_maximal<T: Real>(
    values: &[T],
    block: &Block<T>,
    gamma: T,
    fam: &CubeFamily,
) -> Vec<T> {
    let (rows, cols) = (block.rows, block.cols);
    let cell = block.h.powi(block.dim as i32);
    let table = PrefixTable::from_values(values, rows, cols, cell);
    let mut out = vec![T::zero(); rows * cols];
    let mut col_pass = vec![T::zero(); cols];
    let mut row_vals = Vec::new();
    let mut row_out = vec![T::zero(); rows];
    for &side in fam.scales() {
        let (er, ec) = block.extent(side);
        let (ar, ac) = block.anchors(fam, side);
        if ar.is_empty() || ac.is_empty() {
            continue;
        }
        let w = cube_weight(side, block.h, block.dim, gamma);
        // Window averages, then max along columns for every anchor row.
        let mut partial = vec![T::neg_infinity(); ar.len() * cols];
        let mut window_vals = vec![T::zero(); ac.len()];
        for (ia, &r0) in ar.iter().enumerate() {
            for (ja, &c0) in ac.iter().enumerate() {
                window_vals[ja] = w * table.window_integral(r0, c0, er, ec);
            }
            sliding_max(&window_vals, &ac, ec, &mut col_pass);
            partial[ia * cols..(ia + 1) * cols].copy_from_slice(&col_pass);
        }
        // Max along rows.
        for j in 0..cols {
            row_vals.clear();
            row_vals.extend((0..ar.len()).map(|ia| partial[ia * cols + j]));
            sliding_max(&row_vals, &ar, er, &mut row_out);
            for i in 0..rows {
                let slot = &mut out[i * cols + j];
                if row_out[i] > *slot {
                    *slot = row_out[i];
                }
            }
        }
    }
    out
}
