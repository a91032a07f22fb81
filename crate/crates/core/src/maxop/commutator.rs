use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::engine::{cube_weight, PrefixTable};
use super::FracParams;
use crate::error::{Error, Result};
use crate::grid::{CubeFamily, Domain, GridFunction};
use crate::scalar::Real;

/// Evaluation strategy for [`maximal_commutator`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommutatorMode {
    /// Direct summation over every cube: the reference.
    Brute,
    /// One summed-area table of `|b(x) − b(·)||f|` per cell `x`, then O(1)
    /// window lookups.
    #[default]
    Fast,
}

impl fmt::Display for CommutatorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CommutatorMode::Brute => "brute",
            CommutatorMode::Fast => "fast",
        })
    }
}

impl FromStr for CommutatorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "brute" => Ok(CommutatorMode::Brute),
            "fast" => Ok(CommutatorMode::Fast),
            _ => Err(Error::param(
                "mode",
                format!("expected brute or fast, got `{s}`"),
            )),
        }
    }
}

/// Anchors per scale, with the window extent along each axis.
struct ScaleAnchors<T> {
    weight: T,
    extent: (usize, usize),
    rows: Vec<usize>,
    cols: Vec<usize>,
}

fn scale_anchors<T: Real>(dom: &Domain<T>, gamma: T, fam: &CubeFamily) -> Vec<ScaleAnchors<T>> {
    fam.scales()
        .iter()
        .filter(|&&s| s <= dom.min_cells())
        .map(|&side| {
            let extent = dom.extent(side);
            let rows = fam.anchors(dom.rows(), extent.0, 0);
            let cols = if dom.dim() == 2 {
                fam.anchors(dom.cols(), extent.1, 0)
            } else {
                vec![0]
            };
            ScaleAnchors {
                weight: cube_weight(side, dom.spacing(), dom.dim(), gamma),
                extent,
                rows,
                cols,
            }
        })
        .collect()
}

/// Anchors `a` in the sorted list with `a ≤ i < a + ext`.
fn covering(anchors: &[usize], i: usize, ext: usize) -> &[usize] {
    let lo = anchors.partition_point(|&a| a + ext <= i);
    let hi = anchors.partition_point(|&a| a <= i);
    &anchors[lo..hi]
}

/// `M_{γ,b}f(x) = max over family cubes Q ∋ x of
/// |Q|^{γ/n−1} ∫_Q |b(x) − b(y)||f(y)| dy`.
///
/// Both modes agree to rounding. `Fast` costs one table per cell plus one
/// lookup per covering cube; `Brute` sums every covering cube directly.
pub fn maximal_commutator<T: Real>(
    b: &GridFunction<T>,
    f: &GridFunction<T>,
    gp: &FracParams<T>,
    fam: &CubeFamily,
    mode: CommutatorMode,
) -> Result<GridFunction<T>> {
    let cells: Vec<usize> = (0..b.len()).collect();
    let out = maximal_commutator_at(b, f, gp, fam, mode, &cells)?;
    Ok(GridFunction::from_raw(b.domain().clone(), out))
}

/// [`maximal_commutator`] evaluated only at the given flat cell indices.
pub fn maximal_commutator_at<T: Real>(
    b: &GridFunction<T>,
    f: &GridFunction<T>,
    gp: &FracParams<T>,
    fam: &CubeFamily,
    mode: CommutatorMode,
    cells: &[usize],
) -> Result<Vec<T>> {
    b.ensure_same_domain(f)?;
    let dom = b.domain();
    gp.validate_for(dom)?;
    fam.validate_for(dom)?;
    if let Some(&bad) = cells.iter().find(|&&x| x >= dom.len()) {
        return Err(Error::param(
            "cells",
            format!("cell {bad} outside a grid of {}", dom.len()),
        ));
    }
    let scales = scale_anchors(dom, gp.gamma(), fam);
    let (bs, fs) = (b.samples(), f.samples());
    let cols = dom.cols();
    let cell = dom.cell_measure();

    Ok(cells
        .par_iter()
        .map(|&x| {
            let (i, j) = (x / cols, x % cols);
            let bx = bs[x];
            let table = match mode {
                CommutatorMode::Fast => {
                    let g: Vec<T> = bs
                        .iter()
                        .zip(fs)
                        .map(|(&by, &fy)| (bx - by).abs() * fy.abs())
                        .collect();
                    Some(PrefixTable::from_values(&g, dom.rows(), cols, cell))
                }
                CommutatorMode::Brute => None,
            };
            let mut best = T::zero();
            for sc in &scales {
                let (er, ec) = sc.extent;
                for &r0 in covering(&sc.rows, i, er) {
                    for &c0 in covering(&sc.cols, j, ec) {
                        let integral = match &table {
                            Some(t) => t.window_integral(r0, c0, er, ec),
                            None => {
                                let mut acc = T::zero();
                                for r in r0..r0 + er {
                                    for c in c0..c0 + ec {
                                        let y = r * cols + c;
                                        acc = acc + (bx - bs[y]).abs() * fs[y].abs();
                                    }
                                }
                                acc * cell
                            }
                        };
                        let v = sc.weight * integral;
                        if v > best {
                            best = v;
                        }
                    }
                }
            }
            best
        })
        .collect())
}
