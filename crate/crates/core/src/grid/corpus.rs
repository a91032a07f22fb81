//! Named test symbols sampled on a grid.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Domain, GridFunction};
use crate::error::{Error, Result};
use crate::scalar::Real;

const DEFAULT_BETA: f64 = 0.5;
const DEFAULT_SEED: u64 = 7;
const DEFAULT_DELTA: f64 = 0.25;

/// Test symbols. `|x|` is the Euclidean norm about the origin; "midpoint"
/// refers to the domain center.
#[derive(Debug, Clone, PartialEq)]
pub enum Symbol {
    /// `|x|^β`
    LipPos {
        beta: f64,
    },
    /// `x₀ − midpoint₀`
    LipSigned,
    /// `|log|x||`
    BmoPos,
    /// `log|x|`
    BmoSigned,
    /// Smooth bump of radius a quarter of the box width.
    Bump,
    /// `χ_{x₀ > midpoint₀}`
    Step,
    /// Nonnegative random Lipschitz profile (midpoint displacement).
    RandomLipschitz {
        seed: u64,
    },
    Const(f64),
    /// `|x − c|` with `c` a third of the way into the box.
    Wedge,
    /// `|x|^{−δ}`: integrable, unbounded, not of bounded mean oscillation.
    PowerSing {
        delta: f64,
    },
}

impl Symbol {
    pub fn name(&self) -> &'static str {
        match self {
            Symbol::LipPos { .. } => "lip_pos",
            Symbol::LipSigned => "lip_signed",
            Symbol::BmoPos => "bmo_pos",
            Symbol::BmoSigned => "bmo_signed",
            Symbol::Bump => "bump",
            Symbol::Step => "step",
            Symbol::RandomLipschitz { .. } => "random_lipschitz",
            Symbol::Const(_) => "const",
            Symbol::Wedge => "wedge",
            Symbol::PowerSing { .. } => "power_sing",
        }
    }

    /// Whether the generator is singular at the origin.
    pub fn is_singular(&self) -> bool {
        matches!(
            self,
            Symbol::BmoPos | Symbol::BmoSigned | Symbol::PowerSing { .. }
        )
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            Symbol::LipSigned | Symbol::BmoSigned => false,
            Symbol::Const(c) => *c >= 0.0,
            _ => true,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::LipPos { beta } => write!(f, "lip_pos({beta})"),
            Symbol::RandomLipschitz { seed } => write!(f, "random_lipschitz({seed})"),
            Symbol::Const(c) => write!(f, "const({c})"),
            Symbol::PowerSing { delta } => write!(f, "power_sing({delta})"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for Symbol {
    type Err = Error;

    /// Accepts `name`, `name(param)` or `name:param`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, param) = if let Some(open) = s.find('(') {
            let close = s
                .strip_suffix(')')
                .ok_or_else(|| Error::UnknownSymbol(s.to_string()))?;
            (&s[..open], Some(&close[open + 1..]))
        } else if let Some((n, p)) = s.split_once(':') {
            (n, Some(p))
        } else {
            (s, None)
        };
        let num = |default: f64| -> Result<f64> {
            match param {
                None => Ok(default),
                Some(p) => p
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::UnknownSymbol(s.to_string())),
            }
        };
        let no_param = |sym: Symbol| -> Result<Symbol> {
            if param.is_some() {
                Err(Error::UnknownSymbol(s.to_string()))
            } else {
                Ok(sym)
            }
        };
        match name.trim() {
            "lip_pos" => Ok(Symbol::LipPos {
                beta: num(DEFAULT_BETA)?,
            }),
            "lip_signed" => no_param(Symbol::LipSigned),
            "bmo_pos" => no_param(Symbol::BmoPos),
            "bmo_signed" => no_param(Symbol::BmoSigned),
            "bump" => no_param(Symbol::Bump),
            "step" => no_param(Symbol::Step),
            "wedge" => no_param(Symbol::Wedge),
            "random_lipschitz" => {
                let seed = match param {
                    None => DEFAULT_SEED,
                    Some(p) => p
                        .trim()
                        .parse()
                        .map_err(|_| Error::UnknownSymbol(s.to_string()))?,
                };
                Ok(Symbol::RandomLipschitz { seed })
            }
            "const" => {
                if param.is_none() {
                    return Err(Error::UnknownSymbol(s.to_string()));
                }
                Ok(Symbol::Const(num(0.0)?))
            }
            "power_sing" => Ok(Symbol::PowerSing {
                delta: num(DEFAULT_DELTA)?,
            }),
            _ => Err(Error::UnknownSymbol(s.to_string())),
        }
    }
}

/// The symbols exercised by corpus-wide sweeps.
pub fn standard_corpus(beta: f64) -> Vec<Symbol> {
    vec![
        Symbol::LipPos { beta },
        Symbol::LipSigned,
        Symbol::BmoPos,
        Symbol::BmoSigned,
        Symbol::Bump,
        Symbol::Step,
        Symbol::RandomLipschitz { seed: DEFAULT_SEED },
        Symbol::Const(2.0),
        Symbol::Wedge,
    ]
}

fn norm<T: Real>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt()
}

/// Samples a corpus symbol at the cell centers of `dom`.
pub fn make_corpus<T: Real>(symbol: &Symbol, dom: &Domain<T>) -> Result<GridFunction<T>> {
    let dim = dom.dim();
    let mid: Vec<T> = (0..dim)
        .map(|a| (dom.lo()[a] + dom.hi()[a]) * T::lit(0.5))
        .collect();
    if symbol.is_singular() {
        if let Some(i) = (0..dom.len()).find(|&i| norm(&dom.center(i)[..dim]) == T::zero()) {
            return Err(Error::Singularity {
                symbol: symbol.to_string(),
                detail: format!("cell {i} is centered at the origin; use an even cell count"),
            });
        }
    }
    match symbol {
        Symbol::LipPos { beta } => {
            let beta = T::lit(*beta);
            GridFunction::from_fn(dom.clone(), |x| norm(x).powf(beta))
        }
        Symbol::LipSigned => GridFunction::from_fn(dom.clone(), |x| x[0] - mid[0]),
        Symbol::BmoPos => GridFunction::from_fn(dom.clone(), |x| norm(x).ln().abs()),
        Symbol::BmoSigned => GridFunction::from_fn(dom.clone(), |x| norm(x).ln()),
        Symbol::PowerSing { delta } => {
            let delta = T::lit(*delta);
            GridFunction::from_fn(dom.clone(), |x| norm(x).powf(-delta))
        }
        Symbol::Bump => {
            let radius = (dom.hi()[0] - dom.lo()[0]) * T::lit(0.25);
            GridFunction::from_fn(dom.clone(), |x| {
                let d: Vec<T> = x.iter().zip(&mid).map(|(&a, &m)| a - m).collect();
                let r = norm(&d) / radius;
                if r < T::one() {
                    (T::one() - T::one() / (T::one() - r * r)).exp()
                } else {
                    T::zero()
                }
            })
        }
        Symbol::Step => GridFunction::from_fn(dom.clone(), |x| {
            if x[0] > mid[0] {
                T::one()
            } else {
                T::zero()
            }
        }),
        Symbol::Wedge => {
            let c: Vec<T> = (0..dim)
                .map(|a| dom.lo()[a] + (dom.hi()[a] - dom.lo()[a]) / T::lit(3.0))
                .collect();
            GridFunction::from_fn(dom.clone(), |x| {
                let d: Vec<T> = x.iter().zip(&c).map(|(&a, &m)| a - m).collect();
                norm(&d)
            })
        }
        Symbol::Const(c) => GridFunction::constant(dom.clone(), T::lit(*c)),
        Symbol::RandomLipschitz { seed } => random_lipschitz(dom, *seed),
    }
}

/// Sum of one midpoint-displacement profile per axis, shifted so the
/// minimum is zero.
fn random_lipschitz<T: Real>(dom: &Domain<T>, seed: u64) -> Result<GridFunction<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let profiles: Vec<Vec<T>> = (0..dom.dim())
        .map(|axis| {
            let lo = dom.lo()[axis];
            let len = dom.hi()[axis] - lo;
            let knots = midpoint_displacement(&mut rng, dom.cells()[axis], len.to_f64_lossy());
            let segments = knots.len() - 1;
            (0..dom.cells()[axis])
                .map(|i| {
                    let t = ((dom.coordinate(axis, i) - lo) / len).to_f64_lossy() * segments as f64;
                    let k = (t.floor() as usize).min(segments - 1);
                    let frac = t - k as f64;
                    T::lit(knots[k] * (1.0 - frac) + knots[k + 1] * frac)
                })
                .collect()
        })
        .collect();
    let mut samples: Vec<T> = (0..dom.len())
        .map(|i| {
            let idx = dom.unflatten(i);
            (0..dom.dim()).fold(T::zero(), |acc, a| acc + profiles[a][idx[a]])
        })
        .collect();
    let min = samples.iter().copied().fold(T::infinity(), T::min);
    for v in &mut samples {
        *v = *v - min;
    }
    GridFunction::new(dom.clone(), samples)
}

fn midpoint_displacement(rng: &mut ChaCha8Rng, cells: usize, length: f64) -> Vec<f64> {
    let levels = (cells.max(2) as f64).log2().ceil() as u32 + 1;
    let n = 1usize << levels;
    let mut v = vec![0.0; n + 1];
    v[n] = length * rng.gen_range(-0.5..0.5);
    let mut step = n;
    let mut seg = length;
    while step > 1 {
        let half = step / 2;
        seg *= 0.5;
        let mut i = half;
        while i < n {
            v[i] = 0.5 * (v[i - half] + v[i + half]) + 0.5 * seg * rng.gen_range(-1.0..1.0);
            i += step;
        }
        step = half;
    }
    v
}
