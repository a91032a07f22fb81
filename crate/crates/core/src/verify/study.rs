//! Scaling studies: a functional's supremum over a grid of resolutions and
//! box sizes, reduced to fitted slopes and a verdict.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{make_corpus, CubeFamily, Domain, ScalePolicy, Symbol};
use crate::oscfun::{sup_functional, OscFunctionalSpec};

/// Verdict thresholds. `stable_rel` bounds slopes and value spreads of a
/// bounded study; a slope of at least `log₂(growth_factor)` (growth by that
/// factor per doubling) marks growth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    pub stable_rel: f64,
    pub growth_factor: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            stable_rel: 0.15,
            growth_factor: 1.3,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        if !(self.stable_rel > 0.0 && self.stable_rel.is_finite()) {
            return Err(Error::Config(format!(
                "thresholds.stable_rel must be positive, got {}",
                self.stable_rel
            )));
        }
        if !(self.growth_factor > 1.0 && self.growth_factor.is_finite()) {
            return Err(Error::Config(format!(
                "thresholds.growth_factor must exceed 1, got {}",
                self.growth_factor
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    #[serde(alias = "bounded")]
    Bounded,
    #[serde(alias = "growing")]
    Growing,
    #[serde(alias = "inconclusive")]
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Bounded => "BOUNDED",
            Verdict::Growing => "GROWING",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bounded" => Ok(Verdict::Bounded),
            "growing" => Ok(Verdict::Growing),
            "inconclusive" => Ok(Verdict::Inconclusive),
            _ => Err(Error::Config(format!(
                "expect: unknown verdict `{s}` (bounded, growing or inconclusive)"
            ))),
        }
    }
}

/// One scaling study. Resolutions count cells per axis over the whole box
/// `[−R, R]^dim`; box sizes are the half-widths `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub symbol: Symbol,
    pub spec: OscFunctionalSpec<f64>,
    pub dim: usize,
    pub resolutions: Vec<usize>,
    pub box_sizes: Vec<f64>,
    pub policy: ScalePolicy,
    pub stride: usize,
    pub thresholds: Thresholds,
    pub expect: Option<Verdict>,
}

impl ExperimentConfig {
    /// A study with the default dyadic family and thresholds.
    pub fn new(
        name: impl Into<String>,
        symbol: Symbol,
        spec: OscFunctionalSpec<f64>,
        resolutions: Vec<usize>,
        box_sizes: Vec<f64>,
    ) -> Self {
        ExperimentConfig {
            name: name.into(),
            symbol,
            spec,
            dim: 1,
            resolutions,
            box_sizes,
            policy: ScalePolicy::Dyadic,
            stride: 1,
            thresholds: Thresholds::default(),
            expect: None,
        }
    }

    pub fn with_thresholds(mut self, t: Thresholds) -> Self {
        self.thresholds = t;
        self
    }

    pub fn with_expect(mut self, v: Verdict) -> Self {
        self.expect = Some(v);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(format!("experiment `{}`: {m}", self.name)));
        if !(self.dim == 1 || self.dim == 2) {
            return bad(format!("dim must be 1 or 2, got {}", self.dim));
        }
        if self.resolutions.is_empty() || self.box_sizes.is_empty() {
            return bad("resolutions and box_sizes must be non-empty".into());
        }
        if self.resolutions.windows(2).any(|w| w[1] != 2 * w[0]) {
            return bad(format!(
                "resolutions must double, got {:?}",
                self.resolutions
            ));
        }
        if self
            .box_sizes
            .windows(2)
            .any(|w| (w[1] / w[0] - 2.0).abs() > 1e-12)
        {
            return bad(format!("box_sizes must double, got {:?}", self.box_sizes));
        }
        if self.box_sizes.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
            return bad("box sizes must be positive".into());
        }
        if self.resolutions[0] < 2 {
            return bad("resolutions need at least 2 cells".into());
        }
        if self.symbol.is_singular() && self.resolutions.iter().any(|n| n % 2 != 0) {
            return bad(format!(
                "symbol {} is singular at the origin; resolutions must be even",
                self.symbol
            ));
        }
        if self.stride == 0 {
            return bad("stride must be at least 1".into());
        }
        if self.policy == ScalePolicy::Custom {
            return bad("scaling studies take the dyadic or all policy".into());
        }
        self.thresholds.validate()?;
        self.spec
            .validate(self.dim)
            .map_err(|e| Error::Config(format!("experiment `{}`: {e}", self.name)))
    }

    fn domain(&self, cells: usize, half_width: f64) -> Result<Domain<f64>> {
        Domain::symmetric(self.dim, half_width, cells)
    }
}

/// Per-axis summary of a study; `None` for an axis held fixed.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AxisPair {
    pub resolution: Option<f64>,
    pub box_size: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub name: String,
    pub symbol: String,
    pub kind: String,
    pub resolutions: Vec<usize>,
    pub box_sizes: Vec<f64>,
    /// `values[i][j]`: the supremum at `resolutions[i]`, `box_sizes[j]`.
    pub values: Vec<Vec<f64>>,
    /// Least-squares slopes of `log₂ value` against `log₂` of each axis.
    pub log2_slopes: AxisPair,
    /// Largest max/min value ratio along lines of each axis.
    pub spread: AxisPair,
    pub verdict: Verdict,
    pub expect: Option<Verdict>,
    pub pass: bool,
}

/// Minimum points on a varied axis for a verdict.
pub const MIN_AXIS_POINTS: usize = 3;

/// The verdict rule, a pure function of the value matrix and thresholds.
///
/// All-zero values are bounded. Otherwise `log₂ v` is fitted jointly against
/// `log₂ N` and `log₂ R` over the axes with more than one point; each such
/// axis needs at least [`MIN_AXIS_POINTS`] points or the verdict is
/// inconclusive.
pub fn classify(
    values: &[Vec<f64>],
    resolutions: &[usize],
    box_sizes: &[f64],
    t: &Thresholds,
) -> (AxisPair, AxisPair, Verdict) {
    let (nr, nb) = (resolutions.len(), box_sizes.len());
    let vary_r = nr > 1;
    let vary_b = nb > 1;
    let enough = (vary_r || vary_b)
        && (!vary_r || nr >= MIN_AXIS_POINTS)
        && (!vary_b || nb >= MIN_AXIS_POINTS);
    let all: Vec<f64> = values.iter().flatten().copied().collect();
    if all.iter().all(|&v| v == 0.0) {
        let fixed = |v: f64| AxisPair {
            resolution: vary_r.then_some(v),
            box_size: vary_b.then_some(v),
        };
        let verdict = if enough {
            Verdict::Bounded
        } else {
            Verdict::Inconclusive
        };
        return (fixed(0.0), fixed(1.0), verdict);
    }
    if all.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return (
            AxisPair::default(),
            AxisPair::default(),
            Verdict::Inconclusive,
        );
    }

    let spread_along = |lines: Vec<Vec<f64>>| {
        lines
            .into_iter()
            .map(|l| {
                let max = l.iter().copied().fold(f64::MIN, f64::max);
                let min = l.iter().copied().fold(f64::MAX, f64::min);
                max / min
            })
            .fold(1.0, f64::max)
    };
    let spread = AxisPair {
        resolution: vary_r.then(|| {
            spread_along(
                (0..nb)
                    .map(|j| (0..nr).map(|i| values[i][j]).collect())
                    .collect(),
            )
        }),
        box_size: vary_b.then(|| spread_along(values.to_vec())),
    };

    let mut rows = Vec::new();
    for (i, &n) in resolutions.iter().enumerate() {
        for (j, &r) in box_sizes.iter().enumerate() {
            let mut x = vec![1.0];
            if vary_r {
                x.push((n as f64).log2());
            }
            if vary_b {
                x.push(r.log2());
            }
            rows.push((x, values[i][j].log2()));
        }
    }
    let coef = least_squares(&rows);
    let mut k = 1;
    let mut slopes = AxisPair::default();
    if vary_r {
        slopes.resolution = coef.as_ref().map(|c| c[k]);
        k += 1;
    }
    if vary_b {
        slopes.box_size = coef.as_ref().map(|c| c[k]);
    }

    if !enough || coef.is_none() {
        return (slopes, spread, Verdict::Inconclusive);
    }
    let fitted: Vec<f64> = [slopes.resolution, slopes.box_size]
        .into_iter()
        .flatten()
        .collect();
    let ratios: Vec<f64> = [spread.resolution, spread.box_size]
        .into_iter()
        .flatten()
        .collect();
    let verdict = if fitted.iter().any(|&s| s >= t.growth_factor.log2()) {
        Verdict::Growing
    } else if fitted.iter().all(|s| s.abs() <= t.stable_rel)
        && ratios.iter().all(|&r| r <= 1.0 + t.stable_rel)
    {
        Verdict::Bounded
    } else {
        Verdict::Inconclusive
    };
    (slopes, spread, verdict)
}

/// Ordinary least squares through the normal equations; `None` when they
/// are singular.
fn least_squares(rows: &[(Vec<f64>, f64)]) -> Option<Vec<f64>> {
    let k = rows.first()?.0.len();
    let mut a = vec![vec![0.0; k + 1]; k];
    for (x, y) in rows {
        for r in 0..k {
            for c in 0..k {
                a[r][c] += x[r] * x[c];
            }
            a[r][k] += x[r] * y;
        }
    }
    for col in 0..k {
        let pivot = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        for r in 0..k {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=k {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    Some((0..k).map(|r| a[r][k] / a[r][r]).collect())
}

/// Evaluates the study's supremum on every (resolution, box size) pair.
pub fn study_values(cfg: &ExperimentConfig) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    let pairs: Vec<(usize, f64)> = cfg
        .resolutions
        .iter()
        .flat_map(|&n| cfg.box_sizes.iter().map(move |&r| (n, r)))
        .collect();
    let flat: Vec<f64> = pairs
        .par_iter()
        .map(|&(n, r)| {
            let dom = cfg.domain(n, r)?;
            let b = make_corpus(&cfg.symbol, &dom)?;
            let fam = CubeFamily::from_policy(cfg.policy, &dom)?.with_stride(cfg.stride)?;
            Ok(sup_functional(&b, &cfg.spec, &fam)?.sup_value)
        })
        .collect::<Result<_>>()?;
    Ok(flat
        .chunks(cfg.box_sizes.len())
        .map(|c| c.to_vec())
        .collect())
}

pub fn scaling_study(cfg: &ExperimentConfig) -> Result<VerdictReport> {
    let values = study_values(cfg)?;
    Ok(report_from_values(cfg, values))
}

pub(crate) fn report_from_values(cfg: &ExperimentConfig, values: Vec<Vec<f64>>) -> VerdictReport {
    let (log2_slopes, spread, verdict) =
        classify(&values, &cfg.resolutions, &cfg.box_sizes, &cfg.thresholds);
    VerdictReport {
        name: cfg.name.clone(),
        symbol: cfg.symbol.to_string(),
        kind: cfg.spec.kind.name().to_string(),
        resolutions: cfg.resolutions.clone(),
        box_sizes: cfg.box_sizes.clone(),
        values,
        log2_slopes,
        spread,
        verdict,
        expect: cfg.expect,
        pass: cfg.expect.is_none_or(|e| e == verdict),
    }
}

/// Verdicts for a symbol meeting a theorem's hypothesis and one violating
/// it, under the same functional and study grid.
pub fn discriminate(
    b_pos: &Symbol,
    b_sig: &Symbol,
    spec: &OscFunctionalSpec<f64>,
    cfg: &ExperimentConfig,
) -> Result<(VerdictReport, VerdictReport)> {
    let run = |sym: &Symbol, tag: &str| {
        let mut c = cfg.clone();
        c.name = format!("{}/{tag}", cfg.name);
        c.symbol = sym.clone();
        c.spec = spec.clone();
        c.expect = None;
        scaling_study(&c)
    };
    Ok((run(b_pos, "pos")?, run(b_sig, "sig")?))
}
