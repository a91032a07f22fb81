use serde::{Deserialize, Serialize};

/// Outcome of a single identity or inequality check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckReport {
    pub fn new(check: impl Into<String>, max_deviation: f64, tolerance: f64) -> Self {
        let pass = max_deviation <= tolerance;
        CheckReport {
            check: check.into(),
            max_deviation,
            tolerance,
            pass,
        }
    }

    /// Folds several reports of the same check into the one closest to
    /// failing, ranked by `deviation / tolerance`.
    pub fn merge(check: impl Into<String>, reports: &[CheckReport]) -> Self {
        let score = |r: &CheckReport| {
            if r.tolerance > 0.0 {
                r.max_deviation / r.tolerance
            } else if r.max_deviation > 0.0 {
                f64::INFINITY
            } else {
                // Vacuous: nothing to compare on this case.
                f64::NEG_INFINITY
            }
        };
        let worst = reports
            .iter()
            .reduce(|a, b| if score(b) > score(a) { b } else { a });
        CheckReport {
            check: check.into(),
            max_deviation: worst.map_or(0.0, |r| r.max_deviation),
            tolerance: worst.map_or(0.0, |r| r.tolerance),
            pass: reports.iter().all(|r| r.pass),
        }
    }
}
