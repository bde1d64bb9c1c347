use std::fmt;
use std::time::Duration;

use crate::model::{MilpModel, Var};

/// Outcome classification of a solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    /// Solved to the requested relative gap (or proven optimal).
    OptimalWithinGap,
    Infeasible,
    /// Time limit hit before any feasible point was found.
    TimeoutNoSolution,
    /// Time limit hit; an incumbent is available.
    TimeoutWithIncumbent,
}

impl SolveStatus {
    pub fn has_solution(self) -> bool {
        matches!(
            self,
            SolveStatus::OptimalWithinGap | SolveStatus::TimeoutWithIncumbent
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            SolveStatus::OptimalWithinGap => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::TimeoutNoSolution => "timeout-no-solution",
            SolveStatus::TimeoutWithIncumbent => "timeout-incumbent",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    /// Relative MIP gap target.
    pub mip_gap: f64,
    pub time_limit_s: f64,
    pub threads: usize,
    pub verbose: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            mip_gap: 1e-4,
            time_limit_s: 600.0,
            threads: 1,
            verbose: false,
        }
    }
}

impl SolveOptions {
    pub fn with_gap(mut self, gap: f64) -> Self {
        self.mip_gap = gap;
        self
    }

    pub fn with_time_limit(mut self, secs: f64) -> Self {
        self.time_limit_s = secs;
        self
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub status: SolveStatus,
    /// Objective of the incumbent including the constant term.
    pub objective: Option<f64>,
    /// Relative gap reported by the solver, when known.
    pub gap: Option<f64>,
    pub values: Vec<f64>,
    pub wall_time: Duration,
}

impl Solution {
    pub fn infeasible(wall_time: Duration) -> Self {
        Solution {
            status: SolveStatus::Infeasible,
            objective: None,
            gap: None,
            values: Vec::new(),
            wall_time,
        }
    }

    pub fn value(&self, var: Var) -> f64 {
        self.values[var.index()]
    }

    pub fn is_set(&self, var: Var) -> bool {
        self.value(var) > 0.5
    }
}

#[derive(Debug)]
pub enum SolveError {
    Io(std::io::Error),
    Backend(String),
    Parse(String),
    Unavailable(String),
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::Io(e) => write!(f, "i/o error: {e}"),
            SolveError::Backend(m) => write!(f, "solver error: {m}"),
            SolveError::Parse(m) => write!(f, "cannot parse solver output: {m}"),
            SolveError::Unavailable(m) => write!(f, "solver unavailable: {m}"),
        }
    }
}

impl std::error::Error for SolveError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            SolveError::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for SolveError {
    fn from(e: std::io::Error) -> Self {
        SolveError::Io(e)
    }
}

/// Coefficient magnitudes outside this range are reported as poorly scaled.
pub const COEF_RANGE: (f64, f64) = (1e-4, 1e6);

/// Returns a warning message when the model's coefficients leave [`COEF_RANGE`].
pub fn scaling_warning(model: &MilpModel) -> Option<String> {
    let (lo, hi) = model.coefficient_range()?;
    (lo < COEF_RANGE.0 || hi > COEF_RANGE.1)
        .then(|| format!("coefficient range [{lo:.3e}, {hi:.3e}] exceeds [1e-4, 1e6]"))
}
