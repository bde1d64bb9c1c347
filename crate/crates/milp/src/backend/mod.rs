//! Solver backends.

mod command;
#[cfg(feature = "highs")]
mod highs;
mod reference;

pub use command::{CommandBackend, Dialect, SOLVER_DIALECT_ENV, SOLVER_PATH_ENV};
#[cfg(feature = "highs")]
pub use highs::HighsBackend;
pub use reference::{solve_lp, LpOutcome, ReferenceBackend};

use crate::model::MilpModel;
use crate::solution::{Solution, SolveError, SolveOptions};

pub trait Backend: Send + Sync {
    fn name(&self) -> &str;
    fn solve(&self, model: &MilpModel, opts: &SolveOptions) -> Result<Solution, SolveError>;
}

/// Names accepted by [`backend_by_name`].
pub const BACKEND_NAMES: &[&str] = &["highs", "command", "reference"];

/// Looks a backend up by name. `command` reads its executable from
/// [`SOLVER_PATH_ENV`].
pub fn backend_by_name(name: &str) -> Result<Box<dyn Backend>, SolveError> {
    match name {
        #[cfg(feature = "highs")]
        "highs" => Ok(Box::new(HighsBackend)),
        "command" => Ok(Box::new(CommandBackend::from_env()?)),
        "reference" => Ok(Box::new(ReferenceBackend::default())),
        other => Err(SolveError::Unavailable(format!(
            "unknown or disabled backend `{other}`"
        ))),
    }
}

/// The in-process backend when compiled in, else the reference solver.
pub fn default_backend() -> Box<dyn Backend> {
    #[cfg(feature = "highs")]
    {
        Box::new(HighsBackend)
    }
    #[cfg(not(feature = "highs"))]
    {
        Box::new(ReferenceBackend::default())
    }
}

/// Solves with `backend`, then checks the returned point against the model.
pub fn solve_checked(
    backend: &dyn Backend,
    model: &MilpModel,
    opts: &SolveOptions,
) -> Result<Solution, SolveError> {
    let sol = backend.solve(model, opts)?;
    if sol.status.has_solution() {
        if sol.values.len() != model.num_vars() {
            return Err(SolveError::Backend(format!(
                "{} returned {} values for {} columns",
                backend.name(),
                sol.values.len(),
                model.num_vars()
            )));
        }
        let viol = model.max_violation(&sol.values);
        if viol > 1e-5 {
            let row = model
                .first_violated(&sol.values, 1e-5)
                .map(|c| c.name.as_str())
                .unwrap_or("bounds");
            return Err(SolveError::Backend(format!(
                "{} solution violates `{row}` by {viol:.3e}",
                backend.name()
            )));
        }
    }
    Ok(sol)
}
