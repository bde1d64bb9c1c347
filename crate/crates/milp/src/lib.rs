//! Solver-agnostic mixed-integer linear programs.
//!
//! Build a [`MilpModel`], then hand it to any [`Backend`]: in-process HiGHS,
//! an external executable driven through MPS files, or the small built-in
//! reference solver used by tests.

pub mod backend;
pub mod model;
pub mod mps;
pub mod solution;

pub use backend::{backend_by_name, default_backend, solve_checked, Backend, CommandBackend, ReferenceBackend};
#[cfg(feature = "highs")]
pub use backend::HighsBackend;
pub use model::{Constraint, LinExpr, MilpModel, ModelError, Relation, Var, VarKind, Variable};
pub use mps::{emit_mps, parse_mps, MpsError};
pub use solution::{Solution, SolveError, SolveOptions, SolveStatus};
