use std::time::Instant;

use highs::{HighsModelStatus, HighsSolutionStatus, RowProblem, Sense};

use super::Backend;
use crate::model::{MilpModel, Relation, VarKind};
use crate::solution::{Solution, SolveError, SolveOptions, SolveStatus};

/// In-process HiGHS.
#[derive(Clone, Copy, Debug, Default)]
pub struct HighsBackend;

impl Backend for HighsBackend {
    fn name(&self) -> &str {
        "highs"
    }

    fn solve(&self, model: &MilpModel, opts: &SolveOptions) -> Result<Solution, SolveError> {
        let start = Instant::now();
        let n = model.num_vars();
        let mut cost = vec![0.0; n];
        for &(v, c) in model.objective().terms() {
            cost[v.index()] += c;
        }
        let mut pb = RowProblem::new();
        let cols: Vec<_> = model
            .variables()
            .iter()
            .zip(&cost)
            .map(|(v, &c)| match v.kind {
                VarKind::Binary => pb.add_integer_column(c, v.lower..=v.upper),
                VarKind::Continuous => pb.add_column(c, v.lower..=v.upper),
            })
            .collect();
        for con in model.constraints() {
            let factors: Vec<_> = con
                .expr
                .terms()
                .iter()
                .map(|&(v, a)| (cols[v.index()], a))
                .collect();
            match con.relation {
                Relation::Le => pb.add_row(..=con.rhs, &factors),
                Relation::Ge => pb.add_row(con.rhs.., &factors),
                Relation::Eq => pb.add_row(con.rhs..=con.rhs, &factors),
            }
        }

        let mut m = pb
            .try_optimise(Sense::Minimise)
            .map_err(|s| SolveError::Backend(format!("model rejected: {s:?}")))?;
        if !opts.verbose {
            m.make_quiet();
        }
        m.set_option("mip_rel_gap", opts.mip_gap);
        m.set_option("time_limit", opts.time_limit_s);
        m.set_option("threads", opts.threads.max(1) as i32);
        m.set_option("random_seed", 0);
        let solved = m
            .try_solve()
            .map_err(|s| SolveError::Backend(format!("solve failed: {s:?}")))?;

        let has_point = solved.primal_solution_status() == HighsSolutionStatus::Feasible;
        let status = match solved.status() {
            HighsModelStatus::Optimal | HighsModelStatus::ModelEmpty => {
                SolveStatus::OptimalWithinGap
            }
            HighsModelStatus::Infeasible | HighsModelStatus::UnboundedOrInfeasible => {
                SolveStatus::Infeasible
            }
            HighsModelStatus::ReachedTimeLimit
            | HighsModelStatus::ReachedIterationLimit
            | HighsModelStatus::ReachedInterrupt
            | HighsModelStatus::ReachedSolutionLimit
            | HighsModelStatus::ReachedMemoryLimit => {
                if has_point {
                    SolveStatus::TimeoutWithIncumbent
                } else {
                    SolveStatus::TimeoutNoSolution
                }
            }
            other => return Err(SolveError::Backend(format!("HiGHS status {other:?}"))),
        };
        let wall_time = start.elapsed();
        if !status.has_solution() || (n > 0 && !has_point) {
            return Ok(Solution {
                status: if status.has_solution() {
                    SolveStatus::TimeoutNoSolution
                } else {
                    status
                },
                objective: None,
                gap: None,
                values: Vec::new(),
                wall_time,
            });
        }
        let values = solved.get_solution().columns().to_vec();
        let objective = model.objective().eval(&values);
        let gap = if model.num_binaries() == 0 {
            0.0
        } else {
            solved.mip_gap().max(0.0)
        };
        Ok(Solution {
            status,
            objective: Some(objective),
            gap: Some(if gap.is_finite() { gap } else { 0.0 }),
            values,
            wall_time,
        })
    }
}
