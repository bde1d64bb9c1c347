//! A small two-objective MILP with a non-convex front.

use henopt::pareto::{BiObjectiveProblem, Goal, Limits, Outcome};
use henopt_milp::{Backend, HighsBackend, LinExpr, MilpModel, Relation, SolveOptions};

/// Pick one of a few designs, then trade up to one unit of `f1` for half a
/// unit of `f2`.
pub struct Toy;

pub const DESIGNS: [(f64, f64); 8] =
    [(0.0, 10.0), (1.0, 6.0), (2.0, 5.0), (4.0, 2.0), (7.0, 1.0), (10.0, 0.0), (5.0, 5.0), (3.0, 4.5)];

impl BiObjectiveProblem for Toy {
    type Payload = usize;

    fn solve(&self, goal: Goal, limits: Limits, opts: &SolveOptions) -> Result<Outcome<usize>, String> {
        let mut m = MilpModel::new();
        let s: Vec<_> = (0..DESIGNS.len()).map(|k| m.add_binary(format!("s{k}")).unwrap()).collect();
        let w = m.add_continuous("w", 0.0, 1.0).unwrap();
        let (f2_lo, f2_hi) = limits.f2_band.unwrap_or((-100.0, 100.0));
        let f1 = m.add_continuous("f1", -100.0, limits.f1_max.unwrap_or(100.0)).unwrap();
        let f2 = m.add_continuous("f2", f2_lo.max(-100.0), f2_hi.min(100.0)).unwrap();
        m.add_constraint("one", LinExpr::sum(s.iter().map(|&v| (v, 1.0))), Relation::Eq, 1.0).unwrap();
        let e1 = LinExpr::sum(s.iter().zip(DESIGNS).map(|(&v, d)| (v, d.0))) + LinExpr::term(w, 1.0) - f1;
        m.add_constraint("f1", e1, Relation::Eq, 0.0).unwrap();
        let e2 = LinExpr::sum(s.iter().zip(DESIGNS).map(|(&v, d)| (v, d.1))) + LinExpr::term(w, -0.5) - f2;
        m.add_constraint("f2", e2, Relation::Eq, 0.0).unwrap();
        m.set_objective(match goal {
            Goal::MinF1 => f1,
            Goal::MinF2 => f2,
        })
        .unwrap();
        let sol = HighsBackend.solve(&m, opts).map_err(|e| e.to_string())?;
        if !sol.status.has_solution() {
            return Ok(Outcome { status: sol.status, f1: f64::NAN, f2: f64::NAN, gap: None, seconds: 0.0, payload: None });
        }
        let pick = s.iter().position(|&v| sol.value(v) > 0.5).unwrap();
        Ok(Outcome {
            status: sol.status,
            f1: sol.value(f1),
            f2: sol.value(f2),
            gap: sol.gap,
            seconds: sol.wall_time.as_secs_f64(),
            payload: Some(pick),
        })
    }
}

