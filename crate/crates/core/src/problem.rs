//! The coupled network / operating-point problem as a two-objective MILP:
//! `f1 = -eta`, `f2 = c_prod`.

use std::fmt;
use std::time::Instant;

use henopt_milp::{default_backend, Backend, LinExpr, MilpModel, SolveError, SolveOptions, SolveStatus};
use log::{info, warn};

use crate::area::{EnvelopeCache, EnvelopeSettings};
use crate::case::CaseDefinition;
use crate::evaluate::{evaluate_design, Evaluation};
use crate::hen::{build_hen, check_solution, extract_design, HenBlock, HenDesign, HenError, HenOptions, OpMode, Violation};
use crate::objectives::{build_objectives, ObjectiveBundle, ObjectiveError, RatioBoxes, RatioGrids};
use crate::pareto::{BiObjectiveProblem, Goal, Limits, Outcome};

#[derive(Debug)]
pub enum ProblemError {
    Hen(HenError),
    Objective(ObjectiveError),
    Solve(SolveError),
    /// A bound solve produced no solution.
    Bounds(String),
}

impl fmt::Display for ProblemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemError::Hen(e) => write!(f, "{e}"),
            ProblemError::Objective(e) => write!(f, "{e}"),
            ProblemError::Solve(e) => write!(f, "{e}"),
            ProblemError::Bounds(m) => write!(f, "bound solve failed: {m}"),
        }
    }
}

impl std::error::Error for ProblemError {}

impl From<HenError> for ProblemError {
    fn from(e: HenError) -> Self {
        ProblemError::Hen(e)
    }
}

impl From<ObjectiveError> for ProblemError {
    fn from(e: ObjectiveError) -> Self {
        ProblemError::Objective(e)
    }
}

impl From<SolveError> for ProblemError {
    fn from(e: SolveError) -> Self {
        ProblemError::Solve(e)
    }
}

impl From<henopt_milp::ModelError> for ProblemError {
    fn from(e: henopt_milp::ModelError) -> Self {
        ProblemError::Objective(ObjectiveError::from(e))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ProblemOptions {
    pub hen: HenOptions,
    pub grids: RatioGrids,
    pub envelopes: EnvelopeSettings,
    /// Relative margin added around the bound-solve results to form the
    /// ratio-surface boxes.
    pub box_margin: f64,
}

impl Default for ProblemOptions {
    fn default() -> Self {
        ProblemOptions {
            hen: HenOptions::default(),
            grids: RatioGrids::default(),
            envelopes: EnvelopeSettings::default(),
            box_margin: 0.10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Built {
    pub model: MilpModel,
    pub hen: HenBlock,
    pub obj: ObjectiveBundle,
}

#[derive(Debug, Clone)]
pub struct SolvedPoint {
    pub design: HenDesign,
    /// Exact figures of the extracted design.
    pub evaluation: Evaluation,
    /// Ratio values as encoded in the model.
    pub eta_model: f64,
    pub cprod_model: f64,
    pub tac_model: f64,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scalar {
    PEl,
    Tac,
}

pub struct CoupledProblem {
    pub case: CaseDefinition,
    pub mode: OpMode,
    pub options: ProblemOptions,
    backend: Box<dyn Backend>,
    cache: EnvelopeCache,
    base: Option<Built>,
}

impl CoupledProblem {
    pub fn new(case: CaseDefinition, mode: OpMode, options: ProblemOptions) -> Self {
        let cache = EnvelopeCache::new(options.envelopes);
        CoupledProblem { case, mode, options, backend: default_backend(), cache, base: None }
    }

    pub fn with_backend(mut self, backend: Box<dyn Backend>) -> Self {
        self.backend = backend;
        self
    }

    pub fn build(&self, mode: OpMode, boxes: Option<&RatioBoxes>) -> Result<Built, ProblemError> {
        let mut model = MilpModel::new();
        let hen = build_hen(&mut model, &self.case, mode, &self.options.hen, &self.cache)?;
        let obj = build_objectives(&mut model, &self.case, &hen, boxes, self.options.grids)?;
        Ok(Built { model, hen, obj })
    }

    fn ends(&self) -> Vec<f64> {
        match self.mode {
            OpMode::Fixed(u) => vec![u],
            OpMode::Coupled => vec![self.case.opvar.lower, self.case.opvar.upper],
        }
    }

    /// Minimises electrical power or annual cost without the ratio surfaces.
    pub fn solve_scalar(
        &self,
        mode: OpMode,
        what: Scalar,
        opts: &SolveOptions,
    ) -> Result<(henopt_milp::Solution, Built), ProblemError> {
        let mut b = self.build(mode, None)?;
        let target = match what {
            Scalar::PEl => b.obj.p_el_var,
            Scalar::Tac => b.obj.tac_var,
        };
        b.model.set_objective(target)?;
        let sol = self.backend.solve(&b.model, opts)?;
        Ok((sol, b))
    }

    /// Ratio-surface boxes from power and cost minimisations at the ends of
    /// the operating range, widened by the margin.
    pub fn presolve_boxes(&self, opts: &SolveOptions) -> Result<RatioBoxes, ProblemError> {
        let (mut p, mut t) = (Vec::new(), Vec::new());
        for u in self.ends() {
            for what in [Scalar::PEl, Scalar::Tac] {
                let (sol, b) = self.solve_scalar(OpMode::Fixed(u), what, opts)?;
                if !sol.status.has_solution() {
                    return Err(ProblemError::Bounds(format!("{what:?} at u = {u}: {}", sol.status)));
                }
                p.push(sol.value(b.obj.p_el_var));
                t.push(sol.value(b.obj.tac_var));
            }
        }
        let span = |v: &[f64]| {
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (lo * (1.0 - self.options.box_margin), hi * (1.0 + self.options.box_margin))
        };
        let boxes = RatioBoxes { p_el: span(&p), tac: span(&t) };
        info!("ratio boxes: P_el {:?} kW, TAC {:?} EUR/yr", boxes.p_el, boxes.tac);
        Ok(boxes)
    }

    /// Builds the full two-objective model, solving for the boxes first
    /// unless they are given.
    pub fn prepare(&mut self, boxes: Option<RatioBoxes>, opts: &SolveOptions) -> Result<&Built, ProblemError> {
        let boxes = match boxes {
            Some(b) => b,
            None => self.presolve_boxes(opts)?,
        };
        let built = self.build(self.mode, Some(&boxes))?;
        info!(
            "model: {} variables, {} constraints, {} binaries",
            built.model.num_vars(),
            built.model.num_constraints(),
            built.model.num_binaries()
        );
        self.base = Some(built);
        Ok(self.base.as_ref().unwrap())
    }

    pub fn built(&self) -> Option<&Built> {
        self.base.as_ref()
    }

    pub fn point_from(&self, sol: &henopt_milp::Solution, b: &Built) -> Result<SolvedPoint, ProblemError> {
        let design = extract_design(sol, &b.hen, &self.case)?;
        let evaluation = evaluate_design(&self.case, &design);
        let violations = check_solution(sol, &b.hen, &self.case);
        for v in &violations {
            warn!("structural check {} failed for {}: {:.3e}", v.check, v.subject, v.amount);
        }
        let val = |v: Option<henopt_milp::Var>| v.map_or(f64::NAN, |v| sol.value(v));
        Ok(SolvedPoint {
            design,
            evaluation,
            eta_model: val(b.obj.eta_var),
            cprod_model: val(b.obj.cprod_var),
            tac_model: sol.value(b.obj.tac_var),
            violations,
        })
    }
}

impl BiObjectiveProblem for CoupledProblem {
    type Payload = SolvedPoint;

    fn solve(&self, goal: Goal, limits: Limits, opts: &SolveOptions) -> Result<Outcome<SolvedPoint>, String> {
        let start = Instant::now();
        let base = self.base.as_ref().ok_or("problem not prepared")?;
        let (Some(eta), Some(cprod)) = (base.obj.eta_var, base.obj.cprod_var) else {
            return Err("model has no ratio objectives".into());
        };
        let mut b = base.clone();
        let mut boxes = vec![];
        if let Some((lo, hi)) = limits.f2_band {
            boxes.push((cprod, lo, hi));
        }
        if let Some(f1) = limits.f1_max {
            boxes.push((eta, -f1, f64::INFINITY));
        }
        for (var, lo, hi) in boxes {
            let v = b.model.variable(var);
            let (a, z) = (v.lower.max(lo), v.upper.min(hi));
            if a > z {
                return Ok(Outcome {
                    status: SolveStatus::Infeasible,
                    f1: f64::NAN,
                    f2: f64::NAN,
                    gap: None,
                    seconds: start.elapsed().as_secs_f64(),
                    payload: None,
                });
            }
            b.model.set_bounds(var, a, z).map_err(|e| e.to_string())?;
        }
        let objective = match goal {
            Goal::MinF1 => LinExpr::term(eta, -1.0),
            Goal::MinF2 => LinExpr::from(cprod),
        };
        b.model.set_objective(objective).map_err(|e| e.to_string())?;
        let sol = self.backend.solve(&b.model, opts).map_err(|e| e.to_string())?;
        let payload = if sol.status.has_solution() {
            Some(self.point_from(&sol, &b).map_err(|e| e.to_string())?)
        } else {
            None
        };
        let (f1, f2) = if sol.status.has_solution() { (-sol.value(eta), sol.value(cprod)) } else { (f64::NAN, f64::NAN) };
        Ok(Outcome { status: sol.status, f1, f2, gap: sol.gap, seconds: start.elapsed().as_secs_f64(), payload })
    }
}
