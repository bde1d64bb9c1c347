//! Command-line runs: coupled front, single fixed operating point, or the
//! evaluation of a given design.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::str::FromStr;

use henopt_milp::{backend_by_name, SolveOptions};
use log::{info, warn};

use crate::case::{load_case, CaseDefinition, CaseError};
use crate::evaluate::{evaluate_design, load_design};
use crate::hen::OpMode;
use crate::pareto::{epsilon_sweep, ParetoPoint, SweepOptions, WindowFate, WindowRecord};
use crate::problem::{CoupledProblem, ProblemOptions, Scalar};
use crate::report::{design_table, export_stream_plot, pareto_csv, solver_time_report};

#[derive(Debug, Clone, PartialEq)]
pub enum RunMode {
    Coupled,
    Fixed(f64),
    Fixture(PathBuf),
}

impl FromStr for RunMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "coupled" {
            return Ok(RunMode::Coupled);
        }
        if let Some(u) = s.strip_prefix("fixed:") {
            return u.parse().map(RunMode::Fixed).map_err(|_| format!("bad operating point `{u}`"));
        }
        if let Some(p) = s.strip_prefix("fixture:") {
            return Ok(RunMode::Fixture(PathBuf::from(p)));
        }
        Err(format!("unknown mode `{s}` (coupled, fixed:<u>, fixture:<path>)"))
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub case_path: PathBuf,
    pub mode: RunMode,
    pub points: usize,
    pub mip_gap: f64,
    pub time_limit_s: f64,
    pub workers: usize,
    pub output_dir: PathBuf,
    pub backend: String,
    pub svg: bool,
}

#[derive(Debug)]
pub enum RunError {
    /// Exit status 2.
    MissingInput(PathBuf),
    Config(String),
    Failed(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::MissingInput(_) | RunError::Config(_) => 2,
            RunError::Failed(_) => 1,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::MissingInput(p) => write!(f, "input file not found: {}", p.display()),
            RunError::Config(m) => write!(f, "configuration error: {m}"),
            RunError::Failed(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for RunError {}

fn failed<E: fmt::Display>(e: E) -> RunError {
    RunError::Failed(e.to_string())
}

fn load(path: &Path) -> Result<CaseDefinition, RunError> {
    if !path.exists() {
        return Err(RunError::MissingInput(path.to_path_buf()));
    }
    load_case(path).map_err(|e| match e {
        CaseError::Io { path, .. } => RunError::MissingInput(path),
        e => failed(e),
    })
}

fn write(dir: &Path, name: &str, text: &str) -> Result<PathBuf, RunError> {
    let p = dir.join(name);
    fs::write(&p, text).map_err(|e| failed(format!("{}: {e}", p.display())))?;
    Ok(p)
}

fn render_svg(dot: &Path) {
    let svg = dot.with_extension("svg");
    match Command::new("dot").arg("-Tsvg").arg(dot).arg("-o").arg(&svg).status() {
        Ok(s) if s.success() => {}
        Ok(s) => warn!("dot exited with {s} for {}", dot.display()),
        Err(e) => warn!("graphviz not available ({e}); skipped {}", svg.display()),
    }
}

/// Executes one run and writes its files into the output directory.
pub fn run(cfg: &RunConfig) -> Result<(), RunError> {
    let case = load(&cfg.case_path)?;
    fs::create_dir_all(&cfg.output_dir).map_err(|e| failed(format!("{}: {e}", cfg.output_dir.display())))?;
    let solve = SolveOptions { mip_gap: cfg.mip_gap, time_limit_s: cfg.time_limit_s, threads: 1, verbose: false };
    let backend = || backend_by_name(&cfg.backend).map_err(|e| RunError::Config(e.to_string()));
    let dir = &cfg.output_dir;
    let mut dots = Vec::new();
    match &cfg.mode {
        RunMode::Fixture(path) => {
            if !path.exists() {
                return Err(RunError::MissingInput(path.clone()));
            }
            let design = load_design(path, &case).map_err(failed)?;
            let e = evaluate_design(&case, &design);
            dots.push(write(dir, "design_0.dot", &export_stream_plot(&design, &case))?);
            let json = serde_json::to_string_pretty(&e).map_err(failed)?;
            write(dir, "evaluation.json", &json)?;
            write(dir, "summary.txt", &design_table(&format!("fixed design {}", path.display()), &e))?;
        }
        RunMode::Fixed(u) => {
            if cfg.points < 1 {
                return Err(RunError::Config("points must be at least 1".into()));
            }
            let p = CoupledProblem::new(case.clone(), OpMode::Fixed(*u), ProblemOptions::default()).with_backend(backend()?);
            let (sol, built) = p.solve_scalar(OpMode::Fixed(*u), Scalar::Tac, &solve).map_err(failed)?;
            if !sol.status.has_solution() {
                return Err(failed(format!("no design at u = {u}: {}", sol.status)));
            }
            let pt = p.point_from(&sol, &built).map_err(failed)?;
            let point = ParetoPoint {
                f1: -pt.evaluation.eta,
                f2: pt.evaluation.c_prod,
                window_index: None,
                mip_gap: sol.gap,
                solve_seconds: sol.wall_time.as_secs_f64(),
                status: sol.status,
                payload: pt,
            };
            let rec = WindowRecord {
                index: None,
                band: (point.f2, point.f2),
                status: sol.status,
                gap: sol.gap,
                seconds: point.solve_seconds,
                fate: WindowFate::Accepted,
            };
            dots.push(write(dir, "design_0.dot", &export_stream_plot(&point.payload.design, &case))?);
            write(dir, "pareto.csv", &pareto_csv(std::slice::from_ref(&point)))?;
            write(dir, "times.csv", &solver_time_report(&[rec]))?;
            let mut s = design_table(&format!("minimum annual cost at u = {u}"), &point.payload.evaluation);
            s.push_str(&violation_lines(&[point]));
            write(dir, "summary.txt", &s)?;
        }
        RunMode::Coupled => {
            if cfg.points < 2 {
                return Err(RunError::Config("coupled mode needs at least 2 points".into()));
            }
            let mut p = CoupledProblem::new(case.clone(), OpMode::Coupled, ProblemOptions::default()).with_backend(backend()?);
            p.prepare(None, &solve).map_err(failed)?;
            let opts = SweepOptions { points: cfg.points, solve, workers: cfg.workers.max(1), accept_gap_factor: 2.0 };
            let r = epsilon_sweep(&p, &opts).map_err(failed)?;
            for (k, pt) in r.points.iter().enumerate() {
                dots.push(write(dir, &format!("design_{k}.dot"), &export_stream_plot(&pt.payload.design, &case))?);
            }
            write(dir, "pareto.csv", &pareto_csv(&r.points))?;
            write(dir, "times.csv", &solver_time_report(&r.windows))?;
            write(dir, "summary.txt", &sweep_summary(&r.points, r.f2_range, r.total_seconds))?;
        }
    }
    if cfg.svg {
        for d in &dots {
            render_svg(d);
        }
    }
    info!("wrote results to {}", dir.display());
    Ok(())
}

fn violation_lines(points: &[ParetoPoint<crate::problem::SolvedPoint>]) -> String {
    let mut s = String::new();
    for (k, p) in points.iter().enumerate() {
        for v in &p.payload.violations {
            s.push_str(&format!("  point {k}: {} check failed for {} by {:.3e}\n", v.check, v.subject, v.amount));
        }
    }
    if s.is_empty() {
        "structural checks: all passed\n".into()
    } else {
        format!("structural checks:\n{s}")
    }
}

fn sweep_summary(points: &[ParetoPoint<crate::problem::SolvedPoint>], range: (f64, f64), seconds: f64) -> String {
    let mut s = format!(
        "front: {} points, model c_prod range [{:.5}, {:.5}] EUR/kg, {:.1} s\n\n",
        points.len(),
        range.0,
        range.1,
        seconds
    );
    if let (Some(cheap), Some(eff)) = (
        points.iter().min_by(|a, b| a.payload.evaluation.c_prod.total_cmp(&b.payload.evaluation.c_prod)),
        points.iter().max_by(|a, b| a.payload.evaluation.eta.total_cmp(&b.payload.evaluation.eta)),
    ) {
        s.push_str(&design_table("lowest production cost", &cheap.payload.evaluation));
        s.push('\n');
        s.push_str(&design_table("highest efficiency", &eff.payload.evaluation));
        s.push('\n');
    }
    s.push_str(&violation_lines(points));
    s
}
