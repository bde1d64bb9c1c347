//! Two-objective front by windowed epsilon constraints: the range of the
//! second objective is cut into equal windows and the first objective is
//! minimised inside each closed window.

use std::fmt;
use std::time::Instant;

use henopt_milp::{SolveOptions, SolveStatus};
use log::info;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Goal {
    MinF1,
    MinF2,
}

/// Result of one single-objective solve.
#[derive(Debug, Clone)]
pub struct Outcome<P> {
    pub status: SolveStatus,
    pub f1: f64,
    pub f2: f64,
    pub gap: Option<f64>,
    pub seconds: f64,
    /// Present whenever the status carries a solution.
    pub payload: Option<P>,
}

/// Side constraints of one solve.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Limits {
    /// `lo <= f2 <= hi`.
    pub f2_band: Option<(f64, f64)>,
    pub f1_max: Option<f64>,
}

impl Limits {
    pub fn band(lo: f64, hi: f64) -> Self {
        Limits { f2_band: Some((lo, hi)), f1_max: None }
    }
}

pub trait BiObjectiveProblem: Sync {
    type Payload: Clone + Send;

    fn solve(&self, goal: Goal, limits: Limits, opts: &SolveOptions) -> Result<Outcome<Self::Payload>, String>;
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub points: usize,
    pub solve: SolveOptions,
    pub workers: usize,
    /// Timed-out windows are kept when their gap is within this multiple
    /// of the target.
    pub accept_gap_factor: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { points: 5, solve: SolveOptions::default(), workers: 1, accept_gap_factor: 2.0 }
    }
}

#[derive(Debug, Clone)]
pub struct ParetoPoint<P> {
    pub f1: f64,
    pub f2: f64,
    pub window_index: Option<usize>,
    pub mip_gap: Option<f64>,
    pub solve_seconds: f64,
    pub status: SolveStatus,
    pub payload: P,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WindowFate {
    Accepted,
    /// The window reuses the corner solve that minimised `f1`.
    Corner,
    Skipped(String),
}

#[derive(Debug, Clone)]
pub struct WindowRecord {
    /// `None` for the lower corner solve.
    pub index: Option<usize>,
    pub band: (f64, f64),
    pub status: SolveStatus,
    pub gap: Option<f64>,
    pub seconds: f64,
    pub fate: WindowFate,
}

#[derive(Debug, Clone)]
pub struct SweepResult<P> {
    pub f2_range: (f64, f64),
    pub points: Vec<ParetoPoint<P>>,
    pub windows: Vec<WindowRecord>,
    pub total_seconds: f64,
}

#[derive(Debug)]
pub enum SweepError {
    Solver(String),
    /// A corner solve found no solution.
    NoCorner { goal: Goal, status: SolveStatus },
}

impl fmt::Display for SweepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepError::Solver(m) => write!(f, "solver failure: {m}"),
            SweepError::NoCorner { goal, status } => write!(f, "corner solve {goal:?} ended {status}"),
        }
    }
}

impl std::error::Error for SweepError {}

fn acceptable<P>(o: &Outcome<P>, opts: &SweepOptions) -> Result<(), String> {
    match o.status {
        SolveStatus::OptimalWithinGap if o.payload.is_some() => Ok(()),
        SolveStatus::TimeoutWithIncumbent if o.payload.is_some() => {
            let limit = opts.accept_gap_factor * opts.solve.mip_gap;
            match o.gap {
                Some(g) if g <= limit => Ok(()),
                Some(g) => Err(format!("timeout with gap {:.2}% above {:.2}%", 100.0 * g, 100.0 * limit)),
                None => Err("timeout with unknown gap".into()),
            }
        }
        s => Err(format!("{s}")),
    }
}

fn to_point<P: Clone>(o: &Outcome<P>, window: Option<usize>) -> ParetoPoint<P> {
    ParetoPoint {
        f1: o.f1,
        f2: o.f2,
        window_index: window,
        mip_gap: o.gap,
        solve_seconds: o.seconds,
        status: o.status,
        payload: o.payload.clone().expect("accepted outcome has a payload"),
    }
}

fn slack(v: f64) -> f64 {
    v + 1e-6 * v.abs().max(1.0)
}

/// One corner: minimise `goal`, then minimise the other objective without
/// letting `goal` get worse. Falls back to the first solve when the second
/// finds nothing.
fn corner<Q: BiObjectiveProblem>(problem: &Q, goal: Goal, opts: &SolveOptions) -> Result<Outcome<Q::Payload>, SweepError> {
    let first = problem.solve(goal, Limits::default(), opts).map_err(SweepError::Solver)?;
    if first.payload.is_none() {
        return Ok(first);
    }
    let (other, limits) = match goal {
        Goal::MinF2 => (Goal::MinF1, Limits { f2_band: Some((f64::NEG_INFINITY, slack(first.f2))), f1_max: None }),
        Goal::MinF1 => (Goal::MinF2, Limits { f2_band: None, f1_max: Some(slack(first.f1)) }),
    };
    let second = problem.solve(other, limits, opts).map_err(SweepError::Solver)?;
    if second.payload.is_none() {
        return Ok(first);
    }
    let seconds = first.seconds + second.seconds;
    Ok(Outcome { seconds, ..second })
}

/// Lexicographic corner solves: `(min f2 outcome, min f1 outcome)`; the
/// window range is `[f2 of the first, f2 of the second]`.
pub fn objective_bounds<Q: BiObjectiveProblem>(
    problem: &Q,
    opts: &SweepOptions,
) -> Result<(Outcome<Q::Payload>, Outcome<Q::Payload>), SweepError> {
    let goals = [Goal::MinF2, Goal::MinF1];
    let run = |g: &Goal| corner(problem, *g, &opts.solve);
    let results: Vec<Result<Outcome<Q::Payload>, SweepError>> = if opts.workers > 1 {
        pool(opts.workers).install(|| goals.par_iter().map(run).collect())
    } else {
        goals.iter().map(run).collect()
    };
    let mut it = results.into_iter();
    let a = it.next().unwrap()?;
    let b = it.next().unwrap()?;
    for (g, o) in [(Goal::MinF2, &a), (Goal::MinF1, &b)] {
        if o.payload.is_none() {
            return Err(SweepError::NoCorner { goal: g, status: o.status });
        }
    }
    Ok((a, b))
}

fn pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build().expect("thread pool")
}

/// Equal windows over `[lo, hi]`; the last edge is exactly `hi`.
pub fn window_edges(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let n = points.max(2) - 1;
    (0..=n).map(|i| if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 }).collect()
}

pub fn epsilon_sweep<Q: BiObjectiveProblem>(problem: &Q, opts: &SweepOptions) -> Result<SweepResult<Q::Payload>, SweepError> {
    let start = Instant::now();
    let (a, b) = objective_bounds(problem, opts)?;
    let (lo, hi) = (a.f2, b.f2.max(a.f2));
    info!("objective range f2 in [{lo:.6}, {hi:.6}]");
    let mut windows = vec![WindowRecord {
        index: None,
        band: (lo, lo),
        status: a.status,
        gap: a.gap,
        seconds: a.seconds,
        fate: WindowFate::Accepted,
    }];
    let mut points = vec![to_point(&a, None)];
    let edges = window_edges(lo, hi, opts.points);
    let n_win = edges.len() - 1;
    let degenerate = hi - lo <= 1e-12 * hi.abs().max(1.0);
    let last = n_win - 1;
    let todo: Vec<usize> = if degenerate { Vec::new() } else { (0..last).collect() };
    let run = |&i: &usize| -> Result<(usize, Outcome<Q::Payload>), SweepError> {
        let o = problem.solve(Goal::MinF1, Limits::band(edges[i], edges[i + 1]), &opts.solve).map_err(SweepError::Solver)?;
        info!("window {i} [{:.6}, {:.6}]: {} in {:.1} s", edges[i], edges[i + 1], o.status, o.seconds);
        Ok((i, o))
    };
    let solved: Vec<Result<(usize, Outcome<Q::Payload>), SweepError>> = if opts.workers > 1 {
        pool(opts.workers).install(|| todo.par_iter().map(run).collect())
    } else {
        todo.iter().map(run).collect()
    };
    let mut solved: Vec<(usize, Outcome<Q::Payload>)> = solved.into_iter().collect::<Result<_, _>>()?;
    solved.sort_by_key(|(i, _)| *i);
    for (i, o) in &solved {
        let fate = match acceptable(o, opts) {
            Ok(()) => {
                points.push(to_point(o, Some(*i)));
                WindowFate::Accepted
            }
            Err(why) => WindowFate::Skipped(why),
        };
        windows.push(WindowRecord {
            index: Some(*i),
            band: (edges[*i], edges[*i + 1]),
            status: o.status,
            gap: o.gap,
            seconds: o.seconds,
            fate,
        });
    }
    points.push(to_point(&b, Some(last)));
    windows.push(WindowRecord {
        index: Some(last),
        band: (edges[last], edges[last + 1]),
        status: b.status,
        gap: b.gap,
        seconds: b.seconds,
        fate: WindowFate::Corner,
    });
    let points = filter_nondominated(dedup(points));
    Ok(SweepResult { f2_range: (lo, hi), points, windows, total_seconds: start.elapsed().as_secs_f64() })
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Drops points whose objective pair repeats an earlier one.
pub fn dedup<P>(points: Vec<ParetoPoint<P>>) -> Vec<ParetoPoint<P>> {
    let mut out: Vec<ParetoPoint<P>> = Vec::new();
    for p in points {
        if !out.iter().any(|q| same(q.f1, p.f1) && same(q.f2, p.f2)) {
            out.push(p);
        }
    }
    out
}

fn dominates(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.0 && a.1 <= b.1 && (a.0 < b.0 || a.1 < b.1)
}

/// Points not dominated by any other, sorted by `f2` (stable).
pub fn filter_nondominated<P>(points: Vec<ParetoPoint<P>>) -> Vec<ParetoPoint<P>> {
    let keys: Vec<(f64, f64)> = points.iter().map(|p| (p.f1, p.f2)).collect();
    let mut kept: Vec<ParetoPoint<P>> = points
        .into_iter()
        .enumerate()
        .filter(|(i, _)| !keys.iter().enumerate().any(|(j, k)| j != *i && dominates(*k, keys[*i])))
        .map(|(_, p)| p)
        .collect();
    kept.sort_by(|a, b| a.f2.total_cmp(&b.f2));
    kept
}
