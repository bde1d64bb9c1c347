//! Subprocess backend: write MPS, run a solver executable, read its
//! solution file.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use super::Backend;
use crate::model::MilpModel;
use crate::mps::{column_name, emit_mps};
use crate::solution::{Solution, SolveError, SolveOptions, SolveStatus};

/// Path of the solver executable.
pub const SOLVER_PATH_ENV: &str = "HENOPT_SOLVER";
/// `highs` or `cbc`; when unset the dialect is guessed from the file name.
pub const SOLVER_DIALECT_ENV: &str = "HENOPT_SOLVER_DIALECT";

/// Command-line and solution-file conventions of the external solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dialect {
    /// `--model_file`, `--options_file`, `--solution_file`; HiGHS text solution.
    Highs,
    /// `model.mps -ratio g -sec t -threads n -solve -solu file`.
    Cbc,
}

impl Dialect {
    pub fn parse(s: &str) -> Option<Dialect> {
        match s.to_ascii_lowercase().as_str() {
            "highs" => Some(Dialect::Highs),
            "cbc" => Some(Dialect::Cbc),
            _ => None,
        }
    }

    fn guess(path: &Path) -> Dialect {
        let stem = path
            .file_name()
            .map(|s| s.to_string_lossy().to_ascii_lowercase())
            .unwrap_or_default();
        if stem.contains("cbc") {
            Dialect::Cbc
        } else {
            Dialect::Highs
        }
    }
}

#[derive(Clone, Debug)]
pub struct CommandBackend {
    pub executable: PathBuf,
    pub dialect: Dialect,
}

impl CommandBackend {
    pub fn new(executable: impl Into<PathBuf>, dialect: Dialect) -> Self {
        CommandBackend {
            executable: executable.into(),
            dialect,
        }
    }

    pub fn from_env() -> Result<Self, SolveError> {
        let path = std::env::var_os(SOLVER_PATH_ENV).ok_or_else(|| {
            SolveError::Unavailable(format!("{SOLVER_PATH_ENV} is not set"))
        })?;
        let path = PathBuf::from(path);
        if !path.is_file() {
            return Err(SolveError::Unavailable(format!(
                "solver executable {} not found",
                path.display()
            )));
        }
        let dialect = match std::env::var(SOLVER_DIALECT_ENV) {
            Ok(d) => Dialect::parse(&d).ok_or_else(|| {
                SolveError::Unavailable(format!("unknown solver dialect `{d}`"))
            })?,
            Err(_) => Dialect::guess(&path),
        };
        Ok(CommandBackend::new(path, dialect))
    }
}

impl Backend for CommandBackend {
    fn name(&self) -> &str {
        match self.dialect {
            Dialect::Highs => "command-highs",
            Dialect::Cbc => "command-cbc",
        }
    }

    fn solve(&self, model: &MilpModel, opts: &SolveOptions) -> Result<Solution, SolveError> {
        let start = Instant::now();
        let dir = tempfile::tempdir()?;
        let mps_path = dir.path().join("model.mps");
        let sol_path = dir.path().join("model.sol");
        std::fs::write(&mps_path, emit_mps(model))?;

        // the solver runs inside the scratch dir so its own log lands there
        let exe = if self.executable.components().count() > 1 {
            std::fs::canonicalize(&self.executable).unwrap_or_else(|_| self.executable.clone())
        } else {
            self.executable.clone()
        };
        let mut cmd = Command::new(exe);
        cmd.current_dir(dir.path());
        match self.dialect {
            Dialect::Highs => {
                let opt_path = dir.path().join("highs.opt");
                std::fs::write(
                    &opt_path,
                    format!(
                        "mip_rel_gap = {}\ntime_limit = {}\nthreads = {}\nrandom_seed = 0\n",
                        opts.mip_gap,
                        opts.time_limit_s,
                        opts.threads.max(1)
                    ),
                )?;
                cmd.arg("--model_file")
                    .arg(&mps_path)
                    .arg("--options_file")
                    .arg(&opt_path)
                    .arg("--solution_file")
                    .arg(&sol_path);
            }
            Dialect::Cbc => {
                cmd.arg(&mps_path)
                    .args(["-ratio", &opts.mip_gap.to_string()])
                    .args(["-sec", &opts.time_limit_s.to_string()])
                    .args(["-threads", &opts.threads.max(1).to_string()])
                    .args(["-solve", "-solu"])
                    .arg(&sol_path);
            }
        }
        let output = cmd.output().map_err(|e| {
            SolveError::Unavailable(format!("cannot run {}: {e}", self.executable.display()))
        })?;
        let log = String::from_utf8_lossy(&output.stdout).into_owned();
        if opts.verbose {
            eprint!("{log}");
        }
        let text = std::fs::read_to_string(&sol_path).map_err(|_| {
            SolveError::Backend(format!(
                "{} wrote no solution file (exit {:?})",
                self.executable.display(),
                output.status.code()
            ))
        })?;
        let parsed = match self.dialect {
            Dialect::Highs => parse_highs_solution(&text, model.num_vars())?,
            Dialect::Cbc => parse_cbc_solution(&text, model.num_vars())?,
        };
        let wall_time = start.elapsed();
        let status = parsed.status;
        if !status.has_solution() {
            return Ok(Solution {
                status,
                objective: None,
                gap: None,
                values: Vec::new(),
                wall_time,
            });
        }
        let gap = match status {
            SolveStatus::OptimalWithinGap => Some(scan_gap(&log).unwrap_or(0.0).min(opts.mip_gap)),
            _ => scan_gap(&log),
        };
        Ok(Solution {
            status,
            objective: Some(model.objective().eval(&parsed.values)),
            gap,
            values: parsed.values,
            wall_time,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSolution {
    pub status: SolveStatus,
    pub values: Vec<f64>,
}

fn index_of(name: &str) -> Option<usize> {
    let idx: usize = name.strip_prefix('X')?.parse().ok()?;
    (idx >= 1 && column_name(idx - 1) == name).then_some(idx - 1)
}

/// Reads a HiGHS text solution file.
pub fn parse_highs_solution(text: &str, n: usize) -> Result<ParsedSolution, SolveError> {
    let mut lines = text.lines().map(str::trim);
    let mut model_status = None;
    while let Some(l) = lines.next() {
        if l == "Model status" {
            model_status = lines.next().map(str::to_string);
            break;
        }
    }
    let model_status =
        model_status.ok_or_else(|| SolveError::Parse("missing `Model status`".into()))?;
    let mut primal = "None".to_string();
    let mut values = vec![0.0; n];
    let mut seen = 0usize;
    let mut in_primal = false;
    let mut in_columns = false;
    for l in lines {
        if l.starts_with("# Primal solution values") {
            in_primal = true;
            continue;
        }
        if l.starts_with("# Dual") || l.starts_with("# Basis") {
            break;
        }
        if !in_primal {
            continue;
        }
        if l.starts_with("# Columns") {
            in_columns = true;
            continue;
        }
        if l.starts_with("# Rows") {
            break;
        }
        if matches!(l, "Feasible" | "Infeasible" | "None") {
            primal = l.to_string();
            continue;
        }
        if in_columns {
            let mut it = l.split_whitespace();
            if let (Some(name), Some(v)) = (it.next(), it.next()) {
                let j = index_of(name)
                    .filter(|&j| j < n)
                    .ok_or_else(|| SolveError::Parse(format!("unknown column `{name}`")))?;
                values[j] = v
                    .parse()
                    .map_err(|_| SolveError::Parse(format!("bad value `{v}`")))?;
                seen += 1;
            }
        }
    }
    let has_point = primal == "Feasible" && seen == n;
    let status = match model_status.as_str() {
        "Optimal" | "Empty" | "Model empty" => SolveStatus::OptimalWithinGap,
        "Infeasible" | "Primal infeasible or unbounded" => SolveStatus::Infeasible,
        s if s.contains("limit") || s.contains("Interrupted") => {
            if has_point {
                SolveStatus::TimeoutWithIncumbent
            } else {
                SolveStatus::TimeoutNoSolution
            }
        }
        s => return Err(SolveError::Backend(format!("model status `{s}`"))),
    };
    if status.has_solution() && !has_point && n > 0 {
        return Err(SolveError::Parse("solution file lists no primal values".into()));
    }
    Ok(ParsedSolution { status, values })
}

/// Reads a CBC `-solu` file: a status line then `index name value reduced-cost`.
pub fn parse_cbc_solution(text: &str, n: usize) -> Result<ParsedSolution, SolveError> {
    let mut lines = text.lines();
    let head = lines
        .next()
        .ok_or_else(|| SolveError::Parse("empty solution file".into()))?
        .trim()
        .to_string();
    let mut values = vec![0.0; n];
    for l in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        // infeasible rows are prefixed with `**`
        let f: &[&str] = if f.first() == Some(&"**") { &f[1..] } else { &f };
        if f.len() < 3 {
            continue;
        }
        if let Some(j) = index_of(f[1]).filter(|&j| j < n) {
            values[j] = f[2]
                .parse()
                .map_err(|_| SolveError::Parse(format!("bad value `{}`", f[2])))?;
        }
    }
    let objective = head
        .rsplit("objective value")
        .next()
        .and_then(|s| s.trim().parse::<f64>().ok());
    let status = if head.starts_with("Optimal") {
        SolveStatus::OptimalWithinGap
    } else if head.contains("nfeasible") {
        SolveStatus::Infeasible
    } else if head.starts_with("Stopped") {
        match objective {
            Some(v) if v.abs() < 1e49 && head.contains("objective value") => {
                SolveStatus::TimeoutWithIncumbent
            }
            _ => SolveStatus::TimeoutNoSolution,
        }
    } else {
        return Err(SolveError::Backend(format!("solver reported `{head}`")));
    };
    Ok(ParsedSolution { status, values })
}

/// Last relative gap figure printed in a solver log, as a fraction.
fn scan_gap(log: &str) -> Option<f64> {
    log.lines().rev().find_map(|l| {
        let l = l.trim();
        let rest = l
            .strip_prefix("Gap:")
            .or_else(|| l.strip_prefix("Gap"))?
            .trim();
        let tok = rest.split_whitespace().next()?;
        if let Some(p) = tok.strip_suffix('%') {
            p.parse::<f64>().ok().map(|x| x / 100.0)
        } else {
            tok.parse::<f64>().ok()
        }
    })
}
