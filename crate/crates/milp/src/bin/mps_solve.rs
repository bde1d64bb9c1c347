//! Minimal solver executable speaking the HiGHS command-line file protocol.
//!
//! `henopt-mps-solve --model_file m.mps [--options_file o.txt] --solution_file s.sol`
//! reads the model, solves it with the built-in reference solver and writes
//! a HiGHS-style text solution.

use std::fmt::Write as _;
use std::process::ExitCode;

use henopt_milp::backend::{Backend, ReferenceBackend};
use henopt_milp::mps::{column_name, parse_mps};
use henopt_milp::{SolveOptions, SolveStatus};

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("henopt-mps-solve: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let flag = |name: &str| {
        args.iter()
            .position(|a| a == name)
            .and_then(|i| args.get(i + 1).cloned())
    };
    let model_file = flag("--model_file").ok_or("missing --model_file")?;
    let solution_file = flag("--solution_file").ok_or("missing --solution_file")?;
    let mut opts = SolveOptions::default();
    if let Some(path) = flag("--options_file") {
        for line in std::fs::read_to_string(path)?.lines() {
            let Some((k, v)) = line.split_once('=') else { continue };
            match k.trim() {
                "mip_rel_gap" => opts.mip_gap = v.trim().parse()?,
                "time_limit" => opts.time_limit_s = v.trim().parse()?,
                _ => {}
            }
        }
    }
    let model = parse_mps(&std::fs::read_to_string(model_file)?)?;
    let sol = ReferenceBackend::default().solve(&model, &opts)?;
    let mut out = String::from("Model status\n");
    out.push_str(match sol.status {
        SolveStatus::OptimalWithinGap => "Optimal",
        SolveStatus::Infeasible => "Infeasible",
        _ => "Time limit reached",
    });
    out.push_str("\n\n# Primal solution values\n");
    if sol.status.has_solution() {
        writeln!(out, "Feasible\nObjective {}", sol.objective.unwrap_or(0.0))?;
        writeln!(out, "# Columns {}", sol.values.len())?;
        for (j, v) in sol.values.iter().enumerate() {
            writeln!(out, "{} {v}", column_name(j))?;
        }
        writeln!(out, "# Rows 0")?;
    } else {
        out.push_str("None\n");
    }
    out.push_str("\n# Dual solution values\nNone\n");
    println!("Gap: {}", sol.gap.unwrap_or(0.0));
    std::fs::write(solution_file, out)?;
    Ok(())
}
