use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use henopt::cli::{run, RunConfig, RunMode};

/// Coupled heat-exchanger-network and operating-point optimisation.
#[derive(Parser, Debug)]
#[command(name = "henopt", version)]
struct Args {
    /// Case definition (JSON).
    #[arg(long)]
    case: PathBuf,
    /// `coupled`, `fixed:<u>` or `fixture:<design.json>`.
    #[arg(long, default_value = "coupled")]
    mode: RunMode,
    /// Points on the front (coupled mode).
    #[arg(long, default_value_t = 5)]
    points: usize,
    /// Relative MIP gap.
    #[arg(long, default_value_t = 0.05)]
    mip_gap: f64,
    /// Seconds per solve.
    #[arg(long, default_value_t = 600.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// `highs`, `command` (executable from HENOPT_SOLVER) or `reference`.
    #[arg(long, default_value = "highs")]
    backend: String,
    /// Also render every design graph to SVG with graphviz.
    #[arg(long)]
    svg: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let a = Args::parse();
    let cfg = RunConfig {
        case_path: a.case,
        mode: a.mode,
        points: a.points,
        mip_gap: a.mip_gap,
        time_limit_s: a.time_limit,
        workers: a.workers,
        output_dir: a.out,
        backend: a.backend,
        svg: a.svg,
    };
    match run(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("henopt: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
