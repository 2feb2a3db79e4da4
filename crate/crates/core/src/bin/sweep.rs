use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sweeping::par::*;
use sweeping::scenario::{collect_scenarios, load_scenario, run_file, Checks, RunOptions, ScenarioError, OUT_DIR_ENV};
use sweeping::solver::{convergence_table, level_cap, time_scale};

/// Solve sweeping processes from scenario files and certify the results.
#[derive(Parser)]
#[command(name = "sweep", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve and check scenarios; directories are scanned for *.json.
    Run {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
        /// Target sup-difference between successive dyadic levels.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_level: Option<u32>,
        /// Output directory (overrides the scenario file and $SWEEP_OUT_DIR).
        #[arg(long)]
        out: Option<PathBuf>,
        /// all, none, or a comma-separated list of check names.
        #[arg(long)]
        checks: Option<Checks>,
    },
    /// Print the dyadic convergence table against the Cauchy bound.
    SweepLevels {
        scenario: PathBuf,
        #[arg(long)]
        from: u32,
        #[arg(long)]
        to: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run {
            scenarios,
            tol,
            max_level,
            out,
            checks,
        } => run(
            &scenarios,
            RunOptions {
                tol,
                max_level,
                out,
                checks,
                env_out: std::env::var_os(OUT_DIR_ENV).map(PathBuf::from),
            },
        ),
        Command::SweepLevels { scenario, from, to } => sweep_levels(&scenario, from, to),
    };
    ExitCode::from(code)
}

fn run(inputs: &[PathBuf], opts: RunOptions) -> u8 {
    let files = match collect_scenarios(inputs) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let results: Vec<_> = files.par_iter().map(|f| run_file(f, &opts)).collect();
    let mut code = 0;
    for result in results {
        match result {
            Ok(outcome) => {
                let s = &outcome.summary;
                let level = s.level.map_or("-".to_string(), |n| n.to_string());
                let gap = s.cauchy_gap.map_or("-".to_string(), |g| format!("{g:.3e}"));
                if outcome.passed() {
                    println!("{}: ok ({} solver, level {level}, gap {gap}, {} checks)", s.name, s.solver.as_str(), outcome.reports.len());
                } else {
                    println!("{}: FAILED {}", s.name, s.failed_checks.join(", "));
                    code = code.max(1);
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                code = code.max(e.exit_code() as u8);
            }
        }
    }
    code
}

fn sweep_levels(path: &Path, from: u32, to: u32) -> u8 {
    let p = match load_scenario(path) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if p.set.has_jumps() {
        eprintln!("error: {}: sweep-levels needs a scenario without jumps", path.display());
        return 2;
    }
    let cap = level_cap(time_scale(&p.set) * p.set.horizon());
    if from > to || to >= cap {
        eprintln!("error: need from <= to < {cap}");
        return 2;
    }
    let rows = match convergence_table(&p.set, &p.y0, from, to) {
        Ok(r) => r,
        Err(e) => {
            let e = ScenarioError::Solver {
                name: p.scenario.name.clone(),
                source: e,
            };
            eprintln!("error: {e}");
            return 3;
        }
    };
    println!("level,observed,bound,interp_diff,within_bound");
    for r in &rows {
        println!("{},{:e},{:e},{:e},{}", r.level, r.step_diff, r.bound, r.interp_diff, r.within_bound());
    }
    if rows.iter().all(|r| r.within_bound()) {
        0
    } else {
        1
    }
}
