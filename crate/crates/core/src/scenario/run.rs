use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::csv_io::write_trajectory_csv;
use super::{load_scenario, resolve_out_dir, CheckKind, Checks, Prepared, ScenarioError, SolverKind};
use crate::error::SweepError;
use crate::solver::{solve_br, solve_lipschitz, LevelRow, SolveStats, SolverConfig, Trajectory};
use crate::verify::{
    check_constraint, check_density_bound, check_density_representation, check_integral_inequality,
    check_jump_conditions, check_normal_cone_residuals, check_variation_budget, CheckReport,
};

const DEFAULT_CHECK_TOL: f64 = 1e-6;
const DEFAULT_INTEGRAL_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverUsed {
    Lipschitz,
    Br,
}

impl SolverUsed {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverUsed::Lipschitz => "lipschitz",
            SolverUsed::Br => "br",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Solved {
    pub used: SolverUsed,
    pub trajectory: Trajectory,
    /// Absent when `ℓ_C ≡ 0` short-circuits the BR solver.
    pub stats: Option<SolveStats>,
    /// `ℓ_C(T)`, when every excess on the way was exact.
    pub arc_total: Option<f64>,
}

pub fn solve(p: &Prepared, config: &SolverConfig) -> Result<Solved, SweepError> {
    let use_br = match p.scenario.solver {
        SolverKind::Auto => p.set.has_jumps(),
        SolverKind::Lipschitz if p.set.has_jumps() => return Err(SweepError::HasJumps),
        SolverKind::Lipschitz => false,
        SolverKind::Br => true,
    };
    if use_br {
        let sol = solve_br(&p.set, &p.y0, config)?;
        return Ok(Solved {
            used: SolverUsed::Br,
            stats: sol.lifted.map(|l| l.stats),
            arc_total: Some(sol.reparam.total()),
            trajectory: sol.trajectory,
        });
    }
    let sol = solve_lipschitz(&p.set, &p.y0, config)?;
    let mut trajectory = sol.trajectory;
    let arc = p.set.arc_length_adaptive()?;
    let arc_total = arc.exact.then_some(arc.total);
    if arc.exact {
        trajectory.arc = Some(trajectory.times.iter().map(|&t| arc.value_at(t)).collect());
    }
    Ok(Solved {
        used: SolverUsed::Lipschitz,
        trajectory,
        stats: Some(sol.stats),
        arc_total,
    })
}

/// Runs the selected checks. The integral inequality only applies without
/// jumps; the variation and density budgets are `L·T` and `L` for the
/// Lipschitz solver and `ℓ_C(T)` and `1` for the BR solver.
pub fn certify(
    p: &Prepared,
    solved: &Solved,
    checks: &Checks,
    check_tol: f64,
    integral_tol: f64,
) -> Result<Vec<CheckReport>, SweepError> {
    let y = &solved.trajectory;
    let set = &p.set;
    let (budget, speed) = match solved.used {
        SolverUsed::Lipschitz => (set.lipschitz() * set.horizon(), set.lipschitz()),
        SolverUsed::Br => (solved.arc_total.unwrap_or(f64::INFINITY), 1.0),
    };
    let mut out = Vec::new();
    for kind in CheckKind::ALL.into_iter().filter(|&k| checks.includes(k)) {
        let report = match kind {
            CheckKind::Constraint => check_constraint(y, set, check_tol)?,
            CheckKind::JumpConditions => check_jump_conditions(y, set, check_tol)?,
            CheckKind::NormalCone => check_normal_cone_residuals(y, set, check_tol)?,
            CheckKind::IntegralInequality if set.has_jumps() => continue,
            CheckKind::IntegralInequality => check_integral_inequality(y, set, &p.probes(), integral_tol, false)?,
            CheckKind::VariationBudget => check_variation_budget(y, budget, check_tol),
            CheckKind::DensityBound => check_density_bound(y, speed, check_tol),
            CheckKind::DensityRepresentation => check_density_representation(y, solved.used == SolverUsed::Br, check_tol),
        };
        out.push(report);
    }
    Ok(out)
}

/// Per-run overrides; `None` defers to the scenario file. `env_out` is the
/// output directory from the environment, used below the file setting.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub tol: Option<f64>,
    pub max_level: Option<u32>,
    pub out: Option<PathBuf>,
    pub checks: Option<Checks>,
    pub env_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub name: String,
    pub solver: SolverUsed,
    pub horizon: f64,
    pub nodes: usize,
    pub jumps: usize,
    pub level: Option<u32>,
    pub cauchy_gap: Option<f64>,
    pub converged: Option<bool>,
    pub arc_total: Option<f64>,
    pub levels: Vec<LevelRow>,
    pub passed: bool,
    pub failed_checks: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub prepared: Prepared,
    pub solved: Solved,
    pub reports: Vec<CheckReport>,
    pub summary: Summary,
    pub dir: PathBuf,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.summary.passed
    }

    pub fn csv_path(&self) -> PathBuf {
        self.dir.join(format!("{}.csv", self.summary.name))
    }
}

/// Load, solve, certify, then write `<name>.csv`, `<name>.certificate.json`
/// and `<name>.summary.json`. Nothing is written unless the scenario parses
/// and solves; each file is replaced atomically.
pub fn run_file(path: &Path, opts: &RunOptions) -> Result<RunOutcome, ScenarioError> {
    let prepared = load_scenario(path)?;
    let s = &prepared.scenario;
    let mut config = prepared.solver_config();
    if let Some(tol) = opts.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(ScenarioError::Invalid {
                path: path.to_path_buf(),
                field: "--tol".into(),
                message: format!("must be positive, got {tol}"),
            });
        }
        config.target_tol = tol;
    }
    if let Some(n) = opts.max_level {
        config.max_level = n;
    }
    let checks = opts.checks.clone().unwrap_or_else(|| s.checks.clone());
    let solver_err = |source| ScenarioError::Solver {
        name: s.name.clone(),
        source,
    };
    let solved = solve(&prepared, &config).map_err(solver_err)?;
    let reports = certify(
        &prepared,
        &solved,
        &checks,
        s.check_tol.unwrap_or(DEFAULT_CHECK_TOL),
        s.integral_tol.unwrap_or(DEFAULT_INTEGRAL_TOL),
    )
    .map_err(solver_err)?;

    let y = &solved.trajectory;
    let stats = solved.stats.as_ref();
    let summary = Summary {
        name: s.name.clone(),
        solver: solved.used,
        horizon: prepared.horizon(),
        nodes: y.len(),
        jumps: y.jumps.len(),
        level: stats.map(|st| st.level),
        cauchy_gap: stats.map(|st| st.cauchy_gap),
        converged: stats.map(|st| st.converged),
        arc_total: solved.arc_total,
        levels: stats.map(|st| st.rows.clone()).unwrap_or_default(),
        passed: reports.iter().all(|r| r.passed),
        failed_checks: reports.iter().filter(|r| !r.passed).map(|r| r.name.clone()).collect(),
    };

    let dir = resolve_out_dir(opts.out.as_deref(), s.output.dir.as_deref(), opts.env_out.as_deref());
    let io_err = |p: &Path, e: std::io::Error| ScenarioError::Io {
        path: p.to_path_buf(),
        message: e.to_string(),
    };
    std::fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
    let mut csv = Vec::new();
    write_trajectory_csv(y, &mut csv).map_err(solver_err)?;
    let certificate = serde_json::to_vec_pretty(&reports).expect("reports serialize");
    let summary_json = serde_json::to_vec_pretty(&summary).expect("summary serializes");
    for (suffix, bytes) in [
        ("csv", &csv),
        ("certificate.json", &certificate),
        ("summary.json", &summary_json),
    ] {
        let target = dir.join(format!("{}.{suffix}", s.name));
        write_atomic(&dir, &target, bytes).map_err(|e| io_err(&target, e))?;
    }

    Ok(RunOutcome {
        prepared,
        solved,
        reports,
        summary,
        dir,
    })
}

fn write_atomic(dir: &Path, target: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644))?;
    }
    tmp.persist(target).map_err(|e| e.error)?;
    Ok(())
}
