use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::trajectory::{interpolate, DiscreteTrajectory, Trajectory};
use crate::convex::{ConvexError, Vector};
use crate::curve::SetCurve;
use crate::error::SweepError;
use crate::par::*;

/// Total number of steps one level may take.
const MAX_LOG2_STEPS: f64 = 23.0;

/// Breakpoints closer than this (relative to the horizon) to a grid node
/// replace the node instead of adding a sliver step.
const SNAP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub target_tol: f64,
    pub min_level: u32,
    pub max_level: u32,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            target_tol: 1e-6,
            min_level: 6,
            max_level: 22,
        }
    }
}

/// Comparison of levels `n` and `n + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub level: u32,
    /// `sup_t ‖y_{n+1}(t) − y_n(t)‖` for the step functions.
    pub step_diff: f64,
    /// Same for the piecewise-affine interpolants.
    pub interp_diff: f64,
    /// `√((1 + 2^{n+1} T) / 2^{2n+2})` with `T` the rescaled horizon.
    pub bound: f64,
    /// Where `step_diff` is attained.
    pub t: f64,
}

impl LevelRow {
    pub fn within_bound(&self) -> bool {
        self.step_diff <= self.bound * (1.0 + 1e-12) + 1e-15
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    /// Level of the returned trajectory.
    pub level: u32,
    /// Last interpolant difference.
    pub cauchy_gap: f64,
    pub converged: bool,
    pub scale: f64,
    pub rows: Vec<LevelRow>,
}

#[derive(Debug, Clone)]
pub struct LipschitzSolution {
    pub trajectory: Trajectory,
    pub discrete: DiscreteTrajectory,
    pub stats: SolveStats,
}

/// `max(L, 1)`: curves slower than 1 already satisfy the scheme's hypothesis.
pub fn time_scale<C: SetCurve + ?Sized>(curve: &C) -> f64 {
    curve.lipschitz().max(1.0)
}

/// `√((1 + 2^{n+1} T) / 2^{2n+2})`.
pub fn cauchy_bound(level: u32, horizon: f64) -> f64 {
    let n = level as f64;
    ((1.0 + 2f64.powf(n + 1.0) * horizon) / 2f64.powf(2.0 * n + 2.0)).sqrt()
}

/// Highest level whose step count stays under 2²³ for this rescaled horizon.
pub fn level_cap(rescaled_horizon: f64) -> u32 {
    let cap = MAX_LOG2_STEPS - rescaled_horizon.max(1e-300).log2().max(0.0);
    cap.floor().max(1.0) as u32
}

/// `t_j = j / (scale·2ⁿ)` up to the horizon, with breakpoints inserted.
pub fn dyadic_grid(horizon: f64, scale: f64, level: u32, breakpoints: &[f64]) -> Vec<f64> {
    let h = 1.0 / (scale * 2f64.powi(level as i32));
    let snap = SNAP * horizon.max(1.0);
    let steps = (horizon / h).ceil() as usize;
    let mut grid: Vec<f64> = (0..steps).map(|j| j as f64 * h).filter(|&t| t < horizon - snap).collect();
    grid.push(horizon);
    for &b in breakpoints {
        if !(b > 0.0 && b < horizon) {
            continue;
        }
        let i = grid.partition_point(|&t| t < b);
        let near = [i.checked_sub(1), Some(i)]
            .into_iter()
            .flatten()
            .filter(|&k| k < grid.len())
            .min_by(|&a, &c| (grid[a] - b).abs().total_cmp(&(grid[c] - b).abs()));
        match near {
            Some(k) if (grid[k] - b).abs() <= snap && k != 0 && k != grid.len() - 1 => grid[k] = b,
            _ => grid.insert(i, b),
        }
    }
    grid.dedup();
    grid
}

/// `y_0 = P_{C(0)}(y0)`, `y_j = P_{C(t_j)}(y_{j−1})`.
pub fn catching_up<C: SetCurve + ?Sized>(curve: &C, y0: &Vector, level: u32) -> Result<DiscreteTrajectory, SweepError> {
    if curve.has_jumps() {
        return Err(SweepError::HasJumps);
    }
    if y0.len() != curve.dim() {
        return Err(ConvexError::DimensionMismatch {
            expected: curve.dim(),
            found: y0.len(),
        }
        .into());
    }
    let scale = time_scale(curve);
    let times = dyadic_grid(curve.horizon(), scale, level, &curve.breakpoints());
    let mut points = DMatrix::zeros(curve.dim(), times.len());
    let mut y = y0.clone();
    for (j, &t) in times.iter().enumerate() {
        let set = curve.set_at(t)?;
        y = set.project(&y).map_err(|source| SweepError::Projection { step: j, t, source })?;
        points.set_column(j, &y);
    }
    Ok(DiscreteTrajectory {
        level,
        scale,
        times,
        points,
    })
}

/// Compares two levels on the finer grid, which must contain the coarser.
pub fn compare_levels(coarse: &DiscreteTrajectory, fine: &DiscreteTrajectory) -> LevelRow {
    let mut step_diff = 0.0f64;
    let mut interp_diff = 0.0f64;
    let mut at = 0.0;
    let mut c = 0usize;
    for (k, &t) in fine.times.iter().enumerate() {
        while c + 1 < coarse.times.len() && coarse.times[c + 1] <= t {
            c += 1;
        }
        let yf = fine.points.column(k);
        let d = (yf - coarse.points.column(c)).norm();
        if d > step_diff {
            step_diff = d;
            at = t;
        }
        let di = (yf - interpolate(&coarse.times, &coarse.points, t)).norm();
        interp_diff = interp_diff.max(di);
    }
    let horizon = coarse.times.last().copied().unwrap_or(0.0) * coarse.scale;
    LevelRow {
        level: coarse.level,
        step_diff,
        interp_diff,
        bound: cauchy_bound(coarse.level, horizon),
        t: at,
    }
}

fn check_row(row: &LevelRow) -> Result<(), SweepError> {
    if row.within_bound() {
        Ok(())
    } else {
        Err(SweepError::CauchyBound {
            level: row.level,
            t: row.t,
            observed: row.step_diff,
            bound: row.bound,
        })
    }
}

/// Refines dyadically from `min_level` until successive interpolants differ
/// by at most `target_tol`, checking the Cauchy bound at every level. The
/// finer of the last two levels is returned; `v` is the interpolant slope.
pub fn solve_lipschitz<C: SetCurve + ?Sized>(
    curve: &C,
    y0: &Vector,
    config: &SolverConfig,
) -> Result<LipschitzSolution, SweepError> {
    let scale = time_scale(curve);
    let cap = config.max_level.min(level_cap(scale * curve.horizon()));
    let min_level = config.min_level.min(cap.saturating_sub(1));
    let mut prev = catching_up(curve, y0, min_level)?;
    let mut rows = Vec::new();
    let mut level = min_level;
    loop {
        let next = catching_up(curve, y0, level + 1)?;
        let row = compare_levels(&prev, &next);
        check_row(&row)?;
        rows.push(row);
        level += 1;
        let converged = row.interp_diff <= config.target_tol;
        if converged || level >= cap {
            let stats = SolveStats {
                level,
                cauchy_gap: row.interp_diff,
                converged,
                scale,
                rows,
            };
            let trajectory = Trajectory::from_nodes(next.times.clone(), next.points.clone(), Some(y0.clone()));
            return Ok(LipschitzSolution {
                trajectory,
                discrete: next,
                stats,
            });
        }
        prev = next;
    }
}

/// Rows for levels `from..=to`, each against the next level; the levels run
/// in parallel. Bound violations are reported in the rows, not as errors.
pub fn convergence_table<C: SetCurve + ?Sized>(
    curve: &C,
    y0: &Vector,
    from: u32,
    to: u32,
) -> Result<Vec<LevelRow>, SweepError> {
    if from > to {
        return Ok(Vec::new());
    }
    let levels: Vec<u32> = (from..=to + 1).collect();
    let runs: Vec<Result<DiscreteTrajectory, SweepError>> =
        levels.par_iter().map(|&n| catching_up(curve, y0, n)).collect();
    let runs = runs.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(runs.windows(2).map(|w| compare_levels(&w[0], &w[1])).collect())
}
