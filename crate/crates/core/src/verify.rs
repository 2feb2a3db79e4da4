//! Post-hoc checks on solver output. Each check returns a [`CheckReport`]
//! with the worst residual found and where it occurred.

use serde::{Deserialize, Serialize};

use crate::convex::{ConvexSet, ExcessMethod, Vector};
use crate::error::SweepError;
use crate::moving::{MovingSet, Side};
use crate::par::*;
use crate::solver::{DiscreteTrajectory, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    /// Time (or step index for discrete checks) of the worst residual.
    pub location: Option<f64>,
    pub tolerance: f64,
}

impl CheckReport {
    pub fn new(name: &str, residual: f64, location: Option<f64>, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            passed: residual <= tolerance,
            residual,
            location,
            tolerance,
        }
    }
}

/// Worst `(residual, location)`; NaN counts as worst.
fn worst(items: impl IntoIterator<Item = (f64, f64)>) -> (f64, Option<f64>) {
    let mut best: Option<(f64, f64)> = None;
    for (r, at) in items {
        let r = if r.is_nan() { f64::INFINITY } else { r };
        if best.is_none_or(|(b, _)| r > b) {
            best = Some((r, at));
        }
    }
    best.map_or((0.0, None), |(r, at)| (r, Some(at)))
}

/// `y(t) ∈ C(t)`, and at jumps `y(t±) ∈ C(t±)`.
pub fn check_constraint(y: &Trajectory, set: &MovingSet, tol: f64) -> Result<CheckReport, SweepError> {
    let per_node: Vec<Result<(f64, f64), SweepError>> = (0..y.len())
        .into_par_iter()
        .map(|j| {
            let t = y.times[j];
            let mut r = set.set_at(t, Side::At)?.distance(&y.value(j))?;
            if let Some(js) = y.jumps.iter().find(|s| s.index == j) {
                r = r.max(set.set_at(t, Side::Left)?.distance(&Vector::from_column_slice(&js.left))?);
                r = r.max(set.set_at(t, Side::Right)?.distance(&Vector::from_column_slice(&js.right))?);
            }
            Ok((r, t))
        })
        .collect();
    let per_node = per_node.into_iter().collect::<Result<Vec<_>, _>>()?;
    let (residual, location) = worst(per_node);
    Ok(CheckReport::new("constraint", residual, location, tol))
}

/// `y(t) = P_{C(t)}(y(t−))` and `y(t+) = P_{C(t+)}(y(t))` at every declared
/// jump, and `y(0) = P_{C(0)}(y0)` when the initial condition is recorded.
pub fn check_jump_conditions(y: &Trajectory, set: &MovingSet, tol: f64) -> Result<CheckReport, SweepError> {
    let mut items = Vec::new();
    if let (Some(y0), Some(&t0)) = (&y.initial, y.times.first()) {
        if t0 == 0.0 {
            let p = set.set_at(0.0, Side::At)?.project(y0)?;
            items.push(((y.value(0) - p).norm(), 0.0));
        }
    }
    for j in set.jumps() {
        let Some(state) = y.jump_at(j.t) else {
            items.push((f64::INFINITY, j.t));
            continue;
        };
        let left = Vector::from_column_slice(&state.left);
        let at = y.value(state.index);
        let right = Vector::from_column_slice(&state.right);
        let r1 = (&at - j.at.project(&left)?).norm();
        let r2 = (&right - j.right.project(&at)?).norm();
        items.push((r1.max(r2), j.t));
    }
    let (residual, location) = worst(items);
    Ok(CheckReport::new("jump_conditions", residual, location, tol))
}

/// `j ↦ ‖y_j − z_j‖` is nonincreasing up to `tol`.
pub fn check_contraction(y: &DiscreteTrajectory, z: &DiscreteTrajectory, tol: f64) -> Result<CheckReport, SweepError> {
    if y.times != z.times {
        return Err(SweepError::GridMismatch(format!("{} vs {} nodes", y.len(), z.len())));
    }
    let dist: Vec<f64> = (0..y.len())
        .map(|j| (y.points.column(j) - z.points.column(j)).norm())
        .collect();
    let (residual, location) = worst(dist.windows(2).enumerate().map(|(j, w)| (w[1] - w[0], (j + 1) as f64)));
    Ok(CheckReport::new("contraction", residual, location, tol))
}

/// `‖P_A x − P_B y‖² − ‖x − y‖² − 2 d(x, A) e(B, A) − 2 d(y, B) e(A, B)`,
/// which the projection estimate says is `≤ 0`.
pub fn projection_margin(a: &ConvexSet, b: &ConvexSet, x: &Vector, y: &Vector) -> Result<f64, SweepError> {
    let excess = |p: &ConvexSet, q: &ConvexSet| -> Result<Option<f64>, SweepError> {
        let r = p.excess(q, ExcessMethod::Auto)?;
        if !r.exact {
            return Err(SweepError::InexactExcess {
                context: "projection estimate".into(),
            });
        }
        Ok(r.value.finite())
    };
    let e_ba = excess(b, a)?;
    let e_ab = excess(a, b)?;
    let pa = a.project(x)?;
    let pb = b.project(y)?;
    let dx = (x - &pa).norm();
    let dy = (y - &pb).norm();
    let term = |d: f64, e: Option<f64>| match e {
        Some(e) => 2.0 * d * e,
        None if d == 0.0 => 0.0,
        None => f64::INFINITY,
    };
    let lhs = (pa - pb).norm_squared() - (x - y).norm_squared();
    Ok(lhs - term(dx, e_ba) - term(dy, e_ab))
}

pub fn check_projection_estimate(
    a: &ConvexSet,
    b: &ConvexSet,
    x: &Vector,
    y: &Vector,
    tol: f64,
) -> Result<CheckReport, SweepError> {
    let m = projection_margin(a, b, x, y)?;
    Ok(CheckReport::new("projection_estimate", m, None, tol))
}

/// Worst margin over many cases, evaluated in parallel; the location is the
/// case index.
pub fn check_projection_estimates(
    cases: &[(ConvexSet, ConvexSet, Vector, Vector)],
    tol: f64,
) -> Result<CheckReport, SweepError> {
    let margins: Vec<Result<f64, SweepError>> = cases
        .par_iter()
        .map(|(a, b, x, y)| projection_margin(a, b, x, y))
        .collect();
    let margins = margins.into_iter().collect::<Result<Vec<_>, _>>()?;
    let (residual, location) = worst(margins.into_iter().enumerate().map(|(i, m)| (m, i as f64)));
    Ok(CheckReport::new("projection_estimate", residual, location, tol))
}

/// Trapezoidal `∫₀ᵀ ⟨y − z, y′⟩ dt` for each probe `w`, with
/// `z(t) = P_{C(t)}(w)` and `y′` the interpolant slope. `flip` integrates
/// `⟨z − y, y′⟩` instead. The set must have no jumps.
pub fn integral_values(y: &Trajectory, set: &MovingSet, probes: &[Vector], flip: bool) -> Result<Vec<f64>, SweepError> {
    if set.has_jumps() {
        return Err(SweepError::HasJumps);
    }
    let sign = if flip { -1.0 } else { 1.0 };
    probes
        .par_iter()
        .map(|w| {
            let mut prev: Option<Vector> = None;
            let mut total = 0.0;
            for j in 0..y.len() {
                let yj = y.value(j);
                let gap = &yj - set.set_at(y.times[j], Side::At)?.project(w)?;
                if let Some(prev_gap) = prev {
                    let dy = &yj - y.value(j - 1);
                    // y′·Δt = Δy on each interval
                    total += 0.5 * (prev_gap.dot(&dy) + gap.dot(&dy));
                }
                prev = Some(gap);
            }
            Ok(sign * total)
        })
        .collect()
}

/// Passes when every integral is at most `tol·(1 + T)`.
pub fn check_integral_inequality(
    y: &Trajectory,
    set: &MovingSet,
    probes: &[Vector],
    tol: f64,
    flip: bool,
) -> Result<CheckReport, SweepError> {
    let values = integral_values(y, set, probes, flip)?;
    let (residual, location) = worst(values.into_iter().enumerate().map(|(i, v)| (v, i as f64)));
    let name = if flip { "integral_inequality_flipped" } else { "integral_inequality" };
    Ok(CheckReport::new(name, residual, location, tol * (1.0 + set.horizon())))
}

/// `Σ ‖y(t_j−) − y(t_{j−1}+)‖` over the nodes in `[a, b]` plus the jump
/// contributions `‖y(t) − y(t−)‖` (for `t > a`) and `‖y(t+) − y(t)‖` (for
/// `t < b`).
pub fn variation(y: &Trajectory, a: f64, b: f64) -> f64 {
    let idx: Vec<usize> = (0..y.len()).filter(|&j| y.times[j] >= a && y.times[j] <= b).collect();
    let mut total = 0.0;
    for w in idx.windows(2) {
        total += (y.left_value(w[1]) - y.right_value(w[0])).norm();
    }
    for s in &y.jumps {
        let at = y.value(s.index);
        if s.t > a && s.t <= b {
            total += (&at - Vector::from_column_slice(&s.left)).norm();
        }
        if s.t >= a && s.t < b {
            total += (Vector::from_column_slice(&s.right) - &at).norm();
        }
    }
    total
}

pub fn discrete_variation(y: &DiscreteTrajectory) -> f64 {
    (1..y.len()).map(|j| y.displacement(j).norm()).sum()
}

/// `variation(y, [0, T]) ≤ budget`.
pub fn check_variation_budget(y: &Trajectory, budget: f64, tol: f64) -> CheckReport {
    let v = variation(y, 0.0, y.horizon());
    CheckReport::new("variation_budget", v - budget, None, tol)
}

/// `−v(t) ∈ N_{C(t)}(y(t))` at every node except the first and the jumps,
/// with the cone test scaled by `1 + ‖v‖`.
pub fn check_normal_cone_residuals(y: &Trajectory, set: &MovingSet, tol: f64) -> Result<CheckReport, SweepError> {
    let per_node: Vec<Result<(f64, f64), SweepError>> = (1..y.len())
        .into_par_iter()
        .map(|j| {
            let t = y.times[j];
            if y.jumps.iter().any(|s| s.index == j) {
                return Ok((0.0, t));
            }
            let v = y.density_at(j);
            let speed = v.norm();
            if speed <= tol {
                return Ok((0.0, t));
            }
            let k = set.set_at(t, Side::At)?;
            let r = k.normal_cone_residual(&y.value(j), &-v, tol * (1.0 + speed))?;
            Ok((r / (1.0 + speed), t))
        })
        .collect();
    let per_node = per_node.into_iter().collect::<Result<Vec<_>, _>>()?;
    let (residual, location) = worst(per_node);
    Ok(CheckReport::new("normal_cone", residual, location, tol))
}

/// `‖v‖ ≤ bound` at every node and jump.
pub fn check_density_bound(y: &Trajectory, bound: f64, tol: f64) -> CheckReport {
    let items = (0..y.len()).map(|j| (y.density_at(j).norm() - bound, y.times[j]));
    let (residual, location) = worst(items);
    CheckReport::new("density_bound", residual, location, tol)
}

/// `Δy = v·Δℓ` between consecutive nodes and `y(t+) − y(t−) = v·(ℓ(t+) −
/// ℓ(t−))` at jumps, with `ℓ` the recorded arc length when `against_arc`
/// and `t` otherwise. Intervals that end at a jump carry no density sample
/// of their own and are skipped.
pub fn check_density_representation(y: &Trajectory, against_arc: bool, tol: f64) -> CheckReport {
    let arc = y.arc.as_ref().filter(|_| against_arc);
    let clock = |j: usize| arc.map_or(y.times[j], |a| a[j]);
    let jump = |j: usize| y.jumps.iter().find(|s| s.index == j);
    let mut items = Vec::new();
    for j in 1..y.len() {
        if jump(j).is_some() {
            continue;
        }
        let (prev_value, prev_clock) = match jump(j - 1) {
            Some(s) => (Vector::from_column_slice(&s.right), s.arc.1),
            None => (y.value(j - 1), clock(j - 1)),
        };
        let dy = y.value(j) - prev_value;
        let r = (dy - y.density_at(j) * (clock(j) - prev_clock)).norm();
        items.push((r, y.times[j]));
    }
    for s in &y.jumps {
        let dy = Vector::from_column_slice(&s.right) - Vector::from_column_slice(&s.left);
        let r = (dy - Vector::from_column_slice(&s.density) * (s.arc.1 - s.arc.0)).norm();
        items.push((r, s.t));
    }
    let (residual, location) = worst(items);
    CheckReport::new("density_representation", residual, location, tol)
}
