use nalgebra::DMatrix;
use serde::Serialize;

use crate::convex::Vector;

/// Output of the catching-up scheme at one dyadic level. Times are in the
/// curve's own clock; `scale` records the internal rescaling `τ = scale·t`
/// that makes the curve 1-Lipschitz.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteTrajectory {
    pub level: u32,
    pub scale: f64,
    pub times: Vec<f64>,
    /// One column per time node.
    pub points: DMatrix<f64>,
}

impl DiscreteTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.nrows()
    }

    pub fn point(&self, j: usize) -> Vector {
        self.points.column(j).into_owned()
    }

    /// `y_j − y_{j−1}` for `j ≥ 1`.
    pub fn displacement(&self, j: usize) -> Vector {
        self.points.column(j) - self.points.column(j - 1)
    }

    /// Step function: `y_j` on `[t_j, t_{j+1})`.
    pub fn step_value(&self, t: f64) -> Vector {
        let j = self.times.partition_point(|&s| s <= t).saturating_sub(1);
        self.point(j)
    }

    /// Piecewise-affine interpolant.
    pub fn interpolate(&self, t: f64) -> Vector {
        interpolate(&self.times, &self.points, t)
    }
}

pub(crate) fn interpolate(times: &[f64], points: &DMatrix<f64>, t: f64) -> Vector {
    let i = times.partition_point(|&s| s < t);
    if i == 0 {
        return points.column(0).into_owned();
    }
    if i == times.len() {
        return points.column(times.len() - 1).into_owned();
    }
    if times[i] == t {
        return points.column(i).into_owned();
    }
    let (t0, t1) = (times[i - 1], times[i]);
    let w = (t - t0) / (t1 - t0);
    points.column(i - 1) * (1.0 - w) + points.column(i) * w
}

/// The solution at a declared jump.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpState {
    /// Index of the jump node in [`Trajectory::times`].
    pub index: usize,
    pub t: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    /// `(ℓ(t−), ℓ(t+))`
    pub arc: (f64, f64),
    /// Chord over the gap: `(y(t+) − y(t−)) / (ℓ(t+) − ℓ(t−))`.
    pub density: Vec<f64>,
}

/// A solution sampled on a time grid. At jump nodes `values` holds `y(t)`;
/// the one-sided limits live in `jumps`. `density` holds `v` with
/// `Dy = v·μ`: `μ = dt` for the Lipschitz solver, `μ = Dℓ_C` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `ℓ_C(t)` at the nodes, when known.
    pub arc: Option<Vec<f64>>,
    pub values: DMatrix<f64>,
    pub density: DMatrix<f64>,
    pub jumps: Vec<JumpState>,
    /// The unprojected initial condition.
    pub initial: Option<Vector>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.values.nrows()
    }

    pub fn horizon(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    pub fn value(&self, j: usize) -> Vector {
        self.values.column(j).into_owned()
    }

    pub fn density_at(&self, j: usize) -> Vector {
        self.density.column(j).into_owned()
    }

    /// Piecewise-affine interpolant between nodes (`y(t)` at jump nodes).
    pub fn value_at(&self, t: f64) -> Vector {
        interpolate(&self.times, &self.values, t)
    }

    pub fn jump_at(&self, t: f64) -> Option<&JumpState> {
        self.jumps.iter().find(|j| j.t == t)
    }

    /// `y(t−)` at node `j`.
    pub fn left_value(&self, j: usize) -> Vector {
        match self.jumps.iter().find(|s| s.index == j) {
            Some(s) => Vector::from_column_slice(&s.left),
            None => self.value(j),
        }
    }

    /// `y(t+)` at node `j`.
    pub fn right_value(&self, j: usize) -> Vector {
        match self.jumps.iter().find(|s| s.index == j) {
            Some(s) => Vector::from_column_slice(&s.right),
            None => self.value(j),
        }
    }

    /// Backward slopes `(y_j − y_{j−1}) / (t_j − t_{j−1})`, the first node
    /// copying the second. Ignores jumps.
    pub fn from_nodes(times: Vec<f64>, values: DMatrix<f64>, initial: Option<Vector>) -> Self {
        let density = backward_slopes(&times, &values);
        Self {
            times,
            arc: None,
            values,
            density,
            jumps: Vec::new(),
            initial,
        }
    }
}

pub(crate) fn backward_slopes(times: &[f64], values: &DMatrix<f64>) -> DMatrix<f64> {
    let n = times.len();
    let mut density = DMatrix::zeros(values.nrows(), n);
    for j in 1..n {
        let dt = times[j] - times[j - 1];
        if dt > 0.0 {
            let slope = (values.column(j) - values.column(j - 1)) / dt;
            density.set_column(j, &slope);
        }
    }
    if n > 1 {
        let first = density.column(1).into_owned();
        density.set_column(0, &first);
    }
    density
}
