//! Closed convex subsets of ℝⁿ and their exact oracles.
//!
//! Every [`ConvexSet`] exposes projection, distance, support function,
//! normal-cone membership and Minkowski dilation. The excess
//! `e(A, B) = sup_{a ∈ A} d(a, B)` lives in [`excess`]; it is exact for the
//! shape pairs that admit a closed form or a finite vertex set and is a
//! flagged Monte-Carlo lower bound otherwise.
//!
//! Sets are immutable after construction and kept in a normalized form:
//! translates and dilations of balls, boxes, half-spaces and points are folded
//! into the base shape, zero dilations disappear and nested translates or
//! dilations are merged.

mod excess;
mod json;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use excess::{ExcessMethod, ExcessResult, DEFAULT_MC_SAMPLES};
pub use json::ConvexSetSpec;

pub type Vector = DVector<f64>;

/// Default absolute tolerance for membership and cone tests.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConvexError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid set parameter: {0}")]
    InvalidParameter(String),
    #[error("intersection witness is not in member {member} (distance {distance:e})")]
    EmptyIntersection { member: usize, distance: f64 },
    #[error("Dykstra projection did not converge in {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("point is not in the set (distance {distance:e}); the normal cone is undefined")]
    NotInSet { distance: f64 },
    #[error("excess not supported: {0}")]
    UnsupportedExcess(String),
}

/// A value of the extended half-line `[0, ∞]` (or an extended real for
/// support functions).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(f64),
    Infinite,
}

impl Extended {
    pub fn finite(self) -> Option<f64> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Extended::Infinite)
    }

    fn map(self, f: impl FnOnce(f64) -> f64) -> Extended {
        match self {
            Extended::Finite(v) => Extended::Finite(f(v)),
            Extended::Infinite => Extended::Infinite,
        }
    }
}

/// `sup_{v ∈ K} ⟨u, v⟩`. For intersections the value is the minimum over the
/// members, an upper bound only, and `exact` is false.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub value: Extended,
    pub exact: bool,
}

/// Stopping rule for Dykstra's alternating projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DykstraConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for DykstraConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Ball {
        center: Vector,
        radius: f64,
    },
    Box {
        lo: Vector,
        hi: Vector,
    },
    /// `{x : ⟨normal, x⟩ ≥ offset}` with a unit normal.
    HalfSpace {
        normal: Vector,
        offset: f64,
    },
    /// `point + span(basis)`, basis orthonormal (possibly empty: a point).
    Affine {
        point: Vector,
        basis: Vec<Vector>,
    },
    Translate {
        base: Box<ConvexSet>,
        offset: Vector,
    },
    /// Minkowski sum `base + D_radius`.
    Dilation {
        base: Box<ConvexSet>,
        radius: f64,
    },
    Intersection {
        members: Vec<ConvexSet>,
        witness: Vector,
        config: DykstraConfig,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConvexSetSpec", into = "ConvexSetSpec")]
pub struct ConvexSet {
    shape: Shape,
    dim: usize,
}

fn check_dim(expected: usize, found: usize) -> Result<(), ConvexError> {
    if expected == found {
        Ok(())
    } else {
        Err(ConvexError::DimensionMismatch { expected, found })
    }
}

fn check_finite(name: &str, v: &Vector) -> Result<(), ConvexError> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(ConvexError::InvalidParameter(format!("{name} has non-finite entries")))
    }
}

impl ConvexSet {
    pub fn new_ball(center: Vector, radius: f64) -> Result<Self, ConvexError> {
        check_finite("center", &center)?;
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(ConvexError::InvalidParameter(format!("ball radius {radius} must be finite and >= 0")));
        }
        let dim = center.len();
        Ok(Self {
            shape: Shape::Ball { center, radius },
            dim,
        })
    }

    pub fn new_box(lo: Vector, hi: Vector) -> Result<Self, ConvexError> {
        check_dim(lo.len(), hi.len())?;
        check_finite("lo", &lo)?;
        check_finite("hi", &hi)?;
        if let Some(i) = (0..lo.len()).find(|&i| lo[i] > hi[i]) {
            return Err(ConvexError::InvalidParameter(format!(
                "box lo[{i}] = {} exceeds hi[{i}] = {}",
                lo[i], hi[i]
            )));
        }
        let dim = lo.len();
        Ok(Self {
            shape: Shape::Box { lo, hi },
            dim,
        })
    }

    /// `{x : ⟨normal, x⟩ ≥ offset}`. A non-unit normal is normalized and the
    /// offset rescaled accordingly.
    pub fn new_halfspace(normal: Vector, offset: f64) -> Result<Self, ConvexError> {
        check_finite("normal", &normal)?;
        let norm = normal.norm();
        if norm == 0.0 || !offset.is_finite() {
            return Err(ConvexError::InvalidParameter("half-space needs a nonzero normal and finite offset".into()));
        }
        let dim = normal.len();
        Ok(Self {
            shape: Shape::HalfSpace {
                normal: normal / norm,
                offset: offset / norm,
            },
            dim,
        })
    }

    /// `point + span(directions)`. Directions are orthonormalized; linearly
    /// dependent directions are rejected.
    pub fn new_affine(point: Vector, directions: Vec<Vector>) -> Result<Self, ConvexError> {
        check_finite("point", &point)?;
        let dim = point.len();
        let mut basis: Vec<Vector> = Vec::with_capacity(directions.len());
        for d in directions {
            check_dim(dim, d.len())?;
            let mut w = d.clone();
            for b in &basis {
                w -= b * b.dot(&w);
            }
            let n = w.norm();
            if n <= 1e-12 * d.norm().max(1.0) {
                return Err(ConvexError::InvalidParameter("affine directions are linearly dependent".into()));
            }
            basis.push(w / n);
        }
        Ok(Self {
            shape: Shape::Affine { point, basis },
            dim,
        })
    }

    pub fn new_point(point: Vector) -> Result<Self, ConvexError> {
        Self::new_affine(point, Vec::new())
    }

    /// Intersection certified nonempty by `witness`, which must lie within
    /// `1e-9·(1 + ‖witness‖)` of every member.
    pub fn new_intersection(members: Vec<ConvexSet>, witness: Vector, config: DykstraConfig) -> Result<Self, ConvexError> {
        if members.is_empty() {
            return Err(ConvexError::InvalidParameter("intersection needs at least one member".into()));
        }
        let dim = witness.len();
        check_finite("witness", &witness)?;
        let slack = DEFAULT_TOL * (1.0 + witness.norm());
        for (i, m) in members.iter().enumerate() {
            check_dim(dim, m.dim)?;
            let distance = m.distance(&witness)?;
            if distance > slack {
                return Err(ConvexError::EmptyIntersection { member: i, distance });
            }
        }
        if members.len() == 1 {
            return Ok(members.into_iter().next().unwrap());
        }
        Ok(Self {
            shape: Shape::Intersection {
                members,
                witness,
                config,
            },
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// `K + a`, folded into the base shape where possible.
    pub fn translate(&self, offset: &Vector) -> Result<Self, ConvexError> {
        check_dim(self.dim, offset.len())?;
        check_finite("offset", offset)?;
        if offset.iter().all(|&x| x == 0.0) {
            return Ok(self.clone());
        }
        let dim = self.dim;
        let shape = match &self.shape {
            Shape::Ball { center, radius } => Shape::Ball {
                center: center + offset,
                radius: *radius,
            },
            Shape::Box { lo, hi } => Shape::Box {
                lo: lo + offset,
                hi: hi + offset,
            },
            Shape::HalfSpace { normal, offset: b } => Shape::HalfSpace {
                normal: normal.clone(),
                offset: b + normal.dot(offset),
            },
            Shape::Affine { point, basis } => Shape::Affine {
                point: point + offset,
                basis: basis.clone(),
            },
            Shape::Translate { base, offset: a } => {
                return base.translate(&(a + offset));
            }
            Shape::Dilation { base, radius } => Shape::Dilation {
                base: Box::new(base.translate(offset)?),
                radius: *radius,
            },
            Shape::Intersection { .. } => Shape::Translate {
                base: Box::new(self.clone()),
                offset: offset.clone(),
            },
        };
        Ok(Self { shape, dim })
    }

    /// Minkowski sum `K + D_r`. `dilate(K, 0)` is `K` itself and a dilated
    /// ball is a larger ball.
    pub fn dilate(&self, r: f64) -> Result<Self, ConvexError> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(ConvexError::InvalidParameter(format!("dilation radius {r} must be finite and >= 0")));
        }
        if r == 0.0 {
            return Ok(self.clone());
        }
        let dim = self.dim;
        let shape = match &self.shape {
            Shape::Ball { center, radius } => Shape::Ball {
                center: center.clone(),
                radius: radius + r,
            },
            Shape::Affine { point, basis } if basis.is_empty() => Shape::Ball {
                center: point.clone(),
                radius: r,
            },
            Shape::Dilation { base, radius } => Shape::Dilation {
                base: base.clone(),
                radius: radius + r,
            },
            _ => Shape::Dilation {
                base: Box::new(self.clone()),
                radius: r,
            },
        };
        Ok(Self { shape, dim })
    }

    /// True for sets contained in some ball. Intersections count as bounded
    /// when any member is.
    pub fn is_bounded(&self) -> bool {
        match &self.shape {
            Shape::Ball { .. } | Shape::Box { .. } => true,
            Shape::HalfSpace { .. } => false,
            Shape::Affine { basis, .. } => basis.is_empty(),
            Shape::Translate { base, .. } | Shape::Dilation { base, .. } => base.is_bounded(),
            Shape::Intersection { members, .. } => members.iter().any(ConvexSet::is_bounded),
        }
    }

    /// True only for sets known to be all of ℝⁿ.
    pub(crate) fn is_whole_space(&self) -> bool {
        match &self.shape {
            Shape::Affine { basis, .. } => basis.len() == self.dim,
            Shape::Translate { base, .. } | Shape::Dilation { base, .. } => base.is_whole_space(),
            _ => false,
        }
    }

    /// The set as a single point, if it is one.
    pub(crate) fn as_point(&self) -> Option<&Vector> {
        match &self.shape {
            Shape::Affine { point, basis } if basis.is_empty() => Some(point),
            Shape::Ball { center, radius } if *radius == 0.0 => Some(center),
            _ => None,
        }
    }

    pub fn project(&self, x: &Vector) -> Result<Vector, ConvexError> {
        check_dim(self.dim, x.len())?;
        self.project_unchecked(x)
    }

    fn project_unchecked(&self, x: &Vector) -> Result<Vector, ConvexError> {
        Ok(match &self.shape {
            Shape::Ball { center, radius } => {
                let d = x - center;
                let n = d.norm();
                if n <= *radius {
                    x.clone()
                } else {
                    center + d * (*radius / n)
                }
            }
            Shape::Box { lo, hi } => x.zip_zip_map(lo, hi, |v, l, h| v.clamp(l, h)),
            Shape::HalfSpace { normal, offset } => {
                let slack = normal.dot(x) - offset;
                if slack >= 0.0 {
                    x.clone()
                } else {
                    x - normal * slack
                }
            }
            Shape::Affine { point, basis } => {
                let d = x - point;
                let mut y = point.clone();
                for b in basis {
                    y += b * b.dot(&d);
                }
                y
            }
            Shape::Translate { base, offset } => base.project_unchecked(&(x - offset))? + offset,
            Shape::Dilation { base, radius } => {
                let p = base.project_unchecked(x)?;
                let d = x - &p;
                let n = d.norm();
                if n <= *radius {
                    x.clone()
                } else {
                    p + d * (*radius / n)
                }
            }
            Shape::Intersection { members, config, .. } => dykstra(members, x, config)?,
        })
    }

    pub fn distance(&self, x: &Vector) -> Result<f64, ConvexError> {
        Ok((x - self.project(x)?).norm())
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool, ConvexError> {
        Ok(self.distance(x)? <= tol)
    }

    pub fn support(&self, u: &Vector) -> Result<Support, ConvexError> {
        check_dim(self.dim, u.len())?;
        Ok(self.support_unchecked(u))
    }

    fn support_unchecked(&self, u: &Vector) -> Support {
        let exact = |value| Support { value, exact: true };
        match &self.shape {
            Shape::Ball { center, radius } => exact(Extended::Finite(u.dot(center) + radius * u.norm())),
            Shape::Box { lo, hi } => exact(Extended::Finite(
                (0..self.dim).map(|i| (u[i] * lo[i]).max(u[i] * hi[i])).sum(),
            )),
            Shape::HalfSpace { normal, offset } => {
                let along = u.dot(normal);
                let across = (u - normal * along).norm();
                let scale = 1e-12 * u.norm().max(1.0);
                if across <= scale && along <= scale {
                    exact(Extended::Finite(along * offset))
                } else {
                    exact(Extended::Infinite)
                }
            }
            Shape::Affine { point, basis } => {
                let in_span: f64 = basis.iter().map(|b| b.dot(u).powi(2)).sum::<f64>().sqrt();
                if in_span <= 1e-12 * u.norm().max(1.0) {
                    exact(Extended::Finite(u.dot(point)))
                } else {
                    exact(Extended::Infinite)
                }
            }
            Shape::Translate { base, offset } => {
                let s = base.support_unchecked(u);
                Support {
                    value: s.value.map(|v| v + u.dot(offset)),
                    exact: s.exact,
                }
            }
            Shape::Dilation { base, radius } => {
                let s = base.support_unchecked(u);
                Support {
                    value: s.value.map(|v| v + radius * u.norm()),
                    exact: s.exact,
                }
            }
            Shape::Intersection { members, .. } => {
                let value = members
                    .iter()
                    .map(|m| m.support_unchecked(u).value)
                    .fold(Extended::Infinite, |acc, v| match (acc, v) {
                        (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a.min(b)),
                        (Extended::Infinite, v) | (v, Extended::Infinite) => v,
                    });
                Support { value, exact: false }
            }
        }
    }

    /// How far `u` is from lying in `N_K(x)`: `σ_K(u) − ⟨u, x⟩` (zero or
    /// negative round-off when `u` is normal). Intersections, whose support is
    /// only an upper bound, use `‖u‖·‖P_K(x + u/‖u‖) − x‖` instead, since
    /// `N_K(x) = P_K⁻¹(x) − x`.
    pub fn normal_cone_residual(&self, x: &Vector, u: &Vector, tol: f64) -> Result<f64, ConvexError> {
        check_dim(self.dim, x.len())?;
        check_dim(self.dim, u.len())?;
        let distance = self.distance(x)?;
        if distance > tol {
            return Err(ConvexError::NotInSet { distance });
        }
        let un = u.norm();
        if un == 0.0 {
            return Ok(0.0);
        }
        let s = self.support_unchecked(u);
        if s.exact {
            Ok(match s.value {
                Extended::Finite(v) => v - u.dot(x),
                Extended::Infinite => f64::INFINITY,
            })
        } else {
            let probe = x + u / un;
            Ok(un * (self.project_unchecked(&probe)? - x).norm())
        }
    }

    /// `u ∈ N_K(x)` up to `tol`; `x` must lie within `tol` of `K`.
    pub fn in_normal_cone(&self, x: &Vector, u: &Vector, tol: f64) -> Result<bool, ConvexError> {
        Ok(self.normal_cone_residual(x, u, tol)? <= tol)
    }

    /// `sup_{a ∈ K} ‖a − c‖` where a closed form exists.
    pub(crate) fn farthest_distance(&self, c: &Vector) -> Option<f64> {
        match &self.shape {
            Shape::Ball { center, radius } => Some((center - c).norm() + radius),
            Shape::Box { lo, hi } => Some(
                (0..self.dim)
                    .map(|i| (lo[i] - c[i]).powi(2).max((hi[i] - c[i]).powi(2)))
                    .sum::<f64>()
                    .sqrt(),
            ),
            Shape::Affine { point, basis } if basis.is_empty() => Some((point - c).norm()),
            Shape::Translate { base, offset } => base.farthest_distance(&(c - offset)),
            Shape::Dilation { base, radius } => base.farthest_distance(c).map(|d| d + radius),
            _ => None,
        }
    }

    /// An upper bound on `sup_{a ∈ K} ‖a − c‖`, also for intersections.
    pub(crate) fn extent_bound(&self, c: &Vector) -> Option<f64> {
        match &self.shape {
            Shape::Translate { base, offset } => base.extent_bound(&(c - offset)),
            Shape::Dilation { base, radius } => base.extent_bound(c).map(|d| d + radius),
            Shape::Intersection { members, .. } => {
                members.iter().filter_map(|m| m.extent_bound(c)).min_by(f64::total_cmp)
            }
            _ => self.farthest_distance(c),
        }
    }
}

fn dykstra(members: &[ConvexSet], x: &Vector, config: &DykstraConfig) -> Result<Vector, ConvexError> {
    let mut y = x.clone();
    let mut increments = vec![Vector::zeros(x.len()); members.len()];
    let mut residual = f64::INFINITY;
    for _ in 0..config.max_iter {
        let start = y.clone();
        let mut change = 0.0;
        for (member, p) in members.iter().zip(increments.iter_mut()) {
            let z = &y + &*p;
            let next = member.project_unchecked(&z)?;
            let p_next = z - &next;
            change += (&p_next - &*p).norm_squared();
            *p = p_next;
            y = next;
        }
        change += (&y - start).norm_squared();
        residual = change.sqrt();
        if residual <= config.tol {
            return Ok(y);
        }
    }
    Err(ConvexError::NotConverged {
        iterations: config.max_iter,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    #[test]
    fn ball_projection_is_radial() {
        let b = ConvexSet::new_ball(v(&[0.0, 0.0]), 1.0).unwrap();
        assert_eq!(b.project(&v(&[2.0, 0.0])).unwrap(), v(&[1.0, 0.0]));
        assert_eq!(b.distance(&v(&[2.0, 0.0])).unwrap(), 1.0);
    }

    #[test]
    fn points_inside_are_fixed() {
        let sets = [
            ConvexSet::new_ball(v(&[0.0, 0.0]), 1.0).unwrap(),
            ConvexSet::new_box(v(&[-1.0, -1.0]), v(&[1.0, 1.0])).unwrap(),
            ConvexSet::new_halfspace(v(&[0.0, 1.0]), -3.0).unwrap(),
            ConvexSet::new_affine(v(&[0.0, 0.3]), vec![v(&[1.0, 0.0])]).unwrap(),
        ];
        let x = v(&[0.2, 0.3]);
        for k in &sets {
            assert_eq!(k.project(&x).unwrap(), x);
            assert_eq!(k.distance(&x).unwrap(), 0.0);
        }
    }

    #[test]
    fn dilated_ball_is_a_larger_ball() {
        let b = ConvexSet::new_ball(v(&[0.0, 0.0]), 1.0).unwrap();
        let d = b.dilate(1.0).unwrap();
        assert_eq!(d, ConvexSet::new_ball(v(&[0.0, 0.0]), 2.0).unwrap());
        assert_eq!(d.project(&v(&[3.0, 0.0])).unwrap(), v(&[2.0, 0.0]));
        assert_eq!(b.dilate(0.0).unwrap(), b);
    }

    #[test]
    fn dilated_box_projection() {
        let k = ConvexSet::new_box(v(&[0.0, 0.0]), v(&[1.0, 1.0])).unwrap().dilate(1.0).unwrap();
        let p = k.project(&v(&[3.0, 0.5])).unwrap();
        assert_abs_diff_eq!(p, v(&[2.0, 0.5]), epsilon = 1e-15);
        // corner region: radial from the vertex (1, 1)
        let p = k.project(&v(&[4.0, 5.0])).unwrap();
        assert_abs_diff_eq!(p, v(&[1.6, 1.8]), epsilon = 1e-12);
    }

    #[test]
    fn halfspace_distance_and_support() {
        let h = ConvexSet::new_halfspace(v(&[1.0, 0.0]), 1.0).unwrap();
        assert_eq!(h.distance(&v(&[0.0, 0.0])).unwrap(), 1.0);
        let h0 = ConvexSet::new_halfspace(v(&[1.0, 0.0]), 0.0).unwrap();
        assert!(h0.support(&v(&[1.0, 0.0])).unwrap().value.is_infinite());
        assert_eq!(h0.support(&v(&[-2.0, 0.0])).unwrap().value, Extended::Finite(0.0));
        assert_eq!(h.support(&v(&[-2.0, 0.0])).unwrap().value, Extended::Finite(-2.0));
    }

    #[test]
    fn non_unit_halfspace_normal_is_normalized() {
        let h = ConvexSet::new_halfspace(v(&[2.0, 0.0]), 2.0).unwrap();
        assert_eq!(h, ConvexSet::new_halfspace(v(&[1.0, 0.0]), 1.0).unwrap());
    }

    #[test]
    fn support_closed_forms() {
        let b = ConvexSet::new_ball(v(&[1.0, 2.0]), 0.5).unwrap();
        assert_eq!(b.support(&v(&[1.0, 0.0])).unwrap().value, Extended::Finite(1.5));
        let bx = ConvexSet::new_box(v(&[0.0, 0.0]), v(&[1.0, 2.0])).unwrap();
        assert_eq!(bx.support(&v(&[1.0, 1.0])).unwrap().value, Extended::Finite(3.0));
        let line = ConvexSet::new_affine(v(&[0.0, 1.0]), vec![v(&[1.0, 0.0])]).unwrap();
        assert_eq!(line.support(&v(&[0.0, 2.0])).unwrap().value, Extended::Finite(2.0));
        assert!(line.support(&v(&[1.0, 2.0])).unwrap().value.is_infinite());
    }

    #[test]
    fn normal_cone_membership() {
        let b = ConvexSet::new_ball(v(&[0.0, 0.0]), 1.0).unwrap();
        assert!(b.in_normal_cone(&v(&[1.0, 0.0]), &v(&[5.0, 0.0]), 1e-9).unwrap());
        assert!(!b.in_normal_cone(&v(&[0.0, 0.0]), &v(&[1.0, 0.0]), 1e-9).unwrap());
        assert!(b.in_normal_cone(&v(&[0.0, 0.0]), &v(&[0.0, 0.0]), 1e-9).unwrap());
        let h = ConvexSet::new_halfspace(v(&[1.0, 0.0]), 0.0).unwrap();
        assert!(h.in_normal_cone(&v(&[0.0, 2.0]), &v(&[-1.0, 0.0]), 1e-9).unwrap());
        assert!(!h.in_normal_cone(&v(&[0.0, 2.0]), &v(&[1.0, 0.0]), 1e-9).unwrap());
        assert!(matches!(
            b.in_normal_cone(&v(&[3.0, 0.0]), &v(&[1.0, 0.0]), 1e-9),
            Err(ConvexError::NotInSet { .. })
        ));
    }

    #[test]
    fn intersection_uses_dykstra() {
        let ball = ConvexSet::new_ball(v(&[0.0, 0.0]), 1.0).unwrap();
        let half = ConvexSet::new_halfspace(v(&[0.0, 1.0]), 0.5).unwrap();
        let k = ConvexSet::new_intersection(vec![ball, half], v(&[0.0, 0.75]), DykstraConfig::default()).unwrap();
        // nearest point of the cap {‖x‖ ≤ 1, x₂ ≥ 1/2} to (0, -1) is (0, 1/2)
        let p = k.project(&v(&[0.0, -1.0])).unwrap();
        assert_abs_diff_eq!(p, v(&[0.0, 0.5]), epsilon = 1e-8);
        // towards (3, 0) the nearest point is the corner (√3/2, 1/2)
        let p = k.project(&v(&[3.0, 0.0])).unwrap();
        assert_abs_diff_eq!(p, v(&[3f64.sqrt() / 2.0, 0.5]), epsilon = 1e-6);
        assert!(!k.support(&v(&[1.0, 0.0])).unwrap().exact);
        // normal cone at the corner contains the outward bisector region
        let corner = v(&[3f64.sqrt() / 2.0, 0.5]);
        assert!(k.in_normal_cone(&corner, &v(&[1.0, -0.2]), 1e-6).unwrap());
        assert!(!k.in_normal_cone(&corner, &v(&[-1.0, 0.0]), 1e-6).unwrap());
    }

    #[test]
    fn empty_intersection_rejected() {
        let a = ConvexSet::new_ball(v(&[0.0, 0.0]), 1.0).unwrap();
        let b = ConvexSet::new_ball(v(&[5.0, 0.0]), 1.0).unwrap();
        assert!(matches!(
            ConvexSet::new_intersection(vec![a, b], v(&[0.0, 0.0]), DykstraConfig::default()),
            Err(ConvexError::EmptyIntersection { member: 1, .. })
        ));
    }

    #[test]
    fn dykstra_reports_non_convergence() {
        let a = ConvexSet::new_ball(v(&[0.0, 0.0]), 1.0).unwrap();
        let b = ConvexSet::new_halfspace(v(&[1.0, 1.0]), 0.5).unwrap();
        let cfg = DykstraConfig { tol: 0.0, max_iter: 3 };
        let k = ConvexSet::new_intersection(vec![a, b], v(&[0.5, 0.5]), cfg).unwrap();
        assert!(matches!(k.project(&v(&[-4.0, 3.0])), Err(ConvexError::NotConverged { iterations: 3, .. })));
    }

    #[test]
    fn dimension_mismatch() {
        let b = ConvexSet::new_ball(v(&[0.0, 0.0]), 1.0).unwrap();
        assert_eq!(
            b.project(&v(&[1.0])),
            Err(ConvexError::DimensionMismatch { expected: 2, found: 1 })
        );
    }

    #[test]
    fn invalid_parameters() {
        assert!(ConvexSet::new_ball(v(&[0.0]), -1.0).is_err());
        assert!(ConvexSet::new_box(v(&[1.0]), v(&[0.0])).is_err());
        assert!(ConvexSet::new_halfspace(v(&[0.0]), 1.0).is_err());
        assert!(ConvexSet::new_affine(v(&[0.0, 0.0]), vec![v(&[1.0, 1.0]), v(&[2.0, 2.0])]).is_err());
        assert!(ConvexSet::new_ball(v(&[0.0]), 1.0).unwrap().dilate(-0.5).is_err());
    }

    #[test]
    fn translate_folds_into_base_shapes() {
        let a = v(&[1.0, -2.0]);
        let b = ConvexSet::new_ball(v(&[0.0, 0.0]), 1.0).unwrap().translate(&a).unwrap();
        assert_eq!(b, ConvexSet::new_ball(a.clone(), 1.0).unwrap());
        let h = ConvexSet::new_halfspace(v(&[1.0, 0.0]), 0.0).unwrap().translate(&a).unwrap();
        assert_eq!(h, ConvexSet::new_halfspace(v(&[1.0, 0.0]), 1.0).unwrap());
        let cap = ConvexSet::new_intersection(
            vec![
                ConvexSet::new_ball(v(&[0.0, 0.0]), 1.0).unwrap(),
                ConvexSet::new_halfspace(v(&[0.0, 1.0]), 0.0).unwrap(),
            ],
            v(&[0.0, 0.5]),
            DykstraConfig::default(),
        )
        .unwrap();
        let moved = cap.translate(&a).unwrap().translate(&a).unwrap();
        let p = moved.project(&v(&[2.0, -4.0])).unwrap();
        assert_abs_diff_eq!(p, v(&[2.0, -4.0]), epsilon = 1e-9);
        let p = moved.project(&v(&[2.0, -6.0])).unwrap();
        assert_abs_diff_eq!(p, v(&[2.0, -4.0]), epsilon = 1e-8);
    }
}
