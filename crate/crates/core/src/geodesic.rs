//! The excess geodesic `F(0) = A`, `F(t) = B + D_{(1−t)ρ}` with `ρ = e(A, B)`,
//! and the closed-form sweeping process it drives.

use crate::convex::{ConvexError, ConvexSet, ExcessMethod, Vector, DEFAULT_TOL};
use crate::curve::SetCurve;
use crate::error::SweepError;

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSegment {
    a: ConvexSet,
    b: ConvexSet,
    rho: f64,
}

/// Refuses pairs whose excess is inexact or infinite.
pub fn geodesic(a: &ConvexSet, b: &ConvexSet) -> Result<GeodesicSegment, SweepError> {
    let r = a.excess(b, ExcessMethod::Auto)?;
    if !r.exact {
        return Err(SweepError::InexactExcess {
            context: "e(A, B) for a geodesic".into(),
        });
    }
    let rho = r
        .value
        .finite()
        .ok_or_else(|| SweepError::Inconsistent("e(A, B) is infinite; no geodesic".into()))?;
    Ok(GeodesicSegment {
        a: a.clone(),
        b: b.clone(),
        rho,
    })
}

impl GeodesicSegment {
    pub fn start(&self) -> &ConvexSet {
        &self.a
    }

    pub fn end(&self) -> &ConvexSet {
        &self.b
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `F(t)`; `F(0) = A`.
    pub fn at(&self, t: f64) -> Result<ConvexSet, SweepError> {
        if !(0.0..=1.0).contains(&t) {
            return Err(SweepError::TimeOutOfRange { t, horizon: 1.0 });
        }
        if t == 0.0 {
            return Ok(self.a.clone());
        }
        Ok(self.b.dilate(((1.0 - t) * self.rho).max(0.0))?)
    }

    /// `F(0+) = B + D_ρ`, which contains `A` and differs from it in general.
    pub fn right_limit_at_zero(&self) -> Result<ConvexSet, SweepError> {
        Ok(self.b.dilate(self.rho)?)
    }
}

impl SetCurve for GeodesicSegment {
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn horizon(&self) -> f64 {
        1.0
    }

    fn set_at(&self, t: f64) -> Result<ConvexSet, SweepError> {
        self.at(t)
    }

    fn lipschitz(&self) -> f64 {
        self.rho
    }
}

/// Sweeping process on `F` from `y0 ∈ A`: at rest until `t₀`, then a straight
/// line to `p = P_B(y0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSolution {
    pub y0: Vector,
    pub p: Vector,
    pub t0: f64,
    pub rho: f64,
}

impl GeodesicSolution {
    pub fn eval(&self, t: f64) -> Vector {
        if t <= self.t0 || self.t0 >= 1.0 {
            return self.y0.clone();
        }
        if t >= 1.0 {
            return self.p.clone();
        }
        let s = (t - self.t0) / (1.0 - self.t0);
        &self.y0 + (&self.p - &self.y0) * s
    }
}

/// `y0` must lie within [`DEFAULT_TOL`] of `A`.
pub fn geodesic_solution(a: &ConvexSet, b: &ConvexSet, y0: &Vector) -> Result<GeodesicSolution, SweepError> {
    let g = geodesic(a, b)?;
    let d = a.distance(y0)?;
    if d > DEFAULT_TOL {
        return Err(ConvexError::NotInSet { distance: d }.into());
    }
    let p = b.project(y0)?;
    let gap = (y0 - &p).norm();
    let rho = g.rho;
    let t0 = if rho == 0.0 {
        if gap > DEFAULT_TOL {
            return Err(SweepError::Inconsistent(format!(
                "e(A, B) = 0 but y0 is {gap:e} away from B"
            )));
        }
        1.0
    } else {
        (1.0 - gap / rho).clamp(0.0, 1.0)
    };
    Ok(GeodesicSolution {
        y0: y0.clone(),
        p,
        t0,
        rho,
    })
}

/// Linear interpolation of ball centers and radii. Not a geodesic; kept only
/// to show that other jump fills give wrong jump values.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearBallPath {
    c0: Vector,
    r0: f64,
    c1: Vector,
    r1: f64,
}

impl LinearBallPath {
    pub fn new(c0: Vector, r0: f64, c1: Vector, r1: f64) -> Result<Self, SweepError> {
        if c0.len() != c1.len() {
            return Err(ConvexError::DimensionMismatch {
                expected: c0.len(),
                found: c1.len(),
            }
            .into());
        }
        ConvexSet::new_ball(c0.clone(), r0)?;
        ConvexSet::new_ball(c1.clone(), r1)?;
        Ok(Self { c0, r0, c1, r1 })
    }
}

impl SetCurve for LinearBallPath {
    fn dim(&self) -> usize {
        self.c0.len()
    }

    fn horizon(&self) -> f64 {
        1.0
    }

    fn set_at(&self, t: f64) -> Result<ConvexSet, SweepError> {
        let c = &self.c0 * (1.0 - t) + &self.c1 * t;
        Ok(ConvexSet::new_ball(c, self.r0 * (1.0 - t) + self.r1 * t)?)
    }

    fn lipschitz(&self) -> f64 {
        (&self.c1 - &self.c0).norm() + (self.r0 - self.r1).max(0.0)
    }
}
