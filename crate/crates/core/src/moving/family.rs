use serde::{Deserialize, Serialize};

use super::path::PolyPath;
use crate::convex::{ConvexSet, Vector};
use crate::error::SweepError;

/// A parametrized curve of convex sets. Time arguments are absolute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", content = "params", rename_all = "lowercase")]
pub enum SetFamily {
    Constant { set: ConvexSet },
    Ball { center: PolyPath, radius: PolyPath },
    Box { lo: PolyPath, hi: PolyPath },
    /// `{x : ⟨normal, x⟩ ≥ offset(t)}`.
    HalfSpace { normal: Vec<f64>, offset: PolyPath },
    Translate { base: ConvexSet, offset: PolyPath },
    Dilation { base: ConvexSet, radius: PolyPath },
}

impl SetFamily {
    pub fn eval(&self, t: f64) -> Result<ConvexSet, SweepError> {
        Ok(match self {
            SetFamily::Constant { set } => set.clone(),
            SetFamily::Ball { center, radius } => ConvexSet::new_ball(center.eval(t), radius.eval_scalar(t))?,
            SetFamily::Box { lo, hi } => ConvexSet::new_box(lo.eval(t), hi.eval(t))?,
            SetFamily::HalfSpace { normal, offset } => {
                ConvexSet::new_halfspace(Vector::from_column_slice(normal), offset.eval_scalar(t))?
            }
            SetFamily::Translate { base, offset } => base.translate(&offset.eval(t))?,
            SetFamily::Dilation { base, radius } => base.dilate(radius.eval_scalar(t))?,
        })
    }

    /// Checks path widths against `dim`.
    pub fn validate(&self, dim: usize) -> Result<(), SweepError> {
        let want = |name: &str, path: &PolyPath, width: usize| {
            if path.width() == width {
                Ok(())
            } else {
                Err(SweepError::InvalidMovingSet(format!(
                    "{name} path has width {}, expected {width}",
                    path.width()
                )))
            }
        };
        let set_dim = |set: &ConvexSet| {
            if set.dim() == dim {
                Ok(())
            } else {
                Err(SweepError::InvalidMovingSet(format!("set has dimension {}, expected {dim}", set.dim())))
            }
        };
        match self {
            SetFamily::Constant { set } => set_dim(set),
            SetFamily::Ball { center, radius } => {
                want("center", center, dim)?;
                want("radius", radius, 1)
            }
            SetFamily::Box { lo, hi } => {
                want("lo", lo, dim)?;
                want("hi", hi, dim)
            }
            SetFamily::HalfSpace { normal, offset } => {
                if normal.len() != dim {
                    return Err(SweepError::InvalidMovingSet(format!(
                        "half-space normal has length {}, expected {dim}",
                        normal.len()
                    )));
                }
                want("offset", offset, 1)
            }
            SetFamily::Translate { base, offset } => {
                set_dim(base)?;
                want("offset", offset, dim)
            }
            SetFamily::Dilation { base, radius } => {
                set_dim(base)?;
                want("radius", radius, 1)
            }
        }
    }

    fn paths(&self) -> Vec<&PolyPath> {
        match self {
            SetFamily::Constant { .. } => vec![],
            SetFamily::Ball { center, radius } => vec![center, radius],
            SetFamily::Box { lo, hi } => vec![lo, hi],
            SetFamily::HalfSpace { offset, .. } => vec![offset],
            SetFamily::Translate { offset, .. } => vec![offset],
            SetFamily::Dilation { radius, .. } => vec![radius],
        }
    }

    /// Interior path breaks in `(a, b)`, sorted and deduplicated.
    pub fn breaks_in(&self, a: f64, b: f64) -> Vec<f64> {
        let mut out: Vec<f64> = self.paths().iter().flat_map(|p| p.breaks_in(a, b)).collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Largest parameter jump across interior path breaks in `(a, b)`.
    pub fn max_break_gap(&self, a: f64, b: f64) -> f64 {
        self.paths().iter().map(|p| p.max_break_gap(a, b)).fold(0.0, f64::max)
    }
}
