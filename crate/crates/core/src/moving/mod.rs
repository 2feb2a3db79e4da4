//! Convex sets moving in time, with finitely many declared jumps.
//!
//! A [`MovingSet`] on `[0, T]` is a list of segments, each a continuous
//! parametrized family with a declared excess-Lipschitz constant, plus jumps
//! carrying the triple `C(t−), C(t), C(t+)`. Jumps are never detected from
//! samples.

mod arc;
mod family;
mod json;
mod path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use arc::{ArcLength, Atom, Retraction};
pub use family::SetFamily;
pub use json::{JumpSpec, MovingSetSpec, SegmentSpec};
pub use path::{Coeff, PathSpec, PieceSpec, PolyPath};

use crate::convex::{ConvexSet, ExcessMethod};
use crate::error::SweepError;

/// Two sets closer than this in both excess directions count as equal.
pub const CONTINUITY_TOL: f64 = 1e-9;

const VALIDATION_PAIRS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    At,
    Right,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::At => "at",
            Side::Right => "right",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub from: f64,
    pub to: f64,
    pub family: SetFamily,
    pub lipschitz: f64,
}

/// A declared discontinuity with its exact excess masses.
#[derive(Debug, Clone, PartialEq)]
pub struct Jump {
    pub t: f64,
    pub left: ConvexSet,
    pub at: ConvexSet,
    pub right: ConvexSet,
    /// `e(C(t−), C(t))`
    pub left_mass: f64,
    /// `e(C(t), C(t+))`
    pub right_mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MovingSet {
    dim: usize,
    horizon: f64,
    segments: Vec<Segment>,
    jumps: Vec<Jump>,
}

/// Outcome of [`MovingSet::spot_check_lipschitz`].
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzCheck {
    /// Largest `e(C(s), C(t)) − L·(t − s)` seen.
    pub worst_margin: f64,
    pub worst_at: Option<(f64, f64)>,
    pub pairs: usize,
    /// Pairs whose excess was only a Monte-Carlo lower bound.
    pub inexact: usize,
}

impl LipschitzCheck {
    pub fn passed(&self, tol: f64) -> bool {
        self.worst_margin <= tol
    }
}

/// Exact excess or a refusal naming the context.
pub(crate) fn exact_excess(a: &ConvexSet, b: &ConvexSet, context: impl Fn() -> String) -> Result<f64, SweepError> {
    let r = a.excess(b, ExcessMethod::Auto)?;
    match (r.exact, r.value.finite()) {
        (true, Some(v)) => Ok(v),
        (false, _) => Err(SweepError::InexactExcess { context: context() }),
        (true, None) => Err(SweepError::InvalidMovingSet(format!("{} is infinite", context()))),
    }
}

fn same_set(a: &ConvexSet, b: &ConvexSet, context: impl Fn() -> String) -> Result<bool, SweepError> {
    if a == b {
        return Ok(true);
    }
    Ok(exact_excess(a, b, &context)? <= CONTINUITY_TOL && exact_excess(b, a, &context)? <= CONTINUITY_TOL)
}

/// A jump as declared: `left`/`right` default to the adjacent segment limits.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpDecl {
    pub t: f64,
    pub left: Option<ConvexSet>,
    pub at: ConvexSet,
    pub right: Option<ConvexSet>,
}

impl MovingSet {
    pub fn new(horizon: f64, segments: Vec<Segment>, jumps: Vec<JumpDecl>) -> Result<Self, SweepError> {
        let invalid = |msg: String| Err(SweepError::InvalidMovingSet(msg));
        if !(horizon > 0.0) || !horizon.is_finite() {
            return invalid(format!("horizon {horizon} must be finite and positive"));
        }
        let Some(first) = segments.first() else {
            return invalid("at least one segment is required".into());
        };
        if first.from != 0.0 {
            return invalid(format!("first segment starts at {}, not 0", first.from));
        }
        if segments.last().unwrap().to != horizon {
            return invalid(format!("last segment ends at {}, not the horizon {horizon}", segments.last().unwrap().to));
        }
        for w in segments.windows(2) {
            if w[0].to != w[1].from {
                return invalid(format!("segments leave a gap or overlap at {} / {}", w[0].to, w[1].from));
            }
        }
        for s in &segments {
            if !(s.from < s.to) {
                return invalid(format!("segment [{}, {}] is empty", s.from, s.to));
            }
            if !(s.lipschitz >= 0.0) || !s.lipschitz.is_finite() {
                return invalid(format!("segment Lipschitz constant {} must be finite and >= 0", s.lipschitz));
            }
        }
        let dim = first.family.eval(0.0)?.dim();
        for s in &segments {
            s.family.validate(dim)?;
            let gap = s.family.max_break_gap(s.from, s.to);
            if gap > CONTINUITY_TOL {
                return invalid(format!(
                    "segment [{}, {}] has a parameter discontinuity of size {gap:e}; declare a jump instead",
                    s.from, s.to
                ));
            }
            s.family.eval(s.from)?;
            s.family.eval(s.to)?;
        }

        let mut set = Self {
            dim,
            horizon,
            segments,
            jumps: Vec::new(),
        };

        let mut decls = jumps;
        decls.sort_by(|a, b| a.t.total_cmp(&b.t));
        for w in decls.windows(2) {
            if w[0].t == w[1].t {
                return invalid(format!("two jumps declared at t = {}", w[0].t));
            }
        }
        let mut built = Vec::with_capacity(decls.len());
        for d in decls {
            built.push(set.build_jump(d)?);
        }
        set.jumps = built;

        for w in set.segments.windows(2) {
            let t = w[0].to;
            if set.jump_index(t).is_some() {
                continue;
            }
            let a = w[0].family.eval(t)?;
            let b = w[1].family.eval(t)?;
            if !same_set(&a, &b, || format!("continuity check at t = {t}"))? {
                return invalid(format!("segments disagree at t = {t} but no jump is declared there"));
            }
        }

        let check = set.spot_check_lipschitz(VALIDATION_PAIRS, 0)?;
        if !check.passed(CONTINUITY_TOL) {
            let (s, t) = check.worst_at.unwrap_or_default();
            return invalid(format!(
                "declared Lipschitz constant violated: e(C({s}), C({t})) exceeds L·(t − s) by {:e}",
                check.worst_margin
            ));
        }
        Ok(set)
    }

    fn build_jump(&self, d: JumpDecl) -> Result<Jump, SweepError> {
        let t = d.t;
        if !(0.0..=self.horizon).contains(&t) {
            return Err(SweepError::TimeOutOfRange { t, horizon: self.horizon });
        }
        if d.at.dim() != self.dim {
            return Err(SweepError::InvalidMovingSet(format!("jump set at t = {t} has the wrong dimension")));
        }
        let left_limit = if t == 0.0 {
            d.at.clone()
        } else {
            self.segment_left(t).family.eval(t)?
        };
        let right_limit = if t == self.horizon {
            d.at.clone()
        } else {
            self.segment_right(t).family.eval(t)?
        };
        let left = match d.left {
            Some(l) if t > 0.0 => {
                if !same_set(&l, &left_limit, || format!("left limit at t = {t}"))? {
                    return Err(SweepError::InvalidMovingSet(format!(
                        "declared left set at t = {t} does not match the segment limit"
                    )));
                }
                l
            }
            _ => left_limit,
        };
        let right = match d.right {
            Some(r) if t < self.horizon => {
                if !same_set(&r, &right_limit, || format!("right limit at t = {t}"))? {
                    return Err(SweepError::InvalidMovingSet(format!(
                        "declared right set at t = {t} does not match the segment limit"
                    )));
                }
                r
            }
            _ => right_limit,
        };
        let left_mass = exact_excess(&left, &d.at, || format!("e(C({t}−), C({t}))"))?;
        let right_mass = exact_excess(&d.at, &right, || format!("e(C({t}), C({t}+))"))?;
        if left_mass == 0.0 && right_mass == 0.0 {
            return Err(SweepError::InvalidMovingSet(format!(
                "jump at t = {t} has zero excess on both sides; it is a continuity point"
            )));
        }
        Ok(Jump {
            t,
            left,
            at: d.at,
            right,
            left_mass,
            right_mass,
        })
    }

    /// A single continuous segment with no jumps.
    pub fn continuous(horizon: f64, family: SetFamily, lipschitz: f64) -> Result<Self, SweepError> {
        Self::new(
            horizon,
            vec![Segment {
                from: 0.0,
                to: horizon,
                family,
                lipschitz,
            }],
            Vec::new(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn has_jumps(&self) -> bool {
        !self.jumps.is_empty()
    }

    /// Largest declared segment constant.
    pub fn lipschitz(&self) -> f64 {
        self.segments.iter().map(|s| s.lipschitz).fold(0.0, f64::max)
    }

    pub(crate) fn jump_index(&self, t: f64) -> Option<usize> {
        self.jumps.binary_search_by(|j| j.t.total_cmp(&t)).ok()
    }

    /// Segment governing `(t − ε, t]` (the first one at `t = 0`).
    fn segment_left(&self, t: f64) -> &Segment {
        let i = self.segments.partition_point(|s| s.to < t);
        &self.segments[i.min(self.segments.len() - 1)]
    }

    /// Segment governing `[t, t + ε)` (the last one at `t = T`).
    fn segment_right(&self, t: f64) -> &Segment {
        let i = self.segments.partition_point(|s| s.to <= t);
        &self.segments[i.min(self.segments.len() - 1)]
    }

    /// `C(t−)`, `C(t)` or `C(t+)`. At `t = 0` the left side is `C(0)`; at
    /// `t = T` the right side is `C(T)`.
    pub fn set_at(&self, t: f64, side: Side) -> Result<ConvexSet, SweepError> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(SweepError::TimeOutOfRange { t, horizon: self.horizon });
        }
        if let Some(i) = self.jump_index(t) {
            let j = &self.jumps[i];
            return Ok(match side {
                Side::Left => j.left.clone(),
                Side::At => j.at.clone(),
                Side::Right => j.right.clone(),
            });
        }
        let seg = match side {
            Side::Left if t > 0.0 => self.segment_left(t),
            _ => self.segment_right(t),
        };
        seg.family.eval(t)
    }

    /// `(t, left mass, right mass)` for every declared jump, sorted by time.
    pub fn jump_times(&self) -> Vec<(f64, f64, f64)> {
        self.jumps.iter().map(|j| (j.t, j.left_mass, j.right_mass)).collect()
    }

    /// Segment joints, path breaks and jump times strictly inside `(0, T)`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for (i, s) in self.segments.iter().enumerate() {
            if i > 0 {
                out.push(s.from);
            }
            out.extend(s.family.breaks_in(s.from, s.to));
        }
        out.extend(self.jumps.iter().map(|j| j.t).filter(|&t| t > 0.0 && t < self.horizon));
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Samples `pairs` random `s < t` per segment and reports the worst
    /// `e(C(s), C(t)) − L·(t − s)`.
    pub fn spot_check_lipschitz(&self, pairs: usize, seed: u64) -> Result<LipschitzCheck, SweepError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = LipschitzCheck {
            worst_margin: f64::NEG_INFINITY,
            worst_at: None,
            pairs: 0,
            inexact: 0,
        };
        for seg in &self.segments {
            for k in 0..pairs {
                // include the full segment once
                let (s, t) = if k == 0 {
                    (seg.from, seg.to)
                } else {
                    let a = rng.random_range(seg.from..=seg.to);
                    let b = rng.random_range(seg.from..=seg.to);
                    (a.min(b), a.max(b))
                };
                let cs = seg.family.eval(s)?;
                let ct = seg.family.eval(t)?;
                let r = cs.excess(&ct, ExcessMethod::Auto)?;
                if !r.exact {
                    out.inexact += 1;
                }
                let margin = match r.value.finite() {
                    Some(e) => e - seg.lipschitz * (t - s),
                    None => f64::INFINITY,
                };
                out.pairs += 1;
                if margin > out.worst_margin {
                    out.worst_margin = margin;
                    out.worst_at = Some((s, t));
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::Vector;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    fn ball(c: &[f64], r: f64) -> ConvexSet {
        ConvexSet::new_ball(v(c), r).unwrap()
    }

    fn constant(set: ConvexSet) -> SetFamily {
        SetFamily::Constant { set }
    }

    pub(crate) fn ball_jump() -> MovingSet {
        MovingSet::new(
            2.0,
            vec![
                Segment {
                    from: 0.0,
                    to: 1.0,
                    family: constant(ball(&[0.0, 0.0], 1.0)),
                    lipschitz: 0.0,
                },
                Segment {
                    from: 1.0,
                    to: 2.0,
                    family: constant(ball(&[4.0, 0.0], 1.0)),
                    lipschitz: 0.0,
                },
            ],
            vec![JumpDecl {
                t: 1.0,
                left: None,
                at: ball(&[4.0, 0.0], 1.0),
                right: None,
            }],
        )
        .unwrap()
    }

    #[test]
    fn continuity_point_all_sides_equal() {
        let m = MovingSet::continuous(
            2.0,
            SetFamily::Ball {
                center: PolyPath::linear(v(&[0.0, 0.0]), v(&[1.0, 0.0])),
                radius: PolyPath::scalar(1.0),
            },
            1.0,
        )
        .unwrap();
        let l = m.set_at(0.7, Side::Left).unwrap();
        assert_eq!(l, m.set_at(0.7, Side::At).unwrap());
        assert_eq!(l, m.set_at(0.7, Side::Right).unwrap());
        assert!(m.jump_times().is_empty());
        assert!(matches!(m.set_at(2.5, Side::At), Err(SweepError::TimeOutOfRange { .. })));
    }

    #[test]
    fn declared_jump_lookup() {
        let m = ball_jump();
        assert_eq!(m.set_at(1.0, Side::Left).unwrap(), ball(&[0.0, 0.0], 1.0));
        assert_eq!(m.set_at(1.0, Side::At).unwrap(), ball(&[4.0, 0.0], 1.0));
        // right-continuous: at equals right
        assert_eq!(m.set_at(1.0, Side::Right).unwrap(), m.set_at(1.0, Side::At).unwrap());
        assert_eq!(m.jump_times(), vec![(1.0, 4.0, 0.0)]);
        assert_eq!(m.breakpoints(), vec![1.0]);
    }

    #[test]
    fn jump_at_origin_has_no_left_mass() {
        let m = MovingSet::new(
            1.0,
            vec![Segment {
                from: 0.0,
                to: 1.0,
                family: constant(ball(&[2.0], 1.0)),
                lipschitz: 0.0,
            }],
            vec![JumpDecl {
                t: 0.0,
                left: None,
                at: ball(&[0.0], 1.0),
                right: None,
            }],
        )
        .unwrap();
        assert_eq!(m.jump_times(), vec![(0.0, 0.0, 2.0)]);
        assert_eq!(m.set_at(0.0, Side::Left).unwrap(), ball(&[0.0], 1.0));
    }

    #[test]
    fn rejects_malformed_sets() {
        let seg = |from, to| Segment {
            from,
            to,
            family: constant(ball(&[0.0], 1.0)),
            lipschitz: 0.0,
        };
        assert!(MovingSet::new(1.0, vec![seg(0.0, 0.5)], vec![]).is_err());
        assert!(MovingSet::new(1.0, vec![seg(0.0, 0.4), seg(0.5, 1.0)], vec![]).is_err());
        // zero-mass jump
        let zero = JumpDecl {
            t: 0.5,
            left: None,
            at: ball(&[0.0], 1.0),
            right: None,
        };
        assert!(MovingSet::new(1.0, vec![seg(0.0, 1.0)], vec![zero]).is_err());
        // undeclared discontinuity at a joint
        let other = Segment {
            from: 0.5,
            to: 1.0,
            family: constant(ball(&[3.0], 1.0)),
            lipschitz: 0.0,
        };
        assert!(MovingSet::new(1.0, vec![seg(0.0, 0.5), other], vec![]).is_err());
    }

    #[test]
    fn understated_lipschitz_constant_is_caught() {
        let family = SetFamily::Ball {
            center: PolyPath::linear(v(&[0.0]), v(&[2.0])),
            radius: PolyPath::scalar(1.0),
        };
        assert!(MovingSet::continuous(1.0, family.clone(), 1.0).is_err());
        let m = MovingSet::continuous(1.0, family, 2.0).unwrap();
        let check = m.spot_check_lipschitz(100, 7).unwrap();
        assert!(check.passed(1e-12));
        assert_eq!(check.inexact, 0);
    }
}
