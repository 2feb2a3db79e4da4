use serde::Serialize;

use crate::convex::ConvexSet;
use crate::curve::SetCurve;
use crate::error::SweepError;
use crate::geodesic::{geodesic, GeodesicSegment};
use crate::moving::{ArcLength, MovingSet, Side};

/// A piece of the filled curve `C̃` on `[0, ℓ_C(T)]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Piece {
    /// `C̃(σ) = C(t)` with `t = inf ℓ⁻¹(σ)` read off a monotone table
    /// (`C(t+)` where `ℓ` has a plateau).
    Segment {
        sigma: (f64, f64),
        times: Vec<f64>,
        sigmas: Vec<f64>,
        /// The piece ends at a jump with positive left mass, so its end
        /// value is `C(t−)`.
        ends_at_left_limit: bool,
        /// The piece ends at a jump with zero left mass, so its end value
        /// is `C(t)`.
        ends_at_jump: bool,
    },
    /// Geodesic from `C(t−)` to `C(t)` (`side = Left`) or from `C(t)` to
    /// `C(t+)` (`side = Right`), stretched over its mass.
    Fill {
        sigma: (f64, f64),
        t: f64,
        side: Side,
        geodesic: GeodesicSegment,
    },
}

impl Piece {
    pub fn sigma(&self) -> (f64, f64) {
        match self {
            Piece::Segment { sigma, .. } | Piece::Fill { sigma, .. } => *sigma,
        }
    }
}

/// How [`Reparametrization`] fills jump gaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FillKind {
    Geodesic,
    /// Linear interpolation of ball centers and radii. Illustrative only:
    /// it breaks the jump conditions.
    LinearBall,
}

/// `ℓ_C` together with the 1-Lipschitz curve `C̃` on `[0, ℓ_C(T)]`.
#[derive(Debug, Clone)]
pub struct Reparametrization {
    set: MovingSet,
    arc: ArcLength,
    pieces: Vec<Piece>,
    fill: FillKind,
    breakpoints: Vec<f64>,
}

/// Where `σ` lands in `C̃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    /// In a segment piece at time `t = inf ℓ⁻¹(σ)`.
    Time { piece: usize, t: f64 },
    Fill { piece: usize, t: f64, fraction: f64 },
}

impl Reparametrization {
    pub fn new(set: &MovingSet) -> Result<Self, SweepError> {
        Self::with_fill(set, FillKind::Geodesic)
    }

    pub fn with_fill(set: &MovingSet, fill: FillKind) -> Result<Self, SweepError> {
        let arc = set.arc_length_adaptive()?;
        if !arc.exact {
            return Err(SweepError::InexactExcess {
                context: "arc length".into(),
            });
        }
        let mut pieces = Vec::new();
        let mut times: Vec<f64> = Vec::new();
        let mut sigmas: Vec<f64> = Vec::new();
        let flush = |pieces: &mut Vec<Piece>,
                     times: &mut Vec<f64>,
                     sigmas: &mut Vec<f64>,
                     ends_at_left_limit: bool,
                     ends_at_jump: bool| {
            if times.len() >= 2 {
                pieces.push(Piece::Segment {
                    sigma: (sigmas[0], *sigmas.last().unwrap()),
                    times: std::mem::take(times),
                    sigmas: std::mem::take(sigmas),
                    ends_at_left_limit,
                    ends_at_jump,
                });
            } else {
                times.clear();
                sigmas.clear();
            }
        };
        let mut atoms = arc.atoms.iter().peekable();
        for (i, &t) in arc.times.iter().enumerate() {
            match atoms.next_if(|a| a.index == i) {
                None => {
                    times.push(t);
                    sigmas.push(arc.values[i]);
                }
                Some(atom) => {
                    times.push(t);
                    sigmas.push(arc.left[i]);
                    flush(&mut pieces, &mut times, &mut sigmas, atom.left_mass > 0.0, atom.left_mass == 0.0);
                    let j = &set.jumps()[set.jump_index(t).expect("atom at a jump")];
                    if atom.left_mass > 0.0 {
                        pieces.push(Piece::Fill {
                            sigma: (arc.left[i], arc.values[i]),
                            t,
                            side: Side::Left,
                            geodesic: geodesic(&j.left, &j.at)?,
                        });
                    }
                    if atom.right_mass > 0.0 {
                        pieces.push(Piece::Fill {
                            sigma: (arc.values[i], arc.right[i]),
                            t,
                            side: Side::Right,
                            geodesic: geodesic(&j.at, &j.right)?,
                        });
                    }
                    times.push(t);
                    sigmas.push(arc.right[i]);
                }
            }
        }
        flush(&mut pieces, &mut times, &mut sigmas, false, false);

        let total = arc.total;
        let mut breakpoints: Vec<f64> = Vec::new();
        for p in &pieces {
            let (a, b) = p.sigma();
            breakpoints.push(a);
            breakpoints.push(b);
            if let Piece::Segment { sigmas, .. } = p {
                // plateau levels, so plateau nodes are exact grid nodes
                for w in sigmas.windows(2) {
                    if w[0] == w[1] {
                        breakpoints.push(w[0]);
                    }
                }
            }
        }
        breakpoints.retain(|&s| s > 0.0 && s < total);
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();

        if fill == FillKind::LinearBall {
            for p in &pieces {
                if let Piece::Fill { geodesic, .. } = p {
                    if ball_parts(geodesic.start()).is_none() || ball_parts(geodesic.end()).is_none() {
                        return Err(SweepError::Inconsistent("the linear fill needs balls on both sides".into()));
                    }
                }
            }
        }

        Ok(Self {
            set: set.clone(),
            arc,
            pieces,
            fill,
            breakpoints,
        })
    }

    pub fn arc(&self) -> &ArcLength {
        &self.arc
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn moving_set(&self) -> &MovingSet {
        &self.set
    }

    pub fn total(&self) -> f64 {
        self.arc.total
    }

    /// Fill with `σ0 < σ ≤ σ1`, else the first segment piece containing
    /// `σ`, else a fill starting at `σ`.
    pub fn locate(&self, sigma: f64) -> Option<Location> {
        let start = self.pieces.partition_point(|p| p.sigma().1 < sigma);
        let candidates = || self.pieces.iter().enumerate().skip(start).take_while(|(_, p)| p.sigma().0 <= sigma);
        for (k, p) in candidates() {
            if let Piece::Fill { sigma: (a, b), t, .. } = p {
                if *a < sigma && sigma <= *b {
                    return Some(Location::Fill {
                        piece: k,
                        t: *t,
                        fraction: (sigma - a) / (b - a),
                    });
                }
            }
        }
        for (k, p) in candidates() {
            if let Piece::Segment { times, sigmas, .. } = p {
                return Some(Location::Time {
                    piece: k,
                    t: inverse(times, sigmas, sigma),
                });
            }
        }
        for (k, p) in candidates() {
            if let Piece::Fill { sigma: (a, _), t, .. } = p {
                if *a == sigma {
                    return Some(Location::Fill {
                        piece: k,
                        t: *t,
                        fraction: 0.0,
                    });
                }
            }
        }
        None
    }

    /// `C̃(σ)`.
    pub fn set_at_sigma(&self, sigma: f64) -> Result<ConvexSet, SweepError> {
        let loc = self.locate(sigma).ok_or(SweepError::TimeOutOfRange {
            t: sigma,
            horizon: self.total(),
        })?;
        match loc {
            Location::Time { piece, t } => {
                let Piece::Segment {
                    times,
                    ends_at_left_limit,
                    ends_at_jump,
                    ..
                } = &self.pieces[piece]
                else {
                    unreachable!()
                };
                let end = *times.last().unwrap();
                let side = if t == end && *ends_at_left_limit {
                    Side::Left
                } else if t == end && *ends_at_jump {
                    Side::At
                } else {
                    Side::Right
                };
                self.set.set_at(t, side)
            }
            Location::Fill { piece, fraction, .. } => {
                let Piece::Fill {
                    sigma: (_, b),
                    geodesic,
                    ..
                } = &self.pieces[piece]
                else {
                    unreachable!()
                };
                if fraction == 0.0 {
                    return Ok(geodesic.start().clone());
                }
                match self.fill {
                    // (1 − s)ρ is the distance to the end of the gap
                    FillKind::Geodesic => Ok(geodesic.end().dilate((b - sigma).max(0.0))?),
                    FillKind::LinearBall => {
                        let (c0, r0) = ball_parts(geodesic.start()).unwrap();
                        let (c1, r1) = ball_parts(geodesic.end()).unwrap();
                        let c = c0 * (1.0 - fraction) + c1 * fraction;
                        Ok(ConvexSet::new_ball(c, r0 * (1.0 - fraction) + r1 * fraction)?)
                    }
                }
            }
        }
    }
}

fn ball_parts(k: &ConvexSet) -> Option<(crate::convex::Vector, f64)> {
    match k.shape() {
        crate::convex::Shape::Ball { center, radius } => Some((center.clone(), *radius)),
        _ => k.as_point().map(|p| (p.clone(), 0.0)),
    }
}

/// `inf {t : σ(t) ≥ σ}` on a nondecreasing table, linear between nodes.
pub(crate) fn inverse(times: &[f64], sigmas: &[f64], sigma: f64) -> f64 {
    let k = sigmas.partition_point(|&s| s < sigma);
    if k == 0 {
        return times[0];
    }
    if k == sigmas.len() {
        return *times.last().unwrap();
    }
    if sigmas[k] == sigma {
        return times[k];
    }
    let (s0, s1) = (sigmas[k - 1], sigmas[k]);
    let (t0, t1) = (times[k - 1], times[k]);
    (t0 + (sigma - s0) / (s1 - s0) * (t1 - t0)).clamp(t0, t1)
}

impl SetCurve for Reparametrization {
    fn dim(&self) -> usize {
        self.set.dim()
    }

    fn horizon(&self) -> f64 {
        self.total()
    }

    fn set_at(&self, sigma: f64) -> Result<ConvexSet, SweepError> {
        self.set_at_sigma(sigma)
    }

    fn lipschitz(&self) -> f64 {
        match self.fill {
            FillKind::Geodesic => 1.0,
            FillKind::LinearBall => self
                .pieces
                .iter()
                .filter_map(|p| match p {
                    Piece::Fill {
                        sigma: (a, b),
                        geodesic,
                        ..
                    } => {
                        let (c0, r0) = ball_parts(geodesic.start())?;
                        let (c1, r1) = ball_parts(geodesic.end())?;
                        Some(((c1 - c0).norm() + (r0 - r1).max(0.0)) / (b - a))
                    }
                    _ => None,
                })
                .fold(1.0, f64::max),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.breakpoints.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::{ExcessMethod, Vector};
    use crate::moving::{JumpDecl, PolyPath, Segment, SetFamily};

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    fn ball(c: &[f64], r: f64) -> ConvexSet {
        ConvexSet::new_ball(v(c), r).unwrap()
    }

    fn ball_jump() -> MovingSet {
        let seg = |from, to, set| Segment {
            from,
            to,
            family: SetFamily::Constant { set },
            lipschitz: 0.0,
        };
        MovingSet::new(
            2.0,
            vec![seg(0.0, 1.0, ball(&[0.0, 0.0], 1.0)), seg(1.0, 2.0, ball(&[4.0, 0.0], 1.0))],
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
    fn translating_ball_is_its_own_reparametrization() {
        let m = MovingSet::continuous(
            2.0,
            SetFamily::Ball {
                center: PolyPath::linear(v(&[0.0, 0.0]), v(&[1.0, 0.0])),
                radius: PolyPath::scalar(1.0),
            },
            1.0,
        )
        .unwrap();
        let r = Reparametrization::new(&m).unwrap();
        assert!((r.total() - 2.0).abs() < 1e-12);
        for s in [0.0, 0.3, 1.7, 2.0] {
            let k = r.set_at_sigma(s).unwrap();
            let e1 = k.excess(&ball(&[s, 0.0], 1.0), ExcessMethod::Auto).unwrap().value.finite().unwrap();
            assert!(e1 < 1e-12, "σ = {s}");
        }
    }

    #[test]
    fn jump_gap_is_a_shrinking_dilation() {
        let r = Reparametrization::new(&ball_jump()).unwrap();
        assert_eq!(r.total(), 4.0);
        assert_eq!(r.set_at_sigma(0.0).unwrap(), ball(&[0.0, 0.0], 1.0));
        for s in [0.5, 1.0, 3.0, 4.0] {
            assert_eq!(r.set_at_sigma(s).unwrap(), ball(&[4.0, 0.0], 1.0 + 4.0 - s));
        }
        assert!(r.set_at_sigma(4.5).is_err());
        assert_eq!(r.breakpoints(), Vec::<f64>::new());
    }

    #[test]
    fn plateau_collapses_to_a_point() {
        let m = MovingSet::continuous(
            2.0,
            SetFamily::Ball {
                center: PolyPath::constant(v(&[0.0, 0.0])),
                radius: PolyPath::linear(v(&[1.0]), v(&[1.0])),
            },
            0.0,
        )
        .unwrap();
        let r = Reparametrization::new(&m).unwrap();
        assert_eq!(r.total(), 0.0);
        // inf ℓ⁻¹(0) = 0, so C̃(0) = C(0+) = C(0)
        assert_eq!(r.set_at_sigma(0.0).unwrap(), ball(&[0.0, 0.0], 1.0));
    }

    #[test]
    fn inverse_takes_the_infimum() {
        let t = [0.0, 1.0, 2.0, 3.0];
        let s = [0.0, 1.0, 1.0, 2.0];
        assert_eq!(inverse(&t, &s, 1.0), 1.0);
        assert_eq!(inverse(&t, &s, 0.5), 0.5);
        assert_eq!(inverse(&t, &s, 1.5), 2.5);
    }
}
