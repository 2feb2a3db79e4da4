use serde::Serialize;

use super::{MovingSet, Side};
use crate::convex::ExcessMethod;
use crate::error::SweepError;
use crate::par::*;

const ADAPTIVE_START: usize = 64;
const ADAPTIVE_MAX: usize = 1 << 16;
const ADAPTIVE_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Retraction {
    pub value: f64,
    /// False as soon as one excess was a Monte-Carlo lower bound.
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Atom {
    pub t: f64,
    /// Index of `t` in the arc-length grid.
    pub index: usize,
    /// `ℓ(t) − ℓ(t−) = e(C(t−), C(t))`
    pub left_mass: f64,
    /// `ℓ(t+) − ℓ(t) = e(C(t), C(t+))`
    pub right_mass: f64,
}

/// Sampled `ℓ_C(t) = ret(C; [0, t])` with one-sided limits at every node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArcLength {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    pub atoms: Vec<Atom>,
    pub total: f64,
    pub exact: bool,
}

impl ArcLength {
    /// `ℓ(t)` with linear interpolation between nodes; exact at nodes.
    pub fn value_at(&self, t: f64) -> f64 {
        let i = self.times.partition_point(|&s| s < t);
        if i < self.times.len() && self.times[i] == t {
            return self.values[i];
        }
        if i == 0 {
            return self.values[0];
        }
        if i == self.times.len() {
            return self.total;
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let (l0, l1) = (self.right[i - 1], self.left[i]);
        l0 + (l1 - l0) * (t - t0) / (t1 - t0)
    }
}

impl MovingSet {
    /// `e(C(p+), C(q−))` for consecutive nodes `p < q`, with no jump in between.
    fn increment(&self, p: f64, q: f64) -> Result<(f64, bool), SweepError> {
        let a = self.set_at(p, Side::Right)?;
        let b = self.set_at(q, Side::Left)?;
        let r = a.excess(&b, ExcessMethod::Auto)?;
        match r.value.finite() {
            Some(v) => Ok((v, r.exact)),
            None => Err(SweepError::UnboundedRetraction { from: p, to: q }),
        }
    }

    fn nodes(&self, a: f64, b: f64, grid: &[f64]) -> Result<Vec<f64>, SweepError> {
        if let Some(&t) = grid.iter().find(|&&t| !(0.0..=self.horizon).contains(&t)) {
            return Err(SweepError::TimeOutOfRange { t, horizon: self.horizon });
        }
        let mut nodes: Vec<f64> = grid.iter().copied().filter(|&t| t >= a && t <= b).collect();
        nodes.push(a);
        nodes.push(b);
        nodes.extend(self.jumps.iter().map(|j| j.t).filter(|&t| t >= a && t <= b));
        nodes.extend(self.segments.iter().map(|s| s.from).filter(|&t| t >= a && t <= b));
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        Ok(nodes)
    }

    fn increments(&self, nodes: &[f64]) -> Result<Vec<(f64, bool)>, SweepError> {
        nodes.par_windows(2).map(|w| self.increment(w[0], w[1])).collect()
    }

    /// `Σ e(C(t_{j−1}), C(t_j))` over `grid ∩ [a, b]` refined by `a`, `b`,
    /// segment joints and jump times, with the jump atoms inside `[a, b]`:
    /// left masses for jumps in `(a, b]`, right masses for jumps in `[a, b)`.
    pub fn retraction(&self, a: f64, b: f64, grid: &[f64]) -> Result<Retraction, SweepError> {
        if !(0.0 <= a && a <= b && b <= self.horizon) {
            return Err(SweepError::TimeOutOfRange {
                t: if a < 0.0 || a > b { a } else { b },
                horizon: self.horizon,
            });
        }
        let nodes = self.nodes(a, b, grid)?;
        let mut value = 0.0;
        let mut exact = true;
        for (v, e) in self.increments(&nodes)? {
            value += v;
            exact &= e;
        }
        for j in &self.jumps {
            if j.t > a && j.t <= b {
                value += j.left_mass;
            }
            if j.t >= a && j.t < b {
                value += j.right_mass;
            }
        }
        Ok(Retraction { value, exact })
    }

    /// `ℓ_C` on `grid` refined by `{0, T}`, segment joints and jump times.
    pub fn arc_length(&self, grid: &[f64]) -> Result<ArcLength, SweepError> {
        let times = self.nodes(0.0, self.horizon, grid)?;
        let incs = self.increments(&times)?;
        Ok(self.assemble(times, &incs))
    }

    fn assemble(&self, times: Vec<f64>, incs: &[(f64, bool)]) -> ArcLength {
        let n = times.len();
        let mut values = Vec::with_capacity(n);
        let mut left = Vec::with_capacity(n);
        let mut right = Vec::with_capacity(n);
        let mut atoms = Vec::new();
        let mut exact = true;
        let mut acc = 0.0;
        for (i, &t) in times.iter().enumerate() {
            if i > 0 {
                let (v, e) = incs[i - 1];
                acc += v;
                exact &= e;
            }
            let (lm, rm) = match self.jump_index(t) {
                Some(k) => {
                    let j = &self.jumps[k];
                    atoms.push(Atom {
                        t,
                        index: i,
                        left_mass: j.left_mass,
                        right_mass: j.right_mass,
                    });
                    (j.left_mass, j.right_mass)
                }
                None => (0.0, 0.0),
            };
            left.push(acc);
            acc += lm;
            values.push(acc);
            acc += rm;
            right.push(acc);
        }
        // ℓ(T) excludes the right mass of a jump at T
        let total = *values.last().unwrap();
        ArcLength {
            times,
            values,
            left,
            right,
            atoms,
            total,
            exact,
        }
    }

    /// `ℓ_C` on a grid refined per segment (uniform subdivision, doubled
    /// until the segment's retraction settles to a relative 1e-12 or reaches
    /// 2¹⁶ cells).
    pub fn arc_length_adaptive(&self) -> Result<ArcLength, SweepError> {
        let mut times: Vec<f64> = Vec::new();
        let mut incs: Vec<(f64, bool)> = Vec::new();
        for seg in &self.segments {
            let mut extra: Vec<f64> = seg.family.breaks_in(seg.from, seg.to);
            extra.extend(self.jumps.iter().map(|j| j.t).filter(|&t| t > seg.from && t < seg.to));
            let grid_for = |k: usize| {
                let h = (seg.to - seg.from) / k as f64;
                let mut g: Vec<f64> = (0..k).map(|i| seg.from + h * i as f64).collect();
                g.push(seg.to);
                g.extend(extra.iter().copied());
                g.sort_by(f64::total_cmp);
                g.dedup();
                g
            };
            let mut k = ADAPTIVE_START;
            let mut grid = grid_for(k);
            let mut cur = self.increments(&grid)?;
            let mut sum: f64 = cur.iter().map(|x| x.0).sum();
            while k < ADAPTIVE_MAX {
                let next_grid = grid_for(2 * k);
                let next = self.increments(&next_grid)?;
                let next_sum: f64 = next.iter().map(|x| x.0).sum();
                let settled = (next_sum - sum).abs() <= ADAPTIVE_RTOL * (1.0 + next_sum);
                k *= 2;
                grid = next_grid;
                cur = next;
                sum = next_sum;
                if settled {
                    break;
                }
            }
            if times.is_empty() {
                times.extend(grid);
            } else {
                times.extend(grid.into_iter().skip(1));
            }
            incs.extend(cur);
        }
        Ok(self.assemble(times, &incs))
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::ball_jump;
    use super::super::{PolyPath, SetFamily};
    use super::*;
    use crate::convex::{ConvexSet, Vector};

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    fn translating() -> MovingSet {
        MovingSet::continuous(
            2.0,
            SetFamily::Ball {
                center: PolyPath::linear(v(&[0.0, 0.0]), v(&[1.0, 0.0])),
                radius: PolyPath::scalar(1.0),
            },
            1.0,
        )
        .unwrap()
    }

    fn expanding() -> MovingSet {
        MovingSet::continuous(
            2.0,
            SetFamily::Ball {
                center: PolyPath::constant(v(&[0.0, 0.0])),
                radius: PolyPath::linear(v(&[1.0]), v(&[1.0])),
            },
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn constant_set_has_zero_retraction() {
        let m = MovingSet::continuous(
            1.0,
            SetFamily::Constant {
                set: ConvexSet::new_ball(v(&[1.0, 1.0]), 2.0).unwrap(),
            },
            0.0,
        )
        .unwrap();
        let r = m.retraction(0.0, 1.0, &[0.25, 0.5]).unwrap();
        assert_eq!(r, Retraction { value: 0.0, exact: true });
    }

    #[test]
    fn translating_ball_telescopes() {
        let m = translating();
        for grid in [vec![], vec![0.5], vec![0.1, 0.7, 1.3, 1.9]] {
            let r = m.retraction(0.0, 2.0, &grid).unwrap();
            assert!((r.value - 2.0).abs() < 1e-15, "{grid:?}: {}", r.value);
        }
        let a = m.arc_length(&[0.5, 1.0, 1.5]).unwrap();
        for (t, l) in a.times.iter().zip(&a.values) {
            assert!((t - l).abs() < 1e-15);
        }
    }

    #[test]
    fn expanding_ball_has_zero_arc_length() {
        let m = expanding();
        let a = m.arc_length_adaptive().unwrap();
        assert!(a.values.iter().all(|&l| l == 0.0));
        assert_eq!(a.total, 0.0);
    }

    #[test]
    fn jump_atom_is_the_excess() {
        let m = ball_jump();
        let a = m.arc_length(&[0.5, 1.5]).unwrap();
        assert_eq!(a.atoms.len(), 1);
        let atom = a.atoms[0];
        assert_eq!((atom.t, atom.left_mass, atom.right_mass), (1.0, 4.0, 0.0));
        let i = atom.index;
        assert_eq!(a.left[i], 0.0);
        assert_eq!(a.values[i], 4.0);
        assert_eq!(a.right[i], 4.0);
        assert_eq!(a.value_at(0.99), 0.0);
        assert_eq!(a.value_at(1.5), 4.0);
        assert_eq!(a.total, 4.0);
    }

    #[test]
    fn additivity_and_refinement() {
        let m = MovingSet::continuous(
            1.0,
            SetFamily::Ball {
                center: PolyPath::polynomial(0.0, vec![v(&[0.0, 0.0]), v(&[0.6, 0.0]), v(&[0.0, 0.2])]).unwrap(),
                radius: PolyPath::scalar(0.3),
            },
            1.0,
        )
        .unwrap();
        let grid: Vec<f64> = (0..=32).map(|i| i as f64 / 32.0).collect();
        let whole = m.retraction(0.0, 1.0, &grid).unwrap().value;
        let split = m.retraction(0.0, 0.5, &grid).unwrap().value + m.retraction(0.5, 1.0, &grid).unwrap().value;
        assert!((whole - split).abs() < 1e-14);
        let coarse: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0).collect();
        let c = m.retraction(0.0, 1.0, &coarse).unwrap().value;
        assert!(c <= whole + 1e-15);
        assert!(c < whole);
    }
}
