use nalgebra::DMatrix;

use super::catching_up::{solve_lipschitz, LipschitzSolution, SolverConfig};
use super::reparam::{FillKind, Piece, Reparametrization};
use super::trajectory::{backward_slopes, JumpState, Trajectory};
use crate::convex::{ConvexError, Vector};
use crate::error::SweepError;
use crate::moving::{MovingSet, Side};

#[derive(Debug, Clone)]
pub struct BrSolution {
    /// `y = ŷ ∘ ℓ_C` on the time grid, density relative to `Dℓ_C`.
    pub trajectory: Trajectory,
    pub reparam: Reparametrization,
    /// `ŷ` on `[0, ℓ_C(T)]`; absent when `ℓ_C ≡ 0`.
    pub lifted: Option<LipschitzSolution>,
}

/// `y(0) = P_{C(0)}(y0)`, then `y = ŷ ∘ ℓ_C` with `ŷ` the Lipschitz solution
/// on the filled reparametrization `C̃` started from `y(0)`.
pub fn solve_br(set: &MovingSet, y0: &Vector, config: &SolverConfig) -> Result<BrSolution, SweepError> {
    solve_br_with_fill(set, y0, config, FillKind::Geodesic)
}

pub fn solve_br_with_fill(
    set: &MovingSet,
    y0: &Vector,
    config: &SolverConfig,
    fill: FillKind,
) -> Result<BrSolution, SweepError> {
    if y0.len() != set.dim() {
        return Err(ConvexError::DimensionMismatch {
            expected: set.dim(),
            found: y0.len(),
        }
        .into());
    }
    let start = set
        .set_at(0.0, Side::At)?
        .project(y0)
        .map_err(|source| SweepError::Projection { step: 0, t: 0.0, source })?;
    let reparam = Reparametrization::with_fill(set, fill)?;

    if reparam.total() == 0.0 {
        // ℓ_C ≡ 0: every set contains the previous ones
        let times = reparam.arc().times.clone();
        let n = times.len();
        let mut values = DMatrix::zeros(set.dim(), n);
        for j in 0..n {
            values.set_column(j, &start);
        }
        let trajectory = Trajectory {
            arc: Some(vec![0.0; n]),
            density: DMatrix::zeros(set.dim(), n),
            values,
            times,
            jumps: Vec::new(),
            initial: Some(y0.clone()),
        };
        return Ok(BrSolution {
            trajectory,
            reparam,
            lifted: None,
        });
    }

    let lifted = solve_lipschitz(&reparam, &start, config)?;
    let trajectory = lift_back(&reparam, &lifted, y0);
    Ok(BrSolution {
        trajectory,
        reparam,
        lifted: Some(lifted),
    })
}

enum Entry {
    /// σ-grid node `k`; `tail` marks later points of a plateau.
    Node { k: usize, tail: bool },
    Jump { atom: usize },
}

fn lift_back(reparam: &Reparametrization, lifted: &LipschitzSolution, y0: &Vector) -> Trajectory {
    let d = &lifted.discrete;
    let sig = &d.times;
    let node_of = |s: f64| -> usize {
        let k = sig.partition_point(|&x| x < s);
        // breakpoints are grid nodes; guard against a neighbour being closer
        if k < sig.len() && (k == 0 || (sig[k] - s).abs() <= (s - sig[k - 1]).abs()) {
            k
        } else {
            k - 1
        }
    };
    let arc = reparam.arc();
    let jump_times: Vec<f64> = arc.atoms.iter().map(|a| a.t).collect();
    let is_jump = |t: f64| jump_times.binary_search_by(|x| x.total_cmp(&t)).is_ok();

    let mut entries: Vec<(f64, f64, Entry)> = Vec::new();
    for piece in reparam.pieces() {
        let Piece::Segment {
            sigma: (a, b),
            times,
            sigmas,
            ..
        } = piece
        else {
            continue;
        };
        let lo = sig.partition_point(|&s| s < *a);
        let hi = sig.partition_point(|&s| s <= *b);
        for k in lo..hi {
            let t = super::reparam::inverse(times, sigmas, sig[k]);
            entries.push((t, sig[k], Entry::Node { k, tail: false }));
        }
        for i in 1..times.len() {
            if sigmas[i] == sigmas[i - 1] {
                entries.push((times[i], sigmas[i], Entry::Node { k: node_of(sigmas[i]), tail: true }));
            }
        }
    }
    entries.retain(|(t, _, _)| !is_jump(*t));
    for (i, atom) in arc.atoms.iter().enumerate() {
        entries.push((atom.t, arc.values[atom.index], Entry::Jump { atom: i }));
    }
    // stable: within equal times the first (non-tail) entry wins
    entries.sort_by(|x, y| x.0.total_cmp(&y.0));
    entries.dedup_by(|later, earlier| later.0 == earlier.0);

    let slopes = backward_slopes(sig, &d.points);
    let dim = d.dim();
    let n = entries.len();
    let mut times = Vec::with_capacity(n);
    let mut arcs = Vec::with_capacity(n);
    let mut values = DMatrix::zeros(dim, n);
    let mut density = DMatrix::zeros(dim, n);
    let mut jumps = Vec::new();
    for (j, (t, s, entry)) in entries.into_iter().enumerate() {
        times.push(t);
        arcs.push(s);
        match entry {
            Entry::Node { k, tail } => {
                values.set_column(j, &d.points.column(k));
                if !tail {
                    density.set_column(j, &slopes.column(k));
                }
            }
            Entry::Jump { atom } => {
                let a = arc.atoms[atom];
                let (sl, sa, sr) = (arc.left[a.index], arc.values[a.index], arc.right[a.index]);
                let left = d.points.column(node_of(sl)).into_owned();
                let at = d.points.column(node_of(sa)).into_owned();
                let right = d.points.column(node_of(sr)).into_owned();
                let chord = (&right - &left) / (sr - sl);
                values.set_column(j, &at);
                density.set_column(j, &chord);
                jumps.push(JumpState {
                    index: j,
                    t,
                    left: left.iter().copied().collect(),
                    right: right.iter().copied().collect(),
                    arc: (sl, sr),
                    density: chord.iter().copied().collect(),
                });
            }
        }
    }
    Trajectory {
        times,
        arc: Some(arcs),
        values,
        density,
        jumps,
        initial: Some(y0.clone()),
    }
}
