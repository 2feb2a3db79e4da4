//! Catching-up scheme, dyadic refinement and the bounded-retraction solver.

mod br;
mod catching_up;
mod reparam;
mod trajectory;

pub use br::{solve_br, solve_br_with_fill, BrSolution};
pub use catching_up::{
    catching_up, cauchy_bound, compare_levels, convergence_table, dyadic_grid, level_cap, solve_lipschitz, time_scale,
    LevelRow, LipschitzSolution, SolveStats, SolverConfig,
};
pub use reparam::{FillKind, Location, Piece, Reparametrization};
pub use trajectory::{DiscreteTrajectory, JumpState, Trajectory};
