//! Filling a jump by linear center interpolation instead of the excess
//! geodesic breaks the jump condition; the geodesic fill satisfies it.

mod common;

use common::{ball_projection, v};
use sweeping::convex::ConvexSet;
use sweeping::moving::{JumpDecl, MovingSet, Segment, SetFamily};
use sweeping::solver::{solve_br_with_fill, FillKind, SolverConfig};
use sweeping::verify::check_jump_conditions;

fn two_balls() -> MovingSet {
    let a = ConvexSet::new_ball(v(&[0.0, 0.0]), 1.0).unwrap();
    let b = ConvexSet::new_ball(v(&[0.0, 3.0]), 1.0).unwrap();
    let constant = |from, to, set: &ConvexSet| Segment {
        from,
        to,
        family: SetFamily::Constant { set: set.clone() },
        lipschitz: 0.0,
    };
    MovingSet::new(
        2.0,
        vec![constant(0.0, 1.0, &a), constant(1.0, 2.0, &b)],
        vec![JumpDecl {
            t: 1.0,
            left: None,
            at: b.clone(),
            right: None,
        }],
    )
    .unwrap()
}

#[test]
fn geodesic_fill_lands_on_the_projection() {
    let m = two_balls();
    let y0 = v(&[0.9, 0.0]);
    let sol = solve_br_with_fill(&m, &y0, &SolverConfig::default(), FillKind::Geodesic).unwrap();
    let y = &sol.trajectory;
    let j = y.jump_at(1.0).unwrap();
    let oracle = ball_projection(&v(&[0.0, 3.0]), 1.0, &y0);
    assert!((y.value(j.index) - &oracle).norm() < 1e-6);
    assert!(check_jump_conditions(y, &m, 1e-6).unwrap().passed);
}

#[test]
fn linear_fill_misses_the_projection() {
    let m = two_balls();
    let y0 = v(&[0.9, 0.0]);
    let sol = solve_br_with_fill(&m, &y0, &SolverConfig::default(), FillKind::LinearBall).unwrap();
    let y = &sol.trajectory;
    let j = y.jump_at(1.0).unwrap();
    let oracle = ball_projection(&v(&[0.0, 3.0]), 1.0, &y0);
    let miss = (y.value(j.index) - &oracle).norm();
    // dragging along the segment ends at the bottom of the target ball
    // rather than at the projection of the starting point
    assert!(miss > 0.1, "miss = {miss}");
    let report = check_jump_conditions(y, &m, 1e-6).unwrap();
    assert!(!report.passed);
    assert_eq!(report.location, Some(1.0));
}
