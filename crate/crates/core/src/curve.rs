use crate::convex::ConvexSet;
use crate::error::SweepError;
use crate::moving::{MovingSet, Side};

/// A continuous set-valued curve on `[0, horizon]` whose excess grows at most
/// linearly: `e(C(s), C(t)) ≤ L·(t − s)` for `s < t` (at `s = 0` the value
/// `C(0)` is used even where the curve is only right-continuous there).
pub trait SetCurve: Sync {
    fn dim(&self) -> usize;
    fn horizon(&self) -> f64;
    fn set_at(&self, t: f64) -> Result<ConvexSet, SweepError>;
    fn lipschitz(&self) -> f64;

    /// Interior times the time grid must contain.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    fn has_jumps(&self) -> bool {
        false
    }
}

impl SetCurve for MovingSet {
    fn dim(&self) -> usize {
        MovingSet::dim(self)
    }

    fn horizon(&self) -> f64 {
        MovingSet::horizon(self)
    }

    fn set_at(&self, t: f64) -> Result<ConvexSet, SweepError> {
        MovingSet::set_at(self, t, Side::At)
    }

    fn lipschitz(&self) -> f64 {
        MovingSet::lipschitz(self)
    }

    fn breakpoints(&self) -> Vec<f64> {
        MovingSet::breakpoints(self)
    }

    fn has_jumps(&self) -> bool {
        MovingSet::has_jumps(self)
    }
}
