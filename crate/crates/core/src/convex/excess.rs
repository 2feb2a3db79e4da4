//! Excess `e(A, B) = sup_{a ∈ A} d(a, B)` between convex sets.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{ConvexError, ConvexSet, Extended, Shape, Vector};
use crate::par::*;

pub const DEFAULT_MC_SAMPLES: usize = 4096;

/// Vertex enumeration is refused above this dimension (2ⁿ vertices).
const MAX_VERTEX_DIM: usize = 20;

const MC_CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExcessMethod {
    /// Exact rules first, Monte Carlo otherwise.
    Auto,
    /// Closed-form rules, including vertex enumeration of boxes.
    ClosedForm,
    VertexEnum,
    MonteCarlo { samples: usize, seed: u64 },
}

/// `exact == false` means `value` is only a certified lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcessResult {
    pub value: Extended,
    pub exact: bool,
}

impl ExcessResult {
    fn exact(value: Extended) -> Self {
        Self { value, exact: true }
    }

    /// The value when it is exact and finite.
    pub fn exact_finite(&self) -> Option<f64> {
        if self.exact {
            self.value.finite()
        } else {
            None
        }
    }
}

impl ConvexSet {
    pub fn excess(&self, other: &ConvexSet, method: ExcessMethod) -> Result<ExcessResult, ConvexError> {
        if self.dim != other.dim {
            return Err(ConvexError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        match method {
            ExcessMethod::ClosedForm => closed_form(self, other)?
                .map(ExcessResult::exact)
                .ok_or_else(|| unsupported("no closed form for this shape pair")),
            ExcessMethod::VertexEnum => vertex_enumeration(self, other)?
                .map(|v| ExcessResult::exact(Extended::Finite(v)))
                .ok_or_else(|| unsupported("vertex enumeration needs a box or a point as first argument")),
            ExcessMethod::MonteCarlo { samples, seed } => monte_carlo(self, other, samples, seed),
            ExcessMethod::Auto => match closed_form(self, other)? {
                Some(v) => Ok(ExcessResult::exact(v)),
                None => monte_carlo(self, other, DEFAULT_MC_SAMPLES, 0),
            },
        }
    }
}

fn unsupported(msg: &str) -> ConvexError {
    ConvexError::UnsupportedExcess(msg.to_string())
}

fn closed_form(a: &ConvexSet, b: &ConvexSet) -> Result<Option<Extended>, ConvexError> {
    if a == b {
        return Ok(Some(Extended::Finite(0.0)));
    }
    if let Some(p) = a.as_point() {
        return Ok(Some(Extended::Finite(b.distance(p)?)));
    }
    match (&a.shape, &b.shape) {
        // d(x, Ball(c, r)) = max(0, ‖x − c‖ − r)
        (_, Shape::Ball { center, radius }) => {
            if let Some(far) = a.farthest_distance(center) {
                return Ok(Some(Extended::Finite((far - radius).max(0.0))));
            }
        }
        // d(x, {⟨n, ·⟩ ≥ β}) = max(0, β − ⟨n, x⟩)
        (_, Shape::HalfSpace { normal, offset }) => {
            let s = a.support_unchecked(&-normal);
            if s.exact {
                return Ok(Some(s.value.map(|v| (offset + v).max(0.0))));
            }
        }
        // d(x, K + D_r) = max(0, d(x, K) − r)
        (_, Shape::Dilation { base, radius }) => {
            if let Some(e) = closed_form(a, base)? {
                return Ok(Some(e.map(|v| (v - radius).max(0.0))));
            }
        }
        _ => {}
    }
    match &a.shape {
        Shape::Dilation { base, radius } => {
            if **base == *b {
                let v = if b.is_whole_space() { 0.0 } else { *radius };
                return Ok(Some(Extended::Finite(v)));
            }
            // sup over K + D_r of d(·, B) is e(K, B) + r once e(K, B) > 0
            match closed_form(base, b)? {
                Some(Extended::Finite(e)) if e > 0.0 => return Ok(Some(Extended::Finite(e + radius))),
                Some(Extended::Infinite) => return Ok(Some(Extended::Infinite)),
                _ => {}
            }
        }
        Shape::Ball { center, radius } => {
            let d = b.distance(center)?;
            if d > 1e-12 {
                return Ok(Some(Extended::Finite(d + radius)));
            }
        }
        _ => {}
    }
    if let Some(e) = translate_pair(a, b)? {
        return Ok(Some(e));
    }
    if let (Shape::Affine { point, basis }, Shape::Affine { basis: basis_b, .. }) = (&a.shape, &b.shape) {
        let inside = basis.iter().all(|d| {
            let residual = d - basis_b.iter().fold(Vector::zeros(d.len()), |acc, e| acc + e * e.dot(d));
            residual.norm() <= 1e-12
        });
        return Ok(Some(if inside {
            Extended::Finite(b.distance(point)?)
        } else {
            Extended::Infinite
        }));
    }
    if !a.is_bounded() && b.is_bounded() {
        return Ok(Some(Extended::Infinite));
    }
    Ok(vertex_enumeration(a, b)?.map(Extended::Finite))
}

/// `e(K + a, K + b) = ‖a − b‖` whenever `K` has a finite support value in the
/// direction `a − b`: the support point of `K` pushed by `a − b` sits exactly
/// `‖a − b‖` away from `K`.
fn translate_pair(a: &ConvexSet, b: &ConvexSet) -> Result<Option<Extended>, ConvexError> {
    let zero = Vector::zeros(a.dim);
    let split = |k: &ConvexSet| -> (ConvexSet, Vector) {
        match &k.shape {
            Shape::Translate { base, offset } => ((**base).clone(), offset.clone()),
            _ => (k.clone(), zero.clone()),
        }
    };
    if !matches!(a.shape, Shape::Translate { .. }) && !matches!(b.shape, Shape::Translate { .. }) {
        return Ok(None);
    }
    let (ka, oa) = split(a);
    let (kb, ob) = split(b);
    if ka != kb {
        return Ok(None);
    }
    let delta = oa - ob;
    let n = delta.norm();
    if n == 0.0 {
        return Ok(Some(Extended::Finite(0.0)));
    }
    match ka.support_unchecked(&delta).value {
        Extended::Finite(_) => Ok(Some(Extended::Finite(n))),
        Extended::Infinite => Ok(None),
    }
}

/// `d(·, B)` is convex, so over a polytope its maximum sits at a vertex.
fn vertex_enumeration(a: &ConvexSet, b: &ConvexSet) -> Result<Option<f64>, ConvexError> {
    if let Some(p) = a.as_point() {
        return Ok(Some(b.distance(p)?));
    }
    let Shape::Box { lo, hi } = &a.shape else {
        return Ok(None);
    };
    let n = a.dim;
    if n > MAX_VERTEX_DIM {
        return Ok(None);
    }
    // degenerate axes contribute a single coordinate
    let free: Vec<usize> = (0..n).filter(|&i| lo[i] < hi[i]).collect();
    let count = 1usize << free.len();
    let distances: Vec<Result<f64, ConvexError>> = (0..count)
        .into_par_iter()
        .map(|mask| {
            let mut v = lo.clone();
            for (bit, &i) in free.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    v[i] = hi[i];
                }
            }
            b.distance(&v)
        })
        .collect();
    let mut best = 0.0f64;
    for d in distances {
        best = best.max(d?);
    }
    Ok(Some(best))
}

/// Lower bound from boundary samples `P_A(c + R·u)` with `u` uniform on the
/// sphere and `R` beyond the extent of `A`. Deterministic for a given seed
/// regardless of thread count.
fn monte_carlo(a: &ConvexSet, b: &ConvexSet, samples: usize, seed: u64) -> Result<ExcessResult, ConvexError> {
    if !a.is_bounded() {
        return Err(unsupported("Monte-Carlo excess needs a bounded first set"));
    }
    let origin = Vector::zeros(a.dim);
    let center = a.project(&origin)?;
    let extent = a
        .extent_bound(&center)
        .ok_or_else(|| unsupported("cannot bound the extent of the first set"))?;
    let radius = 2.0 * extent + 1.0;
    let chunks = samples.div_ceil(MC_CHUNK).max(1);
    let per_chunk: Vec<Result<f64, ConvexError>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (chunk as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let count = MC_CHUNK.min(samples.saturating_sub(chunk * MC_CHUNK)).max(1);
            let mut best = 0.0f64;
            for _ in 0..count {
                let dir = Vector::from_fn(a.dim, |_, _| StandardNormal.sample(&mut rng));
                let n = dir.norm();
                if n == 0.0 {
                    continue;
                }
                let z = &center + dir * (radius / n);
                let p = a.project(&z)?;
                best = best.max(b.distance(&p)?);
            }
            Ok(best)
        })
        .collect();
    let mut best = b.distance(&center)?;
    for v in per_chunk {
        best = best.max(v?);
    }
    Ok(ExcessResult {
        value: Extended::Finite(best),
        exact: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::DykstraConfig;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    fn ball(c: &[f64], r: f64) -> ConvexSet {
        ConvexSet::new_ball(v(c), r).unwrap()
    }

    fn exact(a: &ConvexSet, b: &ConvexSet) -> f64 {
        let r = a.excess(b, ExcessMethod::Auto).unwrap();
        assert!(r.exact, "expected exact excess for {a:?} over {b:?}");
        r.value.finite().unwrap()
    }

    /// Brute-force oracle: max of d(a, B) over a dense angular sampling of the
    /// boundary of a 2-D ball A.
    fn sampled_ball_excess(c: [f64; 2], r: f64, b: &ConvexSet) -> f64 {
        (0..20_000)
            .map(|k| {
                let th = k as f64 * std::f64::consts::TAU / 20_000.0;
                b.distance(&v(&[c[0] + r * th.cos(), c[1] + r * th.sin()])).unwrap()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn self_excess_is_zero() {
        let sets = [
            ball(&[1.0, 2.0], 3.0),
            ConvexSet::new_box(v(&[0.0, 0.0]), v(&[1.0, 2.0])).unwrap(),
            ConvexSet::new_halfspace(v(&[0.0, 1.0]), 2.0).unwrap(),
        ];
        for s in &sets {
            assert_eq!(exact(s, s), 0.0);
        }
    }

    #[test]
    fn ball_pairs_match_sampling_oracle() {
        // frozen from the sampling oracle: 1 and 3
        let oracle = sampled_ball_excess([0.0, 0.0], 2.0, &ball(&[0.0, 0.0], 1.0));
        assert!((oracle - 1.0).abs() < 1e-6);
        assert_eq!(exact(&ball(&[0.0, 0.0], 2.0), &ball(&[0.0, 0.0], 1.0)), 1.0);
        let oracle = sampled_ball_excess([3.0, 0.0], 1.0, &ball(&[0.0, 0.0], 1.0));
        assert!((oracle - 3.0).abs() < 1e-6);
        assert_eq!(exact(&ball(&[3.0, 0.0], 1.0), &ball(&[0.0, 0.0], 1.0)), 3.0);
        assert_eq!(exact(&ball(&[0.0, 0.0], 1.0), &ball(&[0.0, 0.0], 2.0)), 0.0);
    }

    #[test]
    fn ball_over_box_and_halfspace() {
        let bx = ConvexSet::new_box(v(&[0.0, 0.0]), v(&[1.0, 1.0])).unwrap();
        let a = ball(&[3.0, 0.5], 0.5);
        let oracle = sampled_ball_excess([3.0, 0.5], 0.5, &bx);
        assert!((exact(&a, &bx) - oracle).abs() < 1e-6);
        let h = ConvexSet::new_halfspace(v(&[1.0, 0.0]), 0.0).unwrap();
        let a = ball(&[-1.0, 4.0], 0.25);
        assert_eq!(exact(&a, &h), 1.25);
        assert_eq!(exact(&ball(&[2.0, 0.0], 1.0), &h), 0.0);
    }

    #[test]
    fn box_vertex_enumeration() {
        let a = ConvexSet::new_box(v(&[0.0, 0.0]), v(&[2.0, 2.0])).unwrap();
        let b = ball(&[0.0, 0.0], 1.0);
        // farthest vertex (2, 2)
        assert!((exact(&a, &b) - (8f64.sqrt() - 1.0)).abs() < 1e-14);
        let shifted = ConvexSet::new_box(v(&[0.5, 0.0]), v(&[2.5, 2.0])).unwrap();
        assert!((exact(&shifted, &a) - 0.5).abs() < 1e-15);
        let r = a.excess(&b, ExcessMethod::VertexEnum).unwrap();
        assert!(r.exact);
    }

    #[test]
    fn halfspace_pairs() {
        let h1 = ConvexSet::new_halfspace(v(&[1.0, 0.0]), 1.0).unwrap();
        let h2 = ConvexSet::new_halfspace(v(&[1.0, 0.0]), 3.0).unwrap();
        assert_eq!(exact(&h1, &h2), 2.0);
        assert_eq!(exact(&h2, &h1), 0.0);
        let tilted = ConvexSet::new_halfspace(v(&[0.0, 1.0]), 0.0).unwrap();
        let r = h1.excess(&tilted, ExcessMethod::Auto).unwrap();
        assert!(r.exact && r.value.is_infinite());
        let r = h1.excess(&ball(&[0.0, 0.0], 1.0), ExcessMethod::Auto).unwrap();
        assert!(r.exact && r.value.is_infinite());
    }

    #[test]
    fn dilation_rules() {
        let bx = ConvexSet::new_box(v(&[0.0, 0.0]), v(&[1.0, 1.0])).unwrap();
        let d1 = bx.dilate(1.0).unwrap();
        let d3 = bx.dilate(3.0).unwrap();
        assert_eq!(exact(&d3, &d1), 2.0);
        assert_eq!(exact(&d1, &d3), 0.0);
        assert_eq!(exact(&d1, &bx), 1.0);
        let far = ConvexSet::new_box(v(&[5.0, 0.0]), v(&[6.0, 1.0])).unwrap();
        // farthest vertex (6, 0) is 5 from the box, 4 from its dilation
        assert_eq!(exact(&far, &d1), 4.0);
        // (0, y) is 5 from `far`; the dilation pushes it one further
        assert_eq!(exact(&d1, &far), 6.0);
    }

    #[test]
    fn translates_of_a_common_base() {
        let cap = ConvexSet::new_intersection(
            vec![ball(&[0.0, 0.0], 1.0), ConvexSet::new_halfspace(v(&[0.0, 1.0]), 0.0).unwrap()],
            v(&[0.0, 0.5]),
            DykstraConfig::default(),
        )
        .unwrap();
        let a = cap.translate(&v(&[0.3, 0.4])).unwrap();
        assert!((exact(&a, &cap) - 0.5).abs() < 1e-15);
        let b = cap.translate(&v(&[-0.3, 0.0])).unwrap();
        assert!((exact(&a, &b) - (0.36f64 + 0.16).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn affine_pairs() {
        let line = ConvexSet::new_affine(v(&[0.0, 1.0, 0.0]), vec![v(&[1.0, 0.0, 0.0])]).unwrap();
        let plane = ConvexSet::new_affine(v(&[0.0, 0.0, 3.0]), vec![v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0])]).unwrap();
        assert_eq!(exact(&line, &plane), 3.0);
        let r = plane.excess(&line, ExcessMethod::Auto).unwrap();
        assert!(r.exact && r.value.is_infinite());
    }

    #[test]
    fn monte_carlo_is_a_flagged_lower_bound() {
        let cap = ConvexSet::new_intersection(
            vec![ball(&[0.0, 0.0], 1.0), ConvexSet::new_halfspace(v(&[0.0, 1.0]), 0.0).unwrap()],
            v(&[0.0, 0.5]),
            DykstraConfig::default(),
        )
        .unwrap();
        let b = ball(&[0.0, -2.0], 0.5);
        let r = cap.excess(&b, ExcessMethod::Auto).unwrap();
        assert!(!r.exact);
        // true value: the top of the cap (0, 1) is 3 from the center, minus 0.5
        let v = r.value.finite().unwrap();
        assert!(v <= 2.5 + 1e-9 && v > 2.49, "{v}");
        let again = cap.excess(&b, ExcessMethod::Auto).unwrap();
        assert_eq!(r, again);
        assert!(cap.excess(&b, ExcessMethod::ClosedForm).is_err());
    }

    #[test]
    fn unbounded_without_closed_form_is_unsupported() {
        let h = ConvexSet::new_halfspace(v(&[1.0, 0.0]), 0.0).unwrap();
        let tilted = ConvexSet::new_halfspace(v(&[-1.0, 1.0]), 0.0).unwrap();
        let slab = ConvexSet::new_intersection(
            vec![h.clone(), ConvexSet::new_halfspace(v(&[-1.0, 0.0]), -1.0).unwrap()],
            v(&[0.5, 0.0]),
            DykstraConfig::default(),
        )
        .unwrap();
        assert!(matches!(
            slab.excess(&tilted, ExcessMethod::Auto),
            Err(ConvexError::UnsupportedExcess(_))
        ));
    }
}
