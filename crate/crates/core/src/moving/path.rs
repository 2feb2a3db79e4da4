use serde::{Deserialize, Serialize};

use crate::convex::Vector;
use crate::error::SweepError;

/// Piecewise polynomial `t ↦ Σ_k c_k (t − from)^k` with vector coefficients.
///
/// Pieces are sorted by `from`; a piece is in force from its `from` until the
/// next one starts. Scalar paths are paths of width one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PathSpec", into = "PathSpec")]
pub struct PolyPath {
    width: usize,
    pieces: Vec<Piece>,
}

#[derive(Debug, Clone, PartialEq)]
struct Piece {
    from: f64,
    coeffs: Vec<Vector>,
}

impl PolyPath {
    pub fn constant(value: Vector) -> Self {
        Self {
            width: value.len(),
            pieces: vec![Piece {
                from: 0.0,
                coeffs: vec![value],
            }],
        }
    }

    pub fn scalar(value: f64) -> Self {
        Self::constant(Vector::from_element(1, value))
    }

    /// `start + velocity·t`.
    pub fn linear(start: Vector, velocity: Vector) -> Self {
        Self::polynomial(0.0, vec![start, velocity]).expect("matching widths")
    }

    pub fn polynomial(from: f64, coeffs: Vec<Vector>) -> Result<Self, SweepError> {
        Self::from_pieces(vec![(from, coeffs)])
    }

    pub fn from_pieces(pieces: Vec<(f64, Vec<Vector>)>) -> Result<Self, SweepError> {
        let invalid = |msg: String| Err(SweepError::InvalidPath(msg));
        let Some(first) = pieces.first() else {
            return invalid("a path needs at least one piece".into());
        };
        let Some(width) = first.1.first().map(|c| c.len()) else {
            return invalid("a piece needs at least one coefficient".into());
        };
        let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
        for (from, coeffs) in pieces {
            if !from.is_finite() {
                return invalid(format!("piece start {from} is not finite"));
            }
            if let Some(prev) = out.last() {
                if from <= prev.from {
                    return invalid("piece starts must be strictly increasing".into());
                }
            }
            if coeffs.is_empty() {
                return invalid("a piece needs at least one coefficient".into());
            }
            if coeffs.iter().any(|c| c.len() != width) {
                return invalid(format!("all coefficients must have width {width}"));
            }
            if coeffs.iter().any(|c| c.iter().any(|x| !x.is_finite())) {
                return invalid("coefficients must be finite".into());
            }
            out.push(Piece { from, coeffs });
        }
        Ok(Self { width, pieces: out })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    fn piece(&self, t: f64) -> &Piece {
        let idx = self.pieces.partition_point(|p| p.from <= t);
        &self.pieces[idx.saturating_sub(1)]
    }

    pub fn eval(&self, t: f64) -> Vector {
        let p = self.piece(t);
        let s = t - p.from;
        // Horner
        let mut acc = p.coeffs.last().unwrap().clone();
        for c in p.coeffs.iter().rev().skip(1) {
            acc *= s;
            acc += c;
        }
        acc
    }

    pub fn eval_scalar(&self, t: f64) -> f64 {
        self.eval(t)[0]
    }

    /// Interior piece starts inside `(a, b)`.
    pub fn breaks_in(&self, a: f64, b: f64) -> Vec<f64> {
        self.pieces.iter().map(|p| p.from).filter(|&f| f > a && f < b).collect()
    }

    /// Largest jump of the path across its interior piece starts in `(a, b)`.
    pub fn max_break_gap(&self, a: f64, b: f64) -> f64 {
        self.pieces
            .windows(2)
            .filter(|w| w[1].from > a && w[1].from < b)
            .map(|w| {
                let t = w[1].from;
                let left = {
                    let s = t - w[0].from;
                    w[0].coeffs.iter().rev().fold(Vector::zeros(self.width), |acc, c| acc * s + c)
                };
                (left - &w[1].coeffs[0]).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// JSON forms: a number, an array of numbers, `{"coeffs": [...], "from": a}`
/// or `{"pieces": [{"from": a, "coeffs": [...]}, ...]}`. Each coefficient is a
/// number or an array of numbers.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PathSpec {
    Scalar(f64),
    Vector(Vec<f64>),
    Polynomial {
        #[serde(default)]
        from: f64,
        coeffs: Vec<Coeff>,
    },
    Pieces {
        pieces: Vec<PieceSpec>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub from: f64,
    pub coeffs: Vec<Coeff>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Coeff {
    fn into_vector(self) -> Vector {
        match self {
            Coeff::Scalar(x) => Vector::from_element(1, x),
            Coeff::Vector(v) => Vector::from_vec(v),
        }
    }
}

impl TryFrom<PathSpec> for PolyPath {
    type Error = SweepError;

    fn try_from(spec: PathSpec) -> Result<Self, SweepError> {
        let coeffs = |cs: Vec<Coeff>| cs.into_iter().map(Coeff::into_vector).collect::<Vec<_>>();
        match spec {
            PathSpec::Scalar(x) => PolyPath::polynomial(0.0, vec![Vector::from_element(1, x)]),
            PathSpec::Vector(v) => PolyPath::polynomial(0.0, vec![Vector::from_vec(v)]),
            PathSpec::Polynomial { from, coeffs: cs } => PolyPath::polynomial(from, coeffs(cs)),
            PathSpec::Pieces { pieces } => {
                PolyPath::from_pieces(pieces.into_iter().map(|p| (p.from, coeffs(p.coeffs))).collect())
            }
        }
    }
}

impl From<PolyPath> for PathSpec {
    fn from(path: PolyPath) -> Self {
        let coeff = |c: &Vector| {
            if path.width == 1 {
                Coeff::Scalar(c[0])
            } else {
                Coeff::Vector(c.iter().copied().collect())
            }
        };
        PathSpec::Pieces {
            pieces: path
                .pieces
                .iter()
                .map(|p| PieceSpec {
                    from: p.from,
                    coeffs: p.coeffs.iter().map(coeff).collect(),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        let p: PolyPath = serde_json::from_str("2.5").unwrap();
        assert_eq!(p.eval_scalar(7.0), 2.5);
        let p: PolyPath = serde_json::from_str("[1, 2]").unwrap();
        assert_eq!(p.eval(3.0), Vector::from_vec(vec![1.0, 2.0]));
        let p: PolyPath = serde_json::from_str(r#"{"coeffs": [[0, 0], [1, 0], [0, 2]]}"#).unwrap();
        assert_eq!(p.eval(0.5), Vector::from_vec(vec![0.5, 0.5]));
        let p: PolyPath = serde_json::from_str(r#"{"coeffs": [1, 1], "from": 1}"#).unwrap();
        assert_eq!(p.eval_scalar(3.0), 3.0);
    }

    #[test]
    fn pieces_switch_at_their_start() {
        let p: PolyPath =
            serde_json::from_str(r#"{"pieces": [{"from": 0, "coeffs": [0, 1]}, {"from": 1, "coeffs": [1]}]}"#).unwrap();
        assert_eq!(p.eval_scalar(0.5), 0.5);
        assert_eq!(p.eval_scalar(1.0), 1.0);
        assert_eq!(p.eval_scalar(2.0), 1.0);
        assert_eq!(p.breaks_in(0.0, 2.0), vec![1.0]);
        assert_eq!(p.max_break_gap(0.0, 2.0), 0.0);
        let back: PolyPath = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn invalid_paths() {
        assert!(serde_json::from_str::<PolyPath>(r#"{"coeffs": []}"#).is_err());
        assert!(serde_json::from_str::<PolyPath>(r#"{"coeffs": [[1, 2], [1]]}"#).is_err());
        assert!(serde_json::from_str::<PolyPath>(
            r#"{"pieces": [{"from": 1, "coeffs": [0]}, {"from": 0, "coeffs": [1]}]}"#
        )
        .is_err());
    }
}
