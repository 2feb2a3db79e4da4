use serde::{Deserialize, Serialize};

use super::{ConvexError, ConvexSet, DykstraConfig, Shape, Vector};

/// Serialized form of a [`ConvexSet`], tagged by `"shape"`.
///
/// ```json
/// {"shape": "ball", "center": [0.0, 0.0], "radius": 1.0}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase", deny_unknown_fields)]
pub enum ConvexSetSpec {
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    HalfSpace {
        normal: Vec<f64>,
        offset: f64,
    },
    Point {
        point: Vec<f64>,
    },
    Affine {
        point: Vec<f64>,
        basis: Vec<Vec<f64>>,
    },
    Translate {
        base: Box<ConvexSetSpec>,
        offset: Vec<f64>,
    },
    Dilation {
        base: Box<ConvexSetSpec>,
        radius: f64,
    },
    Intersection {
        members: Vec<ConvexSetSpec>,
        witness: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_iter: Option<usize>,
    },
}

fn vec(xs: Vec<f64>) -> Vector {
    Vector::from_vec(xs)
}

fn raw(v: &Vector) -> Vec<f64> {
    v.iter().copied().collect()
}

impl TryFrom<ConvexSetSpec> for ConvexSet {
    type Error = ConvexError;

    fn try_from(spec: ConvexSetSpec) -> Result<Self, ConvexError> {
        match spec {
            ConvexSetSpec::Ball { center, radius } => ConvexSet::new_ball(vec(center), radius),
            ConvexSetSpec::Box { lo, hi } => ConvexSet::new_box(vec(lo), vec(hi)),
            ConvexSetSpec::HalfSpace { normal, offset } => ConvexSet::new_halfspace(vec(normal), offset),
            ConvexSetSpec::Point { point } => ConvexSet::new_point(vec(point)),
            ConvexSetSpec::Affine { point, basis } => {
                ConvexSet::new_affine(vec(point), basis.into_iter().map(vec).collect())
            }
            ConvexSetSpec::Translate { base, offset } => ConvexSet::try_from(*base)?.translate(&vec(offset)),
            ConvexSetSpec::Dilation { base, radius } => ConvexSet::try_from(*base)?.dilate(radius),
            ConvexSetSpec::Intersection {
                members,
                witness,
                tol,
                max_iter,
            } => {
                let defaults = DykstraConfig::default();
                let config = DykstraConfig {
                    tol: tol.unwrap_or(defaults.tol),
                    max_iter: max_iter.unwrap_or(defaults.max_iter),
                };
                let members = members
                    .into_iter()
                    .map(ConvexSet::try_from)
                    .collect::<Result<Vec<_>, _>>()?;
                ConvexSet::new_intersection(members, vec(witness), config)
            }
        }
    }
}

impl From<ConvexSet> for ConvexSetSpec {
    fn from(set: ConvexSet) -> Self {
        match set.shape {
            Shape::Ball { center, radius } => ConvexSetSpec::Ball {
                center: raw(&center),
                radius,
            },
            Shape::Box { lo, hi } => ConvexSetSpec::Box {
                lo: raw(&lo),
                hi: raw(&hi),
            },
            Shape::HalfSpace { normal, offset } => ConvexSetSpec::HalfSpace {
                normal: raw(&normal),
                offset,
            },
            Shape::Affine { point, basis } if basis.is_empty() => ConvexSetSpec::Point { point: raw(&point) },
            Shape::Affine { point, basis } => ConvexSetSpec::Affine {
                point: raw(&point),
                basis: basis.iter().map(raw).collect(),
            },
            Shape::Translate { base, offset } => ConvexSetSpec::Translate {
                base: Box::new((*base).into()),
                offset: raw(&offset),
            },
            Shape::Dilation { base, radius } => ConvexSetSpec::Dilation {
                base: Box::new((*base).into()),
                radius,
            },
            Shape::Intersection {
                members,
                witness,
                config,
            } => ConvexSetSpec::Intersection {
                members: members.into_iter().map(Into::into).collect(),
                witness: raw(&witness),
                tol: Some(config.tol),
                max_iter: Some(config.max_iter),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_ball() {
        let k: ConvexSet = serde_json::from_str(r#"{"shape": "ball", "center": [1, 2], "radius": 0.5}"#).unwrap();
        assert_eq!(k, ConvexSet::new_ball(Vector::from_vec(vec![1.0, 2.0]), 0.5).unwrap());
    }

    #[test]
    fn round_trip_nested() {
        let text = r#"{
            "shape": "translate",
            "offset": [0.5, 0.0],
            "base": {
                "shape": "intersection",
                "witness": [0.0, 0.5],
                "members": [
                    {"shape": "ball", "center": [0, 0], "radius": 1},
                    {"shape": "halfspace", "normal": [0, 1], "offset": 0}
                ]
            }
        }"#;
        let k: ConvexSet = serde_json::from_str(text).unwrap();
        let back: ConvexSet = serde_json::from_str(&serde_json::to_string(&k).unwrap()).unwrap();
        assert_eq!(k, back);
    }

    #[test]
    fn invalid_sets_fail_to_parse() {
        let bad = [
            r#"{"shape": "ball", "center": [0], "radius": -1}"#,
            r#"{"shape": "box", "lo": [1], "hi": [0]}"#,
            r#"{"shape": "blob"}"#,
            r#"{"shape": "ball", "center": [0], "radius": 1, "extra": 2}"#,
        ];
        for text in bad {
            assert!(serde_json::from_str::<ConvexSet>(text).is_err(), "{text}");
        }
    }
}
