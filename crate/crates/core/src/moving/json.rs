use serde::{Deserialize, Serialize};

use super::{JumpDecl, MovingSet, Segment, SetFamily};
use crate::convex::ConvexSet;
use crate::error::SweepError;

/// ```json
/// {"horizon": 2,
///  "segments": [{"from": 0, "to": 2, "lipschitz": 1, "shape": "ball",
///                "params": {"center": {"coeffs": [[0, 0], [1, 0]]}, "radius": 1}}],
///  "jumps": []}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MovingSetSpec {
    pub horizon: f64,
    pub segments: Vec<SegmentSpec>,
    #[serde(default)]
    pub jumps: Vec<JumpSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentSpec {
    pub from: f64,
    pub to: f64,
    pub lipschitz: f64,
    #[serde(flatten)]
    pub family: SetFamily,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpSpec {
    pub t: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<ConvexSet>,
    pub at: ConvexSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<ConvexSet>,
}

impl TryFrom<MovingSetSpec> for MovingSet {
    type Error = SweepError;

    fn try_from(spec: MovingSetSpec) -> Result<Self, SweepError> {
        let segments = spec
            .segments
            .into_iter()
            .map(|s| Segment {
                from: s.from,
                to: s.to,
                family: s.family,
                lipschitz: s.lipschitz,
            })
            .collect();
        let jumps = spec
            .jumps
            .into_iter()
            .map(|j| JumpDecl {
                t: j.t,
                left: j.left,
                at: j.at,
                right: j.right,
            })
            .collect();
        MovingSet::new(spec.horizon, segments, jumps)
    }
}

impl From<&MovingSet> for MovingSetSpec {
    fn from(m: &MovingSet) -> Self {
        MovingSetSpec {
            horizon: m.horizon,
            segments: m
                .segments
                .iter()
                .map(|s| SegmentSpec {
                    from: s.from,
                    to: s.to,
                    lipschitz: s.lipschitz,
                    family: s.family.clone(),
                })
                .collect(),
            jumps: m
                .jumps
                .iter()
                .map(|j| JumpSpec {
                    t: j.t,
                    left: Some(j.left.clone()),
                    at: j.at.clone(),
                    right: Some(j.right.clone()),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moving::Side;

    const BALL_JUMP: &str = r#"{
        "horizon": 2,
        "segments": [
            {"from": 0, "to": 1, "lipschitz": 0, "shape": "constant",
             "params": {"set": {"shape": "ball", "center": [0, 0], "radius": 1}}},
            {"from": 1, "to": 2, "lipschitz": 0, "shape": "constant",
             "params": {"set": {"shape": "ball", "center": [4, 0], "radius": 1}}}
        ],
        "jumps": [{"t": 1, "at": {"shape": "ball", "center": [4, 0], "radius": 1}}]
    }"#;

    #[test]
    fn parse_jump_scenario() {
        let spec: MovingSetSpec = serde_json::from_str(BALL_JUMP).unwrap();
        let m = MovingSet::try_from(spec).unwrap();
        assert_eq!(m.jump_times(), vec![(1.0, 4.0, 0.0)]);
        assert_eq!(m.dim(), 2);
        let spec = MovingSetSpec::from(&m);
        let text = serde_json::to_string(&spec).unwrap();
        let back = MovingSet::try_from(serde_json::from_str::<MovingSetSpec>(&text).unwrap()).unwrap();
        assert_eq!(back.set_at(1.0, Side::Left).unwrap(), m.set_at(1.0, Side::Left).unwrap());
        assert_eq!(back, m);
    }

    #[test]
    fn unknown_shape_is_a_parse_error() {
        let text = BALL_JUMP.replace("\"constant\"", "\"blob\"");
        assert!(serde_json::from_str::<MovingSetSpec>(&text).is_err());
    }
}
