//! Scenario files: a moving set, an initial point and solver/check settings,
//! plus the pipeline that solves, certifies and writes the artifacts.

mod csv_io;
mod run;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::convex::Vector;
use crate::error::SweepError;
use crate::moving::{MovingSet, MovingSetSpec};
use crate::solver::SolverConfig;

pub use csv_io::{read_trajectory_csv, write_trajectory_csv};
pub use run::{certify, run_file, solve, RunOptions, RunOutcome, Solved, SolverUsed, Summary};

/// Env var naming the output directory when neither the CLI nor the file
/// sets one.
pub const OUT_DIR_ENV: &str = "SWEEP_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    /// Lipschitz solver when the set has no jumps, BR solver otherwise.
    #[default]
    Auto,
    Lipschitz,
    Br,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Constraint,
    JumpConditions,
    NormalCone,
    IntegralInequality,
    VariationBudget,
    DensityBound,
    DensityRepresentation,
}

impl CheckKind {
    pub const ALL: [CheckKind; 7] = [
        CheckKind::Constraint,
        CheckKind::JumpConditions,
        CheckKind::NormalCone,
        CheckKind::IntegralInequality,
        CheckKind::VariationBudget,
        CheckKind::DensityBound,
        CheckKind::DensityRepresentation,
    ];
}

impl FromStr for CheckKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.trim().to_string()))
            .map_err(|_| format!("unknown check `{s}`"))
    }
}

/// Which checks to run: `all`, `none`, or an explicit list.
#[derive(Debug, Clone, PartialEq, Eq, Default, Deserialize)]
#[serde(try_from = "ChecksSpec")]
pub enum Checks {
    #[default]
    All,
    None,
    List(Vec<CheckKind>),
}

impl Checks {
    pub fn includes(&self, kind: CheckKind) -> bool {
        match self {
            Checks::All => true,
            Checks::None => false,
            Checks::List(list) => list.contains(&kind),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ChecksSpec {
    Word(String),
    List(Vec<CheckKind>),
}

impl TryFrom<ChecksSpec> for Checks {
    type Error = String;

    fn try_from(spec: ChecksSpec) -> Result<Self, Self::Error> {
        match spec {
            ChecksSpec::Word(w) => w.parse(),
            ChecksSpec::List(list) => Ok(Checks::List(list)),
        }
    }
}

/// `all`, `none`, or a comma-separated list of check names.
impl FromStr for Checks {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "all" => Ok(Checks::All),
            "none" => Ok(Checks::None),
            list => list.split(',').map(CheckKind::from_str).collect::<Result<_, _>>().map(Checks::List),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub dim: usize,
    pub moving_set: MovingSetSpec,
    pub y0: Vec<f64>,
    #[serde(default)]
    pub solver: SolverKind,
    #[serde(default)]
    pub target_tol: Option<f64>,
    #[serde(default)]
    pub min_level: Option<u32>,
    #[serde(default)]
    pub max_level: Option<u32>,
    #[serde(default)]
    pub checks: Checks,
    /// Tolerance for the pointwise checks.
    #[serde(default)]
    pub check_tol: Option<f64>,
    /// Tolerance for the integral inequality, before the `1 + T` factor.
    #[serde(default)]
    pub integral_tol: Option<f64>,
    /// Probe points `w` for the selections `z(t) = P_{C(t)}(w)`.
    #[serde(default)]
    pub probes: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioError {
    Io { path: PathBuf, message: String },
    Parse { path: PathBuf, line: usize, column: usize, message: String },
    Invalid { path: PathBuf, field: String, message: String },
    Solver { name: String, source: SweepError },
}

impl ScenarioError {
    /// 2 for unreadable or invalid input, 3 for solver failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Solver { .. } => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Io { path, message } => write!(f, "{}: {message}", path.display()),
            ScenarioError::Parse {
                path,
                line,
                column,
                message,
            } => write!(f, "{}:{line}:{column}: {message}", path.display()),
            ScenarioError::Invalid { path, field, message } => {
                write!(f, "{}: field `{field}`: {message}", path.display())
            }
            ScenarioError::Solver { name, source } => write!(f, "scenario {name}: {source}"),
        }
    }
}

impl std::error::Error for ScenarioError {}

/// A scenario with its moving set built and validated.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub scenario: Scenario,
    pub path: PathBuf,
    pub set: MovingSet,
    pub y0: Vector,
}

impl Prepared {
    pub fn horizon(&self) -> f64 {
        self.set.horizon()
    }

    /// File values over the defaults.
    pub fn solver_config(&self) -> SolverConfig {
        let d = SolverConfig::default();
        let s = &self.scenario;
        SolverConfig {
            target_tol: s.target_tol.unwrap_or(d.target_tol),
            min_level: s.min_level.unwrap_or(d.min_level),
            max_level: s.max_level.unwrap_or(d.max_level),
        }
    }

    pub fn probes(&self) -> Vec<Vector> {
        match &self.scenario.probes {
            Some(p) => p.iter().map(|w| Vector::from_column_slice(w)).collect(),
            None => default_probes(&self.y0),
        }
    }
}

/// `y0`, `y0 ± 5·(1, …, 1)`, `y0 + 3e₁`, `y0 − 3e_d`.
fn default_probes(y0: &Vector) -> Vec<Vector> {
    let d = y0.len();
    let ones = Vector::from_element(d, 1.0);
    let mut first = y0.clone();
    first[0] += 3.0;
    let mut last = y0.clone();
    last[d - 1] -= 3.0;
    vec![y0.clone(), y0 + &ones * 5.0, y0 - &ones * 5.0, first, last]
}

pub fn parse_scenario(text: &str, path: &Path) -> Result<Prepared, ScenarioError> {
    let scenario: Scenario = serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let invalid = |field: &str, message: String| ScenarioError::Invalid {
        path: path.to_path_buf(),
        field: field.to_string(),
        message,
    };
    if scenario.name.is_empty() || scenario.name.contains(['/', '\\']) {
        return Err(invalid("name", format!("`{}` is not a usable file stem", scenario.name)));
    }
    if scenario.dim == 0 {
        return Err(invalid("dim", "must be at least 1".into()));
    }
    if scenario.y0.len() != scenario.dim {
        return Err(invalid(
            "y0",
            format!("has {} components, dim is {}", scenario.y0.len(), scenario.dim),
        ));
    }
    if let Some(probes) = &scenario.probes {
        if let Some(bad) = probes.iter().position(|w| w.len() != scenario.dim) {
            return Err(invalid("probes", format!("probe {bad} has the wrong dimension")));
        }
    }
    for (field, value) in [
        ("target_tol", scenario.target_tol),
        ("check_tol", scenario.check_tol),
        ("integral_tol", scenario.integral_tol),
    ] {
        if let Some(tol) = value {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(invalid(field, format!("must be positive, got {tol}")));
            }
        }
    }
    let set = MovingSet::try_from(scenario.moving_set.clone()).map_err(|e| invalid("moving_set", e.to_string()))?;
    if set.dim() != scenario.dim {
        return Err(invalid("dim", format!("moving set has dimension {}", set.dim())));
    }
    let y0 = Vector::from_column_slice(&scenario.y0);
    Ok(Prepared {
        scenario,
        path: path.to_path_buf(),
        set,
        y0,
    })
}

pub fn load_scenario(path: &Path) -> Result<Prepared, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_scenario(&text, path)
}

/// Scenario files named on the command line; directories contribute their
/// `*.json` entries in sorted order.
pub fn collect_scenarios(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, ScenarioError> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let entries = std::fs::read_dir(input).map_err(|e| ScenarioError::Io {
                path: input.clone(),
                message: e.to_string(),
            })?;
            let mut found: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(input.clone());
        }
    }
    Ok(files)
}

/// CLI flag, then scenario file, then environment, then `./out`.
pub fn resolve_out_dir(cli: Option<&Path>, file: Option<&Path>, env: Option<&Path>) -> PathBuf {
    cli.or(file).or(env).map_or_else(|| PathBuf::from("out"), Path::to_path_buf)
}
