use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Difficulty {
    Easy,
    Medium,
    Hard,
}

impl Difficulty {
    pub const ALL: [Difficulty; 3] = [Difficulty::Easy, Difficulty::Medium, Difficulty::Hard];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Difficulty::Easy => "easy",
            Difficulty::Medium => "medium",
            Difficulty::Hard => "hard",
        }
    }
}

impl fmt::Display for Difficulty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Difficulty {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "easy" => Ok(Difficulty::Easy),
            "medium" => Ok(Difficulty::Medium),
            "hard" => Ok(Difficulty::Hard),
            other => Err(Error::UnknownDifficulty(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Spatial,
    Pattern,
    Logical,
    Graph,
    Topology,
    Geometric,
}

impl Domain {
    pub const ALL: [Domain; 6] = [
        Domain::Spatial,
        Domain::Pattern,
        Domain::Logical,
        Domain::Graph,
        Domain::Topology,
        Domain::Geometric,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Spatial => "spatial",
            Domain::Pattern => "pattern",
            Domain::Logical => "logical",
            Domain::Graph => "graph",
            Domain::Topology => "topology",
            Domain::Geometric => "geometric",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The ten puzzle families, in registry order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Maze,
    Raven,
    CaForward,
    CaInverse,
    LogicGrid,
    GraphColoring,
    GraphIsomorphism,
    Unknot,
    OrthoProjection,
    IsoReconstruction,
}

impl TaskKind {
    pub const ALL: [TaskKind; 10] = [
        TaskKind::Maze,
        TaskKind::Raven,
        TaskKind::CaForward,
        TaskKind::CaInverse,
        TaskKind::LogicGrid,
        TaskKind::GraphColoring,
        TaskKind::GraphIsomorphism,
        TaskKind::Unknot,
        TaskKind::OrthoProjection,
        TaskKind::IsoReconstruction,
    ];

    pub fn id(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_id(id: u32) -> Result<Self, Error> {
        (id as usize)
            .checked_sub(1)
            .and_then(|i| Self::ALL.get(i).copied())
            .ok_or_else(|| Error::UnknownTask(id.to_string()))
    }

    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Maze => "maze",
            TaskKind::Raven => "raven",
            TaskKind::CaForward => "ca_forward",
            TaskKind::CaInverse => "ca_inverse",
            TaskKind::LogicGrid => "logic_grid",
            TaskKind::GraphColoring => "graph_coloring",
            TaskKind::GraphIsomorphism => "graph_isomorphism",
            TaskKind::Unknot => "unknot",
            TaskKind::OrthoProjection => "ortho_projection",
            TaskKind::IsoReconstruction => "iso_reconstruction",
        }
    }

    pub fn domain(self) -> Domain {
        match self {
            TaskKind::Maze => Domain::Spatial,
            TaskKind::Raven | TaskKind::CaForward | TaskKind::CaInverse => Domain::Pattern,
            TaskKind::LogicGrid => Domain::Logical,
            TaskKind::GraphColoring | TaskKind::GraphIsomorphism => Domain::Graph,
            TaskKind::Unknot => Domain::Topology,
            TaskKind::OrthoProjection | TaskKind::IsoReconstruction => Domain::Geometric,
        }
    }

    pub fn is_binary(self) -> bool {
        matches!(self, TaskKind::GraphIsomorphism | TaskKind::Unknot)
    }

    /// Directory name inside a release, e.g. `task_01_maze`.
    pub fn dir_name(self) -> String {
        format!("task_{:02}_{}", self.id(), self.name())
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TaskKind {
    type Err = Error;

    /// Accepts the task name, its directory name, or its numeric id.
    fn from_str(s: &str) -> Result<Self, Error> {
        if let Ok(id) = s.parse::<u32>() {
            return Self::from_id(id);
        }
        Self::ALL
            .into_iter()
            .find(|t| t.name() == s || t.dir_name() == s)
            .ok_or_else(|| Error::UnknownTask(s.to_string()))
    }
}

/// A difficulty parameter value: integer axes (grid size, counts) or fractional
/// ones (density, distortion).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Frac(f64),
}

impl ParamValue {
    pub fn as_f64(self) -> f64 {
        match self {
            ParamValue::Int(v) => v as f64,
            ParamValue::Frac(v) => v,
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Frac(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Params(pub BTreeMap<String, ParamValue>);

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, axis: &str, value: ParamValue) -> Self {
        self.0.insert(axis.to_string(), value);
        self
    }

    pub fn int(mut self, axis: &str, value: i64) -> Self {
        self.0.insert(axis.to_string(), ParamValue::Int(value));
        self
    }

    pub fn frac(mut self, axis: &str, value: f64) -> Self {
        self.0.insert(axis.to_string(), ParamValue::Frac(value));
        self
    }

    pub fn get(&self, axis: &str) -> Option<ParamValue> {
        self.0.get(axis).copied()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub(crate) fn require_int(&self, task: TaskKind, axis: &str) -> Result<i64, Error> {
        match self.get(axis) {
            Some(ParamValue::Int(v)) => Ok(v),
            Some(ParamValue::Frac(v)) if v.fract() == 0.0 => Ok(v as i64),
            Some(other) => Err(Error::InvalidParams {
                task: task.name(),
                reason: format!("axis `{axis}` must be an integer, got {other}"),
            }),
            None => Err(Error::InvalidParams {
                task: task.name(),
                reason: format!("missing axis `{axis}`"),
            }),
        }
    }

    pub(crate) fn require_f64(&self, task: TaskKind, axis: &str) -> Result<f64, Error> {
        self.get(axis).map(ParamValue::as_f64).ok_or_else(|| Error::InvalidParams {
            task: task.name(),
            reason: format!("missing axis `{axis}`"),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisDirection {
    /// Larger values are harder.
    Increasing,
    /// Smaller values are harder (graph coloring budget `k`).
    Decreasing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DifficultyRange {
    pub axis: String,
    pub min: f64,
    pub max: f64,
    pub direction: AxisDirection,
    pub levels: BTreeMap<Difficulty, ParamValue>,
}

impl DifficultyRange {
    pub fn contains(&self, v: f64) -> bool {
        (self.min..=self.max).contains(&v)
    }

    /// Level values lie in range and move monotonically in the declared direction.
    pub fn is_consistent(&self) -> bool {
        let vals: Vec<f64> = Difficulty::ALL
            .iter()
            .filter_map(|d| self.levels.get(d).map(|v| v.as_f64()))
            .collect();
        if vals.len() != 3 || !vals.iter().all(|&v| self.contains(v)) {
            return false;
        }
        match self.direction {
            AxisDirection::Increasing => vals.windows(2).all(|w| w[0] <= w[1]),
            AxisDirection::Decreasing => vals.windows(2).all(|w| w[0] >= w[1]),
        }
    }
}

/// Scalar-or-list diagnostic value attached to a verification outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Detail {
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
    List(Vec<Detail>),
}

impl From<bool> for Detail {
    fn from(v: bool) -> Self {
        Detail::Bool(v)
    }
}
impl From<i64> for Detail {
    fn from(v: i64) -> Self {
        Detail::Int(v)
    }
}
impl From<usize> for Detail {
    fn from(v: usize) -> Self {
        Detail::Int(v as i64)
    }
}
impl From<f64> for Detail {
    fn from(v: f64) -> Self {
        Detail::Float(v)
    }
}
impl From<&str> for Detail {
    fn from(v: &str) -> Self {
        Detail::Text(v.to_string())
    }
}
impl From<String> for Detail {
    fn from(v: String) -> Self {
        Detail::Text(v)
    }
}
impl<T: Into<Detail>> From<Vec<T>> for Detail {
    fn from(v: Vec<T>) -> Self {
        Detail::List(v.into_iter().map(Into::into).collect())
    }
}

/// Key under which every failing verifier records its first failed check.
pub const FAILED_CHECK: &str = "failed_check";
/// Key listing every failed check (verifiers evaluate all checks).
pub const FAILED_CHECKS: &str = "failed_checks";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationResult {
    pub passed: bool,
    pub reason: String,
    pub details: BTreeMap<String, Detail>,
}

impl VerificationResult {
    pub fn ok() -> Self {
        Self {
            passed: true,
            reason: "ok".to_string(),
            details: BTreeMap::new(),
        }
    }

    pub fn fail(check: &str, reason: impl Into<String>) -> Self {
        let mut details = BTreeMap::new();
        details.insert(FAILED_CHECK.to_string(), Detail::from(check));
        Self {
            passed: false,
            reason: reason.into(),
            details,
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Detail>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }

    pub fn failed_check(&self) -> Option<&str> {
        match self.details.get(FAILED_CHECK) {
            Some(Detail::Text(s)) => Some(s),
            _ => None,
        }
    }

    /// All failed check ids; falls back to the first failed check.
    pub fn failed_checks(&self) -> Vec<String> {
        match self.details.get(FAILED_CHECKS) {
            Some(Detail::List(items)) => items
                .iter()
                .filter_map(|d| match d {
                    Detail::Text(s) => Some(s.clone()),
                    _ => None,
                })
                .collect(),
            _ => self.failed_check().map(|s| vec![s.to_string()]).unwrap_or_default(),
        }
    }

    pub fn detail_f64(&self, key: &str) -> Option<f64> {
        match self.details.get(key)? {
            Detail::Float(v) => Some(*v),
            Detail::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn detail_i64(&self, key: &str) -> Option<i64> {
        match self.details.get(key)? {
            Detail::Int(v) => Some(*v),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn task_ids_follow_registry_order() {
        for (i, t) in TaskKind::ALL.iter().enumerate() {
            assert_eq!(t.id() as usize, i + 1);
            assert_eq!(TaskKind::from_id(t.id() as u32).unwrap(), *t);
            assert_eq!(t.name().parse::<TaskKind>().unwrap(), *t);
        }
        assert!(TaskKind::from_id(0).is_err());
        assert!(TaskKind::from_id(11).is_err());
    }

    #[test]
    fn only_isomorphism_and_unknot_are_binary() {
        let binary: Vec<u8> = TaskKind::ALL.iter().filter(|t| t.is_binary()).map(|t| t.id()).collect();
        assert_eq!(binary, vec![7, 8]);
    }

    #[test]
    fn dir_name_pattern() {
        assert_eq!(TaskKind::Maze.dir_name(), "task_01_maze");
        assert_eq!(TaskKind::IsoReconstruction.dir_name(), "task_10_iso_reconstruction");
    }

    #[test]
    fn failed_result_carries_check() {
        let r = VerificationResult::fail("end", "path ends elsewhere").with("cell", "0,1,2");
        assert!(!r.passed);
        assert_eq!(r.failed_check(), Some("end"));
        assert_eq!(r.failed_checks(), vec!["end".to_string()]);
    }
}
