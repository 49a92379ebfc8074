//! Task descriptors, difficulty axes, release parameters and generation
//! dispatch.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scene::Scene;
use crate::tasks::{cellular, coloring, isomorphism, knot, logic_grid, maze, projection, raven, Distractor, Generated, TaskSpec};
use crate::types::{AxisDirection, Detail, Difficulty, DifficultyRange, Domain, ParamValue, Params, TaskKind};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskDescriptor {
    pub id: u8,
    pub name: String,
    pub domain: Domain,
    pub binary: bool,
    pub axes: Vec<DifficultyRange>,
}

#[derive(Clone, Copy)]
enum Kind {
    I,
    F,
}

/// `(axis, min, max, direction, [easy, medium, hard])`
type AxisRow = (&'static str, Kind, f64, f64, AxisDirection, [f64; 3]);

const UP: AxisDirection = AxisDirection::Increasing;
const DOWN: AxisDirection = AxisDirection::Decreasing;

fn table(task: TaskKind) -> &'static [AxisRow] {
    use Kind::*;
    match task {
        TaskKind::Maze => &[
            ("grid", I, 4.0, 128.0, UP, [8.0, 16.0, 32.0]),
            ("layers", I, 1.0, 8.0, UP, [1.0, 2.0, 3.0]),
            ("portals", I, 0.0, 20.0, UP, [0.0, 2.0, 5.0]),
        ],
        // complexity 0 = additive rules only, 1 = at least one compositional
        TaskKind::Raven => &[
            ("rules", I, 1.0, 5.0, UP, [1.0, 2.0, 3.0]),
            ("complexity", I, 0.0, 1.0, UP, [0.0, 0.0, 1.0]),
        ],
        TaskKind::CaForward => &[
            ("grid", I, 4.0, 64.0, UP, [8.0, 16.0, 32.0]),
            ("states", I, 2.0, 8.0, UP, [2.0, 4.0, 8.0]),
            ("steps", I, 1.0, 20.0, UP, [1.0, 3.0, 5.0]),
        ],
        TaskKind::CaInverse => &[
            ("grid", I, 4.0, 64.0, UP, [8.0, 16.0, 32.0]),
            ("states", I, 2.0, 16.0, UP, [4.0, 8.0, 16.0]),
            ("steps", I, 1.0, 20.0, UP, [1.0, 2.0, 3.0]),
        ],
        TaskKind::LogicGrid => &[
            ("grid", I, 3.0, 8.0, UP, [4.0, 5.0, 6.0]),
            ("constraints", I, 4.0, 20.0, UP, [6.0, 10.0, 16.0]),
            ("types", I, 1.0, 4.0, UP, [2.0, 3.0, 4.0]),
        ],
        TaskKind::GraphColoring => &[
            ("nodes", I, 4.0, 20.0, UP, [6.0, 12.0, 20.0]),
            ("density", F, 0.0, 1.0, UP, [0.3, 0.4, 0.5]),
            ("k", I, 2.0, 5.0, DOWN, [4.0, 4.0, 3.0]),
        ],
        TaskKind::GraphIsomorphism => &[
            ("nodes", I, 4.0, 12.0, UP, [5.0, 8.0, 12.0]),
            ("distortion", F, 0.0, 1.0, UP, [0.3, 0.6, 0.9]),
        ],
        TaskKind::Unknot => &[("crossings", I, 2.0, 15.0, UP, [3.0, 6.0, 10.0])],
        TaskKind::OrthoProjection => &[
            ("faces", I, 4.0, 20.0, UP, [6.0, 10.0, 16.0]),
            ("concavities", I, 0.0, 4.0, UP, [0.0, 1.0, 3.0]),
        ],
        TaskKind::IsoReconstruction => &[
            ("faces", I, 4.0, 20.0, UP, [6.0, 10.0, 16.0]),
            ("ambiguity", I, 0.0, 3.0, UP, [0.0, 1.0, 2.0]),
        ],
    }
}

fn value(kind: Kind, v: f64) -> ParamValue {
    match kind {
        Kind::I => ParamValue::Int(v as i64),
        Kind::F => ParamValue::Frac(v),
    }
}

pub fn difficulty_axes(task: TaskKind) -> Vec<DifficultyRange> {
    table(task)
        .iter()
        .map(|&(axis, kind, min, max, direction, levels)| DifficultyRange {
            axis: axis.to_string(),
            min,
            max,
            direction,
            levels: Difficulty::ALL.into_iter().zip(levels).map(|(d, v)| (d, value(kind, v))).collect(),
        })
        .collect()
}

pub fn list_tasks() -> Vec<TaskDescriptor> {
    TaskKind::ALL
        .into_iter()
        .map(|t| TaskDescriptor {
            id: t.id(),
            name: t.name().to_string(),
            domain: t.domain(),
            binary: t.is_binary(),
            axes: difficulty_axes(t),
        })
        .collect()
}

/// Parameters of the canonical release for one cell.
pub fn release_params(task: TaskKind, difficulty: Difficulty) -> Params {
    table(task)
        .iter()
        .fold(Params::new(), |p, &(axis, kind, _, _, _, levels)| p.with(axis, value(kind, levels[difficulty.index()])))
}

/// Keys must match the task's axes exactly; values must lie in range and
/// integer axes must hold integers.
pub fn validate_params(task: TaskKind, params: &Params) -> Result<()> {
    let invalid = |reason: String| Error::InvalidParams {
        task: task.name(),
        reason,
    };
    let rows = table(task);
    for key in params.keys() {
        if !rows.iter().any(|r| r.0 == key) {
            return Err(invalid(format!("unknown axis `{key}`")));
        }
    }
    for &(axis, kind, min, max, _, _) in rows {
        let v = params.get(axis).ok_or_else(|| invalid(format!("missing axis `{axis}`")))?.as_f64();
        if matches!(kind, Kind::I) && v.fract() != 0.0 {
            return Err(invalid(format!("axis `{axis}` must be an integer, got {v}")));
        }
        if !(min..=max).contains(&v) {
            return Err(invalid(format!("axis `{axis}` = {v} outside [{min}, {max}]")));
        }
    }
    Ok(())
}

/// One generated puzzle with its provenance.
#[derive(Clone, Debug)]
pub struct PuzzleInstance {
    pub task: TaskKind,
    pub seed: u64,
    pub difficulty: Difficulty,
    pub params: Params,
    pub puzzle: Scene,
    pub solution: Scene,
    pub distractors: Vec<Distractor>,
    pub spec: TaskSpec,
    pub notes: BTreeMap<String, Detail>,
}

impl PuzzleInstance {
    pub fn domain(&self) -> Domain {
        self.task.domain()
    }

    pub fn metadata(&self) -> PuzzleMetadata {
        PuzzleMetadata {
            task: self.task,
            task_id: self.task.id(),
            seed: self.seed,
            difficulty: self.difficulty,
            params: self.params.clone(),
            domain: self.task.domain(),
            violations: self.distractors.iter().map(|d| d.violation.clone()).collect(),
            binary: self.task.is_binary(),
            answer: self.spec.binary_answer(),
            notes: self.notes.clone(),
            spec: self.spec.clone(),
        }
    }
}

/// Everything needed to regenerate a puzzle and to verify a candidate
/// without the solution image.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PuzzleMetadata {
    pub task: TaskKind,
    pub task_id: u8,
    pub seed: u64,
    pub difficulty: Difficulty,
    pub params: Params,
    pub domain: Domain,
    /// Violation types of the four distractors, in file order.
    pub violations: Vec<String>,
    pub binary: bool,
    /// Ground truth of the YES/NO tasks.
    pub answer: Option<bool>,
    pub notes: BTreeMap<String, Detail>,
    pub spec: TaskSpec,
}

impl PuzzleMetadata {
    /// `{task}_{difficulty}_{seed}`, the stem of a track-1 submission file.
    pub fn puzzle_id(&self) -> String {
        puzzle_id(self.task, self.difficulty, self.seed)
    }

    pub fn regenerate(&self) -> Result<PuzzleInstance> {
        generate_with_params(self.task, self.difficulty, &self.params, self.seed)
    }
}

pub fn puzzle_id(task: TaskKind, difficulty: Difficulty, seed: u64) -> String {
    format!("{}_{}_{}", task.name(), difficulty, seed)
}

/// Inverse of [`puzzle_id`]. Task names contain underscores, so the id is
/// split from the right.
pub fn parse_puzzle_id(id: &str) -> Option<(TaskKind, Difficulty, u64)> {
    let (rest, seed) = id.rsplit_once('_')?;
    let (task, difficulty) = rest.rsplit_once('_')?;
    Some((task.parse().ok()?, difficulty.parse().ok()?, seed.parse().ok()?))
}

fn dispatch(task: TaskKind, params: &Params, seed: u64) -> Result<Generated> {
    match task {
        TaskKind::Maze => maze::generate(params, seed),
        TaskKind::Raven => raven::generate(params, seed),
        TaskKind::CaForward => cellular::generate_forward(params, seed),
        TaskKind::CaInverse => cellular::generate_inverse(params, seed),
        TaskKind::LogicGrid => logic_grid::generate(params, seed),
        TaskKind::GraphColoring => coloring::generate(params, seed),
        TaskKind::GraphIsomorphism => isomorphism::generate(params, seed),
        TaskKind::Unknot => knot::generate(params, seed),
        TaskKind::OrthoProjection => projection::generate_ortho(params, seed),
        TaskKind::IsoReconstruction => projection::generate_isorec(params, seed),
    }
}

pub fn generate_with_params(task: TaskKind, difficulty: Difficulty, params: &Params, seed: u64) -> Result<PuzzleInstance> {
    validate_params(task, params)?;
    let g = dispatch(task, params, seed)?;
    debug_assert_eq!(g.distractors.len(), 4);
    Ok(PuzzleInstance {
        task,
        seed,
        difficulty,
        params: params.clone(),
        puzzle: g.puzzle,
        solution: g.solution,
        distractors: g.distractors,
        spec: g.spec,
        notes: g.notes,
    })
}

/// Generates with the canonical release parameters of `difficulty`.
pub fn generate(task: TaskKind, difficulty: Difficulty, seed: u64) -> Result<PuzzleInstance> {
    generate_with_params(task, difficulty, &release_params(task, difficulty), seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levels_are_consistent() {
        for t in TaskKind::ALL {
            for axis in difficulty_axes(t) {
                assert!(axis.is_consistent(), "{t} {}", axis.axis);
            }
            for d in Difficulty::ALL {
                validate_params(t, &release_params(t, d)).unwrap();
            }
        }
    }

    #[test]
    fn validation_rejects_bad_keys_and_values() {
        let t = TaskKind::Unknot;
        assert!(validate_params(t, &Params::new()).is_err());
        assert!(validate_params(t, &Params::new().int("crossings", 16)).is_err());
        assert!(validate_params(t, &Params::new().frac("crossings", 3.5)).is_err());
        assert!(validate_params(t, &Params::new().int("crossings", 3).int("extra", 1)).is_err());
        assert!(validate_params(t, &Params::new().int("crossings", 3)).is_ok());
    }

    #[test]
    fn puzzle_ids_parse_back() {
        for t in TaskKind::ALL {
            let id = puzzle_id(t, Difficulty::Medium, 18_446_744_073_709_551_615);
            assert_eq!(parse_puzzle_id(&id), Some((t, Difficulty::Medium, u64::MAX)));
        }
        assert_eq!(parse_puzzle_id("maze_easy"), None);
        assert_eq!(parse_puzzle_id("maze_tough_1"), None);
    }
}
