//! The ten puzzle families.
//!
//! Each module exposes a serializable spec (everything its verifier needs),
//! a `generate(params, seed)` entry point and the spec's `verify` method.

pub mod badge;
pub mod cellular;
pub mod coloring;
pub mod isomorphism;
pub mod knot;
pub mod logic_grid;
pub mod maze;
pub mod projection;
pub mod raven;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::scene::{RasterImage, Scene};
use crate::types::{Detail, TaskKind, VerificationResult};

#[derive(Clone, Debug, PartialEq)]
pub struct Distractor {
    /// Violation type from the task's catalogue.
    pub violation: String,
    pub scene: Scene,
}

impl Distractor {
    pub(crate) fn new(violation: &str, scene: Scene) -> Self {
        Self {
            violation: violation.to_string(),
            scene,
        }
    }
}

/// Output of a task generator before it is wrapped into a puzzle instance.
#[derive(Clone, Debug)]
pub struct Generated {
    pub spec: TaskSpec,
    pub puzzle: Scene,
    pub solution: Scene,
    pub distractors: Vec<Distractor>,
    /// Generator remarks worth keeping in metadata (substitutions, attempts).
    pub notes: BTreeMap<String, Detail>,
}

/// Verifier context of one puzzle, tagged by task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TaskSpec {
    Maze(maze::MazeSpec),
    Raven(raven::RavenSpec),
    CaForward(cellular::CaForwardSpec),
    CaInverse(cellular::CaInverseSpec),
    LogicGrid(logic_grid::LogicGridSpec),
    GraphColoring(coloring::ColoringSpec),
    GraphIsomorphism(isomorphism::IsomorphismSpec),
    Unknot(knot::KnotSpec),
    OrthoProjection(projection::OrthoSpec),
    IsoReconstruction(projection::IsoRecSpec),
}

impl TaskSpec {
    pub fn verify(&self, candidate: &RasterImage) -> VerificationResult {
        match self {
            TaskSpec::Maze(s) => s.verify(candidate),
            TaskSpec::Raven(s) => s.verify(candidate),
            TaskSpec::CaForward(s) => s.verify(candidate),
            TaskSpec::CaInverse(s) => s.verify(candidate),
            TaskSpec::LogicGrid(s) => s.verify(candidate),
            TaskSpec::GraphColoring(s) => s.verify(candidate),
            TaskSpec::GraphIsomorphism(s) => s.verify(candidate),
            TaskSpec::Unknot(s) => s.verify(candidate),
            TaskSpec::OrthoProjection(s) => s.verify(candidate),
            TaskSpec::IsoReconstruction(s) => s.verify(candidate),
        }
    }

    /// The verifier check a distractor of this violation type is built to
    /// fail, for tasks whose verifiers report diagnosable checks.
    pub fn expected_check(&self, violation: &str) -> Option<&'static str> {
        match self {
            TaskSpec::Maze(_) => maze::expected_check(violation),
            TaskSpec::CaForward(_) => cellular::expected_check(TaskKind::CaForward, violation),
            TaskSpec::CaInverse(_) => cellular::expected_check(TaskKind::CaInverse, violation),
            TaskSpec::LogicGrid(_) => logic_grid::expected_check(violation),
            TaskSpec::GraphColoring(_) => coloring::expected_check(violation),
            TaskSpec::GraphIsomorphism(_) | TaskSpec::Unknot(_) => badge::expected_check(violation),
            TaskSpec::OrthoProjection(_) => projection::expected_check(TaskKind::OrthoProjection, violation),
            TaskSpec::Raven(_) | TaskSpec::IsoReconstruction(_) => None,
        }
    }

    /// Binary ground truth for the YES/NO tasks.
    pub fn binary_answer(&self) -> Option<bool> {
        match self {
            TaskSpec::GraphIsomorphism(s) => Some(s.isomorphic),
            TaskSpec::Unknot(s) => Some(s.is_unknot),
            _ => None,
        }
    }
}

/// Among candidates (already in rng order) returns the first whose failed
/// checks are exactly `[intended]`, else the first that includes it.
pub(crate) fn pick_failing<T>(
    candidates: impl IntoIterator<Item = T>,
    intended: &str,
    mut failures: impl FnMut(&T) -> Vec<String>,
) -> Option<T> {
    let mut fallback = None;
    for c in candidates {
        let f = failures(&c);
        if f.len() == 1 && f[0] == intended {
            return Some(c);
        }
        if fallback.is_none() && f.iter().any(|x| x == intended) {
            fallback = Some(c);
        }
    }
    fallback
}
