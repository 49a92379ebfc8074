//! Two-dimensional cellular automata on a torus.
//!
//! The rule family is an `S x S` lookup table: a cell's next state is
//! `table[current][(sum of the 8 Moore neighbours) mod S]`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Distractor, Generated, TaskSpec};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::scene::{palette, pt, Palette, RasterImage, Scene, Style};
use crate::seed::with_retries;
use crate::types::{Detail, Params, TaskKind, VerificationResult, FAILED_CHECKS};
use crate::vision::{sample_grid, ColorClasses, GridGeometry, SampleMode};

pub const CHECK_UNREADABLE: &str = "unreadable";
pub const CHECK_CELLS: &str = "cells";
pub const CHECK_ENTRIES: &str = "entries";

pub const WRONG_CELL: &str = "wrong_cell";
pub const WRONG_STEP_COUNT: &str = "wrong_step_count";
pub const WRONG_RULE: &str = "wrong_rule";
pub const OFF_BY_ONE_RULE: &str = "off_by_one_rule";
pub const TRANSPOSED_RULE: &str = "transposed_rule";
pub const PARTIAL_RULE: &str = "partial_rule";

const PUZZLE_SIZE: f64 = 200.0;
const ANSWER_SIZE: f64 = 100.0;
/// Blank border around each drawn cell, as a fraction of the cell side.
const CELL_INSET: f64 = 0.06;

pub fn expected_check(task: TaskKind, violation: &str) -> Option<&'static str> {
    match (task, violation) {
        (TaskKind::CaForward, WRONG_CELL | WRONG_STEP_COUNT | WRONG_RULE) => Some(CHECK_CELLS),
        (TaskKind::CaInverse, OFF_BY_ONE_RULE | TRANSPOSED_RULE | PARTIAL_RULE) => Some(CHECK_ENTRIES),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaRule {
    pub states: usize,
    /// `table[current][neighbour_sum mod states]`.
    pub table: Vec<Vec<u8>>,
}

impl CaRule {
    pub fn random(states: usize, rng: &mut RngStream) -> Self {
        let table = (0..states)
            .map(|_| (0..states).map(|_| rng.index(states) as u8).collect())
            .collect();
        Self { states, table }
    }

    pub fn transposed(&self) -> Self {
        let s = self.states;
        Self {
            states: s,
            table: (0..s).map(|i| (0..s).map(|j| self.table[j][i]).collect()).collect(),
        }
    }

    pub fn entries(&self) -> Vec<u8> {
        self.table.iter().flatten().copied().collect()
    }

    pub fn diff_count(&self, other: &CaRule) -> usize {
        self.entries().iter().zip(other.entries()).filter(|(a, b)| **a != *b).count()
    }
}

/// Square toroidal grid, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaGrid {
    pub size: usize,
    pub cells: Vec<u8>,
}

impl CaGrid {
    pub fn random(size: usize, states: usize, rng: &mut RngStream) -> Self {
        Self {
            size,
            cells: (0..size * size).map(|_| rng.index(states) as u8).collect(),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.cells[r * self.size + c]
    }

    pub fn neighbour_sum(&self, r: usize, c: usize) -> usize {
        let n = self.size;
        let mut sum = 0;
        for dr in [n - 1, 0, 1] {
            for dc in [n - 1, 0, 1] {
                if dr == 0 && dc == 0 {
                    continue;
                }
                sum += self.get((r + dr) % n, (c + dc) % n) as usize;
            }
        }
        sum
    }

    pub fn diff_count(&self, other: &CaGrid) -> usize {
        self.cells.iter().zip(&other.cells).filter(|(a, b)| a != b).count()
    }
}

pub fn step(grid: &CaGrid, rule: &CaRule) -> CaGrid {
    let n = grid.size;
    let mut cells = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            let cur = grid.get(r, c) as usize;
            cells.push(rule.table[cur][grid.neighbour_sum(r, c) % rule.states]);
        }
    }
    CaGrid { size: n, cells }
}

pub fn simulate(grid: &CaGrid, rule: &CaRule, steps: usize) -> CaGrid {
    let mut g = grid.clone();
    for _ in 0..steps {
        g = step(&g, rule);
    }
    g
}

/// Which `(current, sum mod S)` table entries the first `steps` updates read.
pub fn coverage(grid: &CaGrid, rule: &CaRule, steps: usize) -> Vec<Vec<bool>> {
    let s = rule.states;
    let mut used = vec![vec![false; s]; s];
    let mut g = grid.clone();
    for _ in 0..steps {
        for r in 0..g.size {
            for c in 0..g.size {
                used[g.get(r, c) as usize][g.neighbour_sum(r, c) % s] = true;
            }
        }
        g = step(&g, rule);
    }
    used
}

fn draw_cells(s: &mut Scene, cells: &[u8], cols: usize, x: f64, y: f64, side: f64) {
    let colors = &Palette::get().states;
    let rows = cells.len() / cols;
    let cell = side / cols.max(rows) as f64;
    let inset = cell * CELL_INSET;
    for (i, &v) in cells.iter().enumerate() {
        let (r, c) = (i / cols, i % cols);
        s.rect(
            x + c as f64 * cell + inset,
            y + r as f64 * cell + inset,
            cell - 2.0 * inset,
            cell - 2.0 * inset,
            Style::fill(colors[v as usize]),
        );
    }
}

/// Rule table with numeral ticks: rows are the current state, columns the
/// neighbour sum mod S.
fn draw_table(s: &mut Scene, rule: &CaRule, x: f64, y: f64, side: f64) {
    let n = rule.states;
    let cell = side / n as f64;
    let ink = palette::named("ink");
    let tick = (cell * 0.6).min(6.0);
    for i in 0..n {
        let label = i.to_string();
        let size = tick / label.len().max(1) as f64;
        s.text(x - tick * 0.8, y + (i as f64 + 0.5) * cell, size, label.clone(), ink);
        s.text(x + (i as f64 + 0.5) * cell, y - tick * 0.8, size, label, ink);
    }
    draw_cells(s, &rule.entries(), n, x, y, side);
}

/// Right-pointing arrow labelled with the step count.
fn draw_steps(s: &mut Scene, steps: usize, x: f64, y: f64, len: f64) {
    let ink = palette::named("ink");
    s.line(pt(x, y), pt(x + len - 4.0, y), ink, 1.5);
    s.polygon(vec![pt(x + len, y), pt(x + len - 5.0, y - 3.0), pt(x + len - 5.0, y + 3.0)], Style::fill(ink));
    s.text(x + len / 2.0, y - 8.0, 8.0, steps.to_string(), ink);
}

fn answer_geometry(n: usize, side: f64, margin: f64) -> GridGeometry {
    GridGeometry::square(margin, margin, side / n as f64, n, n)
}

/// Samples an `n x n` state grid and compares it with `truth`.
fn verify_grid(
    candidate: &RasterImage,
    geom: GridGeometry,
    canvas: f64,
    truth: &[u8],
    mismatch_check: &'static str,
    unit: &str,
) -> VerificationResult {
    let classes = ColorClasses::new(Palette::get().states.clone());
    let g = geom.to_pixels(canvas, candidate);
    let sampled = sample_grid(candidate, &g, &classes, SampleMode::CenterPatch);
    let flat: Vec<Option<usize>> = sampled.into_iter().flatten().collect();
    let unreadable = flat.iter().filter(|v| v.is_none()).count();
    let diffs: Vec<usize> = (0..truth.len())
        .filter(|&i| flat[i] != Some(truth[i] as usize))
        .collect();
    let total = truth.len();
    if diffs.is_empty() {
        return VerificationResult::ok().with(format!("diff_{unit}").as_str(), 0usize).with("total", total);
    }
    let first = diffs[0];
    let cols = geom.cols;
    let mut failed = Vec::new();
    if unreadable > 0 {
        failed.push(CHECK_UNREADABLE);
    }
    if diffs.len() > unreadable {
        failed.push(mismatch_check);
    }
    let reason = if unreadable == total {
        "unreadable grid".to_string()
    } else {
        format!("{} of {total} {unit} differ", diffs.len())
    };
    VerificationResult::fail(failed[0], reason)
        .with(FAILED_CHECKS, failed)
        .with(format!("diff_{unit}").as_str(), diffs.len())
        .with("total", total)
        .with("unreadable", unreadable)
        .with("first_mismatch", vec![first / cols, first % cols])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaForwardSpec {
    pub rule: CaRule,
    pub initial: CaGrid,
    pub steps: usize,
    pub final_state: CaGrid,
}

impl CaForwardSpec {
    fn answer_scene(grid: &CaGrid) -> Scene {
        let mut s = Scene::new(ANSWER_SIZE);
        draw_cells(&mut s, &grid.cells, grid.size, 5.0, 5.0, ANSWER_SIZE - 10.0);
        s
    }

    pub fn puzzle_scene(&self) -> Scene {
        let mut s = Scene::new(PUZZLE_SIZE);
        draw_cells(&mut s, &self.initial.cells, self.initial.size, 10.0, 50.0, 110.0);
        draw_table(&mut s, &self.rule, 140.0, 60.0, 50.0);
        draw_steps(&mut s, self.steps, 130.0, 140.0, 60.0);
        s
    }

    pub fn solution_scene(&self) -> Scene {
        Self::answer_scene(&self.final_state)
    }

    pub fn verify(&self, candidate: &RasterImage) -> VerificationResult {
        let n = self.final_state.size;
        verify_grid(
            candidate,
            answer_geometry(n, ANSWER_SIZE - 10.0, 5.0),
            ANSWER_SIZE,
            &self.final_state.cells,
            CHECK_CELLS,
            "cells",
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaInverseSpec {
    pub rule: CaRule,
    pub initial: CaGrid,
    pub steps: usize,
    pub final_state: CaGrid,
}

const TABLE_MARGIN: f64 = 15.0;

impl CaInverseSpec {
    fn answer_scene(rule: &CaRule) -> Scene {
        let mut s = Scene::new(ANSWER_SIZE);
        draw_table(&mut s, rule, TABLE_MARGIN, TABLE_MARGIN, ANSWER_SIZE - TABLE_MARGIN - 5.0);
        s
    }

    pub fn puzzle_scene(&self) -> Scene {
        let mut s = Scene::new(PUZZLE_SIZE);
        draw_cells(&mut s, &self.initial.cells, self.initial.size, 8.0, 55.0, 80.0);
        draw_cells(&mut s, &self.final_state.cells, self.final_state.size, 112.0, 55.0, 80.0);
        draw_steps(&mut s, self.steps, 90.0, 95.0, 20.0);
        s
    }

    pub fn solution_scene(&self) -> Scene {
        Self::answer_scene(&self.rule)
    }

    pub fn verify(&self, candidate: &RasterImage) -> VerificationResult {
        let n = self.rule.states;
        verify_grid(
            candidate,
            answer_geometry(n, ANSWER_SIZE - TABLE_MARGIN - 5.0, TABLE_MARGIN),
            ANSWER_SIZE,
            &self.rule.entries(),
            CHECK_ENTRIES,
            "entries",
        )
    }
}

fn with_cell_changed(grid: &CaGrid, states: usize, avoid: Option<usize>, rng: &mut RngStream) -> (CaGrid, usize) {
    let mut g = grid.clone();
    let mut i = rng.index(g.cells.len());
    while Some(i) == avoid {
        i = rng.index(g.cells.len());
    }
    let shift = 1 + rng.index(states - 1) as u8;
    g.cells[i] = (g.cells[i] + shift) % states as u8;
    (g, i)
}

fn build_forward(n: usize, states: usize, steps: usize, rng: &mut RngStream) -> Option<Generated> {
    let rule = CaRule::random(states, rng);
    let initial = CaGrid::random(n, states, rng);
    let before = simulate(&initial, &rule, steps - 1);
    let final_state = step(&before, &rule);
    // the trajectory must move, and its last step must change something
    if final_state == initial || final_state == before {
        return None;
    }
    let (cell_a, i) = with_cell_changed(&final_state, states, None, rng);
    let (cell_b, _) = with_cell_changed(&final_state, states, Some(i), rng);
    let mut entries: Vec<(usize, usize)> = (0..states).flat_map(|a| (0..states).map(move |b| (a, b))).collect();
    rng.shuffle(&mut entries);
    let wrong = entries.into_iter().find_map(|(a, b)| {
        let mut r = rule.clone();
        r.table[a][b] = ((r.table[a][b] as usize + 1 + rng.index(states - 1)) % states) as u8;
        let out = simulate(&initial, &r, steps);
        (out != final_state).then_some(out)
    })?;
    let spec = CaForwardSpec {
        rule,
        initial,
        steps,
        final_state,
    };
    let distractors = vec![
        Distractor::new(WRONG_CELL, CaForwardSpec::answer_scene(&cell_a)),
        Distractor::new(WRONG_STEP_COUNT, CaForwardSpec::answer_scene(&before)),
        Distractor::new(WRONG_RULE, CaForwardSpec::answer_scene(&wrong)),
        Distractor::new(WRONG_CELL, CaForwardSpec::answer_scene(&cell_b)),
    ];
    Some(Generated {
        puzzle: spec.puzzle_scene(),
        solution: spec.solution_scene(),
        spec: TaskSpec::CaForward(spec),
        distractors,
        notes: BTreeMap::new(),
    })
}

fn off_by_one(rule: &CaRule, avoid: Option<(usize, usize)>, rng: &mut RngStream) -> (CaRule, (usize, usize)) {
    let s = rule.states;
    let mut at = (rng.index(s), rng.index(s));
    while Some(at) == avoid {
        at = (rng.index(s), rng.index(s));
    }
    let mut r = rule.clone();
    r.table[at.0][at.1] = ((r.table[at.0][at.1] as usize + 1) % s) as u8;
    (r, at)
}

fn build_inverse(n: usize, states: usize, steps: usize, rng: &mut RngStream) -> Option<Generated> {
    let rule = CaRule::random(states, rng);
    let transposed = rule.transposed();
    if transposed == rule {
        return None;
    }
    // resample the initial grid until the trajectory reads every table entry
    let initial = (0..64).find_map(|_| {
        let g = CaGrid::random(n, states, rng);
        coverage(&g, &rule, steps).iter().flatten().all(|&u| u).then_some(g)
    })?;
    let final_state = simulate(&initial, &rule, steps);
    let (obo_a, at) = off_by_one(&rule, None, rng);
    let (obo_b, _) = off_by_one(&rule, Some(at), rng);
    let mut rows: Vec<usize> = (0..states).filter(|&i| rule.table[i].iter().any(|&v| v as usize != i)).collect();
    rng.shuffle(&mut rows);
    let row = *rows.first()?;
    let mut partial = rule.clone();
    partial.table[row] = vec![row as u8; states];
    let spec = CaInverseSpec {
        rule,
        initial,
        steps,
        final_state,
    };
    let distractors = vec![
        Distractor::new(OFF_BY_ONE_RULE, CaInverseSpec::answer_scene(&obo_a)),
        Distractor::new(TRANSPOSED_RULE, CaInverseSpec::answer_scene(&transposed)),
        Distractor::new(PARTIAL_RULE, CaInverseSpec::answer_scene(&partial)),
        Distractor::new(OFF_BY_ONE_RULE, CaInverseSpec::answer_scene(&obo_b)),
    ];
    Some(Generated {
        puzzle: spec.puzzle_scene(),
        solution: spec.solution_scene(),
        spec: TaskSpec::CaInverse(spec),
        distractors,
        notes: BTreeMap::new(),
    })
}

fn read_params(task: TaskKind, params: &Params, max_states: usize) -> Result<(usize, usize, usize)> {
    let n = params.require_int(task, "grid")? as usize;
    let states = params.require_int(task, "states")? as usize;
    let steps = params.require_int(task, "steps")? as usize;
    if n < 3 || !(2..=max_states).contains(&states) || steps == 0 {
        return Err(Error::InvalidParams {
            task: task.name(),
            reason: format!("grid {n}, states {states}, steps {steps} out of range"),
        });
    }
    Ok((n, states, steps))
}

pub fn generate_forward(params: &Params, seed: u64) -> Result<Generated> {
    let task = TaskKind::CaForward;
    let (n, states, steps) = read_params(task, params, Palette::get().states.len())?;
    let (mut g, attempt) = with_retries(task, seed, |rng| build_forward(n, states, steps, rng))?;
    g.notes.insert("attempt".to_string(), Detail::from(attempt as usize));
    Ok(g)
}

pub fn generate_inverse(params: &Params, seed: u64) -> Result<Generated> {
    let task = TaskKind::CaInverse;
    let (n, states, steps) = read_params(task, params, Palette::get().states.len())?;
    let (mut g, attempt) = with_retries(task, seed, |rng| build_inverse(n, states, steps, rng))?;
    g.notes.insert("attempt".to_string(), Detail::from(attempt as usize));
    Ok(g)
}
