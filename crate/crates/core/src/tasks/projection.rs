//! Voxel solids: silhouettes from an isometric view (forward) and the solid
//! from three silhouettes (inverse).
//!
//! The isometric camera looks down the `(-1, -1, -1)` direction with a 2:1
//! dimetric screen mapping, so the `+z`, `+y` and `+x` faces are visible and
//! drawn light, mid and dark. Views are taken from the visible sides:
//!
//! | view  | viewer at | column    | row       |
//! |-------|-----------|-----------|-----------|
//! | front | `+y`      | `B-1-x`   | `B-1-z`   |
//! | side  | `+x`      | `y`       | `B-1-z`   |
//! | top   | `+z`      | `B-1-x`   | `y`       |

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::raven::verify_ssim;
use super::{Distractor, Generated, TaskSpec};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::scene::{palette, pt, rasterize, render, Point, RasterImage, Scene, Style};
use crate::seed::with_retries;
use crate::types::{Detail, Params, TaskKind, VerificationResult, FAILED_CHECKS};
use crate::vision::{sample_grid, ssim, ColorClasses, GridGeometry, SampleMode};

pub const LATTICE: usize = 4;
pub const SSIM_THRESHOLD: f64 = 0.99999;
const GENERATION_PX: u32 = 512;
const GROW_TRIES: usize = 200;

pub const CHECK_UNREADABLE: &str = "unreadable";
pub const CHECK_CELLS: &str = "cells";

pub const WRONG_AXIS: &str = "wrong_axis";
pub const MISSING_FEATURE: &str = "missing_feature";
pub const EXTRA_FEATURE: &str = "extra_feature";
pub const MIRRORED: &str = "mirrored";

pub const WRONG_DEPTH: &str = "wrong_depth";
pub const MISSING_FACE: &str = "missing_face";
pub const EXTRA_VOLUME: &str = "extra_volume";
pub const ROTATED: &str = "rotated";

const ISO_CANVAS: f64 = 100.0;
const ISO_UNIT: f64 = 9.0;
const VIEW_CANVAS: f64 = 100.0;
const VIEW_ORIGIN: f64 = 10.0;
const VIEW_CELL: f64 = 20.0;

pub fn expected_check(task: TaskKind, violation: &str) -> Option<&'static str> {
    match (task, violation) {
        (TaskKind::OrthoProjection, WRONG_AXIS | MISSING_FEATURE | EXTRA_FEATURE | MIRRORED) => Some(CHECK_CELLS),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum View {
    Front,
    Side,
    Top,
}

impl View {
    pub const ALL: [View; 3] = [View::Front, View::Side, View::Top];

    /// Silhouette cell `(row, col)` that voxel `v` projects to.
    pub fn cell(self, v: [usize; 3]) -> (usize, usize) {
        let b = LATTICE - 1;
        let [x, y, z] = v;
        match self {
            View::Front => (b - z, b - x),
            View::Side => (b - z, y),
            View::Top => (y, b - x),
        }
    }

    /// Unit direction the viewer looks along.
    fn direction(self) -> [f64; 3] {
        match self {
            View::Front => [0.0, -1.0, 0.0],
            View::Side => [-1.0, 0.0, 0.0],
            View::Top => [0.0, 0.0, -1.0],
        }
    }
}

pub type Silhouette = Vec<Vec<bool>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solid {
    pub voxels: BTreeSet<[usize; 3]>,
}

fn neighbours(v: [usize; 3]) -> impl Iterator<Item = [usize; 3]> {
    let b = LATTICE as i64;
    [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
        .into_iter()
        .filter_map(move |(dx, dy, dz)| {
            let (x, y, z) = (v[0] as i64 + dx, v[1] as i64 + dy, v[2] as i64 + dz);
            ((0..b).contains(&x) && (0..b).contains(&y) && (0..b).contains(&z)).then_some([x as usize, y as usize, z as usize])
        })
}

impl Solid {
    pub fn new(voxels: impl IntoIterator<Item = [usize; 3]>) -> Self {
        Self {
            voxels: voxels.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.voxels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.voxels.is_empty()
    }

    pub fn is_connected(&self) -> bool {
        let Some(&start) = self.voxels.iter().next() else { return true };
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for n in neighbours(v) {
                if self.voxels.contains(&n) && seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        seen.len() == self.voxels.len()
    }

    pub fn project(&self, view: View) -> Silhouette {
        let mut s = vec![vec![false; LATTICE]; LATTICE];
        for &v in &self.voxels {
            let (r, c) = view.cell(v);
            s[r][c] = true;
        }
        s
    }

    pub fn views(&self) -> [Silhouette; 3] {
        View::ALL.map(|v| self.project(v))
    }

    /// Largest solid with the given front, side and top silhouettes: a voxel
    /// is kept iff all three cells it projects to are filled.
    pub fn maximal(views: &[Silhouette; 3]) -> Self {
        let mut out = BTreeSet::new();
        for x in 0..LATTICE {
            for y in 0..LATTICE {
                for z in 0..LATTICE {
                    let v = [x, y, z];
                    if View::ALL.iter().zip(views).all(|(view, s)| {
                        let (r, c) = view.cell(v);
                        s[r][c]
                    }) {
                        out.insert(v);
                    }
                }
            }
        }
        Self { voxels: out }
    }

    /// Quarter turns about the vertical axis.
    pub fn rotated(&self, quarter_turns: usize) -> Self {
        let b = LATTICE - 1;
        Self::new(self.voxels.iter().map(|&[x, y, z]| {
            let (mut x, mut y) = (x, y);
            for _ in 0..quarter_turns % 4 {
                (x, y) = (y, b - x);
            }
            [x, y, z]
        }))
    }

    fn removable(&self) -> Vec<[usize; 3]> {
        self.voxels
            .iter()
            .copied()
            .filter(|v| {
                let mut rest = self.clone();
                rest.voxels.remove(v);
                rest.is_connected()
            })
            .collect()
    }
}

/// Face-adjacent accretion from a random seed voxel.
pub fn grow(count: usize, rng: &mut RngStream) -> Solid {
    let mut solid = Solid::new([[rng.index(LATTICE), rng.index(LATTICE), rng.index(LATTICE)]]);
    while solid.len() < count {
        let frontier: Vec<[usize; 3]> = solid
            .voxels
            .iter()
            .flat_map(|&v| neighbours(v))
            .filter(|n| !solid.voxels.contains(n))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let &next = rng.choose(&frontier).expect("lattice has room");
        solid.voxels.insert(next);
    }
    solid
}

fn iso(p: [f64; 3]) -> Point {
    let (x, y, z) = (p[0], p[1], p[2]);
    pt(ISO_CANVAS / 2.0 + (x - y) * ISO_UNIT, ISO_CANVAS / 2.0 + ((x + y) / 2.0 - z) * ISO_UNIT)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Face {
    Top,
    Left,
    Right,
}

fn face_polygon(v: [usize; 3], face: Face) -> Vec<Point> {
    let [x, y, z] = v.map(|c| c as f64);
    let corners = match face {
        Face::Top => [[x, y, z + 1.0], [x + 1.0, y, z + 1.0], [x + 1.0, y + 1.0, z + 1.0], [x, y + 1.0, z + 1.0]],
        Face::Left => [[x, y + 1.0, z], [x + 1.0, y + 1.0, z], [x + 1.0, y + 1.0, z + 1.0], [x, y + 1.0, z + 1.0]],
        Face::Right => [[x + 1.0, y, z], [x + 1.0, y + 1.0, z], [x + 1.0, y + 1.0, z + 1.0], [x + 1.0, y, z + 1.0]],
    };
    corners.into_iter().map(iso).collect()
}

/// Faces not hidden by a neighbouring voxel, in painter's order.
fn visible_faces(solid: &Solid) -> Vec<([usize; 3], Face)> {
    let mut order: Vec<[usize; 3]> = solid.voxels.iter().copied().collect();
    order.sort_by_key(|&[x, y, z]| (x + y + z, z, x));
    let mut out = Vec::new();
    for v in order {
        let [x, y, z] = v;
        let covered = |n: [usize; 3]| solid.voxels.contains(&n);
        if z + 1 == LATTICE || !covered([x, y, z + 1]) {
            out.push((v, Face::Top));
        }
        if y + 1 == LATTICE || !covered([x, y + 1, z]) {
            out.push((v, Face::Left));
        }
        if x + 1 == LATTICE || !covered([x + 1, y, z]) {
            out.push((v, Face::Right));
        }
    }
    out
}

/// Isometric drawing, optionally skipping one visible face.
fn iso_scene(solid: &Solid, skip: Option<usize>) -> Scene {
    let mut s = Scene::new(ISO_CANVAS);
    let ink = palette::named("ink");
    for (i, (v, face)) in visible_faces(solid).into_iter().enumerate() {
        if Some(i) == skip {
            continue;
        }
        let name = match face {
            Face::Top => "iso_top",
            Face::Left => "iso_left",
            Face::Right => "iso_right",
        };
        s.polygon(face_polygon(v, face), Style::fill_stroke(palette::named(name), ink, 0.35));
    }
    s
}

fn arrow(s: &mut Scene, from: Point, to: Point, width: f64) {
    let color = palette::named("axis_arrow");
    let (dx, dy) = (to.x - from.x, to.y - from.y);
    let len = dx.hypot(dy);
    let (ux, uy) = (dx / len, dy / len);
    let head = 3.0 * width;
    let base = pt(to.x - ux * head, to.y - uy * head);
    s.line(from, base, color, width);
    s.polygon(
        vec![to, pt(base.x - uy * head * 0.6, base.y + ux * head * 0.6), pt(base.x + uy * head * 0.6, base.y - ux * head * 0.6)],
        Style::fill(color),
    );
}

/// Arrow pointing at the lattice along the viewing direction of `view`.
fn view_arrow(s: &mut Scene, view: View) {
    let c = LATTICE as f64 / 2.0;
    let d = view.direction();
    let at = |t: f64| [c - d[0] * t, c - d[1] * t, c - d[2] * t];
    arrow(s, iso(at(c + 2.4)), iso(at(c + 0.5)), 1.4);
}

fn silhouette_scene(s: &Silhouette) -> Scene {
    let mut scene = Scene::new(VIEW_CANVAS);
    draw_silhouette(&mut scene, s, VIEW_ORIGIN, VIEW_ORIGIN, VIEW_CELL);
    scene
}

fn draw_silhouette(scene: &mut Scene, s: &Silhouette, x0: f64, y0: f64, cell: f64) {
    let filled = palette::named("silhouette_filled");
    let empty = palette::named("silhouette_empty");
    let line = palette::named("grid_line");
    for (r, row) in s.iter().enumerate() {
        for (c, &f) in row.iter().enumerate() {
            scene.rect(
                x0 + c as f64 * cell,
                y0 + r as f64 * cell,
                cell,
                cell,
                Style::fill_stroke(if f { filled } else { empty }, line, cell * 0.04),
            );
        }
    }
}

fn silhouette_geometry() -> GridGeometry {
    GridGeometry::square(VIEW_ORIGIN, VIEW_ORIGIN, VIEW_CELL, LATTICE, LATTICE)
}

fn filled_count(s: &Silhouette) -> usize {
    s.iter().flatten().filter(|&&f| f).count()
}

fn mirror(s: &Silhouette) -> Silhouette {
    s.iter().map(|row| row.iter().rev().copied().collect()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrthoSpec {
    pub solid: Solid,
    pub view: View,
    pub silhouette: Silhouette,
}

impl OrthoSpec {
    pub fn puzzle_scene(&self) -> Scene {
        let mut s = iso_scene(&self.solid, None);
        view_arrow(&mut s, self.view);
        s
    }

    pub fn solution_scene(&self) -> Scene {
        silhouette_scene(&self.silhouette)
    }

    pub fn verify(&self, candidate: &RasterImage) -> VerificationResult {
        let classes = ColorClasses::new(vec![palette::named("silhouette_filled"), palette::named("silhouette_empty")]);
        let geom = silhouette_geometry().to_pixels(VIEW_CANVAS, candidate);
        let sampled = sample_grid(candidate, &geom, &classes, SampleMode::CenterPatch);
        let total = LATTICE * LATTICE;
        let mut unreadable = 0;
        let mut diffs = Vec::new();
        for r in 0..LATTICE {
            for c in 0..LATTICE {
                match sampled[r][c] {
                    None => {
                        unreadable += 1;
                        diffs.push(vec![r, c]);
                    }
                    Some(k) if (k == 0) != self.silhouette[r][c] => diffs.push(vec![r, c]),
                    Some(_) => {}
                }
            }
        }
        if diffs.is_empty() {
            return VerificationResult::ok().with("diff_cells", 0usize).with("total", total);
        }
        let mut failed = Vec::new();
        if unreadable > 0 {
            failed.push(CHECK_UNREADABLE);
        }
        if diffs.len() > unreadable {
            failed.push(CHECK_CELLS);
        }
        VerificationResult::fail(failed[0], format!("{} of {total} cells differ", diffs.len()))
            .with(FAILED_CHECKS, failed)
            .with("diff_cells", diffs.len())
            .with("total", total)
            .with("first_mismatch", diffs[0].clone())
    }
}

fn build_ortho(faces: usize, concavities: usize, rng: &mut RngStream) -> Option<Generated> {
    let (solid, convex) = (0..GROW_TRIES).find_map(|_| {
        let start = grow(faces + concavities, rng);
        let mut solid = start.clone();
        for _ in 0..concavities {
            let options = solid.removable();
            let &v = rng.choose(&options)?;
            solid.voxels.remove(&v);
        }
        (concavities == 0 || solid.views() != start.views()).then_some((solid, start))
    })?;
    let view = *rng.choose(&View::ALL)?;
    let truth = solid.project(view);
    let mut others: Vec<View> = View::ALL.into_iter().filter(|&v| v != view).collect();
    rng.shuffle(&mut others);
    let wrong_axis = others.into_iter().map(|v| solid.project(v)).find(|s| *s != truth)?;
    let mirrored = mirror(&truth);
    if mirrored == truth {
        return None;
    }
    let cells: Vec<(usize, usize)> = (0..LATTICE).flat_map(|r| (0..LATTICE).map(move |c| (r, c))).collect();
    let mut filled: Vec<(usize, usize)> = cells.iter().copied().filter(|&(r, c)| truth[r][c]).collect();
    if filled.len() < 2 {
        return None;
    }
    rng.shuffle(&mut filled);
    let mut missing = truth.clone();
    missing[filled[0].0][filled[0].1] = false;
    // an extra cell touching the silhouette reads as a plausible protrusion
    let mut empty: Vec<(usize, usize)> = cells
        .iter()
        .copied()
        .filter(|&(r, c)| {
            !truth[r][c]
                && [(0i64, 1i64), (0, -1), (1, 0), (-1, 0)].iter().any(|&(dr, dc)| {
                    let (rr, cc) = (r as i64 + dr, c as i64 + dc);
                    (0..LATTICE as i64).contains(&rr) && (0..LATTICE as i64).contains(&cc) && truth[rr as usize][cc as usize]
                })
        })
        .collect();
    rng.shuffle(&mut empty);
    let &(er, ec) = empty.first()?;
    let mut extra = truth.clone();
    extra[er][ec] = true;
    let spec = OrthoSpec {
        solid,
        view,
        silhouette: truth,
    };
    let distractors = vec![
        Distractor::new(WRONG_AXIS, silhouette_scene(&wrong_axis)),
        Distractor::new(MISSING_FEATURE, silhouette_scene(&missing)),
        Distractor::new(EXTRA_FEATURE, silhouette_scene(&extra)),
        Distractor::new(MIRRORED, silhouette_scene(&mirrored)),
    ];
    let mut notes = BTreeMap::new();
    notes.insert("view".to_string(), Detail::from(format!("{:?}", view).to_lowercase()));
    notes.insert("pre_removal_voxels".to_string(), Detail::from(convex.len()));
    notes.insert("filled_cells".to_string(), Detail::from(filled_count(&spec.silhouette)));
    Some(Generated {
        puzzle: spec.puzzle_scene(),
        solution: spec.solution_scene(),
        spec: TaskSpec::OrthoProjection(spec),
        distractors,
        notes,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoRecSpec {
    pub solid: Solid,
    pub views: [Silhouette; 3],
}

/// Small cube pictogram with the viewing arrow of `view`.
fn view_icon(s: &mut Scene, view: View, cx: f64, cy: f64, scale: f64) {
    let mut icon = iso_scene(&Solid::new([[1, 1, 1], [2, 1, 1], [1, 2, 1], [2, 2, 1], [1, 1, 2], [2, 1, 2], [1, 2, 2], [2, 2, 2]]), None);
    view_arrow(&mut icon, view);
    s.embed(&icon, cx - ISO_CANVAS * scale / 2.0, cy - ISO_CANVAS * scale / 2.0, scale);
}

impl IsoRecSpec {
    pub fn puzzle_scene(&self) -> Scene {
        let mut s = Scene::new(200.0);
        for (i, (view, sil)) in View::ALL.iter().zip(&self.views).enumerate() {
            let x0 = 12.0 + i as f64 * 64.0;
            view_icon(&mut s, *view, x0 + 24.0, 60.0, 0.45);
            draw_silhouette(&mut s, sil, x0, 95.0, 12.0);
        }
        s
    }

    pub fn solution_scene(&self) -> Scene {
        iso_scene(&self.solid, None)
    }

    /// SSIM against the stored solid rendered at the candidate's resolution.
    pub fn verify(&self, candidate: &RasterImage) -> VerificationResult {
        match rasterize(&self.solution_scene(), candidate.width) {
            Ok(truth) => verify_ssim(candidate, &truth, SSIM_THRESHOLD),
            Err(e) => VerificationResult::fail("dimensions", e.to_string()),
        }
    }

    /// SSIM against a given ground-truth raster, failing on size mismatch.
    pub fn verify_against(&self, candidate: &RasterImage, truth: &RasterImage) -> VerificationResult {
        verify_ssim(candidate, truth, SSIM_THRESHOLD)
    }
}

fn distinct_render(truth: &RasterImage, scene: &Scene) -> bool {
    ssim(&render(scene, GENERATION_PX), truth).is_ok_and(|s| s < SSIM_THRESHOLD)
}

fn build_isorec(faces: usize, ambiguity: usize, rng: &mut RngStream) -> Option<Generated> {
    let solid = (0..GROW_TRIES).find_map(|_| {
        let start = grow(faces + ambiguity, rng);
        let views = start.views();
        if ambiguity == 0 {
            return (Solid::maximal(&views) == start).then_some(start);
        }
        let mut solid = start;
        for _ in 0..ambiguity {
            let mut options: Vec<[usize; 3]> = solid
                .removable()
                .into_iter()
                .filter(|v| {
                    let mut rest = solid.clone();
                    rest.voxels.remove(v);
                    rest.views() == views
                })
                .collect();
            rng.shuffle(&mut options);
            let v = *options.first()?;
            solid.voxels.remove(&v);
        }
        Some(solid)
    })?;
    let spec = IsoRecSpec {
        views: solid.views(),
        solid,
    };
    let truth = render(&spec.solution_scene(), GENERATION_PX);
    let solid = &spec.solid;

    let mut moves: Vec<([usize; 3], [usize; 3])> = solid
        .voxels
        .iter()
        .flat_map(|&v| neighbours(v).map(move |n| (v, n)))
        .filter(|(_, n)| !solid.voxels.contains(n))
        .collect();
    rng.shuffle(&mut moves);
    let depth = moves.into_iter().find_map(|(from, to)| {
        let mut s = solid.clone();
        s.voxels.remove(&from);
        s.voxels.insert(to);
        (s.is_connected() && s != *solid && distinct_render(&truth, &iso_scene(&s, None))).then_some(s)
    })?;

    let faces_n = visible_faces(solid).len();
    let mut face_ids: Vec<usize> = (0..faces_n).collect();
    rng.shuffle(&mut face_ids);
    let skip = face_ids.into_iter().find(|&i| distinct_render(&truth, &iso_scene(solid, Some(i))))?;

    let mut additions: Vec<[usize; 3]> = solid
        .voxels
        .iter()
        .flat_map(|&v| neighbours(v))
        .filter(|n| !solid.voxels.contains(n))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    rng.shuffle(&mut additions);
    let extra = additions.into_iter().find_map(|a| {
        let mut s = solid.clone();
        s.voxels.insert(a);
        distinct_render(&truth, &iso_scene(&s, None)).then_some(s)
    })?;

    let mut turns = vec![1, 2, 3];
    rng.shuffle(&mut turns);
    let rotated = turns.into_iter().find_map(|t| {
        let s = solid.rotated(t);
        (s != *solid && distinct_render(&truth, &iso_scene(&s, None))).then_some(s)
    })?;

    let distractors = vec![
        Distractor::new(WRONG_DEPTH, iso_scene(&depth, None)),
        Distractor::new(MISSING_FACE, iso_scene(solid, Some(skip))),
        Distractor::new(EXTRA_VOLUME, iso_scene(&extra, None)),
        Distractor::new(ROTATED, iso_scene(&rotated, None)),
    ];
    let mut notes = BTreeMap::new();
    notes.insert("maximal_voxels".to_string(), Detail::from(Solid::maximal(&spec.views).len()));
    Some(Generated {
        puzzle: spec.puzzle_scene(),
        solution: spec.solution_scene(),
        spec: TaskSpec::IsoReconstruction(spec),
        distractors,
        notes,
    })
}

fn read_params(task: TaskKind, params: &Params, second: &str, max_second: usize) -> Result<(usize, usize)> {
    let faces = params.require_int(task, "faces")? as usize;
    let extra = params.require_int(task, second)? as usize;
    if !(1..=20).contains(&faces) || extra > max_second {
        return Err(Error::InvalidParams {
            task: task.name(),
            reason: format!("faces {faces}, {second} {extra} out of range"),
        });
    }
    Ok((faces, extra))
}

pub fn generate_ortho(params: &Params, seed: u64) -> Result<Generated> {
    let task = TaskKind::OrthoProjection;
    let (faces, concavities) = read_params(task, params, "concavities", 4)?;
    let (mut g, attempt) = with_retries(task, seed, |rng| build_ortho(faces, concavities, rng))?;
    g.notes.insert("attempt".to_string(), Detail::from(attempt as usize));
    Ok(g)
}

pub fn generate_isorec(params: &Params, seed: u64) -> Result<Generated> {
    let task = TaskKind::IsoReconstruction;
    let (faces, ambiguity) = read_params(task, params, "ambiguity", 3)?;
    let (mut g, attempt) = with_retries(task, seed, |rng| build_isorec(faces, ambiguity, rng))?;
    g.notes.insert("attempt".to_string(), Detail::from(attempt as usize));
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Triple loop over the lattice, written per view from the table above.
    fn oracle(solid: &Solid, view: View) -> Silhouette {
        let b = LATTICE;
        let mut s = vec![vec![false; b]; b];
        for (r, row) in s.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                for d in 0..b {
                    let v = match view {
                        View::Front => [b - 1 - c, d, b - 1 - r],
                        View::Side => [d, c, b - 1 - r],
                        View::Top => [b - 1 - c, r, d],
                    };
                    *cell |= solid.voxels.contains(&v);
                }
            }
        }
        s
    }

    #[test]
    fn single_voxel_gives_single_cells() {
        let s = Solid::new([[0, 0, 0]]);
        for v in View::ALL {
            assert_eq!(filled_count(&s.project(v)), 1);
        }
        assert_eq!(Solid::maximal(&s.views()), s);
    }

    #[test]
    fn vertical_column() {
        let s = Solid::new((0..LATTICE).map(|z| [1, 2, z]));
        assert_eq!(filled_count(&s.project(View::Top)), 1);
        let front = s.project(View::Front);
        assert_eq!(filled_count(&front), LATTICE);
        assert!((0..LATTICE).all(|r| front[r][LATTICE - 2]));
    }

    #[test]
    fn projections_match_oracle() {
        let mut rng = RngStream::new(1);
        for _ in 0..50 {
            let s = grow(16, &mut rng);
            assert!(s.is_connected());
            for v in View::ALL {
                assert_eq!(s.project(v), oracle(&s, v));
            }
            let m = Solid::maximal(&s.views());
            assert!(s.voxels.is_subset(&m.voxels));
            assert_eq!(m.views(), s.views());
        }
    }

    #[test]
    fn rotation_is_a_quarter_turn() {
        let s = Solid::new([[0, 0, 0], [1, 0, 0]]);
        assert_eq!(s.rotated(1), Solid::new([[0, 3, 0], [0, 2, 0]]));
        assert_eq!(s.rotated(4), s);
    }

    #[test]
    fn ortho_round_trip_and_distractors() {
        for (seed, (f, c)) in [(6, 0), (10, 1), (16, 3)].into_iter().enumerate() {
            let g = generate_ortho(&Params::new().int("faces", f).int("concavities", c), seed as u64).unwrap();
            let TaskSpec::OrthoProjection(spec) = &g.spec else { unreachable!() };
            assert_eq!(spec.solid.len(), f as usize);
            assert!(spec.solid.is_connected());
            assert_eq!(spec.silhouette, oracle(&spec.solid, spec.view));
            for px in [512, 2048] {
                assert!(spec.verify(&rasterize(&g.solution, px).unwrap()).passed);
            }
            for d in &g.distractors {
                let r = spec.verify(&render(&d.scene, 512));
                assert_eq!(r.failed_check(), Some(CHECK_CELLS), "{}", d.violation);
                if d.violation == MIRRORED {
                    let m = mirror(&spec.silhouette);
                    let asym = (0..LATTICE)
                        .flat_map(|r| (0..LATTICE).map(move |c| (r, c)))
                        .filter(|&(r, c)| m[r][c] != spec.silhouette[r][c])
                        .count();
                    assert_eq!(r.detail_i64("diff_cells"), Some(asym as i64));
                }
            }
        }
    }

    #[test]
    fn isorec_round_trip_and_distractors() {
        for (seed, (f, a)) in [(6, 0), (10, 1), (16, 2)].into_iter().enumerate() {
            let g = generate_isorec(&Params::new().int("faces", f).int("ambiguity", a), seed as u64).unwrap();
            let TaskSpec::IsoReconstruction(spec) = &g.spec else { unreachable!() };
            assert_eq!(spec.solid.len(), f as usize);
            let maximal = Solid::maximal(&spec.views);
            assert!(spec.solid.voxels.is_subset(&maximal.voxels));
            if a == 0 {
                assert_eq!(maximal, spec.solid);
            }
            let truth = rasterize(&g.solution, 1024).unwrap();
            let r = spec.verify(&truth);
            assert!(r.passed);
            assert_eq!(r.detail_f64("ssim"), Some(1.0));
            for d in &g.distractors {
                let r = spec.verify(&render(&d.scene, 512));
                assert!(!r.passed, "{}", d.violation);
                assert!(r.detail_f64("ssim").unwrap() < SSIM_THRESHOLD);
            }
        }
    }

    #[test]
    fn isorec_dimension_mismatch() {
        let g = generate_isorec(&Params::new().int("faces", 6).int("ambiguity", 0), 3).unwrap();
        let TaskSpec::IsoReconstruction(spec) = &g.spec else { unreachable!() };
        let truth = rasterize(&g.solution, 1024).unwrap();
        let small = rasterize(&g.solution, 512).unwrap();
        assert_eq!(spec.verify_against(&small, &truth).failed_check(), Some("dimensions"));
    }
}
