//! Multi-layer mazes.
//!
//! Layers are perfect mazes carved by randomized depth-first search and drawn
//! side by side; portals join matching positions of adjacent layers. The
//! answer is a blue polyline through the cell centres of a start-to-end route.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{pick_failing, Distractor, Generated, TaskSpec};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::scene::{palette, pt, Palette, RasterImage, Scene, Style};
use crate::seed::with_retries;
use crate::types::{Detail, Params, TaskKind, VerificationResult, FAILED_CHECKS};
use crate::vision::{extract_path_cells, GridGeometry};

/// `(layer, row, col)`.
pub type Cell = (usize, usize, usize);

pub const NORTH: u8 = 1;
pub const EAST: u8 = 2;
pub const SOUTH: u8 = 4;
pub const WEST: u8 = 8;
const DIRS: [(u8, isize, isize); 4] = [(NORTH, -1, 0), (EAST, 0, 1), (SOUTH, 1, 0), (WEST, 0, -1)];

const UNIT: f64 = 10.0;
const WALL_WIDTH: f64 = 0.12;
const PATH_WIDTH: f64 = 0.5;
const END_RADIUS: f64 = 0.35;
const PORTAL_RADIUS: f64 = 0.3;
/// Rows of cells above the grids (label band).
const TOP: f64 = 1.5;

pub const CHECK_START: &str = "start";
pub const CHECK_END: &str = "end";
pub const CHECK_PASSABLE: &str = "passable";
pub const CHECK_CONNECTED: &str = "connected";
pub const CHECK_NO_PATH: &str = "no_path";

pub const WALL_BREACH: &str = "wall_breach";
pub const PORTAL_SKIP: &str = "portal_skip";
pub const DISCONNECTED: &str = "disconnected";
pub const WRONG_EXIT: &str = "wrong_exit";

pub fn expected_check(violation: &str) -> Option<&'static str> {
    match violation {
        WALL_BREACH => Some(CHECK_PASSABLE),
        PORTAL_SKIP | DISCONNECTED => Some(CHECK_CONNECTED),
        WRONG_EXIT => Some(CHECK_END),
        _ => None,
    }
}

/// Portal joining `(layer, row, col)` and `(layer + 1, row, col)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Portal {
    pub layer: usize,
    pub row: usize,
    pub col: usize,
    /// Index into the portal palette.
    pub color: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MazeSpec {
    pub grid: usize,
    pub layers: usize,
    /// Per layer, row-major open-side bitmask of every cell.
    pub open: Vec<Vec<u8>>,
    pub start: Cell,
    pub end: Cell,
    pub portals: Vec<Portal>,
    pub solution: Vec<Cell>,
}

/// Outcome of the four checks on an extracted cell set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathCheck {
    /// Cells in traced order.
    pub order: Vec<Cell>,
    /// Failed checks in check order, each with its offending cell.
    pub failures: Vec<(&'static str, Cell)>,
}

impl PathCheck {
    pub fn failed(&self) -> Vec<String> {
        self.failures.iter().map(|(c, _)| c.to_string()).collect()
    }
}

impl MazeSpec {
    fn mask(&self, (l, r, c): Cell) -> u8 {
        self.open[l][r * self.grid + c]
    }

    fn step(&self, (l, r, c): Cell, dr: isize, dc: isize) -> Option<Cell> {
        let r = r.checked_add_signed(dr)?;
        let c = c.checked_add_signed(dc)?;
        (r < self.grid && c < self.grid).then_some((l, r, c))
    }

    pub fn has_portal(&self, lower: usize, row: usize, col: usize) -> bool {
        self.portals
            .iter()
            .any(|p| p.layer == lower && p.row == row && p.col == col)
    }

    pub fn is_adjacent(a: Cell, b: Cell) -> bool {
        a.0 == b.0 && a.1.abs_diff(b.1) + a.2.abs_diff(b.2) == 1
    }

    pub fn is_portal_link(&self, a: Cell, b: Cell) -> bool {
        a.1 == b.1 && a.2 == b.2 && a.0.abs_diff(b.0) == 1 && self.has_portal(a.0.min(b.0), a.1, a.2)
    }

    /// Adjacent cells with no wall between them.
    pub fn is_passage(&self, a: Cell, b: Cell) -> bool {
        if !Self::is_adjacent(a, b) {
            return false;
        }
        DIRS.iter()
            .any(|&(bit, dr, dc)| self.step(a, dr, dc) == Some(b) && self.mask(a) & bit != 0)
    }

    /// Moves allowed by the maze: open sides and portals.
    pub fn legal_neighbors(&self, cell: Cell) -> Vec<Cell> {
        let mut out = Vec::with_capacity(5);
        for &(bit, dr, dc) in &DIRS {
            if self.mask(cell) & bit != 0 {
                if let Some(n) = self.step(cell, dr, dc) {
                    out.push(n);
                }
            }
        }
        let (l, r, c) = cell;
        if l > 0 && self.has_portal(l - 1, r, c) {
            out.push((l - 1, r, c));
        }
        if l + 1 < self.layers && self.has_portal(l, r, c) {
            out.push((l + 1, r, c));
        }
        out
    }

    /// Cells touching `cell` on the drawing: the four in-layer neighbours and
    /// the same position on adjacent layers.
    fn geometric_neighbors(&self, cell: Cell) -> Vec<Cell> {
        let mut out: Vec<Cell> = DIRS.iter().filter_map(|&(_, dr, dc)| self.step(cell, dr, dc)).collect();
        let (l, r, c) = cell;
        if l > 0 {
            out.push((l - 1, r, c));
        }
        if l + 1 < self.layers {
            out.push((l + 1, r, c));
        }
        out
    }

    /// Shortest legal route from `from` to `to` that avoids `blocked`.
    pub fn shortest_path(&self, from: Cell, to: Cell, blocked: &BTreeSet<Cell>) -> Option<Vec<Cell>> {
        let mut prev: BTreeMap<Cell, Cell> = BTreeMap::new();
        let mut queue = VecDeque::from([from]);
        prev.insert(from, from);
        while let Some(cur) = queue.pop_front() {
            if cur == to {
                let mut path = vec![cur];
                let mut at = cur;
                while at != from {
                    at = prev[&at];
                    path.push(at);
                }
                path.reverse();
                return Some(path);
            }
            for n in self.legal_neighbors(cur) {
                if !blocked.contains(&n) && !prev.contains_key(&n) {
                    prev.insert(n, cur);
                    queue.push_back(n);
                }
            }
        }
        None
    }

    fn distances(&self, from: Cell) -> BTreeMap<Cell, usize> {
        let mut dist = BTreeMap::from([(from, 0)]);
        let mut queue = VecDeque::from([from]);
        while let Some(cur) = queue.pop_front() {
            let d = dist[&cur];
            for n in self.legal_neighbors(cur) {
                dist.entry(n).or_insert_with(|| {
                    queue.push_back(n);
                    d + 1
                });
            }
        }
        dist
    }

    /// Orders `cells` into a walk from the start and runs the four checks.
    ///
    /// From each cell the walk prefers an unvisited legal neighbour, then an
    /// unvisited cell touching it on the drawing (through a wall or across
    /// layers), then the nearest unvisited cell.
    pub fn check_cells(&self, cells: &BTreeSet<Cell>) -> PathCheck {
        let mut order = Vec::with_capacity(cells.len());
        let mut visited = BTreeSet::new();
        let nearest = |from: Cell, visited: &BTreeSet<Cell>| {
            cells
                .iter()
                .filter(|c| !visited.contains(*c))
                .min_by_key(|c| (c.0.abs_diff(from.0), c.1.abs_diff(from.1) + c.2.abs_diff(from.2), **c))
                .copied()
        };
        let mut cur = if cells.contains(&self.start) {
            Some(self.start)
        } else {
            nearest(self.start, &visited)
        };
        while let Some(c) = cur {
            visited.insert(c);
            order.push(c);
            let pick = |ns: Vec<Cell>| ns.into_iter().find(|n| cells.contains(n) && !visited.contains(n));
            cur = pick(self.legal_neighbors(c))
                .or_else(|| pick(self.geometric_neighbors(c)))
                .or_else(|| nearest(c, &visited));
        }
        let mut failures = Vec::new();
        if let (Some(&first), Some(&last)) = (order.first(), order.last()) {
            if first != self.start {
                failures.push((CHECK_START, first));
            }
            if last != self.end {
                failures.push((CHECK_END, last));
            }
            if let Some(w) = order
                .windows(2)
                .find(|w| Self::is_adjacent(w[0], w[1]) && !self.is_passage(w[0], w[1]))
            {
                failures.push((CHECK_PASSABLE, w[1]));
            }
            if let Some(w) = order
                .windows(2)
                .find(|w| !Self::is_adjacent(w[0], w[1]) && !self.is_portal_link(w[0], w[1]))
            {
                failures.push((CHECK_CONNECTED, w[1]));
            }
        }
        PathCheck { order, failures }
    }

    pub fn canvas_size(&self) -> f64 {
        let n = self.grid as f64;
        let l = self.layers as f64;
        let width = l * n + (l - 1.0) + 2.0;
        let height = n + TOP + 1.0;
        width.max(height) * UNIT
    }

    /// Cell grid in scene units.
    pub fn geometry(&self) -> GridGeometry {
        GridGeometry::square(UNIT, TOP * UNIT, UNIT, self.grid, self.grid)
            .with_layers(self.layers, (self.grid as f64 + 1.0) * UNIT)
    }

    pub fn verify(&self, candidate: &RasterImage) -> VerificationResult {
        let geom = self.geometry().to_pixels(self.canvas_size(), candidate);
        let cells: BTreeSet<Cell> = extract_path_cells(candidate, &geom).into_iter().collect();
        if cells.is_empty() {
            return VerificationResult::fail(CHECK_NO_PATH, "no path detected").with("path_cells", 0usize);
        }
        let check = self.check_cells(&cells);
        match check.failures.first() {
            None => VerificationResult::ok().with("path_cells", cells.len()),
            Some(&(id, cell)) => VerificationResult::fail(id, format!("check `{id}` failed at cell {cell:?}"))
                .with("offending_cell", vec![cell.0, cell.1, cell.2])
                .with(FAILED_CHECKS, check.failed())
                .with("path_cells", cells.len()),
        }
    }

    fn base_scene(&self) -> Scene {
        let mut s = Scene::new(self.canvas_size());
        let geom = self.geometry();
        let wall = palette::named("wall");
        let ww = WALL_WIDTH * UNIT;
        for l in 0..self.layers {
            let (lx, ly, _, _) = geom.cell_rect(l, 0, 0);
            let side = self.grid as f64 * UNIT;
            s.text(lx + side / 2.0, ly - 0.75 * UNIT, 0.8 * UNIT, format!("L{}", l + 1), palette::named("ink"));
            for r in 0..self.grid {
                for c in 0..self.grid {
                    let (x, y, w, h) = geom.cell_rect(l, r, c);
                    let m = self.mask((l, r, c));
                    if m & NORTH == 0 {
                        s.line(pt(x, y), pt(x + w, y), wall, ww);
                    }
                    if m & WEST == 0 {
                        s.line(pt(x, y), pt(x, y + h), wall, ww);
                    }
                    if r + 1 == self.grid && m & SOUTH == 0 {
                        s.line(pt(x, y + h), pt(x + w, y + h), wall, ww);
                    }
                    if c + 1 == self.grid && m & EAST == 0 {
                        s.line(pt(x + w, y), pt(x + w, y + h), wall, ww);
                    }
                }
            }
        }
        let portal_colors = &Palette::get().portals;
        for p in &self.portals {
            for l in [p.layer, p.layer + 1] {
                let (cx, cy) = geom.cell_center(l, p.row, p.col);
                s.circle(cx, cy, PORTAL_RADIUS * UNIT, Style::fill(portal_colors[p.color % portal_colors.len()]));
            }
        }
        for (cell, name) in [(self.start, "start_green"), (self.end, "end_red")] {
            let (cx, cy) = geom.cell_center(cell.0, cell.1, cell.2);
            s.circle(cx, cy, END_RADIUS * UNIT, Style::fill(palette::named(name)));
        }
        s
    }

    /// Puzzle scene with `cells` drawn as blue polylines, one per run of
    /// in-layer adjacent cells.
    fn scene_with_path(&self, cells: &[Cell]) -> Scene {
        let mut s = self.base_scene();
        let geom = self.geometry();
        let blue = palette::named("path_blue");
        let mut run: Vec<Cell> = Vec::new();
        let flush = |run: &mut Vec<Cell>, s: &mut Scene| {
            if !run.is_empty() {
                let pts = run
                    .iter()
                    .map(|&(l, r, c)| {
                        let (x, y) = geom.cell_center(l, r, c);
                        pt(x, y)
                    })
                    .collect();
                s.polyline(pts, blue, PATH_WIDTH * UNIT);
                run.clear();
            }
        };
        for &cell in cells {
            if let Some(&last) = run.last() {
                if !Self::is_adjacent(last, cell) {
                    flush(&mut run, &mut s);
                }
            }
            run.push(cell);
        }
        flush(&mut run, &mut s);
        s
    }

    pub fn puzzle_scene(&self) -> Scene {
        self.base_scene()
    }

    pub fn solution_scene(&self) -> Scene {
        self.scene_with_path(&self.solution)
    }
}

fn carve(n: usize, rng: &mut RngStream) -> Vec<u8> {
    let mut open = vec![0u8; n * n];
    let mut seen = vec![false; n * n];
    let start = rng.index(n * n);
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(&cur) = stack.last() {
        let (r, c) = (cur / n, cur % n);
        let mut options: Vec<(u8, usize)> = Vec::with_capacity(4);
        for &(bit, dr, dc) in &DIRS {
            let (Some(nr), Some(nc)) = (r.checked_add_signed(dr), c.checked_add_signed(dc)) else {
                continue;
            };
            if nr < n && nc < n && !seen[nr * n + nc] {
                options.push((bit, nr * n + nc));
            }
        }
        if options.is_empty() {
            stack.pop();
            continue;
        }
        let (bit, next) = options[rng.index(options.len())];
        open[cur] |= bit;
        open[next] |= opposite(bit);
        seen[next] = true;
        stack.push(next);
    }
    open
}

fn opposite(bit: u8) -> u8 {
    match bit {
        NORTH => SOUTH,
        SOUTH => NORTH,
        EAST => WEST,
        _ => EAST,
    }
}

fn place_portals(n: usize, layers: usize, count: usize, rng: &mut RngStream) -> Vec<Portal> {
    if layers < 2 {
        return Vec::new();
    }
    let mut used = BTreeSet::new();
    let mut portals = Vec::with_capacity(count);
    for i in 0..count {
        // the first portals guarantee every layer pair is linked
        let layer = if i < layers - 1 { i } else { rng.index(layers - 1) };
        loop {
            let (row, col) = (rng.index(n), rng.index(n));
            if used.insert((layer, row, col)) {
                portals.push(Portal {
                    layer,
                    row,
                    col,
                    color: i,
                });
                break;
            }
        }
    }
    portals
}

fn cell_set(cells: &[Cell]) -> BTreeSet<Cell> {
    cells.iter().copied().collect()
}

/// Routes that cross exactly one wall: shortcuts between path cells first,
/// then (when shortcuts are scarce) detours through an off-path cell that
/// rejoin the path further on.
fn wall_breaches(spec: &MazeSpec, path: &[Cell], rng: &mut RngStream) -> Vec<(usize, Vec<Cell>)> {
    let index: BTreeMap<Cell, usize> = path.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let mut shortcuts = Vec::new();
    let mut entries = Vec::new();
    for (i, &p) in path.iter().enumerate() {
        for &(_, dr, dc) in &DIRS {
            let Some(q) = spec.step(p, dr, dc) else { continue };
            if spec.is_passage(p, q) {
                continue;
            }
            match index.get(&q) {
                Some(&j) if j > i + 1 => {
                    let mut route = path[..=i].to_vec();
                    route.extend_from_slice(&path[j..]);
                    shortcuts.push((i, route));
                }
                Some(_) => {}
                None => entries.push((i, q)),
            }
        }
    }
    rng.shuffle(&mut shortcuts);
    let locations: BTreeSet<usize> = shortcuts.iter().map(|(i, _)| *i).collect();
    if locations.len() >= 2 {
        return shortcuts;
    }
    let mut detours = Vec::new();
    for (i, q) in entries {
        // explore the side region behind the wall until it touches the path
        let mut prev = BTreeMap::from([(q, q)]);
        let mut queue = VecDeque::from([q]);
        let mut rejoin = None;
        while let Some(cur) = queue.pop_front() {
            for n in spec.legal_neighbors(cur) {
                if let Some(&k) = index.get(&n) {
                    if k > i + 1 && rejoin.map_or(true, |(best, _)| k < best) {
                        rejoin = Some((k, cur));
                    }
                } else if !prev.contains_key(&n) {
                    prev.insert(n, cur);
                    queue.push_back(n);
                }
            }
        }
        if let Some((k, last)) = rejoin {
            let mut branch = vec![last];
            while *branch.last().unwrap() != q {
                branch.push(prev[branch.last().unwrap()]);
            }
            branch.reverse();
            let mut route = path[..=i].to_vec();
            route.extend(branch);
            route.extend_from_slice(&path[k..]);
            detours.push((i, route));
        }
    }
    rng.shuffle(&mut detours);
    shortcuts.extend(detours);
    shortcuts
}

fn portal_skips(spec: &MazeSpec, path: &[Cell], rng: &mut RngStream) -> Vec<Vec<Cell>> {
    let mut out = Vec::new();
    for (j, &(l, r, c)) in path.iter().enumerate() {
        for nl in [l + 1, l.wrapping_sub(1)] {
            if nl >= spec.layers || spec.has_portal(l.min(nl), r, c) {
                continue;
            }
            let q = (nl, r, c);
            if path[..=j].contains(&q) {
                continue;
            }
            let blocked = cell_set(&path[..=j]);
            if let Some(rest) = spec.shortest_path(q, spec.end, &blocked) {
                let mut route = path[..=j].to_vec();
                route.extend(rest);
                out.push(route);
            }
        }
    }
    rng.shuffle(&mut out);
    out
}

fn removals(path: &[Cell], rng: &mut RngStream) -> Vec<Vec<Cell>> {
    let mut idx: Vec<usize> = (1..path.len().saturating_sub(1)).collect();
    rng.shuffle(&mut idx);
    idx.into_iter()
        .map(|i| {
            let mut route = path.to_vec();
            route.remove(i);
            route
        })
        .collect()
}

/// Routes leaving the path into a side branch and ending at its far end.
fn wrong_exits(spec: &MazeSpec, path: &[Cell], rng: &mut RngStream) -> Vec<Vec<Cell>> {
    let on_path = cell_set(path);
    let mut out = Vec::new();
    for (i, &p) in path.iter().enumerate() {
        for q in spec.legal_neighbors(p) {
            if on_path.contains(&q) {
                continue;
            }
            // farthest cell of the side region reachable from q
            let mut prev = BTreeMap::from([(q, q)]);
            let mut queue = VecDeque::from([q]);
            let mut last = q;
            while let Some(cur) = queue.pop_front() {
                last = cur;
                for n in spec.legal_neighbors(cur) {
                    if !on_path.contains(&n) && !prev.contains_key(&n) {
                        prev.insert(n, cur);
                        queue.push_back(n);
                    }
                }
            }
            let mut branch = vec![last];
            while *branch.last().unwrap() != q {
                branch.push(prev[branch.last().unwrap()]);
            }
            branch.reverse();
            let mut route = path[..=i].to_vec();
            route.extend(branch);
            out.push(route);
        }
    }
    rng.shuffle(&mut out);
    // ending one cell short is always available
    out.push(path[..path.len() - 1].to_vec());
    out
}

fn build(n: usize, layers: usize, portals: usize, rng: &mut RngStream) -> Option<Generated> {
    let open: Vec<Vec<u8>> = (0..layers).map(|_| carve(n, rng)).collect();
    let portals = place_portals(n, layers, portals, rng);
    let mut spec = MazeSpec {
        grid: n,
        layers,
        open,
        start: (0, rng.index(n), rng.index(n)),
        end: (0, 0, 0),
        portals,
        solution: Vec::new(),
    };
    let dist = spec.distances(spec.start);
    let mut far: Vec<(usize, Cell)> = dist
        .iter()
        .filter(|(c, &d)| c.0 == layers - 1 && d > 0)
        .map(|(c, d)| (*d, *c))
        .collect();
    if far.is_empty() {
        return None;
    }
    far.sort_by(|a, b| b.cmp(a));
    let top = far.len().div_ceil(4);
    spec.end = far[rng.index(top)].1;
    spec.solution = spec.shortest_path(spec.start, spec.end, &BTreeSet::new())?;
    if spec.solution.len() < 3 {
        return None;
    }
    let path = spec.solution.clone();
    let failures = |route: &Vec<Cell>| spec.check_cells(&cell_set(route)).failed();

    let breaches = wall_breaches(&spec, &path, rng);
    let first = pick_failing(breaches.iter().cloned(), CHECK_PASSABLE, |c| failures(&c.1))?;
    let mut notes = BTreeMap::new();
    let second = if layers > 1 {
        pick_failing(portal_skips(&spec, &path, rng), CHECK_CONNECTED, failures).map(|r| (PORTAL_SKIP, r))
    } else {
        notes.insert("portal_skip_substituted".to_string(), Detail::from(WALL_BREACH));
        let others = breaches.iter().filter(|(i, _)| *i != first.0).cloned();
        pick_failing(others, CHECK_PASSABLE, |c| failures(&c.1)).map(|(_, r)| (WALL_BREACH, r))
    }?;
    let third = pick_failing(removals(&path, rng), CHECK_CONNECTED, failures)?;
    let fourth = pick_failing(wrong_exits(&spec, &path, rng), CHECK_END, failures)?;

    let distractors = vec![
        Distractor::new(WALL_BREACH, spec.scene_with_path(&first.1)),
        Distractor::new(second.0, spec.scene_with_path(&second.1)),
        Distractor::new(DISCONNECTED, spec.scene_with_path(&third)),
        Distractor::new(WRONG_EXIT, spec.scene_with_path(&fourth)),
    ];
    Some(Generated {
        puzzle: spec.puzzle_scene(),
        solution: spec.solution_scene(),
        spec: TaskSpec::Maze(spec),
        distractors,
        notes,
    })
}

pub fn generate(params: &Params, seed: u64) -> Result<Generated> {
    let task = TaskKind::Maze;
    let n = params.require_int(task, "grid")? as usize;
    let layers = params.require_int(task, "layers")? as usize;
    let mut portals = params.require_int(task, "portals")? as usize;
    if layers == 1 {
        portals = 0;
    } else if portals < layers - 1 {
        return Err(Error::InvalidParams {
            task: task.name(),
            reason: format!("{layers} layers need at least {} portals", layers - 1),
        });
    }
    let (mut generated, attempt) = with_retries(task, seed, |rng| build(n, layers, portals, rng))?;
    generated.notes.insert("attempt".to_string(), Detail::from(attempt as usize));
    Ok(generated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::render;

    fn params(n: i64, l: i64, p: i64) -> Params {
        Params::new().int("grid", n).int("layers", l).int("portals", p)
    }

    fn spec_of(g: &Generated) -> &MazeSpec {
        match &g.spec {
            TaskSpec::Maze(s) => s,
            _ => unreachable!(),
        }
    }

    /// Independent reachability oracle over an explicit adjacency list.
    fn oracle_reachable(spec: &MazeSpec) -> BTreeSet<Cell> {
        let n = spec.grid;
        let mut adj: BTreeMap<Cell, Vec<Cell>> = BTreeMap::new();
        for l in 0..spec.layers {
            for r in 0..n {
                for c in 0..n {
                    let m = spec.open[l][r * n + c];
                    if m & EAST != 0 && c + 1 < n {
                        adj.entry((l, r, c)).or_default().push((l, r, c + 1));
                        adj.entry((l, r, c + 1)).or_default().push((l, r, c));
                    }
                    if m & SOUTH != 0 && r + 1 < n {
                        adj.entry((l, r, c)).or_default().push((l, r + 1, c));
                        adj.entry((l, r + 1, c)).or_default().push((l, r, c));
                    }
                }
            }
        }
        for p in &spec.portals {
            adj.entry((p.layer, p.row, p.col)).or_default().push((p.layer + 1, p.row, p.col));
            adj.entry((p.layer + 1, p.row, p.col)).or_default().push((p.layer, p.row, p.col));
        }
        let mut seen = BTreeSet::from([spec.start]);
        let mut stack = vec![spec.start];
        while let Some(c) = stack.pop() {
            for &n in adj.get(&c).map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        seen
    }

    #[test]
    fn carved_layers_are_perfect_mazes() {
        let mut rng = RngStream::new(3);
        let n = 9;
        let open = carve(n, &mut rng);
        let passages: u32 = open.iter().map(|m| m.count_ones()).sum::<u32>() / 2;
        assert_eq!(passages as usize, n * n - 1);
        // border cells never open outward
        for i in 0..n {
            assert_eq!(open[i] & NORTH, 0);
            assert_eq!(open[(n - 1) * n + i] & SOUTH, 0);
            assert_eq!(open[i * n] & WEST, 0);
            assert_eq!(open[i * n + n - 1] & EAST, 0);
        }
    }

    #[test]
    fn solutions_are_valid_and_oracle_reachable() {
        for (seed, p) in [(1, params(8, 1, 0)), (2, params(16, 2, 2)), (3, params(12, 3, 5))] {
            let g = generate(&p, seed).unwrap();
            let spec = spec_of(&g);
            assert!(oracle_reachable(spec).contains(&spec.end));
            let path = &spec.solution;
            assert_eq!(path[0], spec.start);
            assert_eq!(*path.last().unwrap(), spec.end);
            assert_eq!(spec.start.0, 0);
            assert_eq!(spec.end.0, spec.layers - 1);
            for w in path.windows(2) {
                assert!(spec.is_passage(w[0], w[1]) || spec.is_portal_link(w[0], w[1]));
            }
            assert!(spec.check_cells(&cell_set(path)).failures.is_empty());
        }
    }

    #[test]
    fn single_layer_has_no_portals_and_substitutes() {
        let g = generate(&params(8, 1, 4), 5).unwrap();
        let spec = spec_of(&g);
        assert!(spec.portals.is_empty());
        assert!(spec.solution.iter().all(|c| c.0 == 0));
        let kinds: Vec<&str> = g.distractors.iter().map(|d| d.violation.as_str()).collect();
        assert_eq!(kinds, vec![WALL_BREACH, WALL_BREACH, DISCONNECTED, WRONG_EXIT]);
        assert!(g.notes.contains_key("portal_skip_substituted"));
    }

    #[test]
    fn multi_layer_violations_are_distinct() {
        let g = generate(&params(16, 2, 2), 11).unwrap();
        let kinds: BTreeSet<&str> = g.distractors.iter().map(|d| d.violation.as_str()).collect();
        assert_eq!(kinds.len(), 4);
    }

    #[test]
    fn rendered_solution_round_trips() {
        let g = generate(&params(8, 1, 0), 7).unwrap();
        let spec = spec_of(&g);
        for px in [512, 1024] {
            let img = render(&g.solution, px);
            let geom = spec.geometry().to_pixels(spec.canvas_size(), &img);
            let got: BTreeSet<Cell> = extract_path_cells(&img, &geom).into_iter().collect();
            assert_eq!(got, cell_set(&spec.solution));
            assert!(spec.verify(&img).passed);
        }
    }

    #[test]
    fn truncated_path_fails_end_check() {
        let g = generate(&params(8, 1, 0), 9).unwrap();
        let spec = spec_of(&g);
        let short = &spec.solution[..spec.solution.len() - 1];
        let img = render(&spec.scene_with_path(short), 512);
        let r = spec.verify(&img);
        assert!(!r.passed);
        assert_eq!(r.failed_check(), Some(CHECK_END));
    }

    #[test]
    fn distractors_fail_their_intended_check() {
        for (seed, p) in [(21, params(8, 1, 0)), (22, params(16, 2, 2))] {
            let g = generate(&p, seed).unwrap();
            let spec = spec_of(&g);
            for d in &g.distractors {
                let r = spec.verify(&render(&d.scene, 512));
                assert!(!r.passed, "{}", d.violation);
                let want = expected_check(&d.violation).unwrap();
                assert!(r.failed_checks().iter().any(|c| c == want), "{} -> {:?}", d.violation, r);
            }
        }
    }

    #[test]
    fn disconnected_removes_exactly_one_cell() {
        let mut rng = RngStream::new(4);
        let path: Vec<Cell> = (0..6).map(|c| (0, 0, c)).collect();
        for route in removals(&path, &mut rng) {
            let diff: Vec<_> = cell_set(&path).difference(&cell_set(&route)).copied().collect();
            assert_eq!(diff.len(), 1);
            assert!(diff[0] != path[0] && diff[0] != path[5]);
        }
    }

    #[test]
    fn blank_image_reports_no_path() {
        let g = generate(&params(8, 1, 0), 1).unwrap();
        let r = g.spec.verify(&render(&Scene::new(10.0), 512));
        assert_eq!(r.failed_check(), Some(CHECK_NO_PATH));
    }
}
