//! Latin-square logic grids with pictorial clues.
//!
//! Symbols are identified by colour. Shapes cycle circle, square, triangle
//! over the symbol index, and the shape is the attribute class used by the
//! same/different connectors.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{pick_failing, Distractor, Generated, TaskSpec};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::scene::{palette, pt, Color, Palette, RasterImage, Scene, Style};
use crate::seed::with_retries;
use crate::types::{Detail, Params, TaskKind, VerificationResult, FAILED_CHECKS};
use crate::vision::{sample_grid, ColorClasses, GridGeometry, SampleMode};

pub const CHECK_UNREADABLE: &str = "unreadable";
pub const CHECK_LATIN: &str = "latin";
pub const CHECK_CONSTRAINTS: &str = "constraints";
pub const CHECK_MATCH: &str = "match";

pub const CONSTRAINT_VIOLATION: &str = "constraint_violation";
pub const SYMBOL_SWAP: &str = "symbol_swap";
pub const NON_UNIQUE: &str = "non_unique";

const CANVAS: f64 = 200.0;
const GRID_ORIGIN: f64 = 40.0;
const GRID_SIDE: f64 = 120.0;
const SYMBOL_RADIUS: f64 = 0.35;
const SHAPE_CLASSES: usize = 3;

pub fn expected_check(violation: &str) -> Option<&'static str> {
    match violation {
        CONSTRAINT_VIOLATION | NON_UNIQUE => Some(CHECK_CONSTRAINTS),
        SYMBOL_SWAP => Some(CHECK_LATIN),
        _ => None,
    }
}

pub fn shape_class(symbol: usize) -> usize {
    symbol % SHAPE_CLASSES
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Line {
    Row,
    Col,
}

/// Clues, all true of the stored solution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Constraint {
    /// Border arrow: `symbol` lies in the half of the line nearest the arrow
    /// (the first `ceil(n/2)` cells counted from that side).
    Placement {
        line: Line,
        index: usize,
        from_end: bool,
        symbol: usize,
    },
    Exclude { row: usize, col: usize, symbol: usize },
    /// Orthogonal neighbours share a shape class.
    Same { a: (usize, usize), b: (usize, usize) },
    Different { a: (usize, usize), b: (usize, usize) },
}

impl Constraint {
    #[cfg(test)]
    fn type_index(&self) -> usize {
        match self {
            Constraint::Placement { .. } => 0,
            Constraint::Exclude { .. } => 1,
            Constraint::Same { .. } => 2,
            Constraint::Different { .. } => 3,
        }
    }

    /// Cells of the arrowed half of a placement line.
    fn placement_cells(n: usize, line: Line, index: usize, from_end: bool) -> Vec<(usize, usize)> {
        let half = n.div_ceil(2);
        (0..half)
            .map(|k| if from_end { n - 1 - k } else { k })
            .map(|k| match line {
                Line::Row => (index, k),
                Line::Col => (k, index),
            })
            .collect()
    }

    pub fn holds(&self, grid: &[Vec<usize>]) -> bool {
        let n = grid.len();
        match *self {
            Constraint::Placement {
                line,
                index,
                from_end,
                symbol,
            } => Self::placement_cells(n, line, index, from_end)
                .iter()
                .any(|&(r, c)| grid[r][c] == symbol),
            Constraint::Exclude { row, col, symbol } => grid[row][col] != symbol,
            Constraint::Same { a, b } => shape_class(grid[a.0][a.1]) == shape_class(grid[b.0][b.1]),
            Constraint::Different { a, b } => shape_class(grid[a.0][a.1]) != shape_class(grid[b.0][b.1]),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Given {
    pub row: usize,
    pub col: usize,
    pub symbol: usize,
}

pub fn is_latin(grid: &[Vec<usize>]) -> bool {
    let n = grid.len();
    (0..n).all(|i| {
        let mut row = vec![false; n];
        let mut col = vec![false; n];
        (0..n).all(|j| {
            let (a, b) = (grid[i][j], grid[j][i]);
            if a >= n || b >= n || row[a] || col[b] {
                return false;
            }
            row[a] = true;
            col[b] = true;
            true
        })
    })
}

/// Backtracking with forward checking and smallest-domain branching.
pub struct Solver {
    n: usize,
    initial: Vec<u16>,
    /// `(other cell, same class)` links per cell.
    links: Vec<Vec<(usize, bool)>>,
    class_masks: Vec<u16>,
}

impl Solver {
    pub fn new(n: usize, constraints: &[Constraint], givens: &[Given]) -> Self {
        let full = (1u16 << n) - 1;
        let mut initial = vec![full; n * n];
        let mut links = vec![Vec::new(); n * n];
        for c in constraints {
            match *c {
                Constraint::Placement {
                    line,
                    index,
                    from_end,
                    symbol,
                } => {
                    let inside = Constraint::placement_cells(n, line, index, from_end);
                    for k in 0..n {
                        let cell = match line {
                            Line::Row => (index, k),
                            Line::Col => (k, index),
                        };
                        if !inside.contains(&cell) {
                            initial[cell.0 * n + cell.1] &= !(1 << symbol);
                        }
                    }
                }
                Constraint::Exclude { row, col, symbol } => initial[row * n + col] &= !(1 << symbol),
                Constraint::Same { a, b } | Constraint::Different { a, b } => {
                    let same = matches!(c, Constraint::Same { .. });
                    let (ia, ib) = (a.0 * n + a.1, b.0 * n + b.1);
                    links[ia].push((ib, same));
                    links[ib].push((ia, same));
                }
            }
        }
        for g in givens {
            initial[g.row * n + g.col] &= 1 << g.symbol;
        }
        let class_masks = (0..SHAPE_CLASSES)
            .map(|k| (0..n).filter(|&s| shape_class(s) == k).fold(0u16, |m, s| m | 1 << s))
            .collect();
        Self {
            n,
            initial,
            links,
            class_masks,
        }
    }

    /// Up to `limit` solutions.
    pub fn solve(&self, limit: usize) -> Vec<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        let mut dom = self.initial.clone();
        let mut fixed = vec![false; dom.len()];
        let queue: Vec<usize> = (0..dom.len()).filter(|&i| dom[i].count_ones() == 1).collect();
        if self.propagate(&mut dom, &mut fixed, queue) {
            self.search(dom, fixed, limit, &mut out);
        }
        out
    }

    pub fn count(&self, limit: usize) -> usize {
        self.solve(limit).len()
    }

    fn propagate(&self, dom: &mut [u16], fixed: &mut [bool], mut queue: Vec<usize>) -> bool {
        let n = self.n;
        while let Some(i) = queue.pop() {
            if fixed[i] {
                continue;
            }
            if dom[i] == 0 {
                return false;
            }
            fixed[i] = true;
            let v = dom[i].trailing_zeros() as usize;
            let (r, c) = (i / n, i % n);
            let peers = (0..n).map(|k| r * n + k).chain((0..n).map(|k| k * n + c));
            let mut touched: Vec<(usize, u16)> = peers.filter(|&p| p != i).map(|p| (p, !(1u16 << v))).collect();
            let cm = self.class_masks[shape_class(v)];
            touched.extend(self.links[i].iter().map(|&(o, same)| (o, if same { cm } else { !cm })));
            for (p, mask) in touched {
                let before = dom[p];
                dom[p] &= mask;
                if dom[p] == 0 {
                    return false;
                }
                if dom[p] != before && dom[p].count_ones() == 1 {
                    queue.push(p);
                }
            }
        }
        true
    }

    fn search(&self, dom: Vec<u16>, fixed: Vec<bool>, limit: usize, out: &mut Vec<Vec<Vec<usize>>>) {
        if out.len() >= limit {
            return;
        }
        let pick = (0..dom.len())
            .filter(|&i| !fixed[i])
            .min_by_key(|&i| dom[i].count_ones());
        let Some(i) = pick else {
            let n = self.n;
            out.push(
                (0..n)
                    .map(|r| (0..n).map(|c| dom[r * n + c].trailing_zeros() as usize).collect())
                    .collect(),
            );
            return;
        };
        let mut bits = dom[i];
        while bits != 0 && out.len() < limit {
            let v = bits.trailing_zeros();
            bits &= bits - 1;
            let mut d = dom.clone();
            let mut f = fixed.clone();
            d[i] = 1 << v;
            if self.propagate(&mut d, &mut f, vec![i]) {
                self.search(d, f, limit, out);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicGridSpec {
    pub n: usize,
    pub solution: Vec<Vec<usize>>,
    pub constraints: Vec<Constraint>,
    pub givens: Vec<Given>,
}

fn symbol_color(symbol: usize) -> Color {
    Palette::get().symbols[symbol]
}

fn draw_symbol(s: &mut Scene, symbol: usize, cx: f64, cy: f64, r: f64) {
    let style = Style::fill(symbol_color(symbol));
    match shape_class(symbol) {
        0 => s.circle(cx, cy, r, style),
        1 => s.rect(cx - 0.85 * r, cy - 0.85 * r, 1.7 * r, 1.7 * r, style),
        _ => s.polygon(
            vec![pt(cx, cy - r), pt(cx - 0.95 * r, cy + 0.75 * r), pt(cx + 0.95 * r, cy + 0.75 * r)],
            style,
        ),
    }
}

impl LogicGridSpec {
    fn cell(&self) -> f64 {
        GRID_SIDE / self.n as f64
    }

    fn cell_center(&self, r: usize, c: usize) -> (f64, f64) {
        let cell = self.cell();
        (GRID_ORIGIN + (c as f64 + 0.5) * cell, GRID_ORIGIN + (r as f64 + 0.5) * cell)
    }

    pub fn geometry(&self) -> GridGeometry {
        GridGeometry::square(GRID_ORIGIN, GRID_ORIGIN, self.cell(), self.n, self.n)
    }

    fn board(&self) -> Scene {
        let mut s = Scene::new(CANVAS);
        let line = palette::named("grid_line");
        for k in 0..=self.n {
            let t = GRID_ORIGIN + k as f64 * self.cell();
            s.line(pt(GRID_ORIGIN, t), pt(GRID_ORIGIN + GRID_SIDE, t), line, 0.6);
            s.line(pt(t, GRID_ORIGIN), pt(t, GRID_ORIGIN + GRID_SIDE), line, 0.6);
        }
        s
    }

    /// Rendering of any filled grid on the solution layout.
    pub fn grid_scene(&self, grid: &[Vec<usize>]) -> Scene {
        let mut s = self.board();
        let r = SYMBOL_RADIUS * self.cell();
        for (i, row) in grid.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let (cx, cy) = self.cell_center(i, j);
                draw_symbol(&mut s, v, cx, cy, r);
            }
        }
        s
    }

    pub fn solution_scene(&self) -> Scene {
        self.grid_scene(&self.solution)
    }

    pub fn puzzle_scene(&self) -> Scene {
        let mut s = self.board();
        let ink = palette::named("ink");
        let cell = self.cell();
        let end = GRID_ORIGIN + GRID_SIDE;
        for g in &self.givens {
            let (cx, cy) = self.cell_center(g.row, g.col);
            draw_symbol(&mut s, g.symbol, cx, cy, SYMBOL_RADIUS * cell);
        }
        let mut corner_use = vec![0usize; self.n * self.n];
        for c in &self.constraints {
            match *c {
                Constraint::Placement {
                    line,
                    index,
                    from_end,
                    symbol,
                } => {
                    let mid = GRID_ORIGIN + (index as f64 + 0.5) * cell;
                    let (tail, head) = if from_end { (end + 16.0, end + 2.0) } else { (GRID_ORIGIN - 16.0, GRID_ORIGIN - 2.0) };
                    let dir = if from_end { -1.0 } else { 1.0 };
                    let (p, q, a, b) = match line {
                        Line::Row => (
                            pt(tail + 5.0 * dir, mid),
                            pt(head, mid),
                            pt(head - 3.0 * dir, mid - 2.0),
                            pt(head - 3.0 * dir, mid + 2.0),
                        ),
                        Line::Col => (
                            pt(mid, tail + 5.0 * dir),
                            pt(mid, head),
                            pt(mid - 2.0, head - 3.0 * dir),
                            pt(mid + 2.0, head - 3.0 * dir),
                        ),
                    };
                    s.line(p, q, ink, 0.8);
                    s.polygon(vec![q, a, b], Style::fill(ink));
                    let (sx, sy) = match line {
                        Line::Row => (tail, mid),
                        Line::Col => (mid, tail),
                    };
                    draw_symbol(&mut s, symbol, sx, sy, 3.5);
                }
                Constraint::Exclude { row, col, symbol } => {
                    let k = corner_use[row * self.n + col];
                    corner_use[row * self.n + col] += 1;
                    let (cx, cy) = self.cell_center(row, col);
                    let off = 0.32 * cell;
                    let (dx, dy) = [(-off, -off), (off, -off), (-off, off), (off, off)][k % 4];
                    let r = 0.12 * cell;
                    let (x, y) = (cx + dx, cy + dy);
                    draw_symbol(&mut s, symbol, x, y, r);
                    s.line(pt(x - r, y - r), pt(x + r, y + r), ink, 0.5);
                    s.line(pt(x - r, y + r), pt(x + r, y - r), ink, 0.5);
                }
                Constraint::Same { a, b } | Constraint::Different { a, b } => {
                    let (ax, ay) = self.cell_center(a.0, a.1);
                    let (bx, by) = self.cell_center(b.0, b.1);
                    let (mx, my) = ((ax + bx) / 2.0, (ay + by) / 2.0);
                    let h = 0.1 * cell;
                    let bg = palette::named("background");
                    s.rect(mx - 1.6 * h, my - 1.6 * h, 3.2 * h, 3.2 * h, Style::fill(bg));
                    for off in [-0.45 * h, 0.45 * h] {
                        s.line(pt(mx - h, my + off), pt(mx + h, my + off), ink, 0.4);
                    }
                    if matches!(c, Constraint::Different { .. }) {
                        s.line(pt(mx - 0.6 * h, my + 1.3 * h), pt(mx + 0.6 * h, my - 1.3 * h), ink, 0.4);
                    }
                }
            }
        }
        let spacing = 12.0;
        let x0 = CANVAS / 2.0 - (self.n as f64 - 1.0) * spacing / 2.0;
        for k in 0..self.n {
            draw_symbol(&mut s, k, x0 + k as f64 * spacing, 192.0, 4.0);
        }
        s
    }

    /// Ids of constraints the grid breaks; givens follow the constraints.
    pub fn violated(&self, grid: &[Vec<usize>]) -> Vec<usize> {
        let mut ids: Vec<usize> = (0..self.constraints.len())
            .filter(|&i| !self.constraints[i].holds(grid))
            .collect();
        let base = self.constraints.len();
        ids.extend((0..self.givens.len()).filter(|&i| {
            let g = self.givens[i];
            grid[g.row][g.col] != g.symbol
        }).map(|i| base + i));
        ids
    }

    pub fn check_grid(&self, grid: &[Vec<usize>]) -> VerificationResult {
        let mut failed = Vec::new();
        let latin = is_latin(grid);
        if !latin {
            failed.push(CHECK_LATIN);
        }
        let violated = self.violated(grid);
        if !violated.is_empty() {
            failed.push(CHECK_CONSTRAINTS);
        }
        let mismatched: Vec<Vec<usize>> = (0..self.n)
            .flat_map(|r| (0..self.n).map(move |c| (r, c)))
            .filter(|&(r, c)| grid[r][c] != self.solution[r][c])
            .map(|(r, c)| vec![r, c])
            .collect();
        if !mismatched.is_empty() {
            failed.push(CHECK_MATCH);
        }
        if failed.is_empty() {
            return VerificationResult::ok();
        }
        let reason = match failed[0] {
            CHECK_LATIN => "grid is not a Latin square".to_string(),
            CHECK_CONSTRAINTS => format!("constraint {} violated", violated[0]),
            _ => format!("{} cells differ from the solution", mismatched.len()),
        };
        let mut res = VerificationResult::fail(failed[0], reason)
            .with(FAILED_CHECKS, failed)
            .with("violated", violated.clone())
            .with("mismatched_cells", mismatched.len());
        if let Some(&first) = violated.first() {
            res = res.with("constraint_id", first);
        }
        if let Some(cell) = mismatched.first() {
            res = res.with("first_mismatch", cell.clone());
        }
        res
    }

    pub fn read_grid(&self, candidate: &RasterImage) -> Vec<Vec<Option<usize>>> {
        let classes = ColorClasses::new(Palette::get().symbols[..self.n].to_vec());
        let geom = self.geometry().to_pixels(CANVAS, candidate);
        sample_grid(candidate, &geom, &classes, SampleMode::InverseDistanceVote)
    }

    pub fn verify(&self, candidate: &RasterImage) -> VerificationResult {
        let sampled = self.read_grid(candidate);
        let unreadable: Vec<Vec<usize>> = (0..self.n)
            .flat_map(|r| (0..self.n).map(move |c| (r, c)))
            .filter(|&(r, c)| sampled[r][c].is_none())
            .map(|(r, c)| vec![r, c])
            .collect();
        if !unreadable.is_empty() {
            return VerificationResult::fail(CHECK_UNREADABLE, format!("{} cells unreadable", unreadable.len()))
                .with("first_unreadable", unreadable[0].clone());
        }
        let grid: Vec<Vec<usize>> = sampled.into_iter().map(|row| row.into_iter().flatten().collect()).collect();
        self.check_grid(&grid)
    }
}

pub fn random_latin(n: usize, rng: &mut RngStream) -> Vec<Vec<usize>> {
    let rows = rng.permutation(n);
    let cols = rng.permutation(n);
    let syms = rng.permutation(n);
    (0..n)
        .map(|r| (0..n).map(|c| syms[(rows[r] + cols[c]) % n]).collect())
        .collect()
}

fn adjacent_pairs(n: usize) -> Vec<((usize, usize), (usize, usize))> {
    let mut out = Vec::new();
    for r in 0..n {
        for c in 0..n {
            if c + 1 < n {
                out.push(((r, c), (r, c + 1)));
            }
            if r + 1 < n {
                out.push(((r, c), (r + 1, c)));
            }
        }
    }
    out
}

/// Shuffled pools of true constraints, one per type.
fn candidate_pools(sol: &[Vec<usize>], types: usize, rng: &mut RngStream) -> Vec<Vec<Constraint>> {
    let n = sol.len();
    let mut pools = vec![Vec::new(); 4];
    for line in [Line::Row, Line::Col] {
        for index in 0..n {
            for from_end in [false, true] {
                let cells = Constraint::placement_cells(n, line, index, from_end);
                let &(r, c) = rng.choose(&cells).expect("non-empty line");
                pools[0].push(Constraint::Placement {
                    line,
                    index,
                    from_end,
                    symbol: sol[r][c],
                });
            }
        }
    }
    for r in 0..n {
        for c in 0..n {
            for symbol in (0..n).filter(|&s| s != sol[r][c]) {
                pools[1].push(Constraint::Exclude { row: r, col: c, symbol });
            }
        }
    }
    for (a, b) in adjacent_pairs(n) {
        if shape_class(sol[a.0][a.1]) == shape_class(sol[b.0][b.1]) {
            pools[2].push(Constraint::Same { a, b });
        } else {
            pools[3].push(Constraint::Different { a, b });
        }
    }
    pools.truncate(types);
    for p in pools.iter_mut() {
        rng.shuffle(p);
    }
    pools
}

struct Selection {
    constraints: Vec<Constraint>,
    givens: Vec<Given>,
    redundant: usize,
}

fn select(sol: &[Vec<usize>], target: usize, types: usize, rng: &mut RngStream) -> Option<Selection> {
    let n = sol.len();
    let mut pools = candidate_pools(sol, types, rng);
    let mut corner_use = vec![0usize; n * n];
    let mut next = move |k: usize, corner_use: &mut Vec<usize>| -> Option<Constraint> {
        let pool = &mut pools[k % types];
        while let Some(c) = pool.pop() {
            if let Constraint::Exclude { row, col, .. } = c {
                if corner_use[row * n + col] >= 4 {
                    continue;
                }
                corner_use[row * n + col] += 1;
            }
            return Some(c);
        }
        None
    };
    let mut constraints = Vec::new();
    let mut unique = false;
    let mut turn = 0;
    let mut idle = 0;
    while constraints.len() < target && idle < types {
        match next(turn, &mut corner_use) {
            Some(c) => {
                idle = 0;
                constraints.push(c);
                if !unique {
                    unique = Solver::new(n, &constraints, &[]).count(2) == 1;
                }
            }
            None => idle += 1,
        }
        turn += 1;
    }
    if constraints.len() < target {
        return None;
    }
    let mut givens = Vec::new();
    loop {
        let sols = Solver::new(n, &constraints, &givens).solve(2);
        if sols.len() == 1 {
            break;
        }
        let other = sols.iter().find(|s| s.as_slice() != sol)?;
        let diff: Vec<(usize, usize)> = (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .filter(|&(r, c)| other[r][c] != sol[r][c])
            .collect();
        let &(row, col) = rng.choose(&diff)?;
        givens.push(Given {
            row,
            col,
            symbol: sol[row][col],
        });
    }
    let redundant = constraints
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            let mut rest = constraints.clone();
            rest.remove(*i);
            Solver::new(n, &rest, &givens).count(2) == 1
        })
        .count();
    Some(Selection {
        constraints,
        givens,
        redundant,
    })
}

fn edit_to_violate(spec: &LogicGridSpec, id: usize, rng: &mut RngStream) -> Option<Vec<Vec<usize>>> {
    let n = spec.n;
    let mut g = spec.solution.clone();
    let other_than = |v: usize, rng: &mut RngStream, ok: &dyn Fn(usize) -> bool| -> Option<usize> {
        let mut opts: Vec<usize> = (0..n).filter(|&s| s != v && ok(s)).collect();
        rng.shuffle(&mut opts);
        opts.first().copied()
    };
    if id >= spec.constraints.len() {
        let gv = spec.givens[id - spec.constraints.len()];
        g[gv.row][gv.col] = other_than(gv.symbol, rng, &|_| true)?;
        return Some(g);
    }
    match spec.constraints[id] {
        Constraint::Placement {
            line,
            index,
            from_end,
            symbol,
        } => {
            let (r, c) = Constraint::placement_cells(n, line, index, from_end)
                .into_iter()
                .find(|&(r, c)| g[r][c] == symbol)?;
            g[r][c] = other_than(symbol, rng, &|_| true)?;
        }
        Constraint::Exclude { row, col, symbol } => g[row][col] = symbol,
        Constraint::Same { a, b } => {
            let ca = shape_class(g[a.0][a.1]);
            g[b.0][b.1] = other_than(g[b.0][b.1], rng, &|s| shape_class(s) != ca)?;
        }
        Constraint::Different { a, b } => {
            let ca = shape_class(g[a.0][a.1]);
            g[b.0][b.1] = other_than(g[b.0][b.1], rng, &|s| shape_class(s) == ca)?;
        }
    }
    Some(g)
}

fn constraint_violations(spec: &LogicGridSpec, rng: &mut RngStream) -> Vec<(usize, Vec<Vec<usize>>)> {
    let mut ids: Vec<usize> = (0..spec.constraints.len() + spec.givens.len()).collect();
    rng.shuffle(&mut ids);
    ids.into_iter()
        .filter_map(|id| edit_to_violate(spec, id, rng).map(|g| (id, g)))
        .filter(|(id, g)| spec.violated(g).contains(id))
        .collect()
}

fn symbol_swap(spec: &LogicGridSpec, rng: &mut RngStream) -> Vec<Vec<usize>> {
    let n = spec.n;
    let r = rng.index(n);
    let a = rng.index(n);
    let b = (a + 1 + rng.index(n - 1)) % n;
    let mut g = spec.solution.clone();
    g[r].swap(a, b);
    g
}

/// A Latin square satisfying every clue but one; relaxes further clues when
/// each one alone is redundant. Returns the grid and how many were dropped.
fn non_unique(spec: &LogicGridSpec, rng: &mut RngStream) -> Option<(Vec<Vec<usize>>, usize)> {
    let total = spec.constraints.len() + spec.givens.len();
    let mut order: Vec<usize> = (0..total).collect();
    rng.shuffle(&mut order);
    for drop_count in 1..=total {
        for start in 0..total {
            let dropped: Vec<usize> = (0..drop_count).map(|k| order[(start + k) % total]).collect();
            let cs: Vec<Constraint> = (0..spec.constraints.len())
                .filter(|i| !dropped.contains(i))
                .map(|i| spec.constraints[i].clone())
                .collect();
            let gs: Vec<Given> = (0..spec.givens.len())
                .filter(|i| !dropped.contains(&(spec.constraints.len() + i)))
                .map(|i| spec.givens[i])
                .collect();
            let found = Solver::new(spec.n, &cs, &gs)
                .solve(2)
                .into_iter()
                .find(|s| *s != spec.solution);
            if let Some(g) = found {
                return Some((g, drop_count));
            }
            if drop_count == total {
                break;
            }
        }
    }
    None
}

fn build(n: usize, target: usize, types: usize, rng: &mut RngStream) -> Option<Generated> {
    let solution = random_latin(n, rng);
    let sel = select(&solution, target, types, rng)?;
    let spec = LogicGridSpec {
        n,
        solution,
        constraints: sel.constraints,
        givens: sel.givens,
    };
    let failures = |g: &Vec<Vec<usize>>| spec.check_grid(g).failed_checks();
    let mut cv = constraint_violations(&spec, rng);
    let first = cv.first()?.0;
    let cv_a = cv.remove(0).1;
    let cv_b = pick_failing(cv.into_iter().filter(|(id, _)| *id != first), CHECK_CONSTRAINTS, |(_, g)| failures(g))?.1;
    let swap = symbol_swap(&spec, rng);
    let (relaxed, dropped) = non_unique(&spec, rng)?;
    let distractors = vec![
        Distractor::new(CONSTRAINT_VIOLATION, spec.grid_scene(&cv_a)),
        Distractor::new(SYMBOL_SWAP, spec.grid_scene(&swap)),
        Distractor::new(NON_UNIQUE, spec.grid_scene(&relaxed)),
        Distractor::new(CONSTRAINT_VIOLATION, spec.grid_scene(&cv_b)),
    ];
    let mut notes = BTreeMap::new();
    notes.insert("givens".to_string(), Detail::from(spec.givens.len()));
    notes.insert("redundant_constraints".to_string(), Detail::from(sel.redundant));
    notes.insert("constraint_violation_target".to_string(), Detail::from(first));
    if dropped > 1 {
        notes.insert("non_unique_relaxed".to_string(), Detail::from(dropped));
    }
    Some(Generated {
        puzzle: spec.puzzle_scene(),
        solution: spec.solution_scene(),
        spec: TaskSpec::LogicGrid(spec),
        distractors,
        notes,
    })
}

pub fn generate(params: &Params, seed: u64) -> Result<Generated> {
    let task = TaskKind::LogicGrid;
    let n = params.require_int(task, "grid")? as usize;
    let target = params.require_int(task, "constraints")? as usize;
    let types = params.require_int(task, "types")? as usize;
    if !(3..=8).contains(&n) || !(1..=4).contains(&types) || target == 0 {
        return Err(Error::InvalidParams {
            task: task.name(),
            reason: format!("grid {n}, constraints {target}, types {types} out of range"),
        });
    }
    let (mut g, attempt) = with_retries(task, seed, |rng| build(n, target, types, rng))?;
    g.notes.insert("attempt".to_string(), Detail::from(attempt as usize));
    Ok(g)
}
