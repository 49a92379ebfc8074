//! Planar graph k-colouring on pruned Delaunay triangulations.

use std::collections::{BTreeMap, BTreeSet};

use delaunator::{triangulate, Point as DPoint};
use serde::{Deserialize, Serialize};

use super::{pick_failing, Distractor, Generated, TaskSpec};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::scene::{palette, pt, Color, Palette, RasterImage, Scene, Style};
use crate::seed::with_retries;
use crate::types::{Detail, Params, TaskKind, VerificationResult, FAILED_CHECKS};
use crate::vision::{classify_color, ColorClasses};

pub const CHECK_DIMENSIONS: &str = "dimensions";
pub const CHECK_COMPLETE: &str = "complete";
pub const CHECK_PROPER: &str = "proper";
pub const CHECK_USAGE: &str = "usage";

pub const ADJACENT_CONFLICT: &str = "adjacent_conflict";
pub const MISSING_COLOR: &str = "missing_color";
pub const WRONG_K: &str = "wrong_k";

const CANVAS: f64 = 100.0;
const NODE_RADIUS: f64 = 4.5;
const MIN_DISTANCE: f64 = 12.0;
const AREA: (f64, f64) = (8.0, 92.0);
/// Node colours available to a colouring; `k <= 5` leaves one spare for `wrong_k`.
pub const MAX_COLORS: usize = 6;
/// Sampled annulus, as fractions of the node radius. The label stays inside
/// the inner radius and the outline outside the outer one.
const ANNULUS: (f64, f64) = (0.62, 0.9);

pub fn expected_check(violation: &str) -> Option<&'static str> {
    match violation {
        ADJACENT_CONFLICT => Some(CHECK_PROPER),
        MISSING_COLOR | WRONG_K => Some(CHECK_USAGE),
        _ => None,
    }
}

pub fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    if n == 0 {
        return true;
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColoringSpec {
    pub positions: Vec<(f64, f64)>,
    pub edges: Vec<(usize, usize)>,
    pub k: usize,
    /// Colour id per node, `0..k`.
    pub solution: Vec<usize>,
}

fn node_color(id: usize) -> Color {
    Palette::get().symbols[id]
}

impl ColoringSpec {
    pub fn n(&self) -> usize {
        self.positions.len()
    }

    fn scene(&self, colors: Option<&[usize]>) -> Scene {
        let mut s = Scene::new(CANVAS);
        let ink = palette::named("ink");
        for &(a, b) in &self.edges {
            let (pa, pb) = (self.positions[a], self.positions[b]);
            s.line(pt(pa.0, pa.1), pt(pb.0, pb.1), ink, 0.6);
        }
        let gray = palette::named("node_gray");
        for (i, &(x, y)) in self.positions.iter().enumerate() {
            let fill = colors.map_or(gray, |c| node_color(c[i]));
            s.circle(x, y, NODE_RADIUS, Style::fill_stroke(fill, ink, 0.1 * NODE_RADIUS));
            s.text(x, y, 0.5 * NODE_RADIUS, (i + 1).to_string(), ink);
        }
        s
    }

    pub fn puzzle_scene(&self) -> Scene {
        self.scene(None)
    }

    pub fn coloring_scene(&self, colors: &[usize]) -> Scene {
        self.scene(Some(colors))
    }

    pub fn solution_scene(&self) -> Scene {
        self.coloring_scene(&self.solution)
    }

    /// Colour id per node (`None` for gray or unreadable nodes), reading an
    /// annulus inside each node and ignoring pixels nearer another node.
    pub fn read_colors(&self, candidate: &RasterImage) -> Vec<Option<usize>> {
        let mut colors: Vec<Color> = (0..MAX_COLORS).map(node_color).collect();
        colors.push(palette::named("node_gray"));
        let classes = ColorClasses::new(colors);
        let scale = candidate.width as f64 / CANVAS;
        let centers: Vec<(f64, f64)> = self.positions.iter().map(|&(x, y)| (x * scale, y * scale)).collect();
        let (lo, hi) = (ANNULUS.0 * NODE_RADIUS * scale, ANNULUS.1 * NODE_RADIUS * scale);
        centers
            .iter()
            .enumerate()
            .map(|(i, &(cx, cy))| {
                let mut votes = vec![0usize; classes.colors.len()];
                let x0 = (cx - hi).floor().max(0.0) as u32;
                let y0 = (cy - hi).floor().max(0.0) as u32;
                let x1 = ((cx + hi).ceil() as u32).min(candidate.width);
                let y1 = ((cy + hi).ceil() as u32).min(candidate.height);
                for py in y0..y1 {
                    for px in x0..x1 {
                        let (sx, sy) = (px as f64 + 0.5, py as f64 + 0.5);
                        let d2 = (sx - cx).powi(2) + (sy - cy).powi(2);
                        if d2 < lo * lo || d2 > hi * hi {
                            continue;
                        }
                        let occluded = centers
                            .iter()
                            .enumerate()
                            .any(|(j, &(ox, oy))| j != i && (sx - ox).powi(2) + (sy - oy).powi(2) < d2);
                        if occluded {
                            continue;
                        }
                        if let Some(c) = classify_color(candidate.rgb(px, py), &classes) {
                            votes[c] += 1;
                        }
                    }
                }
                let best = (0..votes.len()).rev().max_by_key(|&c| votes[c])?;
                (votes[best] > 0 && best < MAX_COLORS).then_some(best)
            })
            .collect()
    }

    pub fn check_colors(&self, colors: &[Option<usize>]) -> VerificationResult {
        let mut failed = Vec::new();
        let uncolored: Vec<usize> = (0..colors.len()).filter(|&i| colors[i].is_none()).collect();
        if !uncolored.is_empty() {
            failed.push(CHECK_COMPLETE);
        }
        let conflicts: Vec<(usize, usize)> = self
            .edges
            .iter()
            .copied()
            .filter(|&(a, b)| colors[a].is_some() && colors[a] == colors[b])
            .collect();
        if !conflicts.is_empty() {
            failed.push(CHECK_PROPER);
        }
        let used: BTreeSet<usize> = colors.iter().flatten().copied().collect();
        if used.len() != self.k {
            failed.push(CHECK_USAGE);
        }
        if failed.is_empty() {
            return VerificationResult::ok().with("colors_used", used.len());
        }
        let reason = match failed[0] {
            CHECK_COMPLETE => format!("node {} is not coloured", uncolored[0] + 1),
            CHECK_PROPER => format!("nodes {} and {} share a colour", conflicts[0].0 + 1, conflicts[0].1 + 1),
            _ => format!("{} colours used, expected {}", used.len(), self.k),
        };
        let mut violating: Vec<usize> = uncolored.clone();
        violating.extend(conflicts.iter().flat_map(|&(a, b)| [a, b]));
        violating.sort_unstable();
        violating.dedup();
        VerificationResult::fail(failed[0], reason)
            .with(FAILED_CHECKS, failed)
            .with("violating_nodes", violating)
            .with("colors_used", used.len())
    }

    pub fn verify(&self, candidate: &RasterImage) -> VerificationResult {
        if candidate.width != candidate.height || candidate.width == 0 {
            return VerificationResult::fail(CHECK_DIMENSIONS, "candidate is not square");
        }
        self.check_colors(&self.read_colors(candidate))
    }
}

fn sample_points(n: usize, rng: &mut RngStream) -> Option<Vec<(f64, f64)>> {
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(n);
    for _ in 0..20_000 {
        if pts.len() == n {
            break;
        }
        let p = (rng.uniform(AREA.0, AREA.1), rng.uniform(AREA.0, AREA.1));
        if pts.iter().all(|q| (p.0 - q.0).hypot(p.1 - q.1) >= MIN_DISTANCE) {
            pts.push(p);
        }
    }
    (pts.len() == n).then_some(pts)
}

fn delaunay_edges(pts: &[(f64, f64)]) -> Vec<(usize, usize)> {
    let dp: Vec<DPoint> = pts.iter().map(|&(x, y)| DPoint { x, y }).collect();
    let tri = triangulate(&dp);
    let mut edges = BTreeSet::new();
    for t in tri.triangles.chunks_exact(3) {
        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    edges.into_iter().collect()
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
    (p.0 - a.0 - t * dx).hypot(p.1 - a.1 - t * dy)
}

/// Drops edges passing close to a third node (thin hull triangles).
fn clear_edges(pts: &[(f64, f64)], edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    edges
        .iter()
        .copied()
        .filter(|&(a, b)| {
            (0..pts.len())
                .filter(|&c| c != a && c != b)
                .all(|c| segment_distance(pts[c], pts[a], pts[b]) > 2.0 * NODE_RADIUS)
        })
        .collect()
}

/// Keeps a random spanning tree plus a `density` share of the other edges.
fn prune(n: usize, edges: &[(usize, usize)], density: f64, rng: &mut RngStream) -> Vec<(usize, usize)> {
    let mut order = edges.to_vec();
    rng.shuffle(&mut order);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let (mut tree, mut rest) = (Vec::new(), Vec::new());
    for e in order {
        let (a, b) = (find(&mut parent, e.0), find(&mut parent, e.1));
        if a != b {
            parent[a] = b;
            tree.push(e);
        } else {
            rest.push(e);
        }
    }
    let keep = (density * rest.len() as f64).round() as usize;
    tree.extend(rest.into_iter().take(keep));
    tree.sort_unstable();
    tree
}

/// Proper colouring with at most `k` colours, trying colours in `order`.
pub fn color_with(n: usize, edges: &[(usize, usize)], k: usize, order: &[usize]) -> Option<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut colors = vec![usize::MAX; n];
    fn go(adj: &[Vec<usize>], k: usize, order: &[usize], colors: &mut Vec<usize>) -> bool {
        // most constrained uncoloured node first
        let pick = (0..adj.len()).filter(|&v| colors[v] == usize::MAX).max_by_key(|&v| {
            let sat: BTreeSet<usize> = adj[v].iter().map(|&u| colors[u]).filter(|&c| c != usize::MAX).collect();
            (sat.len(), adj[v].len(), usize::MAX - v)
        });
        let Some(v) = pick else { return true };
        for &c in &order[..k] {
            if adj[v].iter().all(|&u| colors[u] != c) {
                colors[v] = c;
                if go(adj, k, order, colors) {
                    return true;
                }
                colors[v] = usize::MAX;
            }
        }
        false
    }
    go(&adj, k, order, &mut colors).then_some(colors)
}

fn class_sizes(colors: &[usize]) -> BTreeMap<usize, usize> {
    let mut m = BTreeMap::new();
    for &c in colors {
        *m.entry(c).or_insert(0) += 1;
    }
    m
}

fn neighbours(spec: &ColoringSpec, v: usize) -> Vec<usize> {
    spec.edges
        .iter()
        .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
        .collect()
}

fn failures(spec: &ColoringSpec, colors: &[usize]) -> Vec<String> {
    let c: Vec<Option<usize>> = colors.iter().map(|&x| Some(x)).collect();
    spec.check_colors(&c).failed_checks()
}

fn adjacent_conflicts(spec: &ColoringSpec, rng: &mut RngStream) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut order: Vec<usize> = (0..spec.n()).collect();
    rng.shuffle(&mut order);
    for v in order {
        for u in neighbours(spec, v) {
            let mut c = spec.solution.clone();
            c[v] = spec.solution[u];
            out.push(c);
        }
    }
    out
}

fn missing_color(spec: &ColoringSpec, rng: &mut RngStream) -> (Vec<usize>, bool) {
    let k = spec.k;
    let mut order = rng.permutation(k);
    if let Some(c) = color_with(spec.n(), &spec.edges, k - 1, &order) {
        let mut c = c;
        if fill_to(&mut c, &order[..k - 1], rng) {
            return (c, true);
        }
    }
    // merge one colour class into another
    rng.shuffle(&mut order);
    let (from, to) = (order[0], order[1]);
    let c = spec.solution.iter().map(|&x| if x == from { to } else { x }).collect();
    (c, false)
}

/// Moves nodes out of shared classes until every colour of `palette` appears.
fn fill_to(colors: &mut [usize], palette: &[usize], rng: &mut RngStream) -> bool {
    for &c in palette {
        let sizes = class_sizes(colors);
        if sizes.contains_key(&c) {
            continue;
        }
        let mut movable: Vec<usize> = (0..colors.len()).filter(|&v| sizes[&colors[v]] > 1).collect();
        rng.shuffle(&mut movable);
        let Some(&v) = movable.first() else { return false };
        colors[v] = c;
    }
    true
}

fn wrong_k(spec: &ColoringSpec, rng: &mut RngStream) -> Option<Vec<usize>> {
    let sizes = class_sizes(&spec.solution);
    let mut movable: Vec<usize> = (0..spec.n()).filter(|&v| sizes[&spec.solution[v]] > 1).collect();
    rng.shuffle(&mut movable);
    let v = *movable.first()?;
    let mut c = spec.solution.clone();
    c[v] = spec.k;
    Some(c)
}

fn build(n: usize, density: f64, k: usize, rng: &mut RngStream) -> Option<Generated> {
    let positions = sample_points(n, rng)?;
    let edges = prune(n, &clear_edges(&positions, &delaunay_edges(&positions)), density, rng);
    if !is_connected(n, &edges) {
        return None;
    }
    let order = rng.permutation(k);
    let mut solution = color_with(n, &edges, k, &order)?;
    if !fill_to(&mut solution, &order, rng) {
        return None;
    }
    let spec = ColoringSpec {
        positions,
        edges,
        k,
        solution,
    };
    let conflict_pool = adjacent_conflicts(&spec, rng);
    let conflict_a = pick_failing(conflict_pool.iter().cloned(), CHECK_PROPER, |c| failures(&spec, c))?;
    let conflict_b = pick_failing(
        conflict_pool.into_iter().filter(|c| *c != conflict_a),
        CHECK_PROPER,
        |c| failures(&spec, c),
    )?;
    let (missing, proper_missing) = missing_color(&spec, rng);
    let extra = wrong_k(&spec, rng)?;
    let distractors = vec![
        Distractor::new(ADJACENT_CONFLICT, spec.coloring_scene(&conflict_a)),
        Distractor::new(MISSING_COLOR, spec.coloring_scene(&missing)),
        Distractor::new(WRONG_K, spec.coloring_scene(&extra)),
        Distractor::new(ADJACENT_CONFLICT, spec.coloring_scene(&conflict_b)),
    ];
    let mut notes = BTreeMap::new();
    notes.insert("edges".to_string(), Detail::from(spec.edges.len()));
    if !proper_missing {
        notes.insert("missing_color_merged".to_string(), Detail::from(true));
    }
    Some(Generated {
        puzzle: spec.puzzle_scene(),
        solution: spec.solution_scene(),
        spec: TaskSpec::GraphColoring(spec),
        distractors,
        notes,
    })
}

pub fn generate(params: &Params, seed: u64) -> Result<Generated> {
    let task = TaskKind::GraphColoring;
    let n = params.require_int(task, "nodes")? as usize;
    let density = params.require_f64(task, "density")?;
    let k = params.require_int(task, "k")? as usize;
    if !(4..=20).contains(&n) || !(0.0..=1.0).contains(&density) || !(2..MAX_COLORS).contains(&k) || k > n {
        return Err(Error::InvalidParams {
            task: task.name(),
            reason: format!("nodes {n}, density {density}, k {k} out of range"),
        });
    }
    let (mut g, attempt) = with_retries(task, seed, |rng| build(n, density, k, rng))?;
    g.notes.insert("attempt".to_string(), Detail::from(attempt as usize));
    Ok(g)
}
