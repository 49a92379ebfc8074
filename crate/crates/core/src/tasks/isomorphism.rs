//! Graph isomorphism pairs with certified answers.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::badge::{self, badge_scene, OPPOSITE_ANSWER, VARIANTS};
use super::coloring::is_connected;
use super::{Distractor, Generated, TaskSpec};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::scene::{palette, pt, RasterImage, Scene, Style};
use crate::seed::with_retries;
use crate::types::{Detail, Params, TaskKind, VerificationResult};

const CANVAS: f64 = 200.0;
const NODE_RADIUS: f64 = 4.0;
const LAYOUT_ITERATIONS: usize = 200;
/// Graph builds tried per attempt before giving up on a NO instance.
const SWAP_TRIES: usize = 50;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let set: BTreeSet<(usize, usize)> = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        Self {
            n,
            edges: set.into_iter().collect(),
        }
    }

    pub fn adjacency(&self) -> Vec<Vec<bool>> {
        let mut m = vec![vec![false; self.n]; self.n];
        for &(a, b) in &self.edges {
            m[a][b] = true;
            m[b][a] = true;
        }
        m
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(a, b) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self::new(self.n, self.edges.iter().map(|&(a, b)| (perm[a], perm[b])))
    }
}

/// Colour refinement run on both graphs at once so labels are comparable.
fn refine(g1: &Graph, g2: &Graph) -> (Vec<usize>, Vec<usize>) {
    let (a1, a2) = (g1.adjacency(), g2.adjacency());
    let n = g1.n;
    let mut c1 = vec![0usize; n];
    let mut c2 = vec![0usize; n];
    loop {
        let sig = |adj: &Vec<Vec<bool>>, c: &Vec<usize>, v: usize| {
            let mut ns: Vec<usize> = (0..n).filter(|&u| adj[v][u]).map(|u| c[u]).collect();
            ns.sort_unstable();
            (c[v], ns)
        };
        let s1: Vec<_> = (0..n).map(|v| sig(&a1, &c1, v)).collect();
        let s2: Vec<_> = (0..n).map(|v| sig(&a2, &c2, v)).collect();
        let ids: BTreeMap<_, usize> = s1
            .iter()
            .chain(&s2)
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        let n1: Vec<usize> = s1.iter().map(|s| ids[s]).collect();
        let n2: Vec<usize> = s2.iter().map(|s| ids[s]).collect();
        let classes = |c: &Vec<usize>| c.iter().collect::<BTreeSet<_>>().len();
        let stable = classes(&n1) == classes(&c1) && classes(&n2) == classes(&c2);
        c1 = n1;
        c2 = n2;
        if stable {
            return (c1, c2);
        }
    }
}

/// An isomorphism `perm` with `perm[v1] = v2`, or `None` when none exists.
pub fn find_isomorphism(g1: &Graph, g2: &Graph) -> Option<Vec<usize>> {
    if g1.n != g2.n || g1.edges.len() != g2.edges.len() {
        return None;
    }
    let (c1, c2) = refine(g1, g2);
    let hist = |c: &Vec<usize>| {
        let mut h = BTreeMap::new();
        for &x in c {
            *h.entry(x).or_insert(0) += 1;
        }
        h
    };
    if hist(&c1) != hist(&c2) {
        return None;
    }
    let (a1, a2) = (g1.adjacency(), g2.adjacency());
    let n = g1.n;
    let mut order: Vec<usize> = (0..n).collect();
    let freq = hist(&c1);
    order.sort_by_key(|&v| (freq[&c1[v]], v));
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        i: usize,
        order: &[usize],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        ctx: (&[usize], &[usize], &[Vec<bool>], &[Vec<bool>]),
    ) -> bool {
        let (c1, c2, a1, a2) = ctx;
        if i == order.len() {
            return true;
        }
        let v = order[i];
        for w in 0..map.len() {
            if used[w] || c2[w] != c1[v] {
                continue;
            }
            if order[..i].iter().any(|&u| a1[v][u] != a2[w][map[u]]) {
                continue;
            }
            map[v] = w;
            used[w] = true;
            if go(i + 1, order, map, used, ctx) {
                return true;
            }
            used[w] = false;
            map[v] = usize::MAX;
        }
        false
    }
    go(0, &order, &mut map, &mut used, (&c1, &c2, &a1, &a2)).then_some(map)
}

fn random_connected(n: usize, rng: &mut RngStream) -> Graph {
    let density = rng.uniform(0.3, 0.5);
    let pairs = n * (n - 1) / 2;
    let m = ((density * pairs as f64).round() as usize).clamp(n - 1, pairs);
    let order = rng.permutation(n);
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for i in 1..n {
        let j = rng.index(i);
        let (a, b) = (order[i], order[j]);
        edges.insert((a.min(b), a.max(b)));
    }
    let mut rest: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|e| !edges.contains(e))
        .collect();
    rng.shuffle(&mut rest);
    edges.extend(rest.into_iter().take(m - (n - 1)));
    Graph::new(n, edges)
}

/// Degree-preserving double edge swap producing a connected graph not
/// isomorphic to `g`.
fn swapped(g: &Graph, rng: &mut RngStream) -> Option<Graph> {
    let m = g.edges.len();
    let mut pairs: Vec<(usize, usize, bool)> = (0..m)
        .flat_map(|i| (i + 1..m).flat_map(move |j| [(i, j, false), (i, j, true)]))
        .collect();
    rng.shuffle(&mut pairs);
    let set: BTreeSet<(usize, usize)> = g.edges.iter().copied().collect();
    for (i, j, flip) in pairs {
        let (a, b) = g.edges[i];
        let (c, d) = if flip { (g.edges[j].1, g.edges[j].0) } else { g.edges[j] };
        if [a, b].contains(&c) || [a, b].contains(&d) {
            continue;
        }
        let (e1, e2) = ((a.min(d), a.max(d)), (c.min(b), c.max(b)));
        if set.contains(&e1) || set.contains(&e2) {
            continue;
        }
        let mut edges: Vec<(usize, usize)> = g.edges.iter().copied().filter(|&e| e != g.edges[i] && e != g.edges[j]).collect();
        edges.push(e1);
        edges.push(e2);
        let h = Graph::new(g.n, edges);
        if is_connected(h.n, &h.edges) && find_isomorphism(g, &h).is_none() {
            return Some(h);
        }
    }
    None
}

/// Force-directed layout in the unit square.
fn spring_layout(g: &Graph, rng: &mut RngStream) -> Vec<(f64, f64)> {
    let n = g.n;
    let mut pos: Vec<(f64, f64)> = (0..n).map(|_| (rng.unit(), rng.unit())).collect();
    let k = (1.0 / n as f64).sqrt();
    let mut temp = 0.1;
    let cooling = temp / (LAYOUT_ITERATIONS as f64 + 1.0);
    for _ in 0..LAYOUT_ITERATIONS {
        let mut disp = vec![(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (dx, dy) = (pos[i].0 - pos[j].0, pos[i].1 - pos[j].1);
                let d = dx.hypot(dy).max(1e-4);
                let f = k * k / d;
                disp[i].0 += dx / d * f;
                disp[i].1 += dy / d * f;
            }
        }
        for &(a, b) in &g.edges {
            let (dx, dy) = (pos[a].0 - pos[b].0, pos[a].1 - pos[b].1);
            let d = dx.hypot(dy).max(1e-4);
            let f = d * d / k;
            disp[a].0 -= dx / d * f;
            disp[a].1 -= dy / d * f;
            disp[b].0 += dx / d * f;
            disp[b].1 += dy / d * f;
        }
        for i in 0..n {
            let len = disp[i].0.hypot(disp[i].1).max(1e-9);
            let step = len.min(temp);
            pos[i].0 += disp[i].0 / len * step;
            pos[i].1 += disp[i].1 / len * step;
        }
        temp -= cooling;
    }
    pos
}

fn mean_edge_length(g: &Graph, pos: &[(f64, f64)]) -> f64 {
    let total: f64 = g.edges.iter().map(|&(a, b)| (pos[a].0 - pos[b].0).hypot(pos[a].1 - pos[b].1)).sum();
    total / g.edges.len().max(1) as f64
}

/// Rescales positions to fill the box `[x0, x0 + w] x [y0, y0 + h]`.
fn fit(pos: &[(f64, f64)], x0: f64, y0: f64, w: f64, h: f64) -> Vec<(f64, f64)> {
    let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for &(x, y) in pos {
        lo_x = lo_x.min(x);
        lo_y = lo_y.min(y);
        hi_x = hi_x.max(x);
        hi_y = hi_y.max(y);
    }
    let (sx, sy) = ((hi_x - lo_x).max(1e-9), (hi_y - lo_y).max(1e-9));
    pos.iter()
        .map(|&(x, y)| (x0 + (x - lo_x) / sx * w, y0 + (y - lo_y) / sy * h))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsomorphismSpec {
    pub g1: Graph,
    pub g2: Graph,
    pub layout1: Vec<(f64, f64)>,
    pub layout2: Vec<(f64, f64)>,
    pub isomorphic: bool,
    /// `witness[v] = w` maps G1 onto G2 when the answer is YES.
    pub witness: Option<Vec<usize>>,
}

impl IsomorphismSpec {
    pub fn puzzle_scene(&self) -> Scene {
        let mut s = Scene::new(CANVAS);
        let ink = palette::named("ink");
        let gray = palette::named("node_gray");
        for (g, layout) in [(&self.g1, &self.layout1), (&self.g2, &self.layout2)] {
            for &(a, b) in &g.edges {
                s.line(pt(layout[a].0, layout[a].1), pt(layout[b].0, layout[b].1), ink, 0.8);
            }
            for &(x, y) in layout {
                s.circle(x, y, NODE_RADIUS, Style::fill_stroke(gray, ink, 0.5));
            }
        }
        s.line(pt(CANVAS / 2.0, 20.0), pt(CANVAS / 2.0, CANVAS - 20.0), palette::named("grid_line"), 0.6);
        s
    }

    pub fn solution_scene(&self) -> Scene {
        badge_scene(self.isomorphic, 0)
    }

    pub fn verify(&self, candidate: &RasterImage) -> VerificationResult {
        badge::verify(self.isomorphic, candidate)
    }
}

fn build(n: usize, distortion: f64, rng: &mut RngStream) -> Option<Generated> {
    let isomorphic = rng.coin();
    let (g1, g2, witness) = (0..SWAP_TRIES).find_map(|_| {
        let g1 = random_connected(n, rng);
        if isomorphic {
            let perm = rng.permutation(n);
            let g2 = g1.permuted(&perm);
            Some((g1, g2, Some(perm)))
        } else {
            swapped(&g1, rng).map(|g2| (g1, g2, None))
        }
    })?;
    let l1 = spring_layout(&g1, rng);
    let mut l2 = spring_layout(&g2, rng);
    let sigma = distortion * mean_edge_length(&g2, &l2);
    for p in l2.iter_mut() {
        p.0 += sigma * rng.normal();
        p.1 += sigma * rng.normal();
    }
    let margin = 12.0;
    let (w, h) = (CANVAS / 2.0 - 2.0 * margin, CANVAS - 4.0 * margin);
    let spec = IsomorphismSpec {
        layout1: fit(&l1, margin, 2.0 * margin, w, h),
        layout2: fit(&l2, CANVAS / 2.0 + margin, 2.0 * margin, w, h),
        g1,
        g2,
        isomorphic,
        witness,
    };
    let distractors = (0..VARIANTS)
        .map(|v| Distractor::new(OPPOSITE_ANSWER, badge_scene(!isomorphic, v)))
        .collect();
    let mut notes = BTreeMap::new();
    notes.insert("distractor_variants".to_string(), Detail::from((0..VARIANTS).collect::<Vec<_>>()));
    notes.insert("edges".to_string(), Detail::from(spec.g1.edges.len()));
    Some(Generated {
        puzzle: spec.puzzle_scene(),
        solution: spec.solution_scene(),
        spec: TaskSpec::GraphIsomorphism(spec),
        distractors,
        notes,
    })
}

pub fn generate(params: &Params, seed: u64) -> Result<Generated> {
    let task = TaskKind::GraphIsomorphism;
    let n = params.require_int(task, "nodes")? as usize;
    let distortion = params.require_f64(task, "distortion")?;
    if !(4..=12).contains(&n) || !(0.0..=1.0).contains(&distortion) {
        return Err(Error::InvalidParams {
            task: task.name(),
            reason: format!("nodes {n}, distortion {distortion} out of range"),
        });
    }
    let (mut g, attempt) = with_retries(task, seed, |rng| build(n, distortion, rng))?;
    g.notes.insert("attempt".to_string(), Detail::from(attempt as usize));
    Ok(g)
}
