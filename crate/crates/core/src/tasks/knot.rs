//! Knot diagrams: kinked circles (unknots) against torus knots and the
//! figure-eight, padded with kinks to the same crossing count.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::badge::{self, badge_scene, OPPOSITE_ANSWER, VARIANTS};
use super::{Distractor, Generated, TaskSpec};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::scene::{palette, pt, Point, RasterImage, Scene, Style};
use crate::seed::with_retries;
use crate::types::{Detail, Params, TaskKind, VerificationResult};

const CANVAS: f64 = 100.0;
const BASE_SAMPLES: usize = 2400;
/// Output samples per unit of projected arc length.
const DENSITY: f64 = 120.0;
/// Backward sweep of a kink; above 1 the local path reverses and loops once.
const KINK_CURL: f64 = 2.5;
const KINK_HEIGHT: f64 = 0.8;
const KINK_LIFT: f64 = 0.35;
const STRAND: f64 = 1.0;
const GAP: f64 = 2.6;
const DOT: f64 = 0.9;
const MIN_CROSSING_SEPARATION: f64 = 0.4;
const MIN_CROSSING_SINE: f64 = 0.3;
const PLACEMENT_TRIES: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseCurve {
    Circle,
    Trefoil,
    FigureEight,
    Cinquefoil,
    Septafoil,
}

impl BaseCurve {
    pub fn crossings(self) -> usize {
        match self {
            BaseCurve::Circle => 0,
            BaseCurve::Trefoil => 3,
            BaseCurve::FigureEight => 4,
            BaseCurve::Cinquefoil => 5,
            BaseCurve::Septafoil => 7,
        }
    }

    pub const KNOTS: [BaseCurve; 4] = [
        BaseCurve::Trefoil,
        BaseCurve::FigureEight,
        BaseCurve::Cinquefoil,
        BaseCurve::Septafoil,
    ];

    fn point(self, t: f64) -> [f64; 3] {
        let torus = |q: f64| {
            let r = 2.0 + (q * t).cos();
            [r * (2.0 * t).cos(), r * (2.0 * t).sin(), -(q * t).sin()]
        };
        match self {
            BaseCurve::Circle => [2.5 * t.cos(), 2.5 * t.sin(), 0.0],
            BaseCurve::Trefoil => torus(3.0),
            BaseCurve::Cinquefoil => torus(5.0),
            BaseCurve::Septafoil => torus(7.0),
            BaseCurve::FigureEight => {
                let r = 2.0 + (2.0 * t).cos();
                [r * (3.0 * t).cos(), r * (3.0 * t).sin(), (4.0 * t).sin()]
            }
        }
    }
}

/// Closed curve sampled by projected arc length.
struct Sampled {
    pts: Vec<[f64; 3]>,
    cum: Vec<f64>,
    length: f64,
}

impl Sampled {
    fn new(base: BaseCurve) -> Self {
        let pts: Vec<[f64; 3]> = (0..BASE_SAMPLES).map(|i| base.point(TAU * i as f64 / BASE_SAMPLES as f64)).collect();
        let mut cum = vec![0.0];
        for i in 0..BASE_SAMPLES {
            let (a, b) = (pts[i], pts[(i + 1) % BASE_SAMPLES]);
            cum.push(cum[i] + (b[0] - a[0]).hypot(b[1] - a[1]));
        }
        let length = cum[BASE_SAMPLES];
        Self { pts, cum, length }
    }

    /// Position and unit 2D normal at arc length `s`.
    fn at(&self, s: f64) -> ([f64; 3], (f64, f64)) {
        let s = s.rem_euclid(self.length);
        let i = self.cum.partition_point(|&c| c <= s).saturating_sub(1).min(BASE_SAMPLES - 1);
        let f = (s - self.cum[i]) / (self.cum[i + 1] - self.cum[i]).max(1e-12);
        let (a, b) = (self.pts[i], self.pts[(i + 1) % BASE_SAMPLES]);
        let p = [a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1]), a[2] + f * (b[2] - a[2])];
        let (tx, ty) = (b[0] - a[0], b[1] - a[1]);
        let len = tx.hypot(ty).max(1e-12);
        (p, (-ty / len, tx / len))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Kink {
    center: f64,
    half: f64,
    side: f64,
    lift: f64,
}

fn kink_offset(u: f64) -> (f64, f64) {
    (u - KINK_CURL / PI * (PI * u).sin(), (1.0 + (PI * u).cos()) / 2.0)
}

fn build_curve(base: &Sampled, kinks: &[Kink]) -> Vec<[f64; 3]> {
    let m = (base.length * DENSITY).ceil() as usize;
    (0..m)
        .map(|k| {
            let s = base.length * k as f64 / m as f64;
            let hit = kinks.iter().find(|kk| {
                let d = (s - kk.center + base.length / 2.0).rem_euclid(base.length) - base.length / 2.0;
                d.abs() < kk.half
            });
            match hit {
                None => base.at(s).0,
                Some(kk) => {
                    let d = (s - kk.center + base.length / 2.0).rem_euclid(base.length) - base.length / 2.0;
                    let u = d / kk.half;
                    let (tau, h) = kink_offset(u);
                    let (p, nrm) = base.at(kk.center + kk.half * tau);
                    let lift = KINK_HEIGHT * h * kk.side;
                    [p[0] + lift * nrm.0, p[1] + lift * nrm.1, p[2] + kk.lift * u]
                }
            }
        })
        .collect()
}

/// A crossing of the closed polyline; `over` and `under` are curve
/// parameters (segment index plus fraction).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub x: f64,
    pub y: f64,
    pub over: f64,
    pub under: f64,
    pub sign: i8,
    /// `|sin|` of the angle between the strands.
    pub sine: f64,
}

pub fn find_crossings(curve: &[[f64; 3]]) -> Vec<Crossing> {
    let m = curve.len();
    let seg = |i: usize| (curve[i], curve[(i + 1) % m]);
    let boxes: Vec<[f64; 4]> = (0..m)
        .map(|i| {
            let (a, b) = seg(i);
            [a[0].min(b[0]), a[0].max(b[0]), a[1].min(b[1]), a[1].max(b[1])]
        })
        .collect();
    let mut out = Vec::new();
    for i in 0..m {
        for j in i + 2..m {
            if i == 0 && j == m - 1 {
                continue;
            }
            let (bi, bj) = (boxes[i], boxes[j]);
            if bi[1] < bj[0] || bj[1] < bi[0] || bi[3] < bj[2] || bj[3] < bi[2] {
                continue;
            }
            let ((a, b), (c, d)) = (seg(i), seg(j));
            let r = (b[0] - a[0], b[1] - a[1]);
            let q = (d[0] - c[0], d[1] - c[1]);
            let den = r.0 * q.1 - r.1 * q.0;
            if den.abs() < 1e-15 {
                continue;
            }
            let w = (c[0] - a[0], c[1] - a[1]);
            let s = (w.0 * q.1 - w.1 * q.0) / den;
            let t = (w.0 * r.1 - w.1 * r.0) / den;
            if !(0.0..1.0).contains(&s) || !(0.0..1.0).contains(&t) {
                continue;
            }
            let zi = a[2] + s * (b[2] - a[2]);
            let zj = c[2] + t * (d[2] - c[2]);
            let (pi, pj) = (i as f64 + s, j as f64 + t);
            let (over, under, d_over, d_under) = if zi > zj { (pi, pj, r, q) } else { (pj, pi, q, r) };
            let cross = d_over.0 * d_under.1 - d_over.1 * d_under.0;
            let sine = cross.abs() / (r.0.hypot(r.1) * q.0.hypot(q.1));
            out.push(Crossing {
                x: a[0] + s * r.0,
                y: a[1] + s * r.1,
                over,
                under,
                sign: if cross > 0.0 { 1 } else { -1 },
                sine,
            });
        }
    }
    out
}

fn legible(crossings: &[Crossing], target: usize) -> bool {
    crossings.len() == target
        && crossings.iter().all(|c| c.sine >= MIN_CROSSING_SINE)
        && crossings.iter().enumerate().all(|(i, a)| {
            crossings[i + 1..]
                .iter()
                .all(|b| (a.x - b.x).hypot(a.y - b.y) >= MIN_CROSSING_SEPARATION)
        })
}

/// Arc-length positions along the base where the base curve crosses itself.
fn base_crossing_positions(base: &Sampled, curve: &[[f64; 3]]) -> Vec<f64> {
    let m = curve.len() as f64;
    find_crossings(curve)
        .iter()
        .flat_map(|c| [c.over, c.under])
        .map(|t| t / m * base.length)
        .collect()
}

fn place_kinks(base: &Sampled, count: usize, avoid: &[f64], rng: &mut RngStream) -> Option<Vec<Kink>> {
    let half = (0.6f64).min(base.length / (3.0 * count.max(1) as f64));
    let circ = |a: f64, b: f64| {
        let d = (a - b).rem_euclid(base.length);
        d.min(base.length - d)
    };
    let mut kinks: Vec<Kink> = Vec::new();
    for _ in 0..count {
        let center = (0..200).map(|_| rng.uniform(0.0, base.length)).find(|&c| {
            kinks.iter().all(|k| circ(c, k.center) > 2.5 * half) && avoid.iter().all(|&a| circ(c, a) > half + 0.6)
        })?;
        kinks.push(Kink {
            center,
            half,
            side: if rng.coin() { 1.0 } else { -1.0 },
            lift: if rng.coin() { KINK_LIFT } else { -KINK_LIFT },
        });
    }
    Some(kinks)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnotSpec {
    pub is_unknot: bool,
    pub base: BaseCurve,
    pub kinks: usize,
    pub crossing_count: usize,
    /// Projected closed curve in canvas coordinates.
    pub points: Vec<(f64, f64)>,
    /// Crossings in canvas coordinates.
    pub crossings: Vec<Crossing>,
}

/// Sub-path of the closed polyline within arc length `half` of parameter `t`.
fn subpath(points: &[(f64, f64)], t: f64, half: f64) -> Vec<Point> {
    let m = points.len();
    let lerp = |i: usize, f: f64| {
        let (a, b) = (points[i % m], points[(i + 1) % m]);
        pt(a.0 + f * (b.0 - a.0), a.1 + f * (b.1 - a.1))
    };
    let i0 = t.floor() as usize;
    let centre = lerp(i0, t.fract());
    let dist = |p: Point, q: Point| (p.x - q.x).hypot(p.y - q.y);
    let mut fwd = vec![centre];
    let mut acc = 0.0;
    let mut k = i0 + 1;
    while acc < half && k < i0 + m {
        let p = lerp(k, 0.0);
        acc += dist(*fwd.last().expect("non-empty"), p);
        fwd.push(p);
        k += 1;
    }
    let mut back = Vec::new();
    let mut last = centre;
    acc = 0.0;
    let mut k = i0 + m;
    while acc < half && k > i0 {
        let p = lerp(k % m, 0.0);
        acc += dist(last, p);
        back.push(p);
        last = p;
        k -= 1;
    }
    back.reverse();
    back.extend(fwd);
    back
}

impl KnotSpec {
    pub fn puzzle_scene(&self) -> Scene {
        let mut s = Scene::new(CANVAS);
        let ink = palette::named("ink");
        let bg = palette::named("background");
        let mut closed: Vec<Point> = self.points.iter().map(|&(x, y)| pt(x, y)).collect();
        closed.push(closed[0]);
        s.polyline(closed, ink, STRAND);
        for c in &self.crossings {
            s.polyline(subpath(&self.points, c.under, GAP), bg, STRAND * 2.2);
            s.polyline(subpath(&self.points, c.over, GAP + 1.0), ink, STRAND);
        }
        for c in &self.crossings {
            let name = if c.sign > 0 { "crossing_positive" } else { "crossing_negative" };
            s.circle(c.x, c.y, DOT, Style::fill(palette::named(name)));
        }
        s
    }

    pub fn solution_scene(&self) -> Scene {
        badge_scene(self.is_unknot, 0)
    }

    pub fn verify(&self, candidate: &RasterImage) -> VerificationResult {
        badge::verify(self.is_unknot, candidate)
    }
}

/// Curve coordinates to canvas, flipping y so orientation signs survive.
fn to_canvas(curve: &[[f64; 3]]) -> impl Fn(f64, f64) -> (f64, f64) {
    let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in curve {
        lo_x = lo_x.min(p[0]);
        hi_x = hi_x.max(p[0]);
        lo_y = lo_y.min(p[1]);
        hi_y = hi_y.max(p[1]);
    }
    let span = (hi_x - lo_x).max(hi_y - lo_y);
    let scale = (CANVAS - 16.0) / span;
    let (cx, cy) = ((lo_x + hi_x) / 2.0, (lo_y + hi_y) / 2.0);
    move |x, y| (CANVAS / 2.0 + (x - cx) * scale, CANVAS / 2.0 - (y - cy) * scale)
}

/// A diagram of `base` with `kinks` kinks, or `None` when placement keeps
/// producing stray or illegible crossings.
pub fn diagram(base: BaseCurve, kinks: usize, rng: &mut RngStream) -> Option<KnotSpec> {
    let sampled = Sampled::new(base);
    let plain = build_curve(&sampled, &[]);
    if find_crossings(&plain).len() != base.crossings() {
        return None;
    }
    let avoid = base_crossing_positions(&sampled, &plain);
    let target = base.crossings() + kinks;
    for _ in 0..PLACEMENT_TRIES {
        let Some(ks) = place_kinks(&sampled, kinks, &avoid, rng) else { continue };
        let curve = build_curve(&sampled, &ks);
        let crossings = find_crossings(&curve);
        if !legible(&crossings, target) {
            continue;
        }
        let map = to_canvas(&curve);
        let points = curve.iter().map(|p| map(p[0], p[1])).collect();
        let crossings = crossings
            .into_iter()
            .map(|c| {
                let (x, y) = map(c.x, c.y);
                Crossing { x, y, ..c }
            })
            .collect();
        return Some(KnotSpec {
            is_unknot: base == BaseCurve::Circle,
            base,
            kinks,
            crossing_count: target,
            points,
            crossings,
        });
    }
    None
}

fn build(target: usize, rng: &mut RngStream) -> Option<Generated> {
    let knots: Vec<BaseCurve> = BaseCurve::KNOTS.into_iter().filter(|b| b.crossings() <= target).collect();
    let unknot = knots.is_empty() || rng.coin();
    let base = if unknot { BaseCurve::Circle } else { *rng.choose(&knots)? };
    let spec = diagram(base, target - base.crossings(), rng)?;
    let distractors = (0..VARIANTS)
        .map(|v| Distractor::new(OPPOSITE_ANSWER, badge_scene(!spec.is_unknot, v)))
        .collect();
    let mut notes = BTreeMap::new();
    notes.insert("distractor_variants".to_string(), Detail::from((0..VARIANTS).collect::<Vec<_>>()));
    notes.insert(
        "base".to_string(),
        Detail::from(serde_json::to_value(base).ok()?.as_str()?.to_string()),
    );
    if knots.is_empty() {
        notes.insert("unknot_forced".to_string(), Detail::from(true));
    }
    Some(Generated {
        puzzle: spec.puzzle_scene(),
        solution: spec.solution_scene(),
        spec: TaskSpec::Unknot(spec),
        distractors,
        notes,
    })
}

pub fn generate(params: &Params, seed: u64) -> Result<Generated> {
    let task = TaskKind::Unknot;
    let target = params.require_int(task, "crossings")? as usize;
    if !(2..=15).contains(&target) {
        return Err(Error::InvalidParams {
            task: task.name(),
            reason: format!("crossings {target} out of range"),
        });
    }
    let (mut g, attempt) = with_retries(task, seed, |rng| build(target, rng))?;
    g.notes.insert("attempt".to_string(), Detail::from(attempt as usize));
    Ok(g)
}
