//! Raven-style 3x3 matrices.
//!
//! Every tile is a vector of five attribute indices. An attribute's value at
//! `(row, col)` is `(base + offset) mod domain`, where the offset is 0 for a
//! constant rule, `col` for an additive rule and `(row + col) mod 3` for a
//! compositional one.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use super::{Distractor, Generated, TaskSpec};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::scene::{palette, pt, render, rasterize, Palette, Point, RasterImage, Scene, Style};
use crate::seed::with_retries;
use crate::types::{Detail, Params, TaskKind, VerificationResult};
use crate::vision::ssim;

pub const SSIM_THRESHOLD: f64 = 0.997;
/// Distractors must score below this at generation time (512 px), leaving
/// headroom under [`SSIM_THRESHOLD`] for the other resolutions.
pub const GENERATION_MARGIN: f64 = 0.995;
const GENERATION_PX: u32 = 512;

pub const TILE: f64 = 100.0;
const MARGIN: f64 = 15.0;
const OUTLINE: f64 = 2.0;

pub const SHAPES: [&str; 6] = ["triangle", "square", "pentagon", "hexagon", "circle", "star"];
const SIZE_FACTORS: [f64; 3] = [0.55, 0.75, 0.95];

pub const ATTRIBUTES: [&str; 5] = ["shape", "color", "size", "rotation", "count"];
const SHAPE: usize = 0;
const COLOR: usize = 1;
const SIZE: usize = 2;
const ROTATION: usize = 3;
const COUNT: usize = 4;
pub const DOMAINS: [usize; 5] = [6, 10, 3, 4, 4];

pub const WRONG_SHAPE: &str = "wrong_shape";
pub const WRONG_COLOR: &str = "wrong_color";
pub const WRONG_ROTATION: &str = "wrong_rotation";
pub const WRONG_COUNT: &str = "wrong_count";
pub const WRONG_SIZE: &str = "wrong_size";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Constant,
    Additive,
    Compositional,
}

impl Rule {
    pub fn offset(self, row: usize, col: usize) -> usize {
        match self {
            Rule::Constant => 0,
            Rule::Additive => col,
            Rule::Compositional => (row + col) % 3,
        }
    }
}

/// Attribute indices `[shape, color, size, rotation, count - 1]`.
pub type Attrs = [usize; 5];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RavenSpec {
    pub rules: [Rule; 5],
    pub base: Attrs,
    /// Row-major attributes of all nine tiles; the last one is the answer.
    pub tiles: Vec<Attrs>,
}

pub fn tile_attrs(rules: &[Rule; 5], base: &Attrs, row: usize, col: usize) -> Attrs {
    let mut a = [0; 5];
    for i in 0..5 {
        a[i] = (base[i] + rules[i].offset(row, col)) % DOMAINS[i];
    }
    a
}

fn slots(count: usize) -> (&'static [(f64, f64)], f64) {
    match count {
        1 => (&[(50.0, 50.0)], 40.0),
        2 => (&[(28.0, 50.0), (72.0, 50.0)], 22.0),
        3 => (&[(50.0, 28.0), (28.0, 70.0), (72.0, 70.0)], 21.0),
        _ => (&[(28.0, 28.0), (72.0, 28.0), (28.0, 72.0), (72.0, 72.0)], 21.0),
    }
}

fn regular(cx: f64, cy: f64, r: f64, n: usize, phase: f64) -> Vec<Point> {
    (0..n)
        .map(|k| {
            let a = phase + TAU * k as f64 / n as f64;
            pt(cx + r * a.cos(), cy + r * a.sin())
        })
        .collect()
}

/// One tile of `TILE` units with its top-left corner at `(dx, dy)`.
fn draw_tile(s: &mut Scene, a: &Attrs, dx: f64, dy: f64) {
    let color = Palette::get().symbols[a[COLOR]];
    let style = Style::fill_stroke(color, palette::named("ink"), OUTLINE);
    let (centres, slot_r) = slots(a[COUNT] + 1);
    let r = slot_r * SIZE_FACTORS[a[SIZE]];
    // shapes point up at rotation 0; rotation turns clockwise on screen
    let phase = -FRAC_PI_2 + a[ROTATION] as f64 * FRAC_PI_2;
    for &(x, y) in centres {
        let (cx, cy) = (dx + x, dy + y);
        match SHAPES[a[SHAPE]] {
            "circle" => s.circle(cx, cy, r, style),
            "star" => {
                let outer = regular(cx, cy, r, 5, phase);
                let inner = regular(cx, cy, r * 0.45, 5, phase + TAU / 10.0);
                let pts = outer.into_iter().zip(inner).flat_map(|(o, i)| [o, i]).collect();
                s.polygon(pts, style);
            }
            "triangle" => s.polygon(regular(cx, cy, r, 3, phase), style),
            "square" => s.polygon(regular(cx, cy, r, 4, phase + TAU / 8.0), style),
            "pentagon" => s.polygon(regular(cx, cy, r, 5, phase), style),
            _ => s.polygon(regular(cx, cy, r, 6, phase), style),
        }
    }
}

pub fn tile_scene(a: &Attrs) -> Scene {
    let mut s = Scene::new(TILE);
    draw_tile(&mut s, a, 0.0, 0.0);
    s
}

impl RavenSpec {
    pub fn answer(&self) -> Attrs {
        self.tiles[8]
    }

    pub fn num_rules(&self) -> usize {
        self.rules.iter().filter(|r| **r != Rule::Constant).count()
    }

    pub fn puzzle_scene(&self) -> Scene {
        let mut s = Scene::new(3.0 * TILE + 2.0 * MARGIN);
        let frame = palette::named("grid_line");
        for (i, a) in self.tiles.iter().enumerate() {
            let (x, y) = (MARGIN + (i % 3) as f64 * TILE, MARGIN + (i / 3) as f64 * TILE);
            s.rect(x, y, TILE, TILE, Style::stroke(frame, 1.0));
            if i == 8 {
                s.text(x + TILE / 2.0, y + TILE / 2.0, 40.0, "?", palette::named("query_red"));
            } else {
                draw_tile(&mut s, a, x, y);
            }
        }
        s
    }

    pub fn solution_scene(&self) -> Scene {
        tile_scene(&self.answer())
    }

    pub fn verify(&self, candidate: &RasterImage) -> VerificationResult {
        match rasterize(&self.solution_scene(), candidate.width) {
            Ok(truth) => verify_ssim(candidate, &truth, SSIM_THRESHOLD),
            Err(e) => VerificationResult::fail("dimensions", e.to_string()),
        }
    }
}

/// Shared SSIM verdict; records the score whenever one can be computed.
pub(crate) fn verify_ssim(candidate: &RasterImage, truth: &RasterImage, threshold: f64) -> VerificationResult {
    match ssim(candidate, truth) {
        Ok(score) if score >= threshold => VerificationResult::ok().with("ssim", score),
        Ok(score) => VerificationResult::fail("ssim", format!("SSIM {score:.6} below {threshold}"))
            .with("ssim", score)
            .with("threshold", threshold),
        Err(e) => VerificationResult::fail("dimensions", e.to_string()),
    }
}

/// Rule assignment: `rules` non-constant attributes; with `complexity > 0`
/// at least one of them is compositional, otherwise all are additive.
fn draw_rules(rules: usize, complexity: i64, rng: &mut RngStream) -> [Rule; 5] {
    let mut out = [Rule::Constant; 5];
    let order = rng.permutation(5);
    let chosen = &order[..rules];
    for (k, &attr) in chosen.iter().enumerate() {
        out[attr] = if complexity <= 0 {
            Rule::Additive
        } else if k == 0 || rng.coin() {
            Rule::Compositional
        } else {
            Rule::Additive
        };
    }
    out
}

fn spec_from(rules: [Rule; 5], base: Attrs) -> RavenSpec {
    let tiles = (0..9).map(|i| tile_attrs(&rules, &base, i / 3, i % 3)).collect();
    RavenSpec { rules, base, tiles }
}

/// A replacement value for `attr` whose tile is separated from the answer.
fn separated(answer: &Attrs, attr: usize, truth: &RasterImage, rng: &mut RngStream) -> Option<Attrs> {
    let mut values: Vec<usize> = (0..DOMAINS[attr]).filter(|&v| v != answer[attr]).collect();
    rng.shuffle(&mut values);
    values.into_iter().find_map(|v| {
        let mut a = *answer;
        a[attr] = v;
        let score = ssim(&render(&tile_scene(&a), GENERATION_PX), truth).ok()?;
        (score < GENERATION_MARGIN).then_some(a)
    })
}

fn build(rules: usize, complexity: i64, rng: &mut RngStream) -> Option<Generated> {
    let rule_set = draw_rules(rules, complexity, rng);
    let base: Attrs = std::array::from_fn(|i| rng.index(DOMAINS[i]));
    let spec = spec_from(rule_set, base);
    let answer = spec.answer();
    let truth = render(&spec.solution_scene(), GENERATION_PX);
    let mut notes = BTreeMap::new();
    let mut distractors = Vec::with_capacity(4);
    for (violation, attr) in [(WRONG_SHAPE, SHAPE), (WRONG_COLOR, COLOR), (WRONG_ROTATION, ROTATION), (WRONG_COUNT, COUNT)] {
        let (kind, attrs) = match separated(&answer, attr, &truth, rng) {
            Some(a) => (violation, a),
            // no visible rotation of a symmetric shape: change the size instead
            None if attr == ROTATION => {
                notes.insert("wrong_rotation_substituted".to_string(), Detail::from(WRONG_SIZE));
                (WRONG_SIZE, separated(&answer, SIZE, &truth, rng)?)
            }
            None => return None,
        };
        distractors.push(Distractor::new(kind, tile_scene(&attrs)));
    }
    Some(Generated {
        puzzle: spec.puzzle_scene(),
        solution: spec.solution_scene(),
        spec: TaskSpec::Raven(spec),
        distractors,
        notes,
    })
}

pub fn generate(params: &Params, seed: u64) -> Result<Generated> {
    let task = TaskKind::Raven;
    let rules = params.require_int(task, "rules")?;
    let complexity = params.require_int(task, "complexity")?;
    if !(1..=5).contains(&rules) {
        return Err(Error::InvalidParams {
            task: task.name(),
            reason: format!("rules must be 1..=5, got {rules}"),
        });
    }
    let (mut generated, attempt) = with_retries(task, seed, |rng| build(rules as usize, complexity, rng))?;
    generated.notes.insert("attempt".to_string(), Detail::from(attempt as usize));
    Ok(generated)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_of(g: &Generated) -> &RavenSpec {
        match &g.spec {
            TaskSpec::Raven(s) => s,
            _ => unreachable!(),
        }
    }

    #[test]
    fn constant_rules_repeat_first_tile() {
        let spec = spec_from([Rule::Constant; 5], [2, 3, 1, 0, 1]);
        assert_eq!(spec.answer(), spec.tiles[0]);
        assert_eq!(spec.num_rules(), 0);
    }

    #[test]
    fn additive_count_follows_columns() {
        let mut rules = [Rule::Constant; 5];
        rules[COUNT] = Rule::Additive;
        // count index 0 means one instance: rows read 1, 2, 3
        let spec = spec_from(rules, [0, 0, 0, 0, 0]);
        for row in 0..3 {
            let counts: Vec<usize> = (0..3).map(|c| spec.tiles[row * 3 + c][COUNT] + 1).collect();
            assert_eq!(counts, vec![1, 2, 3]);
        }
        assert_eq!(spec.answer()[COUNT] + 1, 3);
    }

    #[test]
    fn compositional_rule_uses_row_plus_col() {
        let mut rules = [Rule::Constant; 5];
        rules[SHAPE] = Rule::Compositional;
        let spec = spec_from(rules, [1, 0, 0, 0, 0]);
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(spec.tiles[r * 3 + c][SHAPE], (1 + (r + c) % 3) % 6);
            }
        }
    }

    #[test]
    fn difficulty_controls_rule_kinds() {
        for seed in 0..20 {
            let easy = spec_of(&generate(&Params::new().int("rules", 1).int("complexity", 0), seed).unwrap()).clone();
            assert_eq!(easy.num_rules(), 1);
            assert!(!easy.rules.contains(&Rule::Compositional));
            let hard = spec_of(&generate(&Params::new().int("rules", 3).int("complexity", 1), seed).unwrap()).clone();
            assert_eq!(hard.num_rules(), 3);
            assert!(hard.rules.contains(&Rule::Compositional));
        }
    }

    #[test]
    fn distractors_change_one_attribute_and_are_separated() {
        for seed in 0..6 {
            let g = generate(&Params::new().int("rules", 2).int("complexity", 0), seed).unwrap();
            let spec = spec_of(&g);
            let truth = rasterize(&g.solution, 512).unwrap();
            assert!(spec.verify(&truth).passed);
            assert_eq!(spec.verify(&truth).detail_f64("ssim"), Some(1.0));
            for d in &g.distractors {
                let img = rasterize(&d.scene, 512).unwrap();
                let r = spec.verify(&img);
                assert!(!r.passed, "{}", d.violation);
                assert!(r.detail_f64("ssim").unwrap() < SSIM_THRESHOLD);
            }
        }
    }

    #[test]
    fn blank_tile_fails_with_score() {
        let g = generate(&Params::new().int("rules", 1).int("complexity", 0), 3).unwrap();
        let r = g.spec.verify(&RasterImage::filled(512, 512, palette::named("background")));
        assert!(!r.passed);
        assert!(r.detail_f64("ssim").is_some());
    }

    #[test]
    fn non_canonical_candidate_is_rejected() {
        let g = generate(&Params::new().int("rules", 1).int("complexity", 0), 3).unwrap();
        let r = g.spec.verify(&RasterImage::filled(300, 300, palette::named("background")));
        assert_eq!(r.failed_check(), Some("dimensions"));
    }
}
