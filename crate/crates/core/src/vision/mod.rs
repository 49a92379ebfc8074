//! Pixel-level measurements shared by the verifiers.
//!
//! All geometry is in floating point pixels. A pixel belongs to a region when
//! its centre lies inside it, which keeps region membership stable across the
//! canonical resolutions.

mod ssim;

use std::ops::Range;

use crate::scene::{palette, Color, Palette, RasterImage};

pub use ssim::ssim;

/// Fraction of each cell side kept by the centre patch.
pub const CENTER_PATCH: f64 = 0.5;
/// Minimum share of path-coloured pixels in a centre patch for a maze cell to
/// count as visited.
pub const PATH_COVERAGE: f64 = 0.15;

/// Palette colours a verifier distinguishes; the class id is the index.
#[derive(Clone, Debug)]
pub struct ColorClasses {
    pub colors: Vec<Color>,
    pub tolerance: f64,
}

impl ColorClasses {
    pub fn new(colors: Vec<Color>) -> Self {
        Self {
            colors,
            tolerance: Palette::get().tolerance,
        }
    }

    /// No pixel can be within tolerance of two classes.
    pub fn is_unambiguous(&self) -> bool {
        self.tolerance < palette::min_pairwise_distance(&self.colors) / 2.0
    }
}

/// Nearest class within tolerance; ties go to the lower id.
pub fn classify_color(rgb: Color, classes: &ColorClasses) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (id, c) in classes.colors.iter().enumerate() {
        let d = rgb.distance(*c);
        if d <= classes.tolerance && best.map_or(true, |(_, bd)| d < bd) {
            best = Some((id, d));
        }
    }
    best.map(|(id, _)| id)
}

/// Pixel indices whose centres lie in `[lo, hi)`.
fn pixel_span(lo: f64, hi: f64, limit: u32) -> Range<u32> {
    let a = (lo - 0.5).ceil().max(0.0) as u32;
    let b = ((hi - 0.5).ceil().max(0.0) as u32).min(limit);
    a.min(b)..b
}

/// Position of a (possibly layered) cell grid inside an image.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridGeometry {
    pub origin_x: f64,
    pub origin_y: f64,
    pub cell_w: f64,
    pub cell_h: f64,
    pub rows: usize,
    pub cols: usize,
    pub layers: usize,
    /// Horizontal distance between the origins of consecutive layers.
    pub layer_offset: f64,
}

impl GridGeometry {
    pub fn square(origin_x: f64, origin_y: f64, cell: f64, rows: usize, cols: usize) -> Self {
        Self {
            origin_x,
            origin_y,
            cell_w: cell,
            cell_h: cell,
            rows,
            cols,
            layers: 1,
            layer_offset: 0.0,
        }
    }

    pub fn with_layers(mut self, layers: usize, offset: f64) -> Self {
        self.layers = layers;
        self.layer_offset = offset;
        self
    }

    pub fn scaled(self, k: f64) -> Self {
        Self {
            origin_x: self.origin_x * k,
            origin_y: self.origin_y * k,
            cell_w: self.cell_w * k,
            cell_h: self.cell_h * k,
            layer_offset: self.layer_offset * k,
            ..self
        }
    }

    /// Converts a geometry given in scene units to pixels of `image`, for a
    /// scene whose larger side is `scene_size`.
    pub fn to_pixels(self, scene_size: f64, image: &RasterImage) -> Self {
        self.scaled(f64::from(image.width) / scene_size)
    }

    pub fn cell_rect(&self, layer: usize, row: usize, col: usize) -> (f64, f64, f64, f64) {
        (
            self.origin_x + layer as f64 * self.layer_offset + col as f64 * self.cell_w,
            self.origin_y + row as f64 * self.cell_h,
            self.cell_w,
            self.cell_h,
        )
    }

    pub fn cell_center(&self, layer: usize, row: usize, col: usize) -> (f64, f64) {
        let (x, y, w, h) = self.cell_rect(layer, row, col);
        (x + w / 2.0, y + h / 2.0)
    }

    pub fn fits(&self, image: &RasterImage) -> bool {
        if self.rows == 0 || self.cols == 0 || self.layers == 0 {
            return false;
        }
        let (x0, y0, _, _) = self.cell_rect(0, 0, 0);
        let (x1, y1, w, h) = self.cell_rect(self.layers - 1, self.rows - 1, self.cols - 1);
        x0 >= 0.0 && y0 >= 0.0 && x1 + w <= f64::from(image.width) + 1e-9 && y1 + h <= f64::from(image.height) + 1e-9
    }

    fn patch(&self, layer: usize, row: usize, col: usize, frac: f64, image: &RasterImage) -> (Range<u32>, Range<u32>) {
        let (x, y, w, h) = self.cell_rect(layer, row, col);
        let mx = w * (1.0 - frac) / 2.0;
        let my = h * (1.0 - frac) / 2.0;
        (
            pixel_span(x + mx, x + w - mx, image.width),
            pixel_span(y + my, y + h - my, image.height),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleMode {
    /// The single pixel containing the cell centre.
    CenterPoint,
    /// Majority class over the central patch; unclassified pixels abstain.
    CenterPatch,
    /// Every classified pixel of the cell votes with weight `1 / (1 + d)`,
    /// `d` being its distance in pixels to the cell centre.
    InverseDistanceVote,
}

/// Per-cell class ids of layer 0; `None` marks an unreadable cell.
pub fn sample_grid(
    image: &RasterImage,
    geom: &GridGeometry,
    classes: &ColorClasses,
    mode: SampleMode,
) -> Vec<Vec<Option<usize>>> {
    (0..geom.rows)
        .map(|r| (0..geom.cols).map(|c| sample_cell(image, geom, classes, mode, 0, r, c)).collect())
        .collect()
}

pub fn sample_cell(
    image: &RasterImage,
    geom: &GridGeometry,
    classes: &ColorClasses,
    mode: SampleMode,
    layer: usize,
    row: usize,
    col: usize,
) -> Option<usize> {
    match mode {
        SampleMode::CenterPoint => {
            let (cx, cy) = geom.cell_center(layer, row, col);
            let (x, y) = (cx.floor(), cy.floor());
            if x < 0.0 || y < 0.0 || x >= f64::from(image.width) || y >= f64::from(image.height) {
                return None;
            }
            classify_color(image.rgb(x as u32, y as u32), classes)
        }
        SampleMode::CenterPatch => {
            let (xs, ys) = geom.patch(layer, row, col, CENTER_PATCH, image);
            let mut votes = vec![0usize; classes.colors.len()];
            for y in ys {
                for x in xs.clone() {
                    if let Some(id) = classify_color(image.rgb(x, y), classes) {
                        votes[id] += 1;
                    }
                }
            }
            argmax(votes.iter().map(|&v| v as f64))
        }
        SampleMode::InverseDistanceVote => {
            let (xs, ys) = geom.patch(layer, row, col, 1.0, image);
            let (cx, cy) = geom.cell_center(layer, row, col);
            let mut votes = vec![0.0; classes.colors.len()];
            for y in ys {
                for x in xs.clone() {
                    if let Some(id) = classify_color(image.rgb(x, y), classes) {
                        let d = (f64::from(x) + 0.5 - cx).hypot(f64::from(y) + 0.5 - cy);
                        votes[id] += 1.0 / (1.0 + d);
                    }
                }
            }
            argmax(votes.into_iter())
        }
    }
}

/// Index of the largest positive score, lowest index on ties.
fn argmax(scores: impl Iterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores.enumerate() {
        if s > 0.0 && best.map_or(true, |(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    best.map(|(i, _)| i)
}

/// Pixels classifying as badge green and badge red.
pub fn count_answer_pixels(image: &RasterImage) -> (usize, usize) {
    let classes = ColorClasses::new(vec![palette::named("badge_green"), palette::named("badge_red")]);
    let (mut green, mut red) = (0, 0);
    for p in image.pixels.chunks_exact(4) {
        match classify_color(Color::rgb(p[0], p[1], p[2]), &classes) {
            Some(0) => green += 1,
            Some(1) => red += 1,
            _ => {}
        }
    }
    (green, red)
}

/// Majority answer of a badge image (`true` = green = YES). Green wins ties.
/// `None` when no badge colour is present.
pub fn badge_answer(image: &RasterImage) -> Option<bool> {
    match count_answer_pixels(image) {
        (0, 0) => None,
        (g, r) => Some(g >= r),
    }
}

/// Cells whose centre patch is at least [`PATH_COVERAGE`] path blue, sorted by
/// `(layer, row, col)`.
pub fn extract_path_cells(image: &RasterImage, geom: &GridGeometry) -> Vec<(usize, usize, usize)> {
    let blue = palette::named("path_blue");
    let tol = Palette::get().tolerance;
    let mut cells = Vec::new();
    for layer in 0..geom.layers {
        for row in 0..geom.rows {
            for col in 0..geom.cols {
                let (xs, ys) = geom.patch(layer, row, col, CENTER_PATCH, image);
                let total = xs.len() * ys.len();
                if total == 0 {
                    continue;
                }
                let mut hit = 0;
                for y in ys {
                    for x in xs.clone() {
                        if image.rgb(x, y).distance(blue) <= tol {
                            hit += 1;
                        }
                    }
                }
                if hit as f64 >= PATH_COVERAGE * total as f64 {
                    cells.push((layer, row, col));
                }
            }
        }
    }
    cells
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{pt, render, Scene, Style};

    #[test]
    fn exact_color_classifies_to_itself() {
        let classes = ColorClasses::new(Palette::get().symbols.clone());
        assert!(classes.is_unambiguous());
        for (i, c) in classes.colors.iter().enumerate() {
            assert_eq!(classify_color(*c, &classes), Some(i));
        }
    }

    #[test]
    fn far_color_is_unknown() {
        let classes = ColorClasses::new(vec![Color::rgb(0, 0, 0), Color::rgb(255, 255, 255)]);
        assert_eq!(classify_color(Color::rgb(128, 128, 128), &classes), None);
    }

    #[test]
    fn tie_goes_to_lower_id() {
        let a = Color::rgb(0, 0, 0);
        let b = Color::rgb(0, 0, 100);
        let classes = ColorClasses {
            colors: vec![b, a],
            tolerance: 60.0,
        };
        assert_eq!(classify_color(Color::rgb(0, 0, 50), &classes), Some(0));
    }

    fn symbol_grid_scene(grid: &[Vec<usize>]) -> (Scene, GridGeometry) {
        let n = grid.len();
        let mut s = Scene::new(100.0);
        let cell = 80.0 / n as f64;
        let syms = &Palette::get().symbols;
        for (r, row) in grid.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                let cx = 10.0 + (c as f64 + 0.5) * cell;
                let cy = 10.0 + (r as f64 + 0.5) * cell;
                s.circle(cx, cy, cell * 0.3, Style::fill_stroke(syms[v], Color::rgb(0, 0, 0), 0.5));
            }
        }
        (s, GridGeometry::square(10.0, 10.0, cell, n, n))
    }

    #[test]
    fn render_then_sample_round_trip() {
        let grid = vec![vec![0, 1, 2, 3], vec![1, 2, 3, 0], vec![2, 3, 0, 1], vec![3, 0, 1, 2]];
        let (scene, geom) = symbol_grid_scene(&grid);
        let classes = ColorClasses::new(Palette::get().symbols.clone());
        let mut seen = Vec::new();
        for px in [512, 2048] {
            let img = render(&scene, px);
            let g = geom.to_pixels(100.0, &img);
            for mode in [SampleMode::CenterPoint, SampleMode::CenterPatch, SampleMode::InverseDistanceVote] {
                let m = sample_grid(&img, &g, &classes, mode);
                let expect: Vec<Vec<Option<usize>>> =
                    grid.iter().map(|r| r.iter().map(|&v| Some(v)).collect()).collect();
                assert_eq!(m, expect, "{mode:?} at {px}");
                seen.push(m);
            }
        }
        assert!(seen.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn blank_image_samples_unknown() {
        let img = render(&Scene::new(100.0), 512);
        let classes = ColorClasses::new(Palette::get().symbols.clone());
        let g = GridGeometry::square(10.0, 10.0, 20.0, 4, 4).to_pixels(100.0, &img);
        for mode in [SampleMode::CenterPoint, SampleMode::CenterPatch, SampleMode::InverseDistanceVote] {
            assert!(sample_grid(&img, &g, &classes, mode).iter().flatten().all(Option::is_none));
        }
    }

    #[test]
    fn badge_counts() {
        let mut s = Scene::new(100.0);
        s.circle(50.0, 50.0, 40.0, Style::fill(palette::named("badge_green")));
        let img = render(&s, 512);
        let (g, r) = count_answer_pixels(&img);
        assert!(g > 100 * r.max(1));
        assert_eq!(badge_answer(&img), Some(true));
        assert_eq!(badge_answer(&render(&Scene::new(100.0), 512)), None);
    }

    #[test]
    fn half_and_half_badge_ties_to_green() {
        let mut img = RasterImage::filled(512, 512, palette::named("badge_red"));
        for y in 0..512 {
            for x in 0..256 {
                img.set_rgb(x, y, palette::named("badge_green"));
            }
        }
        assert_eq!(count_answer_pixels(&img), (256 * 512, 256 * 512));
        assert_eq!(badge_answer(&img), Some(true));
    }

    #[test]
    fn corner_touching_stroke_is_excluded() {
        // 4x4 grid of 20-unit cells at (10,10); the stroke leaves the centre of
        // (0,0) and ends on the corner it shares with (0,1), (1,0) and (1,1)
        let geom = GridGeometry::square(10.0, 10.0, 20.0, 4, 4);
        let mut s = Scene::new(100.0);
        let blue = palette::named("path_blue");
        s.polyline(vec![pt(20.0, 20.0), pt(30.0, 30.0)], blue, 4.0);
        for px in [512, 1024, 2048] {
            let img = render(&s, px);
            let cells = extract_path_cells(&img, &geom.to_pixels(100.0, &img));
            assert_eq!(cells, vec![(0, 0, 0)], "at {px}");
        }
    }

    #[test]
    fn no_blue_no_cells() {
        let img = render(&Scene::new(100.0), 512);
        let geom = GridGeometry::square(10.0, 10.0, 20.0, 4, 4).to_pixels(100.0, &img);
        assert!(extract_path_cells(&img, &geom).is_empty());
    }
}
