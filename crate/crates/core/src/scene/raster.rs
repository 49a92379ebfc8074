//! Scanline rasterizer with fixed anti-aliasing.
//!
//! Every output pixel is the box-filtered mean of a 2x2 grid of samples taken
//! at sample centres. Coverage is decided per sample (a sample is inside a
//! shape when its centre is), so output depends only on the scene and the
//! resolution.

use super::font::text_rects;
use super::{Color, Item, Point, Scene, Shape};
use crate::error::{Error, Result};

pub const CANONICAL_RESOLUTIONS: [u32; 3] = [512, 1024, 2048];

/// Samples per pixel along each axis.
pub const SUPERSAMPLE: u32 = 2;

/// Decoded 8-bit RGBA pixels, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RasterImage {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
}

impl RasterImage {
    pub fn filled(width: u32, height: u32, color: Color) -> Self {
        let mut pixels = Vec::with_capacity(width as usize * height as usize * 4);
        for _ in 0..width as usize * height as usize {
            pixels.extend_from_slice(&[color.r, color.g, color.b, 255]);
        }
        Self { width, height, pixels }
    }

    #[inline]
    pub fn rgb(&self, x: u32, y: u32) -> Color {
        let i = (y as usize * self.width as usize + x as usize) * 4;
        Color::rgb(self.pixels[i], self.pixels[i + 1], self.pixels[i + 2])
    }

    pub fn set_rgb(&mut self, x: u32, y: u32, c: Color) {
        let i = (y as usize * self.width as usize + x as usize) * 4;
        self.pixels[i..i + 4].copy_from_slice(&[c.r, c.g, c.b, 255]);
    }

    pub fn is_canonical(&self) -> bool {
        self.width == self.height && CANONICAL_RESOLUTIONS.contains(&self.width)
    }
}

/// Rasterizes at one of the canonical resolutions.
pub fn rasterize(scene: &Scene, resolution: u32) -> Result<RasterImage> {
    if !CANONICAL_RESOLUTIONS.contains(&resolution) {
        return Err(Error::Resolution(resolution));
    }
    Ok(render(scene, resolution))
}

/// Rasterizes to a `px` x `px` image. Scene units map uniformly onto the
/// square, scaled by its larger side.
pub fn render(scene: &Scene, px: u32) -> RasterImage {
    let ss = (px * SUPERSAMPLE) as usize;
    let scale = if scene.size() > 0.0 {
        ss as f64 / scene.size()
    } else {
        1.0
    };
    let mut canvas = Canvas {
        size: ss,
        scale,
        buf: vec![scene.background; ss * ss],
    };
    for item in &scene.items {
        canvas.paint(item);
    }
    canvas.downsample(px)
}

struct Canvas {
    size: usize,
    scale: f64,
    buf: Vec<Color>,
}

impl Canvas {
    fn paint(&mut self, item: &Item) {
        let s = self.scale;
        if let Some(fill) = item.style.fill {
            match &item.shape {
                Shape::Rect { x, y, w, h } => self.fill_rect(x * s, y * s, w * s, h * s, fill),
                Shape::Circle { cx, cy, r } => self.fill_ring(cx * s, cy * s, 0.0, r * s, fill),
                Shape::Polygon { points } | Shape::Polyline { points } => {
                    let pts: Vec<Point> = points.iter().map(|p| Point::new(p.x * s, p.y * s)).collect();
                    self.fill_polygon(&pts, fill);
                }
                Shape::Text { x, y, size, content } => {
                    for (rx, ry, rw, rh) in text_rects(*x, *y, *size, content) {
                        self.fill_rect(rx * s, ry * s, rw * s, rh * s, fill);
                    }
                }
                Shape::Line { .. } => {}
            }
        }
        if let Some(stroke) = item.style.stroke {
            let hw = stroke.width * s / 2.0;
            let c = stroke.color;
            match &item.shape {
                Shape::Rect { x, y, w, h } => {
                    let (x, y, w, h) = (x * s, y * s, w * s, h * s);
                    self.fill_rect(x - hw, y - hw, w + 2.0 * hw, 2.0 * hw, c);
                    self.fill_rect(x - hw, y + h - hw, w + 2.0 * hw, 2.0 * hw, c);
                    self.fill_rect(x - hw, y + hw, 2.0 * hw, h - 2.0 * hw, c);
                    self.fill_rect(x + w - hw, y + hw, 2.0 * hw, h - 2.0 * hw, c);
                }
                Shape::Circle { cx, cy, r } => {
                    self.fill_ring(cx * s, cy * s, (r * s - hw).max(0.0), r * s + hw, c);
                }
                Shape::Line { from, to } => {
                    let a = Point::new(from.x * s, from.y * s);
                    let b = Point::new(to.x * s, to.y * s);
                    self.stroke_segment(a, b, hw, hw, c);
                }
                Shape::Polyline { points } => self.stroke_path(points, false, hw, c),
                Shape::Polygon { points } => self.stroke_path(points, true, hw, c),
                Shape::Text { .. } => {}
            }
        }
    }

    fn stroke_path(&mut self, points: &[Point], closed: bool, hw: f64, c: Color) {
        let s = self.scale;
        let pts: Vec<Point> = points.iter().map(|p| Point::new(p.x * s, p.y * s)).collect();
        let n = pts.len();
        if n == 0 {
            return;
        }
        let segs = if closed { n } else { n - 1 };
        for i in 0..segs {
            let a = pts[i];
            let b = pts[(i + 1) % n];
            if a != b {
                self.stroke_segment(a, b, hw, 0.0, c);
            }
        }
        for p in &pts {
            self.fill_ring(p.x, p.y, 0.0, hw, c);
        }
    }

    /// Rectangle of half-width `hw` around segment `a`-`b`, extended by `ext`
    /// past both ends.
    fn stroke_segment(&mut self, a: Point, b: Point, hw: f64, ext: f64, c: Color) {
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        let len = (dx * dx + dy * dy).sqrt();
        let (ux, uy) = if len > 0.0 { (dx / len, dy / len) } else { (1.0, 0.0) };
        let (nx, ny) = (-uy * hw, ux * hw);
        let a = Point::new(a.x - ux * ext, a.y - uy * ext);
        let b = Point::new(b.x + ux * ext, b.y + uy * ext);
        let quad = [
            Point::new(a.x + nx, a.y + ny),
            Point::new(b.x + nx, b.y + ny),
            Point::new(b.x - nx, b.y - ny),
            Point::new(a.x - nx, a.y - ny),
        ];
        self.fill_polygon(&quad, c);
    }

    /// Sample rows whose centres fall in `[y0, y1)`.
    fn rows(&self, y0: f64, y1: f64) -> std::ops::Range<usize> {
        let lo = (y0 - 0.5).ceil().max(0.0) as usize;
        let hi = ((y1 - 0.5).ceil().max(0.0) as usize).min(self.size);
        lo..hi.max(lo)
    }

    #[inline]
    fn span(&mut self, row: usize, x0: f64, x1: f64, c: Color) {
        let lo = (x0 - 0.5).ceil().max(0.0) as usize;
        let hi = ((x1 - 0.5).ceil().max(0.0) as usize).min(self.size);
        if lo < hi {
            let base = row * self.size;
            self.buf[base + lo..base + hi].fill(c);
        }
    }

    fn fill_rect(&mut self, x: f64, y: f64, w: f64, h: f64, c: Color) {
        if w <= 0.0 || h <= 0.0 {
            return;
        }
        for row in self.rows(y, y + h) {
            self.span(row, x, x + w, c);
        }
    }

    /// Disc when `inner == 0`, annulus otherwise.
    fn fill_ring(&mut self, cx: f64, cy: f64, inner: f64, outer: f64, c: Color) {
        if outer <= 0.0 {
            return;
        }
        for row in self.rows(cy - outer, cy + outer) {
            let dy = row as f64 + 0.5 - cy;
            let ho2 = outer * outer - dy * dy;
            if ho2 <= 0.0 {
                continue;
            }
            let ho = ho2.sqrt();
            let hi2 = inner * inner - dy * dy;
            if inner > 0.0 && hi2 > 0.0 {
                let hi = hi2.sqrt();
                self.span(row, cx - ho, cx - hi, c);
                self.span(row, cx + hi, cx + ho, c);
            } else {
                self.span(row, cx - ho, cx + ho, c);
            }
        }
    }

    /// Non-zero winding fill.
    fn fill_polygon(&mut self, pts: &[Point], c: Color) {
        if pts.len() < 3 {
            return;
        }
        let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in pts {
            y0 = y0.min(p.y);
            y1 = y1.max(p.y);
        }
        let mut xs: Vec<(f64, i32)> = Vec::with_capacity(pts.len());
        for row in self.rows(y0, y1) {
            let y = row as f64 + 0.5;
            xs.clear();
            for i in 0..pts.len() {
                let a = pts[i];
                let b = pts[(i + 1) % pts.len()];
                if a.y == b.y {
                    continue;
                }
                let (lo, hi, dir) = if a.y < b.y { (a, b, 1) } else { (b, a, -1) };
                if y >= lo.y && y < hi.y {
                    let x = lo.x + (y - lo.y) * (hi.x - lo.x) / (hi.y - lo.y);
                    xs.push((x, dir));
                }
            }
            xs.sort_by(|p, q| p.0.total_cmp(&q.0));
            let mut winding = 0;
            for k in 0..xs.len() {
                let before = winding;
                winding += xs[k].1;
                if before == 0 && winding != 0 {
                    // span opens here; find where it closes
                    let start = xs[k].0;
                    let mut w = winding;
                    let mut end = start;
                    for item in xs.iter().skip(k + 1) {
                        w += item.1;
                        if w == 0 {
                            end = item.0;
                            break;
                        }
                    }
                    self.span(row, start, end, c);
                }
            }
        }
    }

    fn downsample(&self, px: u32) -> RasterImage {
        let ss = SUPERSAMPLE as usize;
        let n = (ss * ss) as u32;
        let px = px as usize;
        let mut pixels = Vec::with_capacity(px * px * 4);
        for y in 0..px {
            for x in 0..px {
                let (mut r, mut g, mut b) = (0u32, 0u32, 0u32);
                for sy in 0..ss {
                    let base = (y * ss + sy) * self.size + x * ss;
                    for c in &self.buf[base..base + ss] {
                        r += u32::from(c.r);
                        g += u32::from(c.g);
                        b += u32::from(c.b);
                    }
                }
                pixels.extend_from_slice(&[
                    ((r + n / 2) / n) as u8,
                    ((g + n / 2) / n) as u8,
                    ((b + n / 2) / n) as u8,
                    255,
                ]);
            }
        }
        RasterImage {
            width: px as u32,
            height: px as u32,
            pixels,
        }
    }
}
