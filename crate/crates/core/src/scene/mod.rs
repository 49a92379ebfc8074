//! Resolution-independent display lists and their deterministic rasterization.
//!
//! A [`Scene`] is an ordered list of primitives in abstract canvas units,
//! painted back to front. The same scene can be rasterized at any of the
//! canonical resolutions or emitted as SVG.
//!
//! Styling rules that are not explicit in the item:
//! * `Line` strokes use square caps.
//! * `Polyline` and `Polygon` strokes use round caps and round joins.
//! * `Rect` strokes are mitered (drawn as an exact frame).
//! * `Text` is centred on its anchor and drawn with the embedded 8x8 bitmap
//!   font; each glyph cell is `size` units square.

mod font;
pub mod palette;
mod png_io;
mod raster;
mod svg;

use serde::{Deserialize, Serialize};

pub use palette::Palette;
pub use png_io::{decode_png, encode_png};
pub use raster::{rasterize, render, RasterImage, CANONICAL_RESOLUTIONS, SUPERSAMPLE};
pub use svg::{emit_svg, parse_svg};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[u8; 3]", into = "[u8; 3]")]
pub struct Color {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl Color {
    pub const fn rgb(r: u8, g: u8, b: u8) -> Self {
        Self { r, g, b }
    }

    pub fn distance(self, other: Color) -> f64 {
        let dr = f64::from(self.r) - f64::from(other.r);
        let dg = f64::from(self.g) - f64::from(other.g);
        let db = f64::from(self.b) - f64::from(other.b);
        (dr * dr + dg * dg + db * db).sqrt()
    }

    pub fn hex(self) -> String {
        format!("#{:02x}{:02x}{:02x}", self.r, self.g, self.b)
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        let s = s.strip_prefix('#')?;
        if s.len() != 6 {
            return None;
        }
        let v = u32::from_str_radix(s, 16).ok()?;
        Some(Self::rgb((v >> 16) as u8, (v >> 8) as u8, v as u8))
    }
}

impl From<[u8; 3]> for Color {
    fn from(v: [u8; 3]) -> Self {
        Self::rgb(v[0], v[1], v[2])
    }
}

impl From<Color> for [u8; 3] {
    fn from(c: Color) -> Self {
        [c.r, c.g, c.b]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

pub fn pt(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stroke {
    pub color: Color,
    pub width: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Style {
    pub fill: Option<Color>,
    pub stroke: Option<Stroke>,
}

impl Style {
    pub fn fill(color: Color) -> Self {
        Self {
            fill: Some(color),
            stroke: None,
        }
    }

    pub fn stroke(color: Color, width: f64) -> Self {
        Self {
            fill: None,
            stroke: Some(Stroke { color, width }),
        }
    }

    pub fn fill_stroke(fill: Color, stroke: Color, width: f64) -> Self {
        Self {
            fill: Some(fill),
            stroke: Some(Stroke { color: stroke, width }),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    Rect { x: f64, y: f64, w: f64, h: f64 },
    Circle { cx: f64, cy: f64, r: f64 },
    Line { from: Point, to: Point },
    Polyline { points: Vec<Point> },
    Polygon { points: Vec<Point> },
    Text { x: f64, y: f64, size: f64, content: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Item {
    pub shape: Shape,
    pub style: Style,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub width: f64,
    pub height: f64,
    pub background: Color,
    pub items: Vec<Item>,
}

impl Scene {
    /// Square canvas with the palette background.
    pub fn new(size: f64) -> Self {
        Self {
            width: size,
            height: size,
            background: palette::named("background"),
            items: Vec::new(),
        }
    }

    pub fn size(&self) -> f64 {
        self.width.max(self.height)
    }

    pub fn push(&mut self, shape: Shape, style: Style) {
        self.items.push(Item { shape, style });
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, style: Style) {
        self.push(Shape::Rect { x, y, w, h }, style);
    }

    pub fn circle(&mut self, cx: f64, cy: f64, r: f64, style: Style) {
        self.push(Shape::Circle { cx, cy, r }, style);
    }

    pub fn line(&mut self, from: Point, to: Point, color: Color, width: f64) {
        self.push(Shape::Line { from, to }, Style::stroke(color, width));
    }

    pub fn polyline(&mut self, points: Vec<Point>, color: Color, width: f64) {
        self.push(Shape::Polyline { points }, Style::stroke(color, width));
    }

    pub fn polygon(&mut self, points: Vec<Point>, style: Style) {
        self.push(Shape::Polygon { points }, style);
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, content: impl Into<String>, color: Color) {
        self.push(
            Shape::Text {
                x,
                y,
                size,
                content: content.into(),
            },
            Style::fill(color),
        );
    }

    /// Appends `other`'s items translated by `(dx, dy)` and scaled by `scale`.
    pub fn embed(&mut self, other: &Scene, dx: f64, dy: f64, scale: f64) {
        let tp = |p: &Point| Point::new(dx + p.x * scale, dy + p.y * scale);
        for item in &other.items {
            let shape = match &item.shape {
                Shape::Rect { x, y, w, h } => Shape::Rect {
                    x: dx + x * scale,
                    y: dy + y * scale,
                    w: w * scale,
                    h: h * scale,
                },
                Shape::Circle { cx, cy, r } => Shape::Circle {
                    cx: dx + cx * scale,
                    cy: dy + cy * scale,
                    r: r * scale,
                },
                Shape::Line { from, to } => Shape::Line {
                    from: tp(from),
                    to: tp(to),
                },
                Shape::Polyline { points } => Shape::Polyline {
                    points: points.iter().map(tp).collect(),
                },
                Shape::Polygon { points } => Shape::Polygon {
                    points: points.iter().map(tp).collect(),
                },
                Shape::Text { x, y, size, content } => Shape::Text {
                    x: dx + x * scale,
                    y: dy + y * scale,
                    size: size * scale,
                    content: content.clone(),
                },
            };
            let mut style = item.style;
            if let Some(s) = style.stroke.as_mut() {
                s.width *= scale;
            }
            self.items.push(Item { shape, style });
        }
    }

    pub fn is_finite(&self) -> bool {
        let fin = |v: &f64| v.is_finite();
        let pfin = |p: &Point| p.x.is_finite() && p.y.is_finite();
        self.items.iter().all(|it| {
            let stroke_ok = it.style.stroke.map_or(true, |s| s.width.is_finite());
            stroke_ok
                && match &it.shape {
                    Shape::Rect { x, y, w, h } => [x, y, w, h].into_iter().all(fin),
                    Shape::Circle { cx, cy, r } => [cx, cy, r].into_iter().all(fin),
                    Shape::Line { from, to } => pfin(from) && pfin(to),
                    Shape::Polyline { points } | Shape::Polygon { points } => points.iter().all(pfin),
                    Shape::Text { x, y, size, .. } => [x, y, size].into_iter().all(fin),
                }
        })
    }
}
