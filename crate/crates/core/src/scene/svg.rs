//! SVG 1.1 serialization of a [`Scene`], plus the inverse parser used to
//! check that the emitted document carries the full display list.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so
//! `parse_svg(emit_svg(s)) == s` holds exactly.

use std::fmt::Write;

use super::{Color, Item, Point, Scene, Shape, Stroke, Style};
use crate::error::{Error, Result};

const NS: &str = "http://www.w3.org/2000/svg";

fn paint(style: &Style, out: &mut String) {
    match style.fill {
        Some(c) => write!(out, r#" fill="{}""#, c.hex()).unwrap(),
        None => out.push_str(r#" fill="none""#),
    }
    if let Some(s) = style.stroke {
        write!(out, r#" stroke="{}" stroke-width="{}""#, s.color.hex(), s.width).unwrap();
    }
}

fn points_attr(points: &[Point]) -> String {
    points
        .iter()
        .map(|p| format!("{},{}", p.x, p.y))
        .collect::<Vec<_>>()
        .join(" ")
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn emit_svg(scene: &Scene) -> String {
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="{NS}" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = scene.width,
        h = scene.height
    )
    .unwrap();
    writeln!(
        out,
        r#"<rect id="background" x="0" y="0" width="{}" height="{}" fill="{}"/>"#,
        scene.width,
        scene.height,
        scene.background.hex()
    )
    .unwrap();
    for item in &scene.items {
        match &item.shape {
            Shape::Rect { x, y, w, h } => {
                write!(out, r#"<rect x="{x}" y="{y}" width="{w}" height="{h}""#).unwrap();
                paint(&item.style, &mut out);
                if item.style.stroke.is_some() {
                    out.push_str(r#" stroke-linejoin="miter""#);
                }
            }
            Shape::Circle { cx, cy, r } => {
                write!(out, r#"<circle cx="{cx}" cy="{cy}" r="{r}""#).unwrap();
                paint(&item.style, &mut out);
            }
            Shape::Line { from, to } => {
                write!(
                    out,
                    r#"<line x1="{}" y1="{}" x2="{}" y2="{}""#,
                    from.x, from.y, to.x, to.y
                )
                .unwrap();
                paint(&item.style, &mut out);
                out.push_str(r#" stroke-linecap="square""#);
            }
            Shape::Polyline { points } | Shape::Polygon { points } => {
                let tag = if matches!(item.shape, Shape::Polygon { .. }) {
                    "polygon"
                } else {
                    "polyline"
                };
                write!(out, r#"<{tag} points="{}""#, points_attr(points)).unwrap();
                paint(&item.style, &mut out);
                if item.style.stroke.is_some() {
                    out.push_str(r#" stroke-linecap="round" stroke-linejoin="round""#);
                }
            }
            Shape::Text { x, y, size, content } => {
                write!(
                    out,
                    r#"<text x="{x}" y="{y}" font-size="{size}" font-family="monospace" text-anchor="middle" dominant-baseline="central""#
                )
                .unwrap();
                paint(&item.style, &mut out);
                writeln!(out, ">{}</text>", escape(content)).unwrap();
                continue;
            }
        }
        out.push_str("/>\n");
    }
    out.push_str("</svg>\n");
    out
}

fn num(node: roxmltree::Node, name: &str) -> Result<f64> {
    let raw = node
        .attribute(name)
        .ok_or_else(|| Error::Svg(format!("<{}> lacks `{name}`", node.tag_name().name())))?;
    raw.parse()
        .map_err(|_| Error::Svg(format!("`{name}` is not a number: {raw}")))
}

fn color_attr(node: roxmltree::Node, name: &str) -> Result<Option<Color>> {
    match node.attribute(name) {
        None | Some("none") => Ok(None),
        Some(v) => Color::from_hex(v)
            .map(Some)
            .ok_or_else(|| Error::Svg(format!("bad color `{v}`"))),
    }
}

fn style_of(node: roxmltree::Node) -> Result<Style> {
    let fill = color_attr(node, "fill")?;
    let stroke = match color_attr(node, "stroke")? {
        Some(color) => Some(Stroke {
            color,
            width: num(node, "stroke-width")?,
        }),
        None => None,
    };
    Ok(Style { fill, stroke })
}

fn parse_points(raw: &str) -> Result<Vec<Point>> {
    raw.split_whitespace()
        .map(|pair| {
            let (x, y) = pair
                .split_once(',')
                .ok_or_else(|| Error::Svg(format!("bad point `{pair}`")))?;
            let x = x.parse().map_err(|_| Error::Svg(format!("bad point `{pair}`")))?;
            let y = y.parse().map_err(|_| Error::Svg(format!("bad point `{pair}`")))?;
            Ok(Point::new(x, y))
        })
        .collect()
}

/// Parses a document produced by [`emit_svg`] back into a scene.
pub fn parse_svg(text: &str) -> Result<Scene> {
    let doc = roxmltree::Document::parse(text).map_err(|e| Error::Svg(e.to_string()))?;
    let root = doc.root_element();
    if root.tag_name().name() != "svg" {
        return Err(Error::Svg("root element is not <svg>".into()));
    }
    let mut scene = Scene::new(0.0);
    scene.width = num(root, "width")?;
    scene.height = num(root, "height")?;
    for node in root.children().filter(|n| n.is_element()) {
        if node.attribute("id") == Some("background") {
            scene.background = color_attr(node, "fill")?.unwrap_or(scene.background);
            continue;
        }
        let shape = match node.tag_name().name() {
            "rect" => Shape::Rect {
                x: num(node, "x")?,
                y: num(node, "y")?,
                w: num(node, "width")?,
                h: num(node, "height")?,
            },
            "circle" => Shape::Circle {
                cx: num(node, "cx")?,
                cy: num(node, "cy")?,
                r: num(node, "r")?,
            },
            "line" => Shape::Line {
                from: Point::new(num(node, "x1")?, num(node, "y1")?),
                to: Point::new(num(node, "x2")?, num(node, "y2")?),
            },
            "polyline" => Shape::Polyline {
                points: parse_points(node.attribute("points").unwrap_or(""))?,
            },
            "polygon" => Shape::Polygon {
                points: parse_points(node.attribute("points").unwrap_or(""))?,
            },
            "text" => Shape::Text {
                x: num(node, "x")?,
                y: num(node, "y")?,
                size: num(node, "font-size")?,
                content: node.text().unwrap_or("").to_string(),
            },
            other => return Err(Error::Svg(format!("unsupported element <{other}>"))),
        };
        scene.items.push(Item {
            shape,
            style: style_of(node)?,
        });
    }
    Ok(scene)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::pt;

    fn sample() -> Scene {
        let mut s = Scene::new(120.0);
        s.circle(10.5, 20.25, 3.0 / 7.0, Style::fill(Color::rgb(255, 0, 0)));
        s.rect(1.0, 2.0, 3.0, 4.0, Style::fill_stroke(Color::rgb(1, 2, 3), Color::rgb(0, 0, 0), 0.1));
        s.line(pt(0.0, 0.0), pt(5.0, 5.0), Color::rgb(0, 0, 255), 1.5);
        s.polyline(vec![pt(0.1, 0.2), pt(0.3, 0.4)], Color::rgb(0, 0, 255), 2.0);
        s.polygon(vec![pt(1.0, 1.0), pt(2.0, 1.0), pt(1.5, 2.0)], Style::stroke(Color::rgb(0, 0, 0), 0.2));
        s.text(50.0, 50.0, 8.0, "a<b&c", Color::rgb(0, 0, 0));
        s
    }

    #[test]
    fn one_circle_gives_one_circle_element() {
        let mut s = Scene::new(10.0);
        s.circle(5.0, 5.0, 2.0, Style::fill(Color::rgb(0, 0, 0)));
        assert_eq!(emit_svg(&s).matches("<circle").count(), 1);
    }

    #[test]
    fn emit_is_stable() {
        assert_eq!(emit_svg(&sample()), emit_svg(&sample()));
    }

    #[test]
    fn parse_inverts_emit() {
        let s = sample();
        assert_eq!(parse_svg(&emit_svg(&s)).unwrap(), s);
    }
}
