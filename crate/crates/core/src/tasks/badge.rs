//! YES/NO answer badges shared by the binary tasks.

use crate::scene::{palette, pt, RasterImage, Scene, Style};
use crate::types::VerificationResult;
use crate::vision::{badge_answer, count_answer_pixels};

pub const CHECK_ANSWER: &str = "answer";
pub const OPPOSITE_ANSWER: &str = "opposite_answer";
/// Glyph styles drawn on the disc; every style encodes the same answer.
pub const VARIANTS: usize = 4;

const SIZE: f64 = 100.0;

fn answer_word(yes: bool) -> &'static str {
    if yes {
        "yes"
    } else {
        "no"
    }
}

/// Full-canvas disc, green for YES and red for NO, with a white glyph.
pub fn badge_scene(yes: bool, variant: usize) -> Scene {
    let mut s = Scene::new(SIZE);
    let disc = palette::named(if yes { "badge_green" } else { "badge_red" });
    let glyph = palette::named("badge_glyph");
    s.circle(50.0, 50.0, 45.0, Style::fill(disc));
    let width = [8.0, 13.0, 5.0, 8.0][variant % VARIANTS];
    match (yes, variant % VARIANTS) {
        (_, 3) => {
            // ring around the disc centre instead of a mark
            s.circle(50.0, 50.0, 22.0, Style::stroke(glyph, width));
            if yes {
                s.circle(50.0, 50.0, 6.0, Style::fill(glyph));
            } else {
                s.line(pt(36.0, 64.0), pt(64.0, 36.0), glyph, width * 0.7);
            }
        }
        (true, v) => {
            let pts = if v == 2 {
                vec![pt(30.0, 55.0), pt(44.0, 66.0), pt(72.0, 32.0)]
            } else {
                vec![pt(28.0, 52.0), pt(43.0, 67.0), pt(72.0, 36.0)]
            };
            s.polyline(pts, glyph, width);
        }
        (false, _) => {
            s.line(pt(32.0, 32.0), pt(68.0, 68.0), glyph, width);
            s.line(pt(32.0, 68.0), pt(68.0, 32.0), glyph, width);
        }
    }
    s
}

/// Compares the majority badge colour of `candidate` with `expected`.
pub fn verify(expected: bool, candidate: &RasterImage) -> VerificationResult {
    let (green, red) = count_answer_pixels(candidate);
    let Some(answer) = badge_answer(candidate) else {
        return VerificationResult::fail(CHECK_ANSWER, "no answer detected")
            .with("green_pixels", green)
            .with("red_pixels", red);
    };
    let res = if answer == expected {
        VerificationResult::ok()
    } else {
        VerificationResult::fail(
            CHECK_ANSWER,
            format!("answer {} vs. expected {}", answer_word(answer), answer_word(expected)),
        )
    };
    res.with("answer", answer_word(answer))
        .with("expected", answer_word(expected))
        .with("green_pixels", green)
        .with("red_pixels", red)
}

pub fn expected_check(violation: &str) -> Option<&'static str> {
    (violation == OPPOSITE_ANSWER).then_some(CHECK_ANSWER)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{rasterize, render, Color};

    #[test]
    fn badges_read_back_at_every_resolution() {
        for px in [512, 1024, 2048] {
            for yes in [true, false] {
                for v in 0..VARIANTS {
                    let img = rasterize(&badge_scene(yes, v), px).unwrap();
                    assert!(verify(yes, &img).passed);
                    assert_eq!(verify(!yes, &img).failed_check(), Some(CHECK_ANSWER));
                }
            }
        }
    }

    #[test]
    fn variants_differ() {
        let imgs: Vec<_> = (0..VARIANTS).map(|v| render(&badge_scene(false, v), 512)).collect();
        for i in 0..VARIANTS {
            for j in i + 1..VARIANTS {
                assert_ne!(imgs[i], imgs[j]);
            }
        }
    }

    #[test]
    fn blank_has_no_answer() {
        let r = verify(true, &render(&Scene::new(10.0), 512));
        assert_eq!(r.reason, "no answer detected");
    }

    #[test]
    fn half_and_half_tie_goes_to_green() {
        let mut img = RasterImage::filled(64, 64, Color::rgb(255, 255, 255));
        for y in 0..64 {
            for x in 0..64 {
                let c = if x < 32 { [0, 255, 0] } else { [255, 0, 0] };
                img.set_rgb(x, y, Color::from(c));
            }
        }
        assert_eq!(badge_answer(&img), Some(true));
        assert!(verify(true, &img).passed);
    }
}
