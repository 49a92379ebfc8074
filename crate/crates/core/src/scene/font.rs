//! Embedded 8x8 monospace bitmap font (public-domain `font8x8` glyphs).

use font8x8::{UnicodeFonts, BASIC_FONTS};

const FALLBACK: char = '?';

fn glyph(c: char) -> [u8; 8] {
    BASIC_FONTS
        .get(c)
        .or_else(|| BASIC_FONTS.get(FALLBACK))
        .unwrap_or([0; 8])
}

/// Filled rectangles `(x, y, w, h)` for `text` centred at `(cx, cy)`.
/// Each glyph occupies a `size` x `size` cell; horizontal bit runs are merged.
pub(super) fn text_rects(cx: f64, cy: f64, size: f64, text: &str) -> Vec<(f64, f64, f64, f64)> {
    let n = text.chars().count() as f64;
    let px = size / 8.0;
    let left = cx - n * size / 2.0;
    let top = cy - size / 2.0;
    let mut out = Vec::new();
    for (i, c) in text.chars().enumerate() {
        let gx = left + i as f64 * size;
        for (row, bits) in glyph(c).iter().enumerate() {
            let mut col = 0;
            while col < 8 {
                if bits >> col & 1 == 1 {
                    let start = col;
                    while col < 8 && bits >> col & 1 == 1 {
                        col += 1;
                    }
                    out.push((
                        gx + start as f64 * px,
                        top + row as f64 * px,
                        (col - start) as f64 * px,
                        px,
                    ));
                } else {
                    col += 1;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_have_ink() {
        for c in "0123456789?LTFS".chars() {
            assert!(glyph(c).iter().any(|&b| b != 0), "{c}");
        }
    }

    #[test]
    fn space_is_blank() {
        assert!(text_rects(0.0, 0.0, 8.0, " ").is_empty());
    }

    #[test]
    fn rects_stay_in_text_box() {
        for (x, y, w, h) in text_rects(50.0, 50.0, 16.0, "12") {
            assert!(x >= 34.0 && x + w <= 66.0);
            assert!(y >= 42.0 && y + h <= 58.0);
        }
    }
}
