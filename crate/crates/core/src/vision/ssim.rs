use crate::error::{Error, Result};
use crate::scene::RasterImage;

const WINDOW: usize = 11;
const SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;
const L: f64 = 255.0;

fn kernel() -> [f64; WINDOW] {
    let mut k = [0.0; WINDOW];
    let mid = (WINDOW / 2) as f64;
    for (i, v) in k.iter_mut().enumerate() {
        let d = i as f64 - mid;
        *v = (-d * d / (2.0 * SIGMA * SIGMA)).exp();
    }
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

/// BT.601 luma.
fn luma(img: &RasterImage) -> Vec<f64> {
    img.pixels
        .chunks_exact(4)
        .map(|p| 0.299 * f64::from(p[0]) + 0.587 * f64::from(p[1]) + 0.114 * f64::from(p[2]))
        .collect()
}

/// Valid-mode separable Gaussian filtering of `src` (w x h).
fn filter(src: &[f64], w: usize, h: usize, k: &[f64; WINDOW]) -> Vec<f64> {
    let ow = w - WINDOW + 1;
    let oh = h - WINDOW + 1;
    let mut horiz = vec![0.0; ow * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..ow {
            let mut acc = 0.0;
            for (i, kv) in k.iter().enumerate() {
                acc += kv * row[x + i];
            }
            horiz[y * ow + x] = acc;
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for (i, kv) in k.iter().enumerate() {
            let src_row = &horiz[(y + i) * ow..(y + i + 1) * ow];
            let dst = &mut out[y * ow..(y + 1) * ow];
            for (d, s) in dst.iter_mut().zip(src_row) {
                *d += kv * s;
            }
        }
    }
    out
}

/// Mean SSIM over all valid 11x11 Gaussian windows of the luma channel.
///
/// The computation is written so that swapping the arguments performs the
/// same floating point operations, hence `ssim(a, b) == ssim(b, a)` exactly
/// and `ssim(x, x) == 1.0`.
pub fn ssim(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    if (a.width, a.height) != (b.width, b.height) {
        return Err(Error::DimensionMismatch {
            left: (a.width, a.height),
            right: (b.width, b.height),
        });
    }
    let (w, h) = (a.width as usize, a.height as usize);
    if w < WINDOW || h < WINDOW {
        return Err(Error::Validation(format!("image smaller than the {WINDOW}px SSIM window")));
    }
    let k = kernel();
    let x = luma(a);
    let y = luma(b);
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(&y).map(|(p, q)| p * q).collect();
    let mx = filter(&x, w, h, &k);
    let my = filter(&y, w, h, &k);
    let sxx = filter(&xx, w, h, &k);
    let syy = filter(&yy, w, h, &k);
    let sxy = filter(&xy, w, h, &k);
    let c1 = (K1 * L).powi(2);
    let c2 = (K2 * L).powi(2);
    let mut total = 0.0;
    for i in 0..mx.len() {
        let (ux, uy) = (mx[i], my[i]);
        let vx = sxx[i] - ux * ux;
        let vy = syy[i] - uy * uy;
        let cov = sxy[i] - ux * uy;
        let num = (2.0 * ux * uy + c1) * (2.0 * cov + c2);
        let den = (ux * ux + uy * uy + c1) * (vx + vy + c2);
        total += num / den;
    }
    Ok(total / mx.len() as f64)
}
