use std::io::Cursor;

use super::RasterImage;
use crate::error::{Error, Result};

/// 8-bit RGBA PNG with fixed encoder settings, so identical images give
/// identical bytes.
pub fn encode_png(image: &RasterImage) -> Vec<u8> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, image.width, image.height);
        enc.set_color(png::ColorType::Rgba);
        enc.set_depth(png::BitDepth::Eight);
        enc.set_compression(png::Compression::Fast);
        let mut writer = enc.write_header().expect("in-memory PNG header");
        writer
            .write_image_data(&image.pixels)
            .expect("pixel buffer length matches header");
    }
    out
}

/// Decodes any 8-bit PNG and normalizes it to RGBA.
pub fn decode_png(bytes: &[u8]) -> Result<RasterImage> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::EXPAND | png::Transformations::STRIP_16);
    let mut reader = decoder.read_info().map_err(|e| Error::Png(e.to_string()))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::Png("image too large".into()))?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(|e| Error::Png(e.to_string()))?;
    buf.truncate(info.buffer_size());
    let (w, h) = (info.width, info.height);
    let px = w as usize * h as usize;
    let pixels = match info.color_type {
        png::ColorType::Rgba => buf,
        png::ColorType::Rgb => buf.chunks_exact(3).flat_map(|c| [c[0], c[1], c[2], 255]).collect(),
        png::ColorType::Grayscale => buf.iter().flat_map(|&g| [g, g, g, 255]).collect(),
        png::ColorType::GrayscaleAlpha => buf.chunks_exact(2).flat_map(|c| [c[0], c[0], c[0], c[1]]).collect(),
        png::ColorType::Indexed => return Err(Error::Png("unexpanded palette image".into())),
    };
    if pixels.len() != px * 4 {
        return Err(Error::Png(format!("pixel buffer has {} bytes for {w}x{h}", pixels.len())));
    }
    Ok(RasterImage { width: w, height: h, pixels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::Color;

    #[test]
    fn round_trip_is_lossless() {
        let mut img = RasterImage::filled(64, 64, Color::rgb(255, 255, 255));
        for i in 0..64 {
            img.set_rgb(i, (i * 7) % 64, Color::rgb(i as u8 * 3, 17, 200));
        }
        let back = decode_png(&encode_png(&img)).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn header_declares_dimensions() {
        let img = RasterImage::filled(512, 512, Color::rgb(255, 255, 255));
        let bytes = encode_png(&img);
        assert_eq!(&bytes[1..4], b"PNG");
        // IHDR width and height are big-endian at offsets 16 and 20
        assert_eq!(u32::from_be_bytes(bytes[16..20].try_into().unwrap()), 512);
        assert_eq!(u32::from_be_bytes(bytes[20..24].try_into().unwrap()), 512);
        let back = decode_png(&bytes).unwrap();
        assert!(back.pixels.iter().all(|&b| b == 255));
    }

    #[test]
    fn garbage_is_an_error() {
        assert!(matches!(decode_png(b"not a png"), Err(Error::Png(_))));
    }
}
