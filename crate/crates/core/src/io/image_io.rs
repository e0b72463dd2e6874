//! PNG (8-bit RGB / gray, 16-bit gray) and little-endian PFM.

use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::RgbImage;

fn png_write(path: &Path, width: usize, height: usize, color: png::ColorType,
             depth: png::BitDepth, data: &[u8]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut enc = png::Encoder::new(BufWriter::new(file), width as u32, height as u32);
    enc.set_color(color);
    enc.set_depth(depth);
    let to_io = |e: png::EncodingError| match e {
        png::EncodingError::IoError(io) => Error::io(path, io),
        other => Error::format(format!("png encode: {other}")),
    };
    let mut writer = enc.write_header().map_err(to_io)?;
    writer.write_image_data(data).map_err(to_io)?;
    writer.finish().map_err(to_io)
}

pub fn write_png_rgb8(path: &Path, width: usize, height: usize, rgb: &[u8]) -> Result<()> {
    png_write(path, width, height, png::ColorType::Rgb, png::BitDepth::Eight, rgb)
}

pub fn write_png_gray8(path: &Path, width: usize, height: usize, gray: &[u8]) -> Result<()> {
    png_write(path, width, height, png::ColorType::Grayscale, png::BitDepth::Eight, gray)
}

pub fn write_png_gray16(path: &Path, width: usize, height: usize, gray: &[u16]) -> Result<()> {
    let bytes: Vec<u8> = gray.iter().flat_map(|v| v.to_be_bytes()).collect();
    png_write(path, width, height, png::ColorType::Grayscale, png::BitDepth::Sixteen, &bytes)
}

pub fn write_rgb_image(path: &Path, img: &RgbImage) -> Result<()> {
    write_png_rgb8(path, img.width, img.height, &img.to_rgb8())
}

/// Decodes any 8/16-bit PNG to 8-bit RGB.
pub fn read_png_rgb8(path: &Path) -> Result<(usize, usize, Vec<u8>)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut dec = png::Decoder::new(BufReader::new(file));
    dec.set_transformations(png::Transformations::EXPAND | png::Transformations::STRIP_16);
    let fmt = |e: png::DecodingError| match e {
        png::DecodingError::IoError(io) => Error::io(path, io),
        other => Error::format(format!("{}: {other}", path.display())),
    };
    let mut reader = dec.read_info().map_err(fmt)?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::format("png too large"))?;
    let mut buf = vec![0u8; size];
    let info = reader.next_frame(&mut buf).map_err(fmt)?;
    let (w, h) = (info.width as usize, info.height as usize);
    let channels = info.color_type.samples();
    buf.truncate(info.buffer_size());
    let rgb = match channels {
        1 => buf.iter().flat_map(|&g| [g, g, g]).collect(),
        2 => buf.chunks_exact(2).flat_map(|c| [c[0], c[0], c[0]]).collect(),
        3 => buf,
        4 => buf.chunks_exact(4).flat_map(|c| [c[0], c[1], c[2]]).collect(),
        n => return Err(Error::format(format!("unsupported channel count {n}"))),
    };
    Ok((w, h, rgb))
}

pub fn read_rgb_image(path: &Path) -> Result<RgbImage> {
    let (w, h, bytes) = read_png_rgb8(path)?;
    Ok(RgbImage::from_rgb8(w, h, &bytes))
}

/// Single-channel PFM (`Pf`, negative scale = little-endian, rows bottom-up).
pub fn encode_pfm(width: usize, height: usize, data: &[f32]) -> Vec<u8> {
    assert_eq!(data.len(), width * height);
    let mut out = format!("Pf\n{width} {height}\n-1.0\n").into_bytes();
    for y in (0..height).rev() {
        for v in &data[y * width..(y + 1) * width] {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn write_pfm(path: &Path, width: usize, height: usize, data: &[f32]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&encode_pfm(width, height, data))
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}
