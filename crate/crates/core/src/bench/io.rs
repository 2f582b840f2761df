//! Binary PGM (P5) and PPM (P6) images with maxval 255.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::signal::{MultiChannelSignal, Shape};

/// Decodes a P5 or P6 byte stream into channels scaled to `[0, 1]`.
pub fn decode_pnm(bytes: &[u8]) -> Result<MultiChannelSignal> {
    let mut pos = 0;
    let magic = header_token(bytes, &mut pos)?;
    let channels = match magic.as_str() {
        "P5" => 1,
        "P6" => 3,
        other => return Err(Error::Format(format!("unsupported magic '{other}'"))),
    };
    let width = header_number(bytes, &mut pos)?;
    let height = header_number(bytes, &mut pos)?;
    let maxval = header_number(bytes, &mut pos)?;
    if maxval != 255 {
        return Err(Error::Format(format!("unsupported maxval {maxval} (need 255)")));
    }
    if width == 0 || height == 0 {
        return Err(Error::Format("empty image".into()));
    }
    // exactly one whitespace byte separates the header from the raster
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::Format("missing raster separator".into()));
    }
    pos += 1;
    let n = width * height;
    let raster = &bytes[pos..];
    if raster.len() != n * channels {
        return Err(Error::Format(format!(
            "raster holds {} bytes, header implies {}",
            raster.len(),
            n * channels
        )));
    }
    let mut data = vec![0.0; n * channels];
    for (p, px) in raster.chunks_exact(channels).enumerate() {
        for (t, &v) in px.iter().enumerate() {
            data[t * n + p] = v as f64 / 255.0;
        }
    }
    MultiChannelSignal::new(
        Shape::Grid {
            rows: height,
            cols: width,
        },
        channels,
        data,
    )
}

fn header_token(bytes: &[u8], pos: &mut usize) -> Result<String> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::Format("truncated header".into()));
    }
    Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
}

fn header_number(bytes: &[u8], pos: &mut usize) -> Result<usize> {
    let tok = header_token(bytes, pos)?;
    tok.parse()
        .map_err(|_| Error::Format(format!("bad header field '{tok}'")))
}

/// Encodes 1 or 3 grid channels as P5 or P6, clamping to `[0, 1]`.
pub fn encode_pnm(signal: &MultiChannelSignal) -> Result<Vec<u8>> {
    let Shape::Grid { rows, cols } = signal.shape() else {
        return Err(Error::Format("only 2D signals can be written as images".into()));
    };
    let magic = match signal.channels() {
        1 => "P5",
        3 => "P6",
        c => return Err(Error::Format(format!("cannot write {c} channels (need 1 or 3)"))),
    };
    let mut out = format!("{magic}\n{cols} {rows}\n255\n").into_bytes();
    let n = rows * cols;
    out.reserve(n * signal.channels());
    for p in 0..n {
        for t in 0..signal.channels() {
            let v = signal.channel(t)[p].clamp(0.0, 1.0);
            out.push((v * 255.0).round() as u8);
        }
    }
    Ok(out)
}

/// Reads an image, optionally center-cropping each side to the largest
/// power of two that fits.
pub fn read_image(path: &Path, crop: bool) -> Result<MultiChannelSignal> {
    let img = decode_pnm(&fs::read(path)?)?;
    if crop {
        center_crop_dyadic(&img)
    } else {
        Ok(img)
    }
}

pub fn write_image(path: &Path, signal: &MultiChannelSignal) -> Result<()> {
    fs::write(path, encode_pnm(signal)?)?;
    Ok(())
}

/// Center crop of a grid signal to power-of-two sides.
pub fn center_crop_dyadic(signal: &MultiChannelSignal) -> Result<MultiChannelSignal> {
    let Shape::Grid { rows, cols } = signal.shape() else {
        return Err(Error::InvalidParameter("crop needs a 2D signal".into()));
    };
    let pow2 = |v: usize| 1usize << (usize::BITS - 1 - v.leading_zeros());
    let (nr, nc) = (pow2(rows), pow2(cols));
    let (r0, c0) = ((rows - nr) / 2, (cols - nc) / 2);
    let mut data = Vec::with_capacity(nr * nc * signal.channels());
    for t in 0..signal.channels() {
        let ch = signal.channel(t);
        for r in r0..r0 + nr {
            data.extend_from_slice(&ch[r * cols + c0..r * cols + c0 + nc]);
        }
    }
    MultiChannelSignal::new(Shape::Grid { rows: nr, cols: nc }, signal.channels(), data)
}
