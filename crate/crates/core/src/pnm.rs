//! Binary PGM (`P5`) and PPM (`P6`) with maxval 255.

use crate::error::{Error, Result};
use crate::image::{image_to_bytes, Image};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Magic {
    P5,
    P6,
}

impl Magic {
    pub fn channels(self) -> usize {
        match self {
            Magic::P5 => 1,
            Magic::P6 => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PnmHeader {
    pub magic: Magic,
    pub width: usize,
    pub height: usize,
    pub maxval: u32,
}

fn parse_err<T>(offset: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        offset,
        message: message.into(),
    })
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return parse_err(start, format!("expected {what}"));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .map_or_else(|| parse_err(start, format!("{what} out of range")), Ok)
    }
}

pub fn read_header(bytes: &[u8]) -> Result<(PnmHeader, usize)> {
    let magic = match bytes.get(..2) {
        Some(b"P5") => Magic::P5,
        Some(b"P6") => Magic::P6,
        _ => return parse_err(0, "bad magic number (expected P5 or P6)"),
    };
    let mut cur = Cursor { data: bytes, pos: 2 };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval_at = cur.pos;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return parse_err(2, format!("dimensions must be positive, got {width}x{height}"));
    }
    if maxval != 255 {
        return parse_err(maxval_at, format!("maxval must be 255, got {maxval}"));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return parse_err(cur.pos, "expected whitespace after maxval"),
    }
    Ok((
        PnmHeader {
            magic,
            width,
            height,
            maxval: maxval as u32,
        },
        cur.pos,
    ))
}

/// Decodes a binary PGM/PPM into a planar image.
pub fn read_pnm(bytes: &[u8]) -> Result<Image> {
    let (header, offset) = read_header(bytes)?;
    let channels = header.magic.channels();
    let plane = header
        .width
        .checked_mul(header.height)
        .filter(|n| n.checked_mul(channels).is_some())
        .map_or_else(|| parse_err(2, "image dimensions overflow"), Ok)?;
    let expected = plane * channels;
    let payload = &bytes[offset..];
    if payload.len() < expected {
        return parse_err(
            bytes.len(),
            format!("truncated payload: expected {expected} bytes, found {}", payload.len()),
        );
    }
    let payload = &payload[..expected];
    let mut samples = vec![0.0; expected];
    for (i, px) in payload.chunks_exact(channels).enumerate() {
        for (c, &b) in px.iter().enumerate() {
            samples[c * plane + i] = f64::from(b);
        }
    }
    Image::new(header.width, header.height, channels, samples)
}

/// Encodes as `P5` (1 channel) or `P6` (3 channels), quantizing samples.
pub fn write_pnm(img: &Image) -> Result<Vec<u8>> {
    let magic = match img.channels() {
        1 => "P5",
        3 => "P6",
        c => return Err(Error::UnsupportedChannels(c)),
    };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    let bytes = image_to_bytes(img);
    let plane = img.plane_len();
    let channels = img.channels();
    out.reserve(bytes.len());
    for i in 0..plane {
        for c in 0..channels {
            out.push(bytes[c * plane + i]);
        }
    }
    Ok(out)
}
