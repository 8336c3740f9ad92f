//! Grayscale PGM (P2, P5) and PFM (`Pf`) input, PFM output.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sampler2d::Density2D;

/// Header fields are whitespace separated; `#` comments run to end of line.
struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
    comments: bool,
}

impl<'a> Header<'a> {
    fn skip_space(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if self.comments && b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n') {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn token(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.skip_space();
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| !b.is_ascii_whitespace())
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::parse(start, format!("missing {what}")));
        }
        let s = std::str::from_utf8(&self.bytes[start..self.pos])
            .map_err(|_| Error::parse(start, format!("{what} is not text")))?;
        Ok((start, s))
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let (at, s) = self.token(what)?;
        s.parse()
            .map_err(|_| Error::parse(at, format!("invalid {what} '{s}'")))
    }

    /// Consumes the single whitespace byte ending the header.
    fn end(&mut self) -> Result<usize> {
        match self.bytes.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => Ok(self.pos + 1),
            _ => Err(Error::parse(self.pos, "header not terminated by whitespace")),
        }
    }
}

fn dimensions(h: &mut Header<'_>) -> Result<(usize, usize)> {
    let at = h.pos;
    let width: usize = h.number("width")?;
    let height: usize = h.number("height")?;
    if width == 0 || height == 0 {
        return Err(Error::parse(at, "image dimensions must be positive"));
    }
    Ok((width, height))
}

pub fn parse_pgm(bytes: &[u8]) -> Result<Density2D> {
    let mut h = Header {
        bytes,
        pos: 0,
        comments: true,
    };
    let (_, magic) = h.token("magic")?;
    let binary = match magic {
        "P2" => false,
        "P5" => true,
        other => return Err(Error::UnsupportedFormat(format!("PGM magic '{other}'"))),
    };
    let (width, height) = dimensions(&mut h)?;
    let at = h.pos;
    let maxval: u32 = h.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::parse(at, format!("maxval {maxval} out of range")));
    }
    let count = width * height;
    let mut values = Vec::with_capacity(count);
    if binary {
        let start = h.end()?;
        let size = if maxval < 256 { 1 } else { 2 };
        let data = &bytes[start..];
        if data.len() < count * size {
            return Err(Error::parse(bytes.len(), "truncated pixel data"));
        }
        for k in 0..count {
            let v = if size == 1 {
                u32::from(data[k])
            } else {
                u32::from(u16::from_be_bytes([data[2 * k], data[2 * k + 1]]))
            };
            values.push(f64::from(v));
        }
    } else {
        for _ in 0..count {
            let at = h.pos;
            let v: u32 = h.number("pixel").map_err(|e| match e {
                Error::Parse { offset, .. } if offset >= bytes.len() => {
                    Error::parse(bytes.len(), "truncated pixel data")
                }
                e => e,
            })?;
            if v > maxval {
                return Err(Error::parse(at, format!("pixel {v} exceeds maxval {maxval}")));
            }
            values.push(f64::from(v));
        }
    }
    Density2D::new(width, height, values)
}

pub fn parse_pfm(bytes: &[u8]) -> Result<Density2D> {
    let mut h = Header {
        bytes,
        pos: 0,
        comments: false,
    };
    let (_, magic) = h.token("magic")?;
    match magic {
        "Pf" => {}
        "PF" => return Err(Error::UnsupportedFormat("color PFM".into())),
        other => return Err(Error::UnsupportedFormat(format!("PFM magic '{other}'"))),
    }
    let (width, height) = dimensions(&mut h)?;
    let at = h.pos;
    let scale: f64 = h.number("scale")?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::parse(at, "scale must be finite and non-zero"));
    }
    let start = h.end()?;
    let data = &bytes[start..];
    let count = width * height;
    if data.len() < 4 * count {
        return Err(Error::parse(bytes.len(), "truncated pixel data"));
    }
    let little = scale < 0.0;
    let mut values = vec![0.0; count];
    // Rows are stored bottom to top.
    for (k, chunk) in data[..4 * count].chunks_exact(4).enumerate() {
        let raw: [u8; 4] = chunk.try_into().expect("chunk of four");
        let v = if little {
            f32::from_le_bytes(raw)
        } else {
            f32::from_be_bytes(raw)
        };
        let (row, col) = (height - 1 - k / width, k % width);
        values[row * width + col] = f64::from(v) * scale.abs();
    }
    Density2D::new(width, height, values)
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<Density2D> {
    parse_pgm(&std::fs::read(path)?)
}

pub fn load_pfm(path: impl AsRef<Path>) -> Result<Density2D> {
    parse_pfm(&std::fs::read(path)?)
}

/// Dispatches on the magic bytes.
pub fn load_image(path: impl AsRef<Path>) -> Result<Density2D> {
    let bytes = std::fs::read(path)?;
    match bytes.get(..2) {
        Some(b"P2" | b"P5") => parse_pgm(&bytes),
        Some(b"Pf" | b"PF") => parse_pfm(&bytes),
        _ => Err(Error::UnsupportedFormat("expected a PGM or PFM image".into())),
    }
}

/// Little-endian grayscale PFM with scale −1. Values are narrowed to `f32`.
pub fn write_pfm<W: Write>(d: &Density2D, mut w: W) -> Result<()> {
    write!(w, "Pf\n{} {}\n-1.0\n", d.width(), d.height())?;
    for row in (0..d.height()).rev() {
        for &v in d.row(row) {
            w.write_all(&(v as f32).to_le_bytes())?;
        }
    }
    Ok(())
}

/// ASCII PGM; values are rounded and must lie in `[0, 65535]`.
pub fn write_pgm<W: Write>(d: &Density2D, mut w: W) -> Result<()> {
    let pixels: Vec<u16> = d
        .values()
        .iter()
        .map(|&v| {
            let r = v.round();
            if (0.0..=65535.0).contains(&r) {
                Ok(r as u16)
            } else {
                Err(Error::UnsupportedFormat(format!("PGM cannot store {v}")))
            }
        })
        .collect::<Result<_>>()?;
    let maxval = pixels.iter().copied().max().unwrap_or(0).max(1);
    writeln!(w, "P2\n{} {}\n{}", d.width(), d.height(), maxval)?;
    for row in pixels.chunks(d.width()) {
        let line: Vec<String> = row.iter().map(u16::to_string).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}
