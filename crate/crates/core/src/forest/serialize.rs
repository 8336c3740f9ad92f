//! `RTF1` binary layout, all little-endian:
//!
//! ```text
//! "RTF1" | u32 n | u32 m | f64 C[0..=n] | i32 table[m] | n × (i32 left, i32 right)
//! ```
//!
//! Leaf references are stored in their complemented form.

use std::io::{Read, Write};

use super::{ForestNode, NodeRef, RadixForest, MAX_LEAVES};
use crate::distribution::Cdf;
use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"RTF1";

pub fn write_forest<W: Write>(f: &RadixForest, mut w: W) -> Result<()> {
    w.write_all(&MAGIC)?;
    w.write_all(&(f.len() as u32).to_le_bytes())?;
    w.write_all(&(f.cells() as u32).to_le_bytes())?;
    for &c in f.cdf.bounds() {
        w.write_all(&c.to_le_bytes())?;
    }
    for r in &f.table {
        w.write_all(&(r.bits() as i32).to_le_bytes())?;
    }
    for node in &f.nodes {
        for r in node.children {
            w.write_all(&(r.bits() as i32).to_le_bytes())?;
        }
    }
    Ok(())
}

impl RadixForest {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(12 + 8 * (self.len() + 1) + 4 * self.cells() + 8 * self.len());
        write_forest(self, &mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        read_forest(bytes)
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::parse(self.bytes.len(), format!("truncated {what}")))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

/// Reads a forest, checking the header, the bounds and that every reference
/// stays inside the arrays. Structural soundness is left to
/// [`validate_forest`](super::validate_forest).
pub fn read_forest<R: Read>(mut r: R) -> Result<RadixForest> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let mut c = Cursor {
        bytes: &bytes,
        pos: 0,
    };
    if c.take(4, "magic")? != MAGIC {
        return Err(Error::parse(0, "bad magic, expected RTF1"));
    }
    let n = c.u32("leaf count")? as usize;
    let m = c.u32("cell count")? as usize;
    if n == 0 || n >= MAX_LEAVES {
        return Err(Error::parse(4, format!("invalid leaf count {n}")));
    }
    if m == 0 {
        return Err(Error::parse(8, "cell count must be positive"));
    }
    let expected = 12 + 8 * (n + 1) + 4 * m + 8 * n;
    if bytes.len() != expected {
        return Err(Error::parse(
            bytes.len().min(expected),
            format!("expected {expected} bytes, found {}", bytes.len()),
        ));
    }
    let bounds_at = c.pos;
    let bounds = (0..=n)
        .map(|_| c.f64("bounds"))
        .collect::<Result<Vec<_>>>()?;
    let cdf = Cdf::from_bounds(bounds).map_err(|e| match e {
        Error::Parse { offset, message } => Error::parse(bounds_at + 8 * offset, message),
        other => other,
    })?;
    let read_ref = |c: &mut Cursor<'_>| -> Result<NodeRef> {
        let at = c.pos;
        let r = NodeRef::from_bits(c.u32("reference")?);
        let index = r.as_internal().or(r.as_leaf()).unwrap_or(usize::MAX);
        if index >= n {
            return Err(Error::parse(at, format!("reference {:#x} out of range", r.bits())));
        }
        Ok(r)
    };
    let table = (0..m)
        .map(|_| read_ref(&mut c))
        .collect::<Result<Vec<_>>>()?;
    let nodes = (0..n)
        .map(|_| Ok(ForestNode::new(read_ref(&mut c)?, read_ref(&mut c)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RadixForest::from_parts(cdf, nodes, table))
}
