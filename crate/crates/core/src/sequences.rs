//! Point generators: the base-2 Hammersley set and a seeded PRNG.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};

/// Van der Corput radical inverse in base 2: the bits of `i` mirrored about
/// the binary point. Exact for `i < 2^53`.
pub fn radical_inverse_base2(i: u64) -> f64 {
    i.reverse_bits() as f64 * (1.0 / 18_446_744_073_709_551_616.0)
}

/// Point `i` of the `n`-point two-dimensional Hammersley set.
pub fn hammersley(i: u64, n: u64) -> Result<(f64, f64)> {
    if i >= n {
        return Err(Error::IndexOutOfRange {
            index: i as usize,
            len: n as usize,
        });
    }
    Ok((i as f64 / n as f64, radical_inverse_base2(i)))
}

/// Seeded uniform generator: xoshiro256++ seeded through SplitMix64, drawing
/// 53-bit doubles in `[0, 1)`.
#[derive(Clone, Debug)]
pub struct Prng {
    rng: Xoshiro256PlusPlus,
}

impl Prng {
    pub fn new(seed: u64) -> Self {
        Prng {
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    /// Independent stream `k` of `seed`: the base stream advanced by `k`
    /// jumps of 2^128 draws.
    pub fn stream(seed: u64, k: u64) -> Self {
        let mut p = Prng::new(seed);
        for _ in 0..k {
            p.rng.jump();
        }
        p
    }

    pub fn next_f64(&mut self) -> f64 {
        self.rng.random()
    }
}

/// Where sample coordinates come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SequenceKind {
    Hammersley,
    Prng { seed: u64 },
}

/// A finite stream of 2D points.
#[derive(Clone, Debug)]
pub struct PointStream {
    source: Source,
    len: u64,
    cursor: u64,
}

#[derive(Clone, Debug)]
enum Source {
    Hammersley,
    Prng(Prng),
}

impl PointStream {
    pub fn new(kind: SequenceKind, len: u64) -> Self {
        let source = match kind {
            SequenceKind::Hammersley => Source::Hammersley,
            SequenceKind::Prng { seed } => Source::Prng(Prng::new(seed)),
        };
        PointStream {
            source,
            len,
            cursor: 0,
        }
    }

    pub fn hammersley(len: u64) -> Self {
        Self::new(SequenceKind::Hammersley, len)
    }

    pub fn prng(seed: u64, len: u64) -> Self {
        Self::new(SequenceKind::Prng { seed }, len)
    }

    /// First components only.
    pub fn first_components(self) -> impl Iterator<Item = f64> {
        self.map(|(x, _)| x)
    }
}

impl Iterator for PointStream {
    type Item = (f64, f64);

    fn next(&mut self) -> Option<(f64, f64)> {
        if self.cursor >= self.len {
            return None;
        }
        let i = self.cursor;
        self.cursor += 1;
        Some(match &mut self.source {
            Source::Hammersley => (i as f64 / self.len as f64, radical_inverse_base2(i)),
            Source::Prng(p) => (p.next_f64(), p.next_f64()),
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.len - self.cursor) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for PointStream {}
