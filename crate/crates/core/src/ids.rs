//! Node identities and the least-significant-zero hash.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

/// Fixed-width binary ID, `width` in `1..=64`. Bit 0 is the least significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryId {
    bits: u64,
    width: u32,
}

impl BinaryId {
    pub fn new(bits: u64, width: u32) -> Result<Self> {
        if width == 0 || width > 64 {
            return Err(Error::invalid(format!("ID width {width} outside 1..=64")));
        }
        if width < 64 && bits >> width != 0 {
            return Err(Error::invalid(format!(
                "bits {bits:#x} do not fit in {width} bits"
            )));
        }
        Ok(Self { bits, width })
    }

    pub fn random<R: Rng + ?Sized>(width: u32, rng: &mut R) -> Result<Self> {
        let raw: u64 = rng.random();
        let bits = if width >= 64 {
            raw
        } else {
            raw & ((1u64 << width) - 1)
        };
        Self::new(bits, width)
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn hash(&self) -> HashValue {
        lsz_hash(self)
    }
}

impl FromStr for BinaryId {
    type Err = Error;

    /// Parses a most-significant-first bit string such as `"01001001"`.
    fn from_str(s: &str) -> Result<Self> {
        let width = s.len() as u32;
        let bits = u64::from_str_radix(s, 2)
            .map_err(|e| Error::invalid(format!("bad bit string {s:?}: {e}")))?;
        Self::new(bits, width)
    }
}

impl fmt::Display for BinaryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.bits, width = self.width as usize)
    }
}

/// Hash value in `[0, l]`; `l` only for the all-ones ID.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HashValue(pub u32);

impl HashValue {
    pub fn value(self) -> u32 {
        self.0
    }

    /// Fold the geometric tail into the last of `t` bins.
    pub fn clamp_to_bins(self, t: u32) -> u32 {
        self.0.min(t.saturating_sub(1))
    }
}

/// Position of the least significant zero bit, or the width if all bits are 1.
pub fn lsz_hash(id: &BinaryId) -> HashValue {
    HashValue(id.bits.trailing_ones().min(id.width))
}

/// Draw a fresh hash over `t` bins: `P(i) = 2^-(i+1)` for `i < t-1` and
/// `P(t-1) = 2^-(t-1)`.
pub fn draw_hash<R: Rng + ?Sized>(rng: &mut R, t: u32) -> Result<HashValue> {
    if t < 1 {
        return Err(Error::invalid("bitmap length t must be at least 1"));
    }
    let cap = t - 1;
    let mut base = 0u32;
    loop {
        let ones = rng.next_u64().trailing_ones();
        if base + ones >= cap {
            return Ok(HashValue(cap));
        }
        if ones < 64 {
            return Ok(HashValue(base + ones));
        }
        base += 64;
    }
}

/// `⌈log2 n⌉`, with `bitmap_len(1) = 0`.
pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// LoF bitmap length for a population whose ID space holds `n_all` IDs.
pub fn bitmap_len(n_all: u64) -> u32 {
    ceil_log2(n_all).max(1)
}

/// Default ID width for a population of `d` nodes: `⌈log2 d⌉ + 8`.
pub fn default_id_width(d: u64) -> u32 {
    (ceil_log2(d) + 8).min(64)
}
