//! Lottery-frame (LoF) bitmap estimator.

use crate::ids::bitmap_len;

/// Bias-correction constant of the LoF estimator.
pub const LOF_SCALE: f64 = 1.2897;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bitmap(Vec<bool>);

impl Bitmap {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![false; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn set(&mut self, i: usize, v: bool) {
        self.0[i] = v;
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    /// Index of the first zero bit, or the length if none.
    pub fn first_zero(&self) -> u32 {
        self.0.iter().position(|b| !b).unwrap_or(self.0.len()) as u32
    }
}

impl std::str::FromStr for Bitmap {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(crate::Error::invalid(format!("bad bitmap char {c:?}"))),
            })
            .collect::<crate::Result<Vec<_>>>()
            .map(Bitmap)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LofEstimate {
    pub rho: u32,
    pub n_hat: f64,
}

impl LofEstimate {
    pub fn from_rho(rho: u32) -> Self {
        Self {
            rho,
            n_hat: LOF_SCALE * 2f64.powi(rho as i32),
        }
    }
}

pub fn lof_estimate(bm: &Bitmap) -> LofEstimate {
    LofEstimate::from_rho(bm.first_zero())
}

/// One LoF pass over a single type: each active node transmits in the slot of
/// its hash.
#[derive(Debug, Clone, PartialEq)]
pub struct LofRun {
    pub estimate: LofEstimate,
    pub bitmap: Bitmap,
    pub slots_used: u32,
}

/// `hashes` must lie in `0..t`.
pub fn run_lof(hashes: &[u32], t: u32) -> LofRun {
    let mut bitmap = Bitmap::zeros(t as usize);
    for &h in hashes {
        bitmap.set(h as usize, true);
    }
    LofRun {
        estimate: lof_estimate(&bitmap),
        bitmap,
        slots_used: t,
    }
}

/// Slots a LoF pass takes for an ID space of `n_all` IDs.
pub fn lof_slots(n_all: u64) -> u32 {
    bitmap_len(n_all)
}
