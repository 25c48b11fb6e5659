//! Multiple-input shift register that emits one position hypervector per
//! clock.
//!
//! Stages `FF_0 .. FF_{D-1}` form a chain; the last stage feeds back into
//! every earlier link through a mask:
//! `next[0] = s[D-1]`, `next[i] = s[i-1] ^ (mask[i-1] & s[D-1])`.

use crate::error::{Error, Result};
use crate::hv::BinaryHV;
use crate::randomness::lfsr::{mix64, LfsrUniform};
use crate::randomness::sobol::{SobolSource, SobolTable};

const SEED_TAG: u64 = 0x6d69_7372_5f73_6565;
const MASK_TAG: u64 = 0x6d69_7372_5f6d_736b;

/// How a generator's initial state and feedback mask were obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeedProvenance {
    Explicit,
    /// Bit `d` of the seed is `point(dim (d mod dims) + 1, seed_index + d / dims) >= 0.5`,
    /// and likewise for the mask starting at `mask_index`.
    Sobol {
        dims: usize,
        seed_index: u64,
        mask_index: u64,
    },
    /// Seed and mask bits drawn from two 32-bit LFSR streams.
    Lfsr {
        seed: u64,
    },
}

#[derive(Debug, Clone)]
pub struct MisrGenerator {
    state: BinaryHV,
    mask: BinaryHV,
    provenance: SeedProvenance,
}

impl MisrGenerator {
    pub fn new(seed: BinaryHV, mask: BinaryHV) -> Result<Self> {
        Self::with_provenance(seed, mask, SeedProvenance::Explicit)
    }

    fn with_provenance(seed: BinaryHV, mask: BinaryHV, provenance: SeedProvenance) -> Result<Self> {
        if seed.dim() != mask.dim() {
            return Err(Error::DimensionMismatch {
                left: seed.dim(),
                right: mask.dim(),
            });
        }
        if seed.is_zero() {
            return Err(Error::DegenerateState(
                "MISR seed is all-zero (absorbing state)".into(),
            ));
        }
        Ok(Self {
            state: seed,
            mask,
            provenance,
        })
    }

    /// Seed and mask thresholded from the shipped Sobol table. Consecutive seed
    /// bits walk across the table's dimensions at a fixed point index, so each
    /// bit comes from a different coordinate.
    pub fn from_sobol(dim: usize, seed: u64) -> Result<Self> {
        let table = SobolTable::standard();
        let dims = table.dimensions();
        let rows = dim.div_ceil(dims) as u64;
        // index 1 is (0.5, 0.5, ...) and would give an all-ones seed
        let seed_index = 2 + (seed % (1 << 16)) * 2 * rows;
        let mask_index = seed_index + rows;
        let sources = (1..=dims.min(dim))
            .map(|d| SobolSource::from_table(table, d))
            .collect::<Result<Vec<_>>>()?;
        let threshold = |start: u64| -> Result<BinaryHV> {
            let mut bits = vec![false; dim];
            for (d, bit) in bits.iter_mut().enumerate() {
                let src = &sources[d % dims];
                *bit = src.point(start + (d / dims) as u64)? >= 0.5;
            }
            BinaryHV::from_bits(&bits)
        };
        Self::with_provenance(
            threshold(seed_index)?,
            threshold(mask_index)?,
            SeedProvenance::Sobol {
                dims,
                seed_index,
                mask_index,
            },
        )
    }

    pub fn from_lfsr(dim: usize, seed: u64) -> Result<Self> {
        let mut s = LfsrUniform::new(mix64(seed) ^ SEED_TAG);
        let mut m = LfsrUniform::new(mix64(seed) ^ MASK_TAG);
        let mut state = BinaryHV::from_fn(dim, |_| s.next_bit())?;
        if state.is_zero() {
            state.set(0, true);
        }
        let mask = BinaryHV::from_fn(dim, |_| m.next_bit())?;
        Self::with_provenance(state, mask, SeedProvenance::Lfsr { seed })
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }

    pub fn state(&self) -> &BinaryHV {
        &self.state
    }

    pub fn mask(&self) -> &BinaryHV {
        &self.mask
    }

    pub fn provenance(&self) -> &SeedProvenance {
        &self.provenance
    }

    /// Emits the current state, then clocks the register once.
    pub fn step(&mut self) -> BinaryHV {
        let next = self.state.masked_feedback_shift(&self.mask);
        std::mem::replace(&mut self.state, next)
    }
}

impl Iterator for MisrGenerator {
    type Item = BinaryHV;

    fn next(&mut self) -> Option<BinaryHV> {
        Some(self.step())
    }
}
