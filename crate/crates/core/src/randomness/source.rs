//! Source kinds and the deterministic value streams drawn from them.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hv::BinaryHV;
use crate::randomness::hadamard::{covering_order, hadamard_entry, truncated_row};
use crate::randomness::lfsr::{mix64, LfsrUniform};
use crate::randomness::misr::MisrGenerator;
use crate::randomness::sobol::{SobolSource, SobolTable};

/// Where generated vectors and thresholds get their randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SourceKind {
    Pseudo,
    Sobol,
    Hadamard,
}

impl SourceKind {
    pub const ALL: [SourceKind; 3] = [SourceKind::Pseudo, SourceKind::Sobol, SourceKind::Hadamard];

    pub fn as_str(self) -> &'static str {
        match self {
            SourceKind::Pseudo => "pseudo",
            SourceKind::Sobol => "sobol",
            SourceKind::Hadamard => "hadamard",
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SourceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pseudo" | "pseudo-random" | "p" => Ok(SourceKind::Pseudo),
            "sobol" | "quasi" | "s" => Ok(SourceKind::Sobol),
            "hadamard" | "h" => Ok(SourceKind::Hadamard),
            other => Err(Error::InvalidArgument(format!(
                "unknown source kind {other:?}"
            ))),
        }
    }
}

/// What a stream is used for. Distinct roles draw from independent streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamRole {
    /// Binarization thresholds for class and query vectors.
    Dither,
    /// Column `j` of the projection matrix.
    Column(usize),
}

impl StreamRole {
    fn tag(self) -> u64 {
        match self {
            StreamRole::Dither => 0x6469_7468_6572,
            StreamRole::Column(j) => 0x636f_6c00_0000_0000 ^ j as u64,
        }
    }
}

/// Sobol point offset selected by a seed. Windows are aligned to 2^14 points.
fn sobol_start(seed: u64) -> u64 {
    1 + ((seed % (1 << 16)) << 14)
}

/// `len` values in (0, 1) from `kind`, fully determined by `(seed, role)`.
///
/// * Pseudo: 32 bits per value from a 32-bit LFSR.
/// * Sobol: dither reads coordinate 1, column `j` reads coordinate `j + 2`,
///   starting at a seed-selected aligned window.
/// * Hadamard: column `j` is row `1 + (seed + j) mod (n - 1)` of the covering
///   order `n`, mapped to 0.75 (+1) / 0.25 (-1) so that thresholding at 0.5
///   returns the row itself; dither is the column ramp `(d + 1/2) / len`.
pub fn source_stream(
    kind: SourceKind,
    seed: u64,
    role: StreamRole,
    len: usize,
) -> Result<Vec<f64>> {
    match kind {
        SourceKind::Pseudo => {
            let mut u = LfsrUniform::new(mix64(seed) ^ mix64(role.tag()));
            Ok((0..len).map(|_| u.next_unit()).collect())
        }
        SourceKind::Sobol => {
            let dimension = match role {
                StreamRole::Dither => 1,
                StreamRole::Column(j) => j + 2,
            };
            let mut src = SobolSource::from_table(SobolTable::standard(), dimension)?;
            src.seek(sobol_start(seed))?;
            Ok((0..len).map(|_| src.next_point()).collect())
        }
        SourceKind::Hadamard => match role {
            StreamRole::Dither => Ok((0..len).map(|d| (d as f64 + 0.5) / len as f64).collect()),
            StreamRole::Column(j) => {
                let order = covering_order(len);
                let row = if order > 1 {
                    1 + ((seed as usize).wrapping_add(j) % (order - 1))
                } else {
                    0
                };
                Ok((0..len)
                    .map(|c| {
                        if hadamard_entry(row, c) > 0 {
                            0.75
                        } else {
                            0.25
                        }
                    })
                    .collect())
            }
        },
    }
}

/// `count` pairwise-distinct position hypervectors of dimension `dim`.
///
/// Pseudo and Sobol kinds clock a MISR seeded from the matching source;
/// Hadamard takes rows `1 + (seed + i) mod (n - 1)` of the covering order `n`,
/// truncated to `dim` columns (row 0 is never used).
pub fn generate_position_hvs(
    kind: SourceKind,
    dim: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<BinaryHV>> {
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    if count == 0 {
        return Err(Error::InvalidArgument(
            "position count must be at least 1".into(),
        ));
    }
    match kind {
        SourceKind::Hadamard => {
            let order = covering_order(dim);
            let available = order - 1;
            if count > available {
                return Err(Error::Exhausted {
                    requested: count,
                    available,
                });
            }
            (0..count)
                .map(|i| {
                    let row = 1 + ((seed as usize).wrapping_add(i) % available);
                    Ok(truncated_row(dim, row)?.to_binary())
                })
                .collect()
        }
        SourceKind::Pseudo | SourceKind::Sobol => {
            let mut misr = match kind {
                SourceKind::Pseudo => MisrGenerator::from_lfsr(dim, seed)?,
                _ => MisrGenerator::from_sobol(dim, seed)?,
            };
            let mut seen = HashSet::with_capacity(count);
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                let hv = misr.step();
                if !seen.insert(hv.clone()) {
                    return Err(Error::Exhausted {
                        requested: count,
                        available: out.len(),
                    });
                }
                out.push(hv);
            }
            Ok(out)
        }
    }
}
