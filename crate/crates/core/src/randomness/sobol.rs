//! Sobol low-discrepancy sequences (Gray-code ordering, 32-bit precision).
//!
//! Direction numbers come from a plain-text table shipped in
//! `data/sobol_directions.txt`. Each non-comment line reads
//! `d s a m_1 .. m_s`: dimension index (1-based), degree of the primitive
//! polynomial, its interior coefficients packed into an `(s-1)`-bit integer
//! (most significant first), and the `s` initial direction integers.
//! Dimension 1 is implicit with every `m_k = 1`. Lines starting with `#` and
//! the `d s a m_i` header line are ignored.

use std::sync::OnceLock;

use crate::error::{Error, Result};

const BITS: usize = 32;
const SCALE: f64 = 4_294_967_296.0;

static STANDARD_TEXT: &str = include_str!("../../data/sobol_directions.txt");
static STANDARD: OnceLock<SobolTable> = OnceLock::new();

#[derive(Debug, Clone, PartialEq, Eq)]
struct Polynomial {
    degree: u32,
    coeff: u32,
    initial: Vec<u32>,
}

/// Parsed direction-number table. Index 0 holds dimension 1.
#[derive(Debug, Clone)]
pub struct SobolTable {
    polys: Vec<Polynomial>,
}

impl SobolTable {
    /// The table shipped with the crate (dimensions 1..=1024).
    pub fn standard() -> &'static SobolTable {
        STANDARD.get_or_init(|| {
            SobolTable::parse(STANDARD_TEXT).expect("shipped Sobol table is well formed")
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut polys = vec![Polynomial {
            degree: 0,
            coeff: 0,
            initial: vec![],
        }];
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with('d') {
                continue;
            }
            let bad = |reason: String| Error::SobolTable {
                line: lineno + 1,
                reason,
            };
            let nums = line
                .split_whitespace()
                .map(|t| t.parse::<u32>().map_err(|e| bad(format!("{t:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            if nums.len() < 3 {
                return Err(bad("expected at least d, s, a".into()));
            }
            let (d, s, a) = (nums[0] as usize, nums[1], nums[2]);
            if d != polys.len() + 1 {
                return Err(bad(format!(
                    "expected dimension {}, found {d}",
                    polys.len() + 1
                )));
            }
            if s == 0 || s as usize >= BITS {
                return Err(bad(format!("degree {s} out of range")));
            }
            let initial = nums[3..].to_vec();
            if initial.len() != s as usize {
                return Err(bad(format!(
                    "expected {s} direction integers, found {}",
                    initial.len()
                )));
            }
            for (k, &m) in initial.iter().enumerate() {
                if m % 2 == 0 || m >= 1 << (k + 1) {
                    return Err(bad(format!(
                        "m_{} = {m} must be odd and below 2^{}",
                        k + 1,
                        k + 1
                    )));
                }
            }
            if s > 1 && a >= 1 << (s - 1) || s == 1 && a != 0 {
                return Err(bad(format!("coefficient {a} too wide for degree {s}")));
            }
            polys.push(Polynomial {
                degree: s,
                coeff: a,
                initial,
            });
        }
        Ok(Self { polys })
    }

    /// Number of dimensions available, including the implicit first one.
    pub fn dimensions(&self) -> usize {
        self.polys.len()
    }

    /// The 32 direction numbers `V_k = m_k << (32 - k)` of a 1-based dimension.
    pub fn direction_numbers(&self, dimension: usize) -> Result<[u32; BITS]> {
        if dimension == 0 || dimension > self.polys.len() {
            return Err(Error::SobolDimension {
                requested: dimension,
                available: self.polys.len(),
            });
        }
        let mut m = [0u32; BITS];
        if dimension == 1 {
            m.fill(1);
        } else {
            let p = &self.polys[dimension - 1];
            let s = p.degree as usize;
            m[..s].copy_from_slice(&p.initial);
            for k in s..BITS {
                // m_k = 2 a_1 m_{k-1} ^ 4 a_2 m_{k-2} ^ ... ^ 2^s m_{k-s} ^ m_{k-s}
                let mut v = m[k - s] ^ (m[k - s] << s);
                for j in 1..s {
                    let a_j = (p.coeff >> (s - 1 - j)) & 1;
                    if a_j == 1 {
                        v ^= m[k - j] << j;
                    }
                }
                m[k] = v;
            }
        }
        let mut v = [0u32; BITS];
        for k in 0..BITS {
            v[k] = m[k] << (BITS - 1 - k);
        }
        Ok(v)
    }
}

/// One coordinate of the Sobol sequence.
#[derive(Debug, Clone)]
pub struct SobolSource {
    dimension: usize,
    directions: [u32; BITS],
    cursor: u64,
    current: u32,
}

impl SobolSource {
    /// Coordinate `dimension` (1-based) of the shipped table; the cursor starts
    /// at point 1.
    pub fn new(dimension: usize) -> Result<Self> {
        Self::from_table(SobolTable::standard(), dimension)
    }

    pub fn from_table(table: &SobolTable, dimension: usize) -> Result<Self> {
        let mut src = Self {
            dimension,
            directions: table.direction_numbers(dimension)?,
            cursor: 0,
            current: 0,
        };
        src.seek(1)?;
        Ok(src)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Index of the point the next call to [`SobolSource::next_point`] returns.
    pub fn cursor(&self) -> u64 {
        self.cursor
    }

    fn raw(&self, index: u64) -> u32 {
        let gray = index ^ (index >> 1);
        (0..BITS)
            .filter(|b| (gray >> b) & 1 == 1)
            .fold(0u32, |x, b| x ^ self.directions[b])
    }

    fn check_index(index: u64) -> Result<()> {
        if index == 0 {
            Err(Error::SobolIndexZero)
        } else if index >= 1 << BITS {
            Err(Error::InvalidArgument(format!(
                "Sobol index {index} exceeds 2^32 - 1"
            )))
        } else {
            Ok(())
        }
    }

    /// The `index`-th point (index ≥ 1), independent of the cursor.
    pub fn point(&self, index: u64) -> Result<f64> {
        Self::check_index(index)?;
        Ok(self.raw(index) as f64 / SCALE)
    }

    pub fn seek(&mut self, index: u64) -> Result<()> {
        Self::check_index(index)?;
        self.cursor = index;
        self.current = self.raw(index - 1);
        Ok(())
    }

    /// Returns the point at the cursor and advances by one (Gray-code update).
    pub fn next_point(&mut self) -> f64 {
        let prev = self.cursor - 1;
        let bit = (!prev).trailing_zeros() as usize;
        self.current ^= self.directions[bit];
        self.cursor += 1;
        self.current as f64 / SCALE
    }
}

/// Point `index` (≥ 1) of Sobol coordinate `dimension` (1-based).
pub fn sobol_point(dimension: usize, index: u64) -> Result<f64> {
    SobolSource::new(dimension)?.point(index)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Radical inverse of the Gray code of `n`: the first coordinate in
    /// Gray-code order, computed without direction numbers.
    fn gray_radical_inverse(n: u64) -> f64 {
        let mut g = n ^ (n >> 1);
        let mut x = 0.0;
        let mut w = 0.5;
        while g > 0 {
            if g & 1 == 1 {
                x += w;
            }
            g >>= 1;
            w /= 2.0;
        }
        x
    }

    #[test]
    fn dimension_one_first_points() {
        let got: Vec<f64> = (1..=4).map(|i| sobol_point(1, i).unwrap()).collect();
        assert_eq!(got, vec![0.5, 0.75, 0.25, 0.375]);
        for i in 1..5000 {
            assert_eq!(sobol_point(1, i).unwrap(), gray_radical_inverse(i));
        }
    }

    #[test]
    fn index_zero_rejected() {
        assert!(matches!(sobol_point(1, 0), Err(Error::SobolIndexZero)));
        assert!(matches!(
            sobol_point(5000, 1),
            Err(Error::SobolDimension { .. })
        ));
    }

    #[test]
    fn matches_reference_values() {
        // Reference: SciPy's unscrambled Sobol engine (bits=32), which uses
        // the same Joe-Kuo direction numbers.
        let idx = [1u64, 2, 3, 4, 5, 6, 7, 8, 1000, 2047];
        let cases: [(usize, [f64; 10]); 5] = [
            (
                2,
                [
                    0.5,
                    0.25,
                    0.75,
                    0.375,
                    0.875,
                    0.125,
                    0.625,
                    0.3125,
                    0.0966796875,
                    0.62744140625,
                ],
            ),
            (
                3,
                [
                    0.5,
                    0.25,
                    0.75,
                    0.625,
                    0.125,
                    0.875,
                    0.375,
                    0.9375,
                    0.5185546875,
                    0.93115234375,
                ],
            ),
            (
                7,
                [
                    0.5,
                    0.25,
                    0.75,
                    0.375,
                    0.875,
                    0.125,
                    0.625,
                    0.4375,
                    0.0458984375,
                    0.11767578125,
                ],
            ),
            (
                100,
                [
                    0.5,
                    0.75,
                    0.25,
                    0.875,
                    0.375,
                    0.125,
                    0.625,
                    0.9375,
                    0.1865234375,
                    0.86083984375,
                ],
            ),
            (
                1024,
                [
                    0.5,
                    0.75,
                    0.25,
                    0.875,
                    0.375,
                    0.125,
                    0.625,
                    0.0625,
                    0.7138671875,
                    0.32080078125,
                ],
            ),
        ];
        for (dim, expected) in cases {
            for (i, e) in idx.iter().zip(expected) {
                assert_eq!(sobol_point(dim, *i).unwrap(), e, "dim {dim} index {i}");
            }
        }
    }

    #[test]
    fn sequential_matches_direct() {
        for dim in [1, 2, 9, 513] {
            let mut src = SobolSource::new(dim).unwrap();
            src.seek(37).unwrap();
            for i in 37..2000 {
                assert_eq!(src.next_point(), src.point(i).unwrap());
            }
        }
    }

    #[test]
    fn values_strictly_inside_unit_interval() {
        for dim in [1, 2, 50] {
            let mut src = SobolSource::new(dim).unwrap();
            for _ in 0..10_000 {
                let v = src.next_point();
                assert!(v > 0.0 && v < 1.0);
            }
        }
    }

    #[test]
    fn dyadic_stratification_dimension_one() {
        // Points 0..2^k fill every dyadic bin once; point 0 is 0.0 (bin 0) and
        // is skipped by the public API, so it is accounted for here.
        for k in 0..=10u32 {
            let n = 1u64 << k;
            let mut hits = vec![0u32; n as usize];
            hits[0] += 1;
            for i in 1..n {
                let v = sobol_point(1, i).unwrap();
                hits[(v * n as f64) as usize] += 1;
            }
            assert!(hits.iter().all(|&h| h == 1), "k = {k}");
        }
    }

    #[test]
    fn table_parser_rejects_malformed_lines() {
        assert!(SobolTable::parse("d s a m_i\n2 1 0 1\n").is_ok());
        assert!(SobolTable::parse("3 1 0 1\n").is_err(), "dimension gap");
        assert!(SobolTable::parse("2 2 1 1\n").is_err(), "too few m");
        assert!(SobolTable::parse("2 1 0 2\n").is_err(), "even m");
        assert!(SobolTable::parse("2 1 0 x\n").is_err());
        assert_eq!(SobolTable::standard().dimensions(), 1024);
    }
}
