//! Binary and bipolar hypervectors.
//!
//! Both kinds are stored bit-packed in `u64` words, least significant bit
//! first. Logical index `i` lives in word `i / 64`, bit `i % 64`; padding bits
//! beyond `dim` in the last word are always zero. A [`BipolarHV`] stores `+1`
//! as a set bit and `-1` as a clear bit, so the two computing paths share
//! popcount kernels and `cosine = 1 - 2 * hamming` holds by construction.

use std::fmt;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

fn words_for(dim: usize) -> usize {
    dim.div_ceil(WORD_BITS)
}

fn tail_mask(dim: usize) -> u64 {
    match dim % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

fn check_dims(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left, right })
    }
}

/// Moves logical index `i` to `i + r`, dropping indices that pass `dim`.
fn shift_up(words: &[u64], r: usize, dim: usize) -> Vec<u64> {
    let n = words.len();
    let mut out = vec![0u64; n];
    let (ws, bs) = (r / WORD_BITS, r % WORD_BITS);
    for k in ws..n {
        let mut w = words[k - ws] << bs;
        if bs > 0 && k > ws {
            w |= words[k - ws - 1] >> (WORD_BITS - bs);
        }
        out[k] = w;
    }
    if let Some(last) = out.last_mut() {
        *last &= tail_mask(dim);
    }
    out
}

/// Moves logical index `i` to `i - r`, dropping indices below zero.
fn shift_down(words: &[u64], r: usize) -> Vec<u64> {
    let n = words.len();
    let mut out = vec![0u64; n];
    let (ws, bs) = (r / WORD_BITS, r % WORD_BITS);
    for k in 0..n.saturating_sub(ws) {
        let mut w = words[k + ws] >> bs;
        if bs > 0 && k + ws + 1 < n {
            w |= words[k + ws + 1] << (WORD_BITS - bs);
        }
        out[k] = w;
    }
    out
}

/// A `dim`-dimensional vector over {0, 1}.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryHV {
    dim: usize,
    words: Vec<u64>,
}

impl BinaryHV {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(Self {
            dim,
            words: vec![0; words_for(dim)],
        })
    }

    pub fn ones(dim: usize) -> Result<Self> {
        Ok(Self::zeros(dim)?.complement())
    }

    /// Builds a vector whose bit `i` is `f(i)`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize) -> bool) -> Result<Self> {
        let mut v = Self::zeros(dim)?;
        for i in 0..dim {
            if f(i) {
                v.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        Ok(v)
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        Self::from_fn(bits.len(), |i| bits[i])
    }

    /// Parses a string of `0`/`1` characters, index 0 first.
    pub fn from_bit_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidArgument(format!(
                    "bad bit character {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(&bits)
    }

    /// Unpacks `ceil(dim / 8)` bytes, bit `i` at byte `i / 8`, bit `i % 8`.
    pub fn from_bytes(dim: usize, bytes: &[u8]) -> Result<Self> {
        let need = dim.div_ceil(8);
        if bytes.len() != need {
            return Err(Error::InvalidArgument(format!(
                "expected {need} bytes for dimension {dim}, got {}",
                bytes.len()
            )));
        }
        let mut v = Self::zeros(dim)?;
        for (i, &b) in bytes.iter().enumerate() {
            v.words[i / 8] |= (b as u64) << ((i % 8) * 8);
        }
        let last = v.words.len() - 1;
        if v.words[last] & !tail_mask(dim) != 0 {
            return Err(Error::InvalidArgument("nonzero padding bits".into()));
        }
        Ok(v)
    }

    /// Inverse of [`BinaryHV::from_bytes`].
    pub fn to_bytes(&self) -> Vec<u8> {
        (0..self.dim.div_ceil(8))
            .map(|i| (self.words[i / 8] >> ((i % 8) * 8)) as u8)
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.dim,
            "index {i} out of range for dimension {}",
            self.dim
        );
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    pub(crate) fn set(&mut self, i: usize, bit: bool) {
        let w = &mut self.words[i / WORD_BITS];
        if bit {
            *w |= 1 << (i % WORD_BITS);
        } else {
            *w &= !(1 << (i % WORD_BITS));
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.dim).map(move |i| self.get(i))
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn complement(&self) -> Self {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(self.dim);
        }
        Self {
            dim: self.dim,
            words,
        }
    }

    /// Element-wise XOR.
    pub fn bind(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim, other.dim)?;
        Ok(Self {
            dim: self.dim,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a ^ b)
                .collect(),
        })
    }

    /// Circular rotation: bit `i` moves to `(i + r) mod dim`. Negative `r`
    /// rotates the other way.
    pub fn permute(&self, r: i64) -> Self {
        let d = self.dim as i64;
        let r = r.rem_euclid(d) as usize;
        if r == 0 {
            return self.clone();
        }
        let up = shift_up(&self.words, r, self.dim);
        let down = shift_down(&self.words, self.dim - r);
        Self {
            dim: self.dim,
            words: up.iter().zip(&down).map(|(a, b)| a | b).collect(),
        }
    }

    /// Number of positions where the two vectors differ.
    pub fn hamming_count(&self, other: &Self) -> Result<usize> {
        check_dims(self.dim, other.dim)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// Normalized Hamming distance in `[0, 1]`.
    pub fn hamming(&self, other: &Self) -> Result<f64> {
        Ok(self.hamming_count(other)? as f64 / self.dim as f64)
    }

    pub fn to_bipolar(&self) -> BipolarHV {
        BipolarHV(self.clone())
    }

    /// MISR-style step: `next[0] = s[D-1]`, `next[i] = s[i-1] ^ (mask[i-1] & s[D-1])`.
    pub(crate) fn masked_feedback_shift(&self, mask: &Self) -> Self {
        let last = self.get(self.dim - 1);
        let mut next = shift_up(&self.words, 1, self.dim);
        if last {
            let fb = shift_up(&mask.words, 1, self.dim);
            for (n, f) in next.iter_mut().zip(&fb) {
                *n ^= f;
            }
            next[0] |= 1;
        }
        Self {
            dim: self.dim,
            words: next,
        }
    }
}

impl fmt::Debug for BinaryHV {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SHOW: usize = 64;
        let bits: String = self
            .iter()
            .take(SHOW)
            .map(|b| if b { '1' } else { '0' })
            .collect();
        let ellipsis = if self.dim > SHOW { "…" } else { "" };
        write!(f, "BinaryHV(dim={}, {bits}{ellipsis})", self.dim)
    }
}

/// Per-dimension majority vote. Exact ties (half the inputs set) resolve to 1.
pub fn bundle(vs: &[BinaryHV]) -> Result<BinaryHV> {
    let first = vs.first().ok_or(Error::EmptyBundle)?;
    let dim = first.dim;
    let mut counts = vec![0u32; dim];
    for v in vs {
        check_dims(dim, v.dim)?;
        for (w_idx, &w) in v.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                counts[w_idx * WORD_BITS + b] += 1;
                w &= w - 1;
            }
        }
    }
    let n = vs.len() as u32;
    BinaryHV::from_fn(dim, |i| 2 * counts[i] >= n)
}

/// A `dim`-dimensional vector over {-1, +1}.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BipolarHV(BinaryHV);

impl BipolarHV {
    /// Builds from explicit signs; any entry other than ±1 is rejected.
    pub fn from_signs(values: &[i8]) -> Result<Self> {
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| v.abs() != 1) {
            return Err(Error::InvalidBipolar {
                index,
                value: value as i64,
            });
        }
        Ok(Self(BinaryHV::from_fn(values.len(), |i| values[i] > 0)?))
    }

    /// Builds a vector whose entry `i` is `+1` iff `positive(i)`.
    pub fn from_fn(dim: usize, positive: impl FnMut(usize) -> bool) -> Result<Self> {
        Ok(Self(BinaryHV::from_fn(dim, positive)?))
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn get(&self, i: usize) -> i8 {
        if self.0.get(i) {
            1
        } else {
            -1
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = i8> + '_ {
        self.0.iter().map(|b| if b { 1 } else { -1 })
    }

    pub fn to_vec(&self) -> Vec<i8> {
        self.iter().collect()
    }

    pub fn negate(&self) -> Self {
        Self(self.0.complement())
    }

    /// Element-wise product (XNOR on the packed sign bits).
    pub fn bind(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.bind(&other.0)?.complement()))
    }

    pub fn dot(&self, other: &Self) -> Result<i64> {
        let diff = self.0.hamming_count(&other.0)? as i64;
        Ok(self.dim() as i64 - 2 * diff)
    }

    /// Cosine similarity, computed as `1 - 2 * hamming` over the sign bits.
    pub fn cosine(&self, other: &Self) -> Result<f64> {
        Ok(1.0 - 2.0 * self.0.hamming(&other.0)?)
    }

    pub fn to_binary(&self) -> BinaryHV {
        self.0.clone()
    }

    pub fn as_binary(&self) -> &BinaryHV {
        &self.0
    }
}

impl fmt::Debug for BipolarHV {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SHOW: usize = 64;
        let signs: String = self
            .iter()
            .take(SHOW)
            .map(|v| if v > 0 { '+' } else { '-' })
            .collect();
        let ellipsis = if self.dim() > SHOW { "…" } else { "" };
        write!(f, "BipolarHV(dim={}, {signs}{ellipsis})", self.dim())
    }
}

/// Either kind of hypervector, for code that handles both computing paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyHv {
    Binary(BinaryHV),
    Bipolar(BipolarHV),
}

impl AnyHv {
    pub fn kind(&self) -> &'static str {
        match self {
            AnyHv::Binary(_) => "binary",
            AnyHv::Bipolar(_) => "bipolar",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            AnyHv::Binary(v) => v.dim(),
            AnyHv::Bipolar(v) => v.dim(),
        }
    }

    pub fn bind(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (AnyHv::Binary(a), AnyHv::Binary(b)) => Ok(AnyHv::Binary(a.bind(b)?)),
            (AnyHv::Bipolar(a), AnyHv::Bipolar(b)) => Ok(AnyHv::Bipolar(a.bind(b)?)),
            _ => Err(Error::KindMismatch {
                left: self.kind(),
                right: other.kind(),
            }),
        }
    }

    /// The underlying bit pattern (sign bits for bipolar vectors).
    pub fn bits(&self) -> &BinaryHV {
        match self {
            AnyHv::Binary(v) => v,
            AnyHv::Bipolar(v) => v.as_binary(),
        }
    }

    /// Bipolar lift: 1 -> +1, 0 -> -1.
    pub fn to_bipolar(&self) -> BipolarHV {
        match self {
            AnyHv::Binary(v) => v.to_bipolar(),
            AnyHv::Bipolar(v) => v.clone(),
        }
    }
}

/// Real-valued accumulation vector formed before binarization.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarAccumulator {
    values: Vec<f64>,
    count: u64,
}

impl ScalarAccumulator {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(Self {
            values: vec![0.0; dim],
            count: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Adds a bipolar vector element-wise.
    pub fn accumulate(&mut self, v: &BipolarHV) -> Result<()> {
        check_dims(self.dim(), v.dim())?;
        for (acc, s) in self.values.iter_mut().zip(v.iter()) {
            *acc += s as f64;
        }
        self.count += 1;
        Ok(())
    }

    /// Adds a real-valued vector element-wise.
    pub fn accumulate_values(&mut self, v: &[f64]) -> Result<()> {
        self.add_scaled(v, 1.0)?;
        self.count += 1;
        Ok(())
    }

    /// `values += scale * v` without touching the sample count.
    pub fn add_scaled(&mut self, v: &[f64], scale: f64) -> Result<()> {
        check_dims(self.dim(), v.len())?;
        for (acc, x) in self.values.iter_mut().zip(v) {
            *acc += scale * x;
        }
        Ok(())
    }

    /// Merges a partial sum built elsewhere.
    pub fn merge(&mut self, other: &Self) -> Result<()> {
        self.add_scaled(&other.values, 1.0)?;
        self.count += other.count;
        Ok(())
    }
}
