//! Mutual information between a continuous feature and a discrete label,
//! estimated from k-nearest-neighbour distances (Ross's estimator).
//!
//! For each sample `i` with label `c`:
//! `d_i` is the distance to its k-th nearest neighbour among the other samples
//! of class `c`, and `m_i` counts all samples (itself included) strictly
//! closer than `d_i`. Then
//! `I = psi(N) - <psi(N_c)> + psi(k) - <psi(m_i)>`, clamped at zero.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::digamma;

use crate::error::{Error, Result};

pub const DEFAULT_K: usize = 3;

/// Relative size of the tie-breaking jitter.
const JITTER: f64 = 1e-10;

/// One score per feature column.
#[derive(Debug, Clone, PartialEq)]
pub struct MiScores {
    pub scores: Vec<f64>,
    pub k: usize,
}

impl MiScores {
    /// Feature indices by descending score; ties keep index order.
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.scores.len()).collect();
        idx.sort_by(|&a, &b| self.scores[b].total_cmp(&self.scores[a]).then(a.cmp(&b)));
        idx
    }

    /// Copy with `feature` scored zero, so no selection policy picks it.
    pub fn without(&self, feature: usize) -> Self {
        let mut out = self.clone();
        if let Some(s) = out.scores.get_mut(feature) {
            *s = 0.0;
        }
        out
    }
}

fn check_labels(labels: &[u16], k: usize) -> Result<BTreeMap<u16, usize>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if labels.len() <= k + 1 {
        return Err(Error::InvalidArgument(format!(
            "{} samples is too few for k = {k}",
            labels.len()
        )));
    }
    let mut counts = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_insert(0usize) += 1;
    }
    for (&label, &count) in &counts {
        if count <= k {
            return Err(Error::ClassTooSmall {
                label,
                count,
                needed: k + 1,
            });
        }
    }
    Ok(counts)
}

/// MI estimate for one column. `seed` drives the jitter added when the column
/// has repeated values; a constant column scores zero.
pub fn mutual_information_column(x: &[f64], labels: &[u16], k: usize, seed: u64) -> Result<f64> {
    if x.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: labels.len(),
        });
    }
    let counts = check_labels(labels, k)?;
    mi_checked(x, labels, &counts, k, seed)
}

fn mi_checked(
    x: &[f64],
    labels: &[u16],
    counts: &BTreeMap<u16, usize>,
    k: usize,
    seed: u64,
) -> Result<f64> {
    if let Some(bad) = x.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "non-finite feature value {bad}"
        )));
    }
    let n = x.len();
    let mut sorted: Vec<f64> = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted[0] == sorted[n - 1] {
        return Ok(0.0);
    }
    let mut values = x.to_vec();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        let scale = x.iter().map(|v| v.abs()).sum::<f64>() / n as f64;
        let amp = JITTER * scale.max(f64::MIN_POSITIVE);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for v in values.iter_mut() {
            *v += amp * rng.gen_range(-1.0..1.0);
        }
        sorted.copy_from_slice(&values);
        sorted.sort_by(f64::total_cmp);
    }

    let mut by_class: BTreeMap<u16, Vec<f64>> = BTreeMap::new();
    for (&v, &l) in values.iter().zip(labels) {
        by_class.entry(l).or_default().push(v);
    }
    for vs in by_class.values_mut() {
        vs.sort_by(f64::total_cmp);
    }

    let mut sum_psi_m = 0.0;
    for (&xi, l) in values.iter().zip(labels) {
        let cls = &by_class[l];
        let p = cls.partition_point(|&v| v < xi);
        // k-th nearest neighbour in the class, walking outward from xi
        let (mut lo, mut hi) = (p as isize - 1, p + 1);
        let mut d = 0.0;
        for _ in 0..k {
            let left = (lo >= 0).then(|| xi - cls[lo as usize]);
            let right = (hi < cls.len()).then(|| cls[hi] - xi);
            d = match (left, right) {
                (Some(a), Some(b)) if a <= b => {
                    lo -= 1;
                    a
                }
                (Some(a), None) => {
                    lo -= 1;
                    a
                }
                (_, Some(b)) => {
                    hi += 1;
                    b
                }
                (None, None) => unreachable!("class size checked above"),
            };
        }
        let start = sorted.partition_point(|&v| xi - v >= d && v < xi);
        let end = sorted.partition_point(|&v| v - xi < d);
        let m = (end - start).max(1);
        sum_psi_m += digamma(m as f64);
    }

    let psi_nc = labels
        .iter()
        .map(|l| digamma(counts[l] as f64))
        .sum::<f64>()
        / n as f64;
    let mi = digamma(n as f64) - psi_nc + digamma(k as f64) - sum_psi_m / n as f64;
    Ok(mi.max(0.0))
}

/// MI of every column of `rows` against `labels`. Column `j` jitters with an
/// independent ChaCha stream derived from `seed` and `j`.
pub fn mutual_information(
    rows: &[Vec<f64>],
    labels: &[u16],
    k: usize,
    seed: u64,
) -> Result<MiScores> {
    if rows.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            left: rows.len(),
            right: labels.len(),
        });
    }
    let counts = check_labels(labels, k)?;
    let width = rows[0].len();
    let mut scores = Vec::with_capacity(width);
    for j in 0..width {
        let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
        let col_seed = seed ^ (j as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        scores.push(mi_checked(&col, labels, &counts, k, col_seed)?);
    }
    Ok(MiScores { scores, k })
}
