//! Pairwise-distance diagnostics for generated hypervectors.

use crate::error::{Error, Result};
use crate::hv::BinaryHV;

#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalityHistogram {
    /// Fraction of pairs per bin; bin `b` covers `[b / n, (b + 1) / n)`, the
    /// last bin is closed at 1.
    pub bins: Vec<f64>,
    pub pairs: usize,
    pub mean: f64,
    /// Population standard deviation over all pairs.
    pub std: f64,
}

impl OrthogonalityHistogram {
    pub fn bin_edges(&self, bin: usize) -> (f64, f64) {
        let n = self.bins.len() as f64;
        (bin as f64 / n, (bin + 1) as f64 / n)
    }
}

/// Normalized Hamming distance of every unordered pair, in `(i, j)` order.
pub fn pairwise_hamming(hvs: &[BinaryHV]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(hvs.len() * hvs.len().saturating_sub(1) / 2);
    for (i, a) in hvs.iter().enumerate() {
        for b in &hvs[i + 1..] {
            out.push(a.hamming(b)?);
        }
    }
    Ok(out)
}

pub fn orthogonality_histogram(hvs: &[BinaryHV], bins: usize) -> Result<OrthogonalityHistogram> {
    if hvs.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 vectors, got {}",
            hvs.len()
        )));
    }
    if bins == 0 {
        return Err(Error::InvalidArgument(
            "histogram needs at least one bin".into(),
        ));
    }
    let dists = pairwise_hamming(hvs)?;
    let n = dists.len() as f64;
    let mut counts = vec![0usize; bins];
    for &d in &dists {
        counts[((d * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let mean = dists.iter().sum::<f64>() / n;
    let var = dists.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n;
    Ok(OrthogonalityHistogram {
        bins: counts.iter().map(|&c| c as f64 / n).collect(),
        pairs: dists.len(),
        mean,
        std: var.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_and_complementary_pairs() {
        let v = BinaryHV::from_bit_str("1101001").unwrap();
        let h = orthogonality_histogram(&[v.clone(), v.clone()], 10).unwrap();
        assert_eq!(h.bins[0], 1.0);
        assert_eq!((h.mean, h.std, h.pairs), (0.0, 0.0, 1));

        let h = orthogonality_histogram(&[v.clone(), v.complement()], 10).unwrap();
        assert_eq!(h.bins[9], 1.0);
        assert_eq!(h.mean, 1.0);
    }

    #[test]
    fn too_few_vectors() {
        let v = BinaryHV::zeros(4).unwrap();
        assert!(orthogonality_histogram(std::slice::from_ref(&v), 10).is_err());
        assert!(orthogonality_histogram(&[v.clone(), v], 0).is_err());
    }

    #[test]
    fn bins_sum_to_one() {
        let hvs: Vec<BinaryHV> = (0..6u32)
            .map(|k| BinaryHV::from_fn(16, |i| (i as u32 * 7 + k * 3) % 5 < 2).unwrap())
            .collect();
        let h = orthogonality_histogram(&hvs, 8).unwrap();
        assert_eq!(h.pairs, 15);
        assert!((h.bins.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(h.bin_edges(2), (0.25, 0.375));
    }
}
