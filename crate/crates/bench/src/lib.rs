//! Shared fixtures for the criterion benches.

use hdc_core::data::{Feature, LabelScheme};
use hdc_core::{
    generate_position_hvs, BinaryHV, EncoderConfig, EncoderVariant, NormStats, SourceKind,
};

/// `count` Sobol-derived vectors of width `dim`.
pub fn random_hvs(dim: usize, count: usize) -> Vec<BinaryHV> {
    generate_position_hvs(SourceKind::Sobol, dim, count, 1).expect("fixture vectors")
}

/// Deterministic feature rows shaped like the cohort data (10 columns) with
/// a binary label that depends on the SpO2 column.
pub fn rows(n: usize) -> (Vec<Vec<f64>>, Vec<u16>) {
    let spo2 = Feature::Measured(hdc_core::data::Measurement::SpO2).index();
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64;
        let mut row: Vec<f64> = (0..hdc_core::data::FEATURE_COUNT)
            .map(|j| ((t * 0.618 + j as f64 * 0.37).fract() * 10.0).round())
            .collect();
        row[spo2] = 80.0 + (t * 0.377).fract() * 20.0;
        labels.push(LabelScheme::Binary.label(if row[spo2] < 88.0 { 4 } else { 0 }));
        rows.push(row);
    }
    (rows, labels)
}

pub fn encoder_config(
    rows: &[Vec<f64>],
    variant: EncoderVariant,
    source: SourceKind,
    dim: usize,
) -> EncoderConfig {
    let selected: Vec<usize> = (3..hdc_core::data::FEATURE_COUNT).collect();
    let stats = selected
        .iter()
        .map(|&j| NormStats::fit(&rows.iter().map(|r| r[j]).collect::<Vec<_>>()).expect("stats"))
        .collect();
    EncoderConfig {
        dim,
        source,
        variant,
        seed: 7,
        alpha: hdc_core::encoder::DEFAULT_ALPHA,
        selected,
        stats,
    }
}
