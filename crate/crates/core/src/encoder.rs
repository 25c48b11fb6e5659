//! Feature rows to hypervectors, and class accumulators to class vectors.
//!
//! Two variants share one configuration:
//!
//! * `Projection`: z-scored features are multiplied by a D×m bipolar matrix
//!   `B` and summed over the feature axis, giving a real D-vector.
//! * `Symbolic`: min-max scaled features are thermometer coded, bound (XOR)
//!   to one position vector per feature and bundled by majority.
//!
//! Class accumulators are binarized by z-scoring across the D entries and
//! taking `sign(z_d - alpha * (2 u_d - 1))`, with `u` drawn from the
//! configured source. Projection queries go through the same rule, so
//! training and query vectors live in the same bipolar space.

use std::fmt;
use std::str::FromStr;

use crate::data::NormStats;
use crate::error::{Error, Result};
use crate::hv::{bundle, AnyHv, BinaryHV, BipolarHV, ScalarAccumulator};
use crate::randomness::{generate_position_hvs, source_stream, SourceKind, StreamRole};

pub const DEFAULT_ALPHA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EncoderVariant {
    /// Bipolar random projection.
    #[default]
    Projection,
    /// Binary thermometer codes bound to position vectors.
    Symbolic,
}

impl EncoderVariant {
    pub const ALL: [EncoderVariant; 2] = [EncoderVariant::Projection, EncoderVariant::Symbolic];

    pub fn as_str(self) -> &'static str {
        match self {
            EncoderVariant::Projection => "projection",
            EncoderVariant::Symbolic => "symbolic",
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }
}

impl fmt::Display for EncoderVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EncoderVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "projection" | "bipolar" => Ok(EncoderVariant::Projection),
            "symbolic" | "binary" | "thermometer" => Ok(EncoderVariant::Symbolic),
            other => Err(Error::InvalidArgument(format!(
                "unknown encoder variant {other:?}"
            ))),
        }
    }
}

/// Everything needed to regenerate the encoder bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderConfig {
    pub dim: usize,
    pub source: SourceKind,
    pub variant: EncoderVariant,
    pub seed: u64,
    /// Dither amplitude used at binarization.
    pub alpha: f64,
    /// Indices into the full feature row, ascending.
    pub selected: Vec<usize>,
    /// Train-split statistics, one per selected feature.
    pub stats: Vec<NormStats>,
}

impl EncoderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if self.dim > u32::MAX as usize {
            return Err(Error::InvalidArgument(format!(
                "dimension {} exceeds u32",
                self.dim
            )));
        }
        if self.selected.is_empty() {
            return Err(Error::EmptySelection);
        }
        if self.selected.len() != self.stats.len() {
            return Err(Error::DimensionMismatch {
                left: self.selected.len(),
                right: self.stats.len(),
            });
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "alpha {} must be finite and >= 0",
                self.alpha
            )));
        }
        Ok(())
    }

    pub fn features(&self) -> usize {
        self.selected.len()
    }
}

/// One encoded row.
#[derive(Debug, Clone, PartialEq)]
pub enum EncodedSample {
    Scalar(ScalarAccumulator),
    Binary(BinaryHV),
}

impl EncodedSample {
    pub fn dim(&self) -> usize {
        match self {
            EncodedSample::Scalar(a) => a.dim(),
            EncodedSample::Binary(b) => b.dim(),
        }
    }

    /// Values as summed into a class accumulator: the real vector itself, or
    /// the ±1 lift of a binary vector.
    pub fn lifted(&self) -> Vec<f64> {
        match self {
            EncodedSample::Scalar(a) => a.values().to_vec(),
            EncodedSample::Binary(b) => b.iter().map(|bit| if bit { 1.0 } else { -1.0 }).collect(),
        }
    }
}

/// Unary code of `f` in [0, 1]: bit `d` is set iff `f > d / D`.
pub fn thermometer_encode(f: f64, dim: usize) -> Result<BinaryHV> {
    let f = if f.is_nan() { 0.0 } else { f.clamp(0.0, 1.0) };
    let d = dim as f64;
    BinaryHV::from_fn(dim, |i| f > i as f64 / d)
}

/// D×m bipolar matrix stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionMatrix {
    dim: usize,
    columns: Vec<Vec<i8>>,
}

impl ProjectionMatrix {
    pub fn from_columns(columns: Vec<Vec<i8>>) -> Result<Self> {
        let dim = columns.first().map(Vec::len).ok_or(Error::EmptySelection)?;
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        for (j, c) in columns.iter().enumerate() {
            if c.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: c.len(),
                });
            }
            if let Some(index) = c.iter().position(|&v| v != 1 && v != -1) {
                return Err(Error::InvalidBipolar {
                    index: j * dim + index,
                    value: c[index] as i64,
                });
            }
        }
        Ok(Self { dim, columns })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn features(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[i8] {
        &self.columns[j]
    }

    pub fn entry(&self, d: usize, j: usize) -> i8 {
        self.columns[j][d]
    }
}

/// `B[d][j] = +1` iff value `d` of the column-`j` source stream is ≥ 0.5.
pub fn projection_matrix(config: &EncoderConfig) -> Result<ProjectionMatrix> {
    config.validate()?;
    let columns = (0..config.features())
        .map(|j| {
            let s = source_stream(
                config.source,
                config.seed,
                StreamRole::Column(j),
                config.dim,
            )?;
            Ok(s.iter().map(|&u| if u >= 0.5 { 1 } else { -1 }).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    ProjectionMatrix::from_columns(columns)
}

/// `h_d = Σ_j B[d][j] · row_j`.
pub fn encode_projection(row: &[f64], b: &ProjectionMatrix) -> Result<ScalarAccumulator> {
    if row.len() != b.features() {
        return Err(Error::DimensionMismatch {
            left: row.len(),
            right: b.features(),
        });
    }
    let mut h = vec![0.0; b.dim()];
    for (col, &x) in b.columns.iter().zip(row) {
        for (hd, &s) in h.iter_mut().zip(col) {
            if s > 0 {
                *hd += x;
            } else {
                *hd -= x;
            }
        }
    }
    let mut acc = ScalarAccumulator::new(b.dim())?;
    acc.accumulate_values(&h)?;
    Ok(acc)
}

/// Majority bundle of `thermometer(row_j) XOR positions_j`.
pub fn encode_symbolic(row: &[f64], positions: &[BinaryHV]) -> Result<BinaryHV> {
    if row.len() != positions.len() {
        return Err(Error::DimensionMismatch {
            left: row.len(),
            right: positions.len(),
        });
    }
    let bound = row
        .iter()
        .zip(positions)
        .map(|(&f, p)| thermometer_encode(f, p.dim())?.bind(p))
        .collect::<Result<Vec<_>>>()?;
    bundle(&bound)
}

/// Element-wise sum of encoded samples (binary samples lifted to ±1).
pub fn accumulate_class(samples: &[&EncodedSample]) -> Result<ScalarAccumulator> {
    let first = samples.first().ok_or(Error::EmptyBundle)?;
    let mut acc = ScalarAccumulator::new(first.dim())?;
    for s in samples {
        match s {
            EncodedSample::Scalar(a) => acc.merge(a)?,
            EncodedSample::Binary(b) => acc.accumulate(&b.to_bipolar())?,
        }
    }
    Ok(acc)
}

/// z-score `values` across their entries, subtract the dither
/// `alpha * (2 u_d - 1)` and take the sign (zero maps to +1).
pub fn binarize_values(values: &[f64], dither: &[f64], alpha: f64) -> Result<BipolarHV> {
    if values.len() != dither.len() {
        return Err(Error::DimensionMismatch {
            left: values.len(),
            right: dither.len(),
        });
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    BipolarHV::from_fn(values.len(), |d| {
        let z = if std > 0.0 {
            (values[d] - mean) / std
        } else {
            0.0
        };
        z - alpha * (2.0 * dither[d] - 1.0) >= 0.0
    })
}

/// Class vector from an accumulator: bipolar for Projection, binary for
/// Symbolic.
pub fn binarize_class(k: &ScalarAccumulator, config: &EncoderConfig) -> Result<AnyHv> {
    let dither = source_stream(config.source, config.seed, StreamRole::Dither, config.dim)?;
    let s = binarize_values(k.values(), &dither, config.alpha)?;
    Ok(match config.variant {
        EncoderVariant::Projection => AnyHv::Bipolar(s),
        EncoderVariant::Symbolic => AnyHv::Binary(s.to_binary()),
    })
}

/// Config plus everything generated from it.
#[derive(Debug, Clone)]
pub struct Encoder {
    config: EncoderConfig,
    matrix: Option<ProjectionMatrix>,
    positions: Vec<BinaryHV>,
    dither: Vec<f64>,
}

impl Encoder {
    pub fn new(config: EncoderConfig) -> Result<Self> {
        config.validate()?;
        let (matrix, positions) = match config.variant {
            EncoderVariant::Projection => (Some(projection_matrix(&config)?), Vec::new()),
            EncoderVariant::Symbolic => (
                None,
                generate_position_hvs(config.source, config.dim, config.features(), config.seed)?,
            ),
        };
        let dither = source_stream(config.source, config.seed, StreamRole::Dither, config.dim)?;
        Ok(Self {
            config,
            matrix,
            positions,
            dither,
        })
    }

    pub fn config(&self) -> &EncoderConfig {
        &self.config
    }

    pub fn matrix(&self) -> Option<&ProjectionMatrix> {
        self.matrix.as_ref()
    }

    pub fn positions(&self) -> &[BinaryHV] {
        &self.positions
    }

    /// Selected features of a full row, scaled with the stored statistics:
    /// z-score for Projection, clamped min-max for Symbolic.
    pub fn normalize(&self, row: &[f64]) -> Result<Vec<f64>> {
        self.config
            .selected
            .iter()
            .zip(&self.config.stats)
            .map(|(&f, st)| {
                let v = *row.get(f).ok_or(Error::DimensionMismatch {
                    left: row.len(),
                    right: f + 1,
                })?;
                Ok(match self.config.variant {
                    EncoderVariant::Projection => st.zscore(v),
                    EncoderVariant::Symbolic => st.minmax(v),
                })
            })
            .collect()
    }

    pub fn encode(&self, row: &[f64]) -> Result<EncodedSample> {
        let x = self.normalize(row)?;
        match &self.matrix {
            Some(b) => Ok(EncodedSample::Scalar(encode_projection(&x, b)?)),
            None => Ok(EncodedSample::Binary(encode_symbolic(&x, &self.positions)?)),
        }
    }

    pub fn binarize(&self, k: &ScalarAccumulator) -> Result<AnyHv> {
        let s = binarize_values(k.values(), &self.dither, self.config.alpha)?;
        Ok(match self.config.variant {
            EncoderVariant::Projection => AnyHv::Bipolar(s),
            EncoderVariant::Symbolic => AnyHv::Binary(s.to_binary()),
        })
    }

    /// The vector compared against class vectors.
    pub fn query_hv(&self, sample: &EncodedSample) -> Result<AnyHv> {
        match sample {
            EncodedSample::Scalar(h) => self.binarize(h),
            EncodedSample::Binary(b) => Ok(AnyHv::Binary(b.clone())),
        }
    }
}

/// Perceptron-style refinement. Per epoch each misclassified sample is added
/// to its true class accumulator and subtracted from the predicted one; all
/// class vectors are re-binarized after the epoch. The class vectors with the
/// best training accuracy seen so far are returned (earliest on ties), so
/// extra epochs never lower training accuracy.
pub fn optional_retrain(
    encoder: &Encoder,
    accumulators: &mut [ScalarAccumulator],
    samples: &[EncodedSample],
    class_of: &[usize],
    epochs: usize,
) -> Result<Vec<AnyHv>> {
    if samples.len() != class_of.len() {
        return Err(Error::DimensionMismatch {
            left: samples.len(),
            right: class_of.len(),
        });
    }
    let binarize_all = |accs: &[ScalarAccumulator]| {
        accs.iter()
            .map(|k| encoder.binarize(k))
            .collect::<Result<Vec<_>>>()
    };
    let mut classes = binarize_all(accumulators)?;
    if epochs == 0 {
        return Ok(classes);
    }
    let queries = samples
        .iter()
        .map(|s| encoder.query_hv(s))
        .collect::<Result<Vec<_>>>()?;
    let predict_all = |classes: &[AnyHv]| -> Result<Vec<usize>> {
        queries
            .iter()
            .map(|q| Ok(crate::classifier::rank(q, classes)?.0))
            .collect()
    };
    let mut preds = predict_all(&classes)?;
    let correct = |preds: &[usize]| preds.iter().zip(class_of).filter(|(p, t)| p == t).count();
    let mut best = (correct(&preds), classes.clone());
    for _ in 0..epochs {
        if best.0 == samples.len() {
            break;
        }
        for ((sample, &pred), &truth) in samples.iter().zip(&preds).zip(class_of) {
            if pred != truth {
                let v = sample.lifted();
                accumulators[truth].add_scaled(&v, 1.0)?;
                accumulators[pred].add_scaled(&v, -1.0)?;
            }
        }
        classes = binarize_all(accumulators)?;
        preds = predict_all(&classes)?;
        let score = correct(&preds);
        if score > best.0 {
            best = (score, classes.clone());
        }
    }
    Ok(best.1)
}
