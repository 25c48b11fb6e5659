//! Associative-memory classifier: one class vector per label, queried by
//! similarity.

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{LabelScheme, NormStats};
use crate::encoder::{
    accumulate_class, optional_retrain, EncodedSample, Encoder, EncoderConfig, EncoderVariant,
};
use crate::error::{Error, Result};
use crate::hv::{AnyHv, BinaryHV, BipolarHV};
use crate::randomness::SourceKind;

pub const MAGIC: &[u8; 5] = b"AMSHD";
pub const FORMAT_VERSION: u16 = 1;

/// Index of the best class and the raw scores: cosine (higher is better) for
/// bipolar vectors, normalized hamming (lower is better) for binary ones.
/// Ties go to the lowest index.
pub fn rank(query: &AnyHv, classes: &[AnyHv]) -> Result<(usize, Vec<f64>)> {
    if classes.is_empty() {
        return Err(Error::InvalidArgument(
            "no class vectors to compare against".into(),
        ));
    }
    let mut scores = Vec::with_capacity(classes.len());
    for c in classes {
        scores.push(match (query, c) {
            (AnyHv::Bipolar(q), AnyHv::Bipolar(s)) => q.cosine(s)?,
            (AnyHv::Binary(q), AnyHv::Binary(s)) => q.hamming(s)?,
            _ => {
                return Err(Error::KindMismatch {
                    left: query.kind(),
                    right: c.kind(),
                })
            }
        });
    }
    let higher_is_better = matches!(query, AnyHv::Bipolar(_));
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        let better = if higher_is_better {
            s > scores[best]
        } else {
            s < scores[best]
        };
        if better {
            best = i;
        }
    }
    Ok((best, scores))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: u16,
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub accuracy: f64,
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub f1: Vec<f64>,
    pub macro_f1: f64,
    /// `confusion[truth][predicted]`, indexed by class position.
    pub confusion: Vec<Vec<u64>>,
    pub truth: Vec<u16>,
    pub predictions: Vec<u16>,
    pub inference_time: Duration,
}

impl EvalReport {
    pub fn from_predictions(
        num_classes: usize,
        truth: &[u16],
        predictions: &[u16],
        inference_time: Duration,
    ) -> Result<Self> {
        if truth.is_empty() {
            return Err(Error::InvalidArgument(
                "cannot evaluate an empty test split".into(),
            ));
        }
        if truth.len() != predictions.len() {
            return Err(Error::DimensionMismatch {
                left: truth.len(),
                right: predictions.len(),
            });
        }
        let mut confusion = vec![vec![0u64; num_classes]; num_classes];
        for (&t, &p) in truth.iter().zip(predictions) {
            let (t, p) = (t as usize, p as usize);
            if t >= num_classes || p >= num_classes {
                return Err(Error::InvalidArgument(format!(
                    "label {} outside {num_classes} classes",
                    t.max(p)
                )));
            }
            confusion[t][p] += 1;
        }
        let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let mut precision = Vec::with_capacity(num_classes);
        let mut recall = Vec::with_capacity(num_classes);
        let mut f1 = Vec::with_capacity(num_classes);
        for c in 0..num_classes {
            let tp = confusion[c][c];
            let predicted: u64 = (0..num_classes).map(|r| confusion[r][c]).sum();
            let actual: u64 = confusion[c].iter().sum();
            let p = ratio(tp, predicted);
            let r = ratio(tp, actual);
            precision.push(p);
            recall.push(r);
            f1.push(if p + r > 0.0 {
                2.0 * p * r / (p + r)
            } else {
                0.0
            });
        }
        let trace: u64 = (0..num_classes).map(|c| confusion[c][c]).sum();
        Ok(Self {
            accuracy: trace as f64 / truth.len() as f64,
            macro_f1: f1.iter().sum::<f64>() / num_classes as f64,
            precision,
            recall,
            f1,
            confusion,
            truth: truth.to_vec(),
            predictions: predictions.to_vec(),
            inference_time,
        })
    }
}

/// Trained model. Class vectors are ordered by label.
#[derive(Debug, Clone)]
pub struct Model {
    scheme: LabelScheme,
    classes: Vec<(u16, AnyHv)>,
    encoder: Encoder,
}

impl Model {
    /// One accumulation pass over `rows` (full feature rows), then `epochs`
    /// rounds of retraining. Every class of `scheme` must appear in `labels`.
    pub fn train(
        config: EncoderConfig,
        scheme: LabelScheme,
        rows: &[Vec<f64>],
        labels: &[u16],
        epochs: usize,
    ) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                left: rows.len(),
                right: labels.len(),
            });
        }
        let encoder = Encoder::new(config)?;
        let n_classes = scheme.num_classes();
        if let Some(&bad) = labels.iter().find(|&&l| l as usize >= n_classes) {
            return Err(Error::InvalidArgument(format!(
                "label {bad} outside the {scheme} scheme"
            )));
        }
        let samples = rows
            .iter()
            .map(|r| encoder.encode(r))
            .collect::<Result<Vec<EncodedSample>>>()?;
        let mut accumulators = Vec::with_capacity(n_classes);
        for c in 0..n_classes {
            let members: Vec<&EncodedSample> = samples
                .iter()
                .zip(labels)
                .filter(|(_, &l)| l as usize == c)
                .map(|(s, _)| s)
                .collect();
            if members.is_empty() {
                return Err(Error::MissingClass(scheme.class_names()[c].to_string()));
            }
            accumulators.push(accumulate_class(&members)?);
        }
        let class_of: Vec<usize> = labels.iter().map(|&l| l as usize).collect();
        let hvs = optional_retrain(&encoder, &mut accumulators, &samples, &class_of, epochs)?;
        let classes = hvs
            .into_iter()
            .enumerate()
            .map(|(c, hv)| (c as u16, hv))
            .collect();
        Ok(Self {
            scheme,
            classes,
            encoder,
        })
    }

    /// Assembles a model from stored parts, checking they fit together.
    pub fn from_parts(
        config: EncoderConfig,
        scheme: LabelScheme,
        classes: Vec<(u16, AnyHv)>,
    ) -> Result<Self> {
        if classes.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a model needs at least 2 classes, got {}",
                classes.len()
            )));
        }
        let want = match config.variant {
            EncoderVariant::Projection => "bipolar",
            EncoderVariant::Symbolic => "binary",
        };
        for (_, hv) in &classes {
            if hv.dim() != config.dim {
                return Err(Error::DimensionMismatch {
                    left: config.dim,
                    right: hv.dim(),
                });
            }
            if hv.kind() != want {
                return Err(Error::KindMismatch {
                    left: want,
                    right: hv.kind(),
                });
            }
        }
        Ok(Self {
            scheme,
            classes,
            encoder: Encoder::new(config)?,
        })
    }

    pub fn config(&self) -> &EncoderConfig {
        self.encoder.config()
    }

    pub fn encoder(&self) -> &Encoder {
        &self.encoder
    }

    pub fn scheme(&self) -> LabelScheme {
        self.scheme
    }

    pub fn classes(&self) -> &[(u16, AnyHv)] {
        &self.classes
    }

    fn class_hvs(&self) -> Vec<AnyHv> {
        self.classes.iter().map(|(_, hv)| hv.clone()).collect()
    }

    /// The query vector for a full feature row.
    pub fn query(&self, row: &[f64]) -> Result<AnyHv> {
        self.encoder.query_hv(&self.encoder.encode(row)?)
    }

    pub fn predict_hv(&self, query: &AnyHv) -> Result<Prediction> {
        let (best, scores) = rank(query, &self.class_hvs())?;
        Ok(Prediction {
            label: self.classes[best].0,
            scores,
        })
    }

    pub fn predict(&self, row: &[f64]) -> Result<Prediction> {
        self.predict_hv(&self.query(row)?)
    }

    pub fn evaluate(&self, rows: &[Vec<f64>], labels: &[u16]) -> Result<EvalReport> {
        self.evaluate_with(rows, labels, Ok)
    }

    /// Evaluation with every query bit flipped independently with probability
    /// `flip_rate`. Class vectors are left untouched.
    pub fn noise_robustness(
        &self,
        rows: &[Vec<f64>],
        labels: &[u16],
        flip_rate: f64,
        seed: u64,
    ) -> Result<EvalReport> {
        if !(0.0..=0.5).contains(&flip_rate) {
            return Err(Error::InvalidArgument(format!(
                "flip rate {flip_rate} must lie in [0, 0.5]"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.evaluate_with(rows, labels, |q| {
            let mask = BinaryHV::from_fn(q.dim(), |_| rng.gen::<f64>() < flip_rate)?;
            let flipped = q.bits().bind(&mask)?;
            Ok(match q {
                AnyHv::Binary(_) => AnyHv::Binary(flipped),
                AnyHv::Bipolar(_) => AnyHv::Bipolar(flipped.to_bipolar()),
            })
        })
    }

    fn evaluate_with(
        &self,
        rows: &[Vec<f64>],
        labels: &[u16],
        mut perturb: impl FnMut(AnyHv) -> Result<AnyHv>,
    ) -> Result<EvalReport> {
        if rows.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                left: rows.len(),
                right: labels.len(),
            });
        }
        let classes = self.class_hvs();
        let start = Instant::now();
        let mut predictions = Vec::with_capacity(rows.len());
        for row in rows {
            let q = perturb(self.query(row)?)?;
            let (best, _) = rank(&q, &classes)?;
            predictions.push(self.classes[best].0);
        }
        let elapsed = start.elapsed();
        EvalReport::from_predictions(self.scheme.num_classes(), labels, &predictions, elapsed)
    }

    /// Little-endian model file; see the README for the layout.
    pub fn to_bytes(&self) -> Vec<u8> {
        let c = self.config();
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.push(c.variant.code());
        out.push(c.source.code());
        out.extend_from_slice(&(c.dim as u32).to_le_bytes());
        out.extend_from_slice(&c.alpha.to_le_bytes());
        out.extend_from_slice(&c.seed.to_le_bytes());
        out.extend_from_slice(&(c.selected.len() as u16).to_le_bytes());
        for &f in &c.selected {
            out.extend_from_slice(&(f as u16).to_le_bytes());
        }
        for s in &c.stats {
            for v in [s.mean, s.std, s.min, s.max] {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out.push(self.scheme.code());
        out.extend_from_slice(&(self.classes.len() as u16).to_le_bytes());
        for (label, hv) in &self.classes {
            out.extend_from_slice(&label.to_le_bytes());
            match hv {
                AnyHv::Binary(b) => out.extend_from_slice(&b.to_bytes()),
                AnyHv::Bipolar(b) => out.extend(b.iter().map(|s| u8::from(s > 0))),
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        let magic_at = r.pos;
        if r.take(MAGIC.len())? != MAGIC {
            return Err(Error::Format {
                offset: magic_at,
                reason: "bad magic".into(),
            });
        }
        let at = r.pos;
        let version = r.u16()?;
        if version != FORMAT_VERSION {
            return Err(Error::Format {
                offset: at,
                reason: format!("unsupported format version {version}"),
            });
        }
        let at = r.pos;
        let variant = EncoderVariant::from_code(r.u8()?)
            .ok_or_else(|| r.bad(at, "unknown encoder variant"))?;
        let at = r.pos;
        let source =
            SourceKind::from_code(r.u8()?).ok_or_else(|| r.bad(at, "unknown source kind"))?;
        let at = r.pos;
        let dim = r.u32()? as usize;
        if dim == 0 {
            return Err(r.bad(at, "zero dimension"));
        }
        let alpha = r.f64()?;
        let seed = r.u64()?;
        let n_features = r.u16()? as usize;
        let selected = (0..n_features)
            .map(|_| r.u16().map(usize::from))
            .collect::<Result<Vec<_>>>()?;
        let stats = (0..n_features)
            .map(|_| {
                Ok(NormStats {
                    mean: r.f64()?,
                    std: r.f64()?,
                    min: r.f64()?,
                    max: r.f64()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let at = r.pos;
        let scheme =
            LabelScheme::from_code(r.u8()?).ok_or_else(|| r.bad(at, "unknown label scheme"))?;
        let n_classes = r.u16()? as usize;
        let mut classes = Vec::with_capacity(n_classes);
        for _ in 0..n_classes {
            let label = r.u16()?;
            let at = r.pos;
            let hv = match variant {
                EncoderVariant::Symbolic => {
                    let raw = r.take(dim.div_ceil(8))?;
                    AnyHv::Binary(
                        BinaryHV::from_bytes(dim, raw).map_err(|e| r.bad(at, &e.to_string()))?,
                    )
                }
                EncoderVariant::Projection => {
                    let raw = r.take(dim)?;
                    if let Some(i) = raw.iter().position(|&b| b > 1) {
                        return Err(r.bad(at + i, "bipolar byte must be 0x00 or 0x01"));
                    }
                    AnyHv::Bipolar(BipolarHV::from_fn(dim, |d| raw[d] == 1)?)
                }
            };
            classes.push((label, hv));
        }
        if r.pos != bytes.len() {
            return Err(r.bad(r.pos, "trailing bytes"));
        }
        let config = EncoderConfig {
            dim,
            source,
            variant,
            seed,
            alpha,
            selected,
            stats,
        };
        Self::from_parts(config, scheme, classes)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_bytes(&fs::read(path).map_err(|e| Error::io(path, e))?)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn bad(&self, offset: usize, reason: &str) -> Error {
        Error::Format {
            offset,
            reason: reason.to_string(),
        }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let s = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(self.bad(self.pos, &format!("truncated: need {n} more bytes"))),
        }
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.array()?))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.array()?))
    }
}
