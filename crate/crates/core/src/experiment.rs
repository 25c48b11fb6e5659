//! End-to-end runs over a loaded dataset: split, MI-based selection on the
//! training rows, normalization, training and evaluation.

use std::time::{Duration, Instant};

use crate::classifier::{EvalReport, Model};
use crate::data::{
    fit_stats, mutual_information, select_features, split, Dataset, Feature, LabelScheme, MiScores,
    MiTarget, NormStats, SelectionPolicy, Split, SplitMode, SplitSpec, DEFAULT_K,
};
use crate::encoder::{EncoderConfig, EncoderVariant, DEFAULT_ALPHA};
use crate::error::Result;
use crate::randomness::SourceKind;

/// Every knob of one train/evaluate run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scheme: LabelScheme,
    pub variant: EncoderVariant,
    pub source: SourceKind,
    pub dim: usize,
    pub seed: u64,
    pub alpha: f64,
    pub split: SplitSpec,
    pub epochs: usize,
    pub selection: SelectionPolicy,
    pub mi_k: usize,
    pub mi_target: MiTarget,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scheme: LabelScheme::Binary,
            variant: EncoderVariant::Projection,
            source: SourceKind::Sobol,
            dim: 1000,
            seed: 42,
            alpha: DEFAULT_ALPHA,
            split: SplitSpec::default(),
            epochs: 0,
            selection: SelectionPolicy::Positive,
            mi_k: DEFAULT_K,
            mi_target: MiTarget::Binary,
        }
    }
}

/// Split, selection and statistics shared by every cell of a sweep that
/// uses the same scheme and split.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub labels: Vec<u16>,
    pub split: Split,
    /// Scores over the training rows only.
    pub mi: MiScores,
    pub selected: Vec<usize>,
    pub stats: Vec<NormStats>,
}

impl Prepared {
    pub fn rows(&self, ds: &Dataset, idx: &[usize]) -> Vec<Vec<f64>> {
        idx.iter().map(|&i| ds.features[i].clone()).collect()
    }

    pub fn labels_of(&self, idx: &[usize]) -> Vec<u16> {
        idx.iter().map(|&i| self.labels[i]).collect()
    }
}

/// MI target values for a subset of rows.
fn mi_target_values(ds: &Dataset, target: MiTarget, idx: &[usize]) -> Result<Vec<u16>> {
    let all = ds.mi_target(target)?;
    Ok(idx.iter().map(|&i| all[i]).collect())
}

/// MI of every feature over the whole dataset (the report view).
pub fn dataset_mi(ds: &Dataset, target: MiTarget, k: usize, seed: u64) -> Result<MiScores> {
    mutual_information(&ds.features, &ds.mi_target(target)?, k, seed)
}

pub fn prepare(ds: &Dataset, cfg: &ExperimentConfig) -> Result<Prepared> {
    let labels = ds.labels(cfg.scheme)?;
    let split = split(&labels, &ds.subject_ids(), &cfg.split)?;
    let train_rows: Vec<Vec<f64>> = split
        .train
        .iter()
        .map(|&i| ds.features[i].clone())
        .collect();
    let target = mi_target_values(ds, cfg.mi_target, &split.train)?;
    let mut mi = mutual_information(&train_rows, &target, cfg.mi_k, cfg.seed)?;
    if cfg.split.mode == SplitMode::SubjectHoldout {
        mi = mi.without(Feature::Subject.index());
    }
    let selected = select_features(&mi, cfg.selection)?;
    let stats = fit_stats(&ds.features, &split.train, &selected)?;
    Ok(Prepared {
        labels,
        split,
        mi,
        selected,
        stats,
    })
}

pub fn encoder_config(cfg: &ExperimentConfig, prep: &Prepared) -> EncoderConfig {
    EncoderConfig {
        dim: cfg.dim,
        source: cfg.source,
        variant: cfg.variant,
        seed: cfg.seed,
        alpha: cfg.alpha,
        selected: prep.selected.clone(),
        stats: prep.stats.clone(),
    }
}

/// Result of training and testing one configuration.
#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub model: Model,
    pub report: EvalReport,
    pub train_time: Duration,
}

pub fn run_cell(ds: &Dataset, cfg: &ExperimentConfig, prep: &Prepared) -> Result<CellOutcome> {
    let train_rows = prep.rows(ds, &prep.split.train);
    let train_labels = prep.labels_of(&prep.split.train);
    let start = Instant::now();
    let model = Model::train(
        encoder_config(cfg, prep),
        cfg.scheme,
        &train_rows,
        &train_labels,
        cfg.epochs,
    )?;
    let train_time = start.elapsed();
    let report = model.evaluate(
        &prep.rows(ds, &prep.split.test),
        &prep.labels_of(&prep.split.test),
    )?;
    Ok(CellOutcome {
        model,
        report,
        train_time,
    })
}

/// The dimensionalities of the published sweep.
pub const TABLE_DIMS: [usize; 6] = [128, 256, 512, 1000, 2000, 10_000];

/// One configuration of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SweepCell {
    pub scheme: LabelScheme,
    pub source: SourceKind,
    pub dim: usize,
}

/// Cartesian product of the inputs with duplicates dropped. Returns the cells
/// (scheme-major, then source, then D, in first-seen order) and one warning
/// per dropped duplicate.
pub fn plan_sweep(
    schemes: &[LabelScheme],
    sources: &[SourceKind],
    dims: &[usize],
) -> (Vec<SweepCell>, Vec<String>) {
    fn dedup<T: Copy + PartialEq + std::fmt::Display>(
        items: &[T],
        what: &str,
        warnings: &mut Vec<String>,
    ) -> Vec<T> {
        let mut out = Vec::new();
        for item in items {
            if out.contains(item) {
                warnings.push(format!("duplicate {what} {item} ignored"));
            } else {
                out.push(*item);
            }
        }
        out
    }
    let mut warnings = Vec::new();
    let schemes: Vec<LabelScheme> = dedup(schemes, "scheme", &mut warnings);
    let sources: Vec<SourceKind> = dedup(sources, "source", &mut warnings);
    let dims: Vec<usize> = dedup(dims, "dimension", &mut warnings);
    let mut cells = Vec::new();
    for &scheme in &schemes {
        for &source in &sources {
            for &dim in &dims {
                cells.push(SweepCell {
                    scheme,
                    source,
                    dim,
                });
            }
        }
    }
    (cells, warnings)
}

/// Outcome of one sweep cell. A failing cell keeps its error message and
/// the sweep carries on.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub cell: SweepCell,
    pub result: std::result::Result<SweepMetrics, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepMetrics {
    pub accuracy: f64,
    pub macro_f1: f64,
    pub train_time: Duration,
    pub inference_time: Duration,
}

/// Runs every cell with `base` supplying the remaining settings. Cells run on
/// up to `jobs` threads; rows come back in plan order and do not depend on
/// the thread count.
pub fn run_sweep(
    ds: &Dataset,
    base: &ExperimentConfig,
    cells: &[SweepCell],
    jobs: usize,
) -> Result<Vec<SweepRow>> {
    use rayon::prelude::*;

    // one preparation per scheme, shared by that scheme's cells
    let mut prepared: Vec<(LabelScheme, std::result::Result<Prepared, String>)> = Vec::new();
    for cell in cells {
        if !prepared.iter().any(|(s, _)| *s == cell.scheme) {
            let cfg = ExperimentConfig {
                scheme: cell.scheme,
                ..base.clone()
            };
            prepared.push((cell.scheme, prepare(ds, &cfg).map_err(|e| e.to_string())));
        }
    }
    let run = |cell: &SweepCell| -> SweepRow {
        let cfg = ExperimentConfig {
            scheme: cell.scheme,
            source: cell.source,
            dim: cell.dim,
            ..base.clone()
        };
        let prep = &prepared
            .iter()
            .find(|(s, _)| *s == cell.scheme)
            .expect("prepared above")
            .1;
        let result = prep.as_ref().map_err(Clone::clone).and_then(|p| {
            run_cell(ds, &cfg, p)
                .map(|o| SweepMetrics {
                    accuracy: o.report.accuracy,
                    macro_f1: o.report.macro_f1,
                    train_time: o.train_time,
                    inference_time: o.report.inference_time,
                })
                .map_err(|e| e.to_string())
        });
        SweepRow {
            cell: *cell,
            result,
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| crate::Error::InvalidArgument(format!("thread pool: {e}")))?;
    Ok(pool.install(|| cells.par_iter().map(run).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Measurement, RawRecord};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Synthetic cohort in which low SpO2 drives the score.
    pub(crate) fn cohort(n: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let events = ["baseline", "night 1", "overnight 1", "night 2"];
        let records = (0..n)
            .map(|i| {
                let sick = rng.gen_bool(0.4);
                let spo2 = if sick {
                    rng.gen_range(75.0..86.0)
                } else {
                    rng.gen_range(84.0..99.0)
                };
                let mut m = [None; 7];
                for (j, slot) in m.iter_mut().enumerate() {
                    *slot = Some(rng.gen_range(10.0..100.0) + j as f64);
                }
                m[Measurement::SpO2.index()] = Some(spo2);
                RawRecord {
                    subject: format!("P{:02}", i % 12),
                    event: events[i % 4].into(),
                    time: format!("{}", i % 3 + 1),
                    measurements: m,
                    ams_score: Some(if sick {
                        rng.gen_range(2..8)
                    } else {
                        rng.gen_range(0..2)
                    }),
                }
            })
            .collect();
        Dataset::from_records(records).unwrap()
    }

    #[test]
    fn selection_and_stats_use_train_rows_only() {
        let ds = cohort(300, 1);
        let cfg = ExperimentConfig::default();
        let a = prepare(&ds, &cfg).unwrap();
        // scramble every test row: selection and statistics must not move
        let mut perturbed = ds.clone();
        for &i in &a.split.test {
            for v in perturbed.features[i].iter_mut().skip(3) {
                *v = *v * 3.0 + 1000.0;
            }
        }
        let b = prepare(&perturbed, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a
            .selected
            .contains(&Feature::Measured(Measurement::SpO2).index()));
    }

    #[test]
    fn subject_holdout_never_selects_subject() {
        let ds = cohort(300, 2);
        let cfg = ExperimentConfig {
            split: SplitSpec {
                mode: SplitMode::SubjectHoldout,
                ..SplitSpec::default()
            },
            ..ExperimentConfig::default()
        };
        let p = prepare(&ds, &cfg).unwrap();
        assert!(!p.selected.contains(&Feature::Subject.index()));
    }

    #[test]
    fn cell_runs_and_is_deterministic() {
        let ds = cohort(300, 3);
        let cfg = ExperimentConfig::default();
        let p = prepare(&ds, &cfg).unwrap();
        let a = run_cell(&ds, &cfg, &p).unwrap();
        let b = run_cell(&ds, &cfg, &p).unwrap();
        assert_eq!(a.model.to_bytes(), b.model.to_bytes());
        assert_eq!(a.report.predictions, b.report.predictions);
        assert!(a.report.accuracy > 0.8, "{}", a.report.accuracy);
    }

    #[test]
    fn plan_dedups_with_warnings() {
        let (cells, warnings) = plan_sweep(
            &[LabelScheme::Binary],
            &[SourceKind::Sobol, SourceKind::Sobol, SourceKind::Pseudo],
            &[128, 256, 128],
        );
        assert_eq!(cells.len(), 4);
        assert_eq!(warnings.len(), 2);
        let (full, none) = plan_sweep(&LabelScheme::ALL, &SourceKind::ALL, &TABLE_DIMS);
        assert_eq!(full.len(), 36);
        assert!(none.is_empty());
    }

    #[test]
    fn sweep_rows_independent_of_threads() {
        let ds = cohort(200, 4);
        let (cells, _) = plan_sweep(&[LabelScheme::Binary], &SourceKind::ALL, &[128, 300]);
        let base = ExperimentConfig::default();
        let one = run_sweep(&ds, &base, &cells, 1).unwrap();
        let four = run_sweep(&ds, &base, &cells, 4).unwrap();
        assert_eq!(one.len(), 6);
        for (a, b) in one.iter().zip(&four) {
            assert_eq!(a.cell, b.cell);
            let (a, b) = (a.result.as_ref().unwrap(), b.result.as_ref().unwrap());
            assert_eq!((a.accuracy, a.macro_f1), (b.accuracy, b.macro_f1));
        }
    }

    #[test]
    fn failing_cell_becomes_error_row() {
        let ds = cohort(200, 5);
        let cells = [SweepCell {
            scheme: LabelScheme::Binary,
            source: SourceKind::Sobol,
            dim: 0,
        }];
        let rows = run_sweep(&ds, &ExperimentConfig::default(), &cells, 1).unwrap();
        assert!(rows[0].result.is_err());
    }
}
