//! Train/test partitioning.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitMode {
    /// Per-class random split keeping class proportions.
    #[default]
    StratifiedRandom,
    /// Whole subjects go to either train or test.
    SubjectHoldout,
}

impl fmt::Display for SplitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitMode::StratifiedRandom => "stratified",
            SplitMode::SubjectHoldout => "subject",
        })
    }
}

impl FromStr for SplitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "stratified" | "stratified-random" | "random" => Ok(SplitMode::StratifiedRandom),
            "subject" | "subject-holdout" | "holdout" => Ok(SplitMode::SubjectHoldout),
            other => Err(Error::InvalidArgument(format!(
                "unknown split mode {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub mode: SplitMode,
    /// Share of samples (or subjects) assigned to train.
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            mode: SplitMode::StratifiedRandom,
            train_fraction: 0.8,
            seed: 42,
        }
    }
}

/// Row indices of each side, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Partitions rows given their labels and subject ids. Every class present in
/// `labels` must reach train, and test must be non-empty.
pub fn split(labels: &[u16], subjects: &[u32], spec: &SplitSpec) -> Result<Split> {
    if labels.len() != subjects.len() {
        return Err(Error::DimensionMismatch {
            left: labels.len(),
            right: subjects.len(),
        });
    }
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "train fraction {} must lie strictly between 0 and 1",
            spec.train_fraction
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut train = Vec::new();
    match spec.mode {
        SplitMode::StratifiedRandom => {
            let mut by_class: BTreeMap<u16, Vec<usize>> = BTreeMap::new();
            for (i, &l) in labels.iter().enumerate() {
                by_class.entry(l).or_default().push(i);
            }
            for rows in by_class.values_mut() {
                rows.shuffle(&mut rng);
                let n = (spec.train_fraction * rows.len() as f64).round() as usize;
                train.extend_from_slice(&rows[..n]);
            }
        }
        SplitMode::SubjectHoldout => {
            let ids: BTreeSet<u32> = subjects.iter().copied().collect();
            if ids.len() < 2 {
                return Err(Error::InvalidArgument(format!(
                    "subject holdout needs at least 2 subjects, found {}",
                    ids.len()
                )));
            }
            let mut ids: Vec<u32> = ids.into_iter().collect();
            ids.shuffle(&mut rng);
            let n =
                ((spec.train_fraction * ids.len() as f64).round() as usize).clamp(1, ids.len() - 1);
            let keep: BTreeSet<u32> = ids[..n].iter().copied().collect();
            train.extend((0..labels.len()).filter(|&i| keep.contains(&subjects[i])));
        }
    }
    train.sort_unstable();
    let in_train: BTreeSet<usize> = train.iter().copied().collect();
    let test: Vec<usize> = (0..labels.len())
        .filter(|i| !in_train.contains(i))
        .collect();

    let train_classes: BTreeSet<u16> = train.iter().map(|&i| labels[i]).collect();
    if let Some(&missing) = labels.iter().find(|l| !train_classes.contains(l)) {
        return Err(Error::InvalidArgument(format!(
            "split leaves class {missing} without training samples"
        )));
    }
    if test.is_empty() {
        return Err(Error::InvalidArgument(
            "split leaves the test set empty".into(),
        ));
    }
    Ok(Split { train, test })
}
