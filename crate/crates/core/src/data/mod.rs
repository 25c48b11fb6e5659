//! Dataset ingestion and preprocessing: CSV loading, imputation, categorical
//! codes, labels, MI-based feature selection, splits and normalization.

pub mod categorical;
pub mod impute;
pub mod labels;
pub mod mi;
pub mod normalize;
pub mod record;
pub mod select;
pub mod split;

use std::path::Path;

pub use categorical::{event_ordinal, time_ordinal, CategoryEncoder};
pub use impute::{impute_missing_mean, Imputation};
pub use labels::{derive_labels, LabelScheme};
pub use mi::{mutual_information, mutual_information_column, MiScores, DEFAULT_K};
pub use normalize::{fit_stats, NormStats};
pub use record::{
    load_csv, read_csv, Feature, Measurement, RawRecord, FEATURE_COUNT, SCORE_COLUMN,
};
pub use select::{select_features, SelectionPolicy};
pub use split::{split, Split, SplitMode, SplitSpec};

use crate::error::Result;

/// What MI scores are measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MiTarget {
    /// The binary AMS label.
    #[default]
    Binary,
    /// The raw 0-12 score treated as a discrete variable.
    RawScore,
}

/// Imputed records plus their numeric feature matrix (one row per record,
/// columns in [`Feature::ALL`] order).
#[derive(Debug, Clone)]
pub struct Dataset {
    pub records: Vec<RawRecord>,
    pub features: Vec<Vec<f64>>,
    pub imputations: Vec<Imputation>,
    pub categories: CategoryEncoder,
}

impl Dataset {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_records(load_csv(path)?)
    }

    pub fn from_records(mut records: Vec<RawRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(crate::Error::InvalidArgument("dataset has no rows".into()));
        }
        let imputations = impute_missing_mean(&mut records)?;
        let categories = CategoryEncoder::fit(&records);
        let features = records
            .iter()
            .map(|r| {
                let codes = categories.encode(r)?;
                let mut row: Vec<f64> = codes.iter().map(|&c| c as f64).collect();
                row.extend(r.measurements.iter().map(|m| m.expect("imputed")));
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            records,
            features,
            imputations,
            categories,
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn labels(&self, scheme: LabelScheme) -> Result<Vec<u16>> {
        derive_labels(&self.records, scheme)
    }

    pub fn mi_target(&self, target: MiTarget) -> Result<Vec<u16>> {
        match target {
            MiTarget::Binary => self.labels(LabelScheme::Binary),
            MiTarget::RawScore => self
                .records
                .iter()
                .enumerate()
                .map(|(row, r)| {
                    r.ams_score
                        .map(u16::from)
                        .ok_or(crate::Error::MissingScore { row })
                })
                .collect(),
        }
    }

    pub fn subject_ids(&self) -> Vec<u32> {
        self.features.iter().map(|r| r[0] as u32).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_layout() {
        let text = "Subject,Event,Time,SpO2,HR,CO_pct,CO_ppm,Psys,Pdia,Hct,AMS_score\n\
                    B,baseline,1,97,70,1.2,5,120,80,44,0\n\
                    A,night 1,2,,85,1.0,4,125,82,45,3\n";
        let ds = Dataset::from_records(read_csv(text.as_bytes()).unwrap()).unwrap();
        assert_eq!(
            ds.features[0],
            vec![1.0, 0.0, 1.0, 97.0, 70.0, 1.2, 5.0, 120.0, 80.0, 44.0]
        );
        assert_eq!(ds.features[1][..4], [0.0, 1.0, 2.0, 97.0]);
        assert_eq!(ds.imputations.len(), 1);
        assert_eq!(ds.labels(LabelScheme::Binary).unwrap(), vec![0, 1]);
        assert_eq!(ds.mi_target(MiTarget::RawScore).unwrap(), vec![0, 3]);
        assert_eq!(ds.subject_ids(), vec![1, 0]);
    }
}
