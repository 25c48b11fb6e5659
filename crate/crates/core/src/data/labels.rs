//! Class labels derived from the Lake Louise AMS score.

use std::fmt;
use std::str::FromStr;

use crate::data::record::RawRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LabelScheme {
    /// 0 = no AMS (score 0-1), 1 = AMS (score >= 2).
    Binary,
    /// 0 = no AMS (0-1), 1 = moderate (2-4), 2 = severe (>= 5).
    Multiclass,
}

impl LabelScheme {
    pub const ALL: [LabelScheme; 2] = [LabelScheme::Binary, LabelScheme::Multiclass];

    pub fn label(self, score: u8) -> u16 {
        match self {
            LabelScheme::Binary => u16::from(score >= 2),
            LabelScheme::Multiclass => match score {
                0..=1 => 0,
                2..=4 => 1,
                _ => 2,
            },
        }
    }

    pub fn class_names(self) -> &'static [&'static str] {
        match self {
            LabelScheme::Binary => &["NoAMS", "AMS"],
            LabelScheme::Multiclass => &["NoAMS", "Moderate", "Severe"],
        }
    }

    pub fn num_classes(self) -> usize {
        self.class_names().len()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LabelScheme::Binary => "binary",
            LabelScheme::Multiclass => "multiclass",
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }
}

impl fmt::Display for LabelScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LabelScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "binary" | "2" => Ok(LabelScheme::Binary),
            "multiclass" | "multi" | "3" => Ok(LabelScheme::Multiclass),
            other => Err(Error::InvalidArgument(format!(
                "unknown label scheme {other:?}"
            ))),
        }
    }
}

pub fn derive_labels(records: &[RawRecord], scheme: LabelScheme) -> Result<Vec<u16>> {
    records
        .iter()
        .enumerate()
        .map(|(row, r)| {
            r.ams_score
                .map(|s| scheme.label(s))
                .ok_or(Error::MissingScore { row })
        })
        .collect()
}
