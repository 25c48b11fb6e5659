//! Feature selection from MI scores.

use std::fmt;
use std::str::FromStr;

use crate::data::mi::MiScores;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionPolicy {
    /// Every feature with a strictly positive score.
    #[default]
    Positive,
    /// The `k` best positively scored features.
    TopK(usize),
}

impl fmt::Display for SelectionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionPolicy::Positive => f.write_str("positive"),
            SelectionPolicy::TopK(k) => write!(f, "top:{k}"),
        }
    }
}

impl FromStr for SelectionPolicy {
    type Err = Error;

    /// `positive`, `top:K` or `topK`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "positive" || s == "mi>0" {
            return Ok(SelectionPolicy::Positive);
        }
        let bad = || Error::InvalidArgument(format!("unknown selection policy {s:?}"));
        let k = s
            .strip_prefix("top:")
            .or_else(|| s.strip_prefix("top-"))
            .or_else(|| s.strip_prefix("top"))
            .ok_or_else(bad)?
            .parse::<usize>()
            .map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        Ok(SelectionPolicy::TopK(k))
    }
}

/// Selected feature indices in ascending order.
pub fn select_features(scores: &MiScores, policy: SelectionPolicy) -> Result<Vec<usize>> {
    let positive: Vec<usize> = scores
        .ranking()
        .into_iter()
        .filter(|&i| scores.scores[i] > 0.0)
        .collect();
    let mut chosen = match policy {
        SelectionPolicy::Positive => positive,
        SelectionPolicy::TopK(k) => positive.into_iter().take(k).collect(),
    };
    if chosen.is_empty() {
        return Err(Error::EmptySelection);
    }
    chosen.sort_unstable();
    Ok(chosen)
}
