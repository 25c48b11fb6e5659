//! Ordinal codes for the Subject, Event and Time columns.

use std::collections::BTreeMap;

use crate::data::record::RawRecord;
use crate::error::{Error, Result};

/// Lowercases, turns punctuation into spaces and splits letter/digit runs,
/// so "Night1", "night_1" and "NIGHT 1" all read "night 1".
fn normalize(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 4);
    let mut prev: Option<char> = None;
    for c in s.trim().chars() {
        let c = if c.is_ascii_alphanumeric() {
            c.to_ascii_lowercase()
        } else {
            ' '
        };
        if let Some(p) = prev {
            let boundary = (p.is_ascii_alphabetic() && c.is_ascii_digit())
                || (p.is_ascii_digit() && c.is_ascii_alphabetic());
            if boundary {
                out.push(' ');
            }
        }
        out.push(c);
        prev = Some(c);
    }
    out.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Protocol stage of an observation, in chronological order:
/// baseline 0, night 1 at altitude 1, overnight 1 2, night 2 3, overnight 2 4,
/// night 3 5, overnight 3 6. "Event k" and a bare integer k map to k - 1.
pub fn event_ordinal(raw: &str) -> Result<u32> {
    let s = normalize(raw);
    let unseen = || Error::UnseenCategory {
        kind: "Event",
        value: raw.to_string(),
    };
    let code = match s.as_str() {
        "baseline"
        | "sea level"
        | "baseline sea level"
        | "sea level baseline"
        | "baseline at sea level" => 0,
        "night 1" | "night 1 at altitude" | "high altitude" | "altitude" => 1,
        "overnight 1" => 2,
        "night 2" => 3,
        "overnight 2" => 4,
        "night 3" => 5,
        "overnight 3" => 6,
        _ => {
            let num = s.strip_prefix("event ").unwrap_or(&s);
            let k: u32 = num.parse().map_err(|_| unseen())?;
            if k == 0 {
                return Err(unseen());
            }
            k - 1
        }
    };
    Ok(code)
}

/// Time point within a stage. Accepts a bare integer, a unit-prefixed integer
/// ("day 2", "t3"), a clock reading "hh:mm" (minutes since midnight) or a
/// baseline marker (0).
pub fn time_ordinal(raw: &str) -> Result<u32> {
    let s = normalize(raw);
    let unseen = || Error::UnseenCategory {
        kind: "Time",
        value: raw.to_string(),
    };
    if matches!(s.as_str(), "baseline" | "sea level" | "pre") {
        return Ok(0);
    }
    let tokens: Vec<&str> = s.split(' ').collect();
    let num = |t: &str| t.parse::<u32>().ok();
    match tokens.as_slice() {
        [n] => num(n).ok_or_else(unseen),
        [h, m] if num(h).is_some() && num(m).is_some() => {
            let (h, m) = (num(h).unwrap(), num(m).unwrap());
            if h < 24 && m < 60 {
                Ok(h * 60 + m)
            } else {
                Err(unseen())
            }
        }
        [unit, n] if matches!(*unit, "time" | "t" | "day" | "d" | "night" | "hour" | "h") => {
            num(n).ok_or_else(unseen)
        }
        _ => Err(unseen()),
    }
}

/// Subject identifiers mapped to ids in sorted order of the fitted records.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CategoryEncoder {
    subjects: BTreeMap<String, u32>,
}

impl CategoryEncoder {
    pub fn fit(records: &[RawRecord]) -> Self {
        let mut names: Vec<&str> = records.iter().map(|r| r.subject.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        let subjects = names
            .into_iter()
            .enumerate()
            .map(|(i, n)| (n.to_string(), i as u32))
            .collect();
        Self { subjects }
    }

    pub fn subject_id(&self, subject: &str) -> Result<u32> {
        self.subjects
            .get(subject)
            .copied()
            .ok_or_else(|| Error::UnseenCategory {
                kind: "Subject",
                value: subject.to_string(),
            })
    }

    pub fn subject_count(&self) -> usize {
        self.subjects.len()
    }

    pub fn subjects(&self) -> impl Iterator<Item = &str> {
        self.subjects.keys().map(String::as_str)
    }

    /// `[subject, event, time]` codes for one record.
    pub fn encode(&self, record: &RawRecord) -> Result<[u32; 3]> {
        Ok([
            self.subject_id(&record.subject)?,
            event_ordinal(&record.event)?,
            time_ordinal(&record.time)?,
        ])
    }
}
