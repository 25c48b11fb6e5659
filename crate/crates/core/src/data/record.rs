//! Dataset schema and CSV ingestion.

use std::collections::HashMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

/// Numeric physiological measurements, in CSV column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measurement {
    SpO2,
    Hr,
    CoPct,
    CoPpm,
    Psys,
    Pdia,
    Hct,
}

impl Measurement {
    pub const ALL: [Measurement; 7] = [
        Measurement::SpO2,
        Measurement::Hr,
        Measurement::CoPct,
        Measurement::CoPpm,
        Measurement::Psys,
        Measurement::Pdia,
        Measurement::Hct,
    ];

    pub fn column(self) -> &'static str {
        match self {
            Measurement::SpO2 => "SpO2",
            Measurement::Hr => "HR",
            Measurement::CoPct => "CO_pct",
            Measurement::CoPpm => "CO_ppm",
            Measurement::Psys => "Psys",
            Measurement::Pdia => "Pdia",
            Measurement::Hct => "Hct",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Every model input column, in the fixed order used for feature indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Feature {
    Subject,
    Event,
    Time,
    Measured(Measurement),
}

pub const FEATURE_COUNT: usize = 10;

impl Feature {
    pub const ALL: [Feature; FEATURE_COUNT] = [
        Feature::Subject,
        Feature::Event,
        Feature::Time,
        Feature::Measured(Measurement::SpO2),
        Feature::Measured(Measurement::Hr),
        Feature::Measured(Measurement::CoPct),
        Feature::Measured(Measurement::CoPpm),
        Feature::Measured(Measurement::Psys),
        Feature::Measured(Measurement::Pdia),
        Feature::Measured(Measurement::Hct),
    ];

    pub fn index(self) -> usize {
        match self {
            Feature::Subject => 0,
            Feature::Event => 1,
            Feature::Time => 2,
            Feature::Measured(m) => 3 + m.index(),
        }
    }

    pub fn from_index(i: usize) -> Option<Feature> {
        Self::ALL.get(i).copied()
    }

    /// CSV column name.
    pub fn column(self) -> &'static str {
        match self {
            Feature::Subject => "Subject",
            Feature::Event => "Event",
            Feature::Time => "Time",
            Feature::Measured(m) => m.column(),
        }
    }

    /// Human-readable name with units, for reports.
    pub fn label(self) -> &'static str {
        match self {
            Feature::Subject => "Subject",
            Feature::Event => "Event",
            Feature::Time => "Time",
            Feature::Measured(Measurement::SpO2) => "SpO2 (%)",
            Feature::Measured(Measurement::Hr) => "HR (bpm)",
            Feature::Measured(Measurement::CoPct) => "CO (%)",
            Feature::Measured(Measurement::CoPpm) => "CO (ppm)",
            Feature::Measured(Measurement::Psys) => "Psys (av)",
            Feature::Measured(Measurement::Pdia) => "Pdia (av)",
            Feature::Measured(Measurement::Hct) => "Hct (av)",
        }
    }
}

pub const SCORE_COLUMN: &str = "AMS_score";

/// One row of the input table. `None` marks a missing cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRecord {
    pub subject: String,
    pub event: String,
    pub time: String,
    pub measurements: [Option<f64>; 7],
    pub ams_score: Option<u8>,
}

impl RawRecord {
    pub fn get(&self, m: Measurement) -> Option<f64> {
        self.measurements[m.index()]
    }

    pub fn spo2_pct(&self) -> Option<f64> {
        self.get(Measurement::SpO2)
    }

    pub fn hr_bpm(&self) -> Option<f64> {
        self.get(Measurement::Hr)
    }
}

fn header_key(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

fn is_missing(cell: &str) -> bool {
    let c = cell.trim();
    c.is_empty()
        || c.eq_ignore_ascii_case("na")
        || c.eq_ignore_ascii_case("n/a")
        || c.eq_ignore_ascii_case("nan")
}

/// Reads records from a CSV file. Column names match case-insensitively and
/// ignoring punctuation, in any order; extra columns are ignored.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Vec<RawRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file).map_err(|e| match e {
        Error::Csv { source, .. } => Error::Csv {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })
}

pub fn read_csv(reader: impl Read) -> Result<Vec<RawRecord>> {
    let csv_err = |source| Error::Csv {
        path: "<input>".into(),
        source,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let positions: HashMap<String, usize> = headers
        .iter()
        .enumerate()
        .map(|(i, h)| (header_key(h), i))
        .collect();
    let find = |name: &str| -> Result<usize> {
        positions
            .get(&header_key(name))
            .copied()
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let subject_col = find(Feature::Subject.column())?;
    let event_col = find(Feature::Event.column())?;
    let time_col = find(Feature::Time.column())?;
    let meas_cols = Measurement::ALL
        .iter()
        .map(|m| find(m.column()))
        .collect::<Result<Vec<_>>>()?;
    let score_col = find(SCORE_COLUMN)?;

    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(csv_err)?;
        let line = i + 1;
        let cell = |col: usize| row.get(col).unwrap_or("");
        let ident = |col: usize, name: &str| -> Result<String> {
            let v = cell(col);
            if is_missing(v) {
                Err(Error::Parse {
                    row: line,
                    column: name.into(),
                    value: v.into(),
                })
            } else {
                Ok(v.to_string())
            }
        };
        let mut measurements = [None; 7];
        for (m, &col) in Measurement::ALL.iter().zip(&meas_cols) {
            let v = cell(col);
            if !is_missing(v) {
                let x: f64 = v.parse().map_err(|_| Error::Parse {
                    row: line,
                    column: m.column().into(),
                    value: v.into(),
                })?;
                if !x.is_finite() {
                    return Err(Error::Parse {
                        row: line,
                        column: m.column().into(),
                        value: v.into(),
                    });
                }
                measurements[m.index()] = Some(x);
            }
        }
        let score_cell = cell(score_col);
        let ams_score = if is_missing(score_cell) {
            None
        } else {
            let bad = || Error::Parse {
                row: line,
                column: SCORE_COLUMN.into(),
                value: score_cell.into(),
            };
            let x: f64 = score_cell.parse().map_err(|_| bad())?;
            if x.fract() != 0.0 {
                return Err(bad());
            }
            if !(0.0..=12.0).contains(&x) {
                return Err(Error::ScoreRange {
                    row: line,
                    score: x as i64,
                });
            }
            Some(x as u8)
        };
        out.push(RawRecord {
            subject: ident(subject_col, "Subject")?,
            event: ident(event_col, "Event")?,
            time: ident(time_col, "Time")?,
            measurements,
            ams_score,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "Subject,Event,Time,SpO2,HR,CO_pct,CO_ppm,Psys,Pdia,Hct,AMS_score";

    #[test]
    fn three_rows() {
        let text = format!(
            "{HEADER}\nP1,baseline,1,97,70,1.2,5,120,80,44,0\nP1,night 1,1,88,85,1.0,4,125,82,45,3\nP2,baseline,1,98,66,0.9,3,118,79,43,1\n"
        );
        let recs = read_csv(text.as_bytes()).unwrap();
        assert_eq!(recs.len(), 3);
        assert_eq!(recs[1].spo2_pct(), Some(88.0));
        assert_eq!(recs[1].ams_score, Some(3));
        assert_eq!(recs[2].subject, "P2");
    }

    #[test]
    fn header_order_and_case_free() {
        let text = "ams_score,hct,pdia,psys,co_ppm,co_pct,hr,spo2,time,event,SUBJECT,extra\n2,44,80,120,5,1.1,70,95,1,baseline,S9,zz\n";
        let recs = read_csv(text.as_bytes()).unwrap();
        assert_eq!(recs[0].subject, "S9");
        assert_eq!(recs[0].get(Measurement::Hct), Some(44.0));
        assert_eq!(recs[0].ams_score, Some(2));
    }

    #[test]
    fn missing_score_column() {
        let text = "Subject,Event,Time,SpO2,HR,CO_pct,CO_ppm,Psys,Pdia,Hct\nP1,baseline,1,97,70,1,5,120,80,44\n";
        match read_csv(text.as_bytes()) {
            Err(Error::MissingColumn(c)) => assert_eq!(c, "AMS_score"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn na_marks_missing() {
        let text = format!("{HEADER}\nP1,baseline,1,NA,70,,5,120,80,44,0\n");
        let recs = read_csv(text.as_bytes()).unwrap();
        assert_eq!(recs[0].spo2_pct(), None);
        assert_eq!(recs[0].get(Measurement::CoPct), None);
        assert_eq!(recs[0].hr_bpm(), Some(70.0));
    }

    #[test]
    fn unparseable_cell_reports_row_and_column() {
        let text = format!("{HEADER}\nP1,baseline,1,97,70,1,5,120,80,44,0\nP1,baseline,1,97,seventy,1,5,120,80,44,0\n");
        match read_csv(text.as_bytes()) {
            Err(Error::Parse { row, column, value }) => {
                assert_eq!((row, column.as_str(), value.as_str()), (2, "HR", "seventy"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn score_out_of_range() {
        let text = format!("{HEADER}\nP1,baseline,1,97,70,1,5,120,80,44,13\n");
        assert!(matches!(
            read_csv(text.as_bytes()),
            Err(Error::ScoreRange { row: 1, score: 13 })
        ));
    }

    #[test]
    fn feature_indices_round_trip() {
        for (i, f) in Feature::ALL.iter().enumerate() {
            assert_eq!(f.index(), i);
            assert_eq!(Feature::from_index(i), Some(*f));
        }
    }
}
