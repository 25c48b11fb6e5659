//! Column-mean imputation of missing measurements.

use crate::data::record::{Measurement, RawRecord};
use crate::error::{Error, Result};

/// One filled cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Imputation {
    pub row: usize,
    pub column: Measurement,
    pub value: f64,
}

/// Replaces every missing measurement with the mean of the present values in
/// its column. A column with no present values is an error.
pub fn impute_missing_mean(records: &mut [RawRecord]) -> Result<Vec<Imputation>> {
    let mut log = Vec::new();
    if records.is_empty() {
        return Ok(log);
    }
    for m in Measurement::ALL {
        let present: Vec<f64> = records.iter().filter_map(|r| r.get(m)).collect();
        if present.is_empty() {
            return Err(Error::AllMissing(m.column().into()));
        }
        if present.len() == records.len() {
            continue;
        }
        let mean = present.iter().sum::<f64>() / present.len() as f64;
        for (row, r) in records.iter_mut().enumerate() {
            let cell = &mut r.measurements[m.index()];
            if cell.is_none() {
                *cell = Some(mean);
                log.push(Imputation {
                    row,
                    column: m,
                    value: mean,
                });
            }
        }
    }
    Ok(log)
}
