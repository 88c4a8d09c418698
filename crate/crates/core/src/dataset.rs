//! Tabular datasets: ingestion, per-feature statistics, CSV round-trip.

use std::collections::HashSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Summary statistics of one feature column.
///
/// `std` is the population standard deviation (divide by `n`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl FeatureStats {
    pub fn range(&self) -> f64 {
        self.max - self.min
    }

    pub fn is_constant(&self) -> bool {
        self.std == 0.0
    }
}

/// Computes mean, population std, min and max of a column.
///
/// A column whose entries are all equal gets `std == 0` exactly, even when
/// the floating-point mean is not bitwise equal to the entries.
pub fn compute_stats(column: &[f64]) -> FeatureStats {
    assert!(!column.is_empty(), "compute_stats on empty column");
    let n = column.len() as f64;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for &v in column {
        min = min.min(v);
        max = max.max(v);
        sum += v;
    }
    if min == max {
        return FeatureStats { mean: min, std: 0.0, min, max };
    }
    let mean = (sum / n).clamp(min, max);
    let var = column.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    FeatureStats {
        mean,
        std: var.sqrt(),
        min,
        max,
    }
}

/// An immutable `n x d` matrix of finite reals with row ids, feature names
/// and per-feature statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    ids: Vec<String>,
    feature_names: Vec<String>,
    /// Row-major, `n * d` entries.
    values: Vec<f64>,
    stats: Vec<FeatureStats>,
}

impl Dataset {
    /// Builds a dataset from rows, validating shape, finiteness and id
    /// uniqueness.
    pub fn from_rows(ids: Vec<String>, feature_names: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let d = feature_names.len();
        if d == 0 {
            return Err(Error::InvalidDataset("at least one feature is required".into()));
        }
        if rows.len() < 2 {
            return Err(Error::InvalidDataset(format!("at least two rows are required, found {}", rows.len())));
        }
        if ids.len() != rows.len() {
            return Err(Error::InvalidDataset(format!("{} ids for {} rows", ids.len(), rows.len())));
        }
        let mut values = Vec::with_capacity(rows.len() * d);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::RaggedRow {
                    row: r + 1,
                    expected: d,
                    found: row.len(),
                });
            }
            if let Some((c, v)) = row.iter().enumerate().find(|(_, v)| !v.is_finite()) {
                return Err(Error::NonNumeric {
                    row: r + 1,
                    column: feature_names[c].clone(),
                    value: v.to_string(),
                });
            }
            values.extend_from_slice(row);
        }
        let mut seen = HashSet::with_capacity(ids.len());
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        let mut ds = Dataset {
            ids,
            feature_names,
            values,
            stats: Vec::new(),
        };
        ds.stats = (0..d).map(|j| compute_stats(&ds.column(j))).collect();
        Ok(ds)
    }

    /// Like [`Dataset::from_rows`] with ids `"0"`, `"1"`, ...
    pub fn with_default_ids(feature_names: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let ids = (0..rows.len()).map(|i| i.to_string()).collect();
        Self::from_rows(ids, feature_names, rows)
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn d(&self) -> usize {
        self.feature_names.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn stats(&self) -> &[FeatureStats] {
        &self.stats
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.d();
        &self.values[i * d..(i + 1) * d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.values.chunks_exact(self.d())
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|x| x == name)
    }

    /// Returns a copy with row `i` replaced.
    pub fn with_row(&self, i: usize, row: &[f64]) -> Result<Self> {
        if row.len() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                found: row.len(),
            });
        }
        let mut rows: Vec<Vec<f64>> = self.rows().map(<[f64]>::to_vec).collect();
        rows[i] = row.to_vec();
        Self::from_rows(self.ids.clone(), self.feature_names.clone(), rows)
    }

    /// Writes the dataset as CSV with a leading `id` column.
    pub fn write_csv<W: Write>(&self, writer: W, id_column: &str) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let csv_err = |e: csv::Error| Error::Csv(e.to_string());
        let mut header = vec![id_column.to_string()];
        header.extend(self.feature_names.iter().cloned());
        w.write_record(&header).map_err(csv_err)?;
        for (id, row) in self.ids.iter().zip(self.rows()) {
            let mut rec = vec![id.clone()];
            // `{:?}` on f64 is the shortest round-tripping representation.
            rec.extend(row.iter().map(|v| format!("{v:?}")));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))
    }
}

/// Parses a CSV document with a header row.
///
/// When `id_column` is given, that column supplies the row ids; otherwise
/// rows are numbered from `"0"`. Every other cell must parse as a finite
/// real. Reported row numbers count data rows from 1.
pub fn load_csv<R: Read>(reader: R, id_column: Option<&str>) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        None => return Err(Error::EmptyInput),
        Some(rec) => rec.map_err(|e| Error::Csv(e.to_string()))?,
    };
    let header: Vec<String> = header.iter().map(str::to_string).collect();
    if header.iter().all(String::is_empty) {
        return Err(Error::EmptyInput);
    }
    let id_pos = match id_column {
        Some(name) => Some(
            header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::MissingIdColumn(name.to_string()))?,
        ),
        None => None,
    };
    let feature_names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|(c, _)| Some(*c) != id_pos)
        .map(|(_, h)| h.clone())
        .collect();

    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for (r, rec) in records.enumerate() {
        let rec = rec.map_err(|e| Error::Csv(e.to_string()))?;
        let row_no = r + 1;
        if rec.len() == 1 && rec.get(0) == Some("") {
            continue;
        }
        if rec.len() != header.len() {
            return Err(Error::RaggedRow {
                row: row_no,
                expected: header.len(),
                found: rec.len(),
            });
        }
        let mut row = Vec::with_capacity(feature_names.len());
        for (c, cell) in rec.iter().enumerate() {
            if Some(c) == id_pos {
                ids.push(cell.to_string());
                continue;
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => row.push(v),
                _ => {
                    return Err(Error::NonNumeric {
                        row: row_no,
                        column: header[c].clone(),
                        value: cell.to_string(),
                    })
                }
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    if id_pos.is_none() {
        ids = (0..rows.len()).map(|i| i.to_string()).collect();
    }
    Dataset::from_rows(ids, feature_names, rows)
}
