//! Reading observation and record files.
//!
//! Accepted layouts:
//!
//! * wide CSV: a header row of population labels, one column per population;
//!   columns may end early (trailing empty cells), but may not have gaps.
//! * long CSV: header containing `population` and `value` columns and,
//!   for raw sequences, an `order` column giving each observation's position.
//! * JSON: an array of arrays, an object mapping labels to arrays, or an
//!   object with a `populations` list of `{ "label", "records" | "values" }`
//!   (also found under `result`, so `extract` reports can be read back).

use std::fmt;
use std::path::Path;

use serde_json::Value;
use weibrec_core::{extract_upper_record_indices, RecordSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataKind {
    /// Observation sequences in time order; records are extracted.
    RawSequences,
    /// Upper record values already extracted.
    Records,
}

/// Where a value came from, for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    /// 1-based line and column of a CSV cell.
    Cell { line: u64, column: usize },
    /// 0-based index into a JSON array.
    Element { index: usize },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Cell { line, column } => write!(f, "line {line}, column {column}"),
            Location::Element { index } => write!(f, "element {index}"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error("{path}: {location}: {message}")]
    At {
        path: String,
        location: Location,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub label: String,
    pub values: Vec<f64>,
    pub locations: Vec<Location>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub source: String,
    pub populations: Vec<Population>,
}

/// A population's records together with the raw-data positions they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelledRecords {
    pub label: String,
    pub series: RecordSeries,
}

impl Dataset {
    /// Record series per population: extracted for raw sequences, validated
    /// for pre-extracted records.
    pub fn records(&self, kind: DataKind) -> Result<Vec<LabelledRecords>, DataError> {
        self.populations
            .iter()
            .map(|p| {
                let series = match kind {
                    DataKind::RawSequences => {
                        let idx = extract_upper_record_indices(&p.values)
                            .map_err(|e| self.err_format(format!("population '{}': {e}", p.label)))?;
                        RecordSeries::new(idx.iter().map(|&i| p.values[i]).collect())
                    }
                    DataKind::Records => {
                        if let Some(j) = p.values.windows(2).position(|w| w[0] >= w[1]) {
                            return Err(DataError::At {
                                path: self.source.clone(),
                                location: p.locations[j + 1],
                                message: format!(
                                    "population '{}': records must be strictly increasing ({} follows {})",
                                    p.label,
                                    p.values[j + 1],
                                    p.values[j]
                                ),
                            });
                        }
                        RecordSeries::new(p.values.clone())
                    }
                }
                .map_err(|e| self.err_format(format!("population '{}': {e}", p.label)))?;
                Ok(LabelledRecords {
                    label: p.label.clone(),
                    series,
                })
            })
            .collect()
    }

    fn err_format(&self, message: String) -> DataError {
        DataError::Format {
            path: self.source.clone(),
            message,
        }
    }
}

/// Loads a data file, choosing JSON for a `.json` extension and CSV otherwise.
pub fn load(path: &Path, kind: DataKind) -> Result<Dataset, DataError> {
    let source = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| DataError::Io {
        path: source.clone(),
        source: e,
    })?;
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        parse_json(&text, &source)
    } else {
        parse_csv(&text, &source, kind)
    }
}

fn check_value(
    raw: &str,
    source: &str,
    location: Location,
) -> Result<f64, DataError> {
    let at = |message: String| DataError::At {
        path: source.to_string(),
        location,
        message,
    };
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| at(format!("'{}' is not a number", raw.trim())))?;
    if !v.is_finite() || v <= 0.0 {
        return Err(at(format!("value {v} is not positive")));
    }
    Ok(v)
}

pub fn parse_csv(text: &str, source: &str, kind: DataKind) -> Result<Dataset, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let fmt_err = |message: String| DataError::Format {
        path: source.to_string(),
        message,
    };
    let headers = reader
        .headers()
        .map_err(|e| fmt_err(e.to_string()))?
        .clone();
    if headers.is_empty() || headers.iter().all(str::is_empty) {
        return Err(fmt_err("missing header row".into()));
    }
    let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let populations = match (find("population"), find("value")) {
        (Some(p), Some(v)) => parse_long(&mut reader, source, p, v, find("order"), kind)?,
        _ => parse_wide(&mut reader, source, &headers)?,
    };
    if populations.is_empty() {
        return Err(fmt_err("no populations found".into()));
    }
    Ok(Dataset {
        source: source.to_string(),
        populations,
    })
}

fn parse_wide(
    reader: &mut csv::Reader<&[u8]>,
    source: &str,
    headers: &csv::StringRecord,
) -> Result<Vec<Population>, DataError> {
    let mut pops: Vec<Population> = headers
        .iter()
        .map(|h| Population {
            label: h.to_string(),
            values: Vec::new(),
            locations: Vec::new(),
        })
        .collect();
    let mut ended = vec![false; pops.len()];
    for row in reader.records() {
        let row = row.map_err(|e| DataError::Format {
            path: source.to_string(),
            message: e.to_string(),
        })?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() > pops.len() {
            return Err(DataError::At {
                path: source.to_string(),
                location: Location::Cell {
                    line,
                    column: pops.len() + 1,
                },
                message: format!("row has {} cells but the header has {}", row.len(), pops.len()),
            });
        }
        for (c, pop) in pops.iter_mut().enumerate() {
            let location = Location::Cell { line, column: c + 1 };
            let cell = row.get(c).unwrap_or("");
            if cell.is_empty() {
                ended[c] = true;
                continue;
            }
            if ended[c] {
                return Err(DataError::At {
                    path: source.to_string(),
                    location,
                    message: format!("column '{}' has a gap before this value", pop.label),
                });
            }
            pop.values.push(check_value(cell, source, location)?);
            pop.locations.push(location);
        }
    }
    for p in &pops {
        if p.values.is_empty() {
            return Err(DataError::Format {
                path: source.to_string(),
                message: format!("column '{}' has no values", p.label),
            });
        }
    }
    Ok(pops)
}

/// `(order, value, location)` of one long-format row.
type LongEntry = (f64, f64, Location);

fn parse_long(
    reader: &mut csv::Reader<&[u8]>,
    source: &str,
    pop_col: usize,
    value_col: usize,
    order_col: Option<usize>,
    kind: DataKind,
) -> Result<Vec<Population>, DataError> {
    if order_col.is_none() && kind == DataKind::RawSequences {
        return Err(DataError::Format {
            path: source.to_string(),
            message: "long-format raw sequences need an 'order' column".into(),
        });
    }
    let mut groups: Vec<(String, Vec<LongEntry>)> = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| DataError::Format {
            path: source.to_string(),
            message: e.to_string(),
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let cell = |c: usize| row.get(c).unwrap_or("");
        let at = |c: usize, message: String| DataError::At {
            path: source.to_string(),
            location: Location::Cell { line, column: c + 1 },
            message,
        };
        let label = cell(pop_col).to_string();
        if label.is_empty() {
            return Err(at(pop_col, "missing population label".into()));
        }
        let location = Location::Cell {
            line,
            column: value_col + 1,
        };
        let value = check_value(cell(value_col), source, location)?;
        let order = match order_col {
            Some(c) => cell(c)
                .parse::<f64>()
                .ok()
                .filter(|o| o.is_finite())
                .ok_or_else(|| at(c, format!("'{}' is not a valid order", cell(c))))?,
            None => i as f64,
        };
        match groups.iter_mut().find(|(l, _)| *l == label) {
            Some((_, entries)) => entries.push((order, value, location)),
            None => groups.push((label, vec![(order, value, location)])),
        }
    }
    groups
        .into_iter()
        .map(|(label, mut entries)| {
            entries.sort_by(|a, b| a.0.total_cmp(&b.0));
            if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(DataError::At {
                    path: source.to_string(),
                    location: w[1].2,
                    message: format!("population '{label}' repeats order {}", w[1].0),
                });
            }
            Ok(Population {
                label,
                values: entries.iter().map(|e| e.1).collect(),
                locations: entries.iter().map(|e| e.2).collect(),
            })
        })
        .collect()
}

pub fn parse_json(text: &str, source: &str) -> Result<Dataset, DataError> {
    let fmt_err = |message: String| DataError::Format {
        path: source.to_string(),
        message,
    };
    let root: Value = serde_json::from_str(text).map_err(|e| fmt_err(e.to_string()))?;
    let listed = root
        .get("populations")
        .or_else(|| root.get("result").and_then(|r| r.get("populations")));
    let pairs: Vec<(String, &Value)> = match (&root, listed) {
        (_, Some(Value::Array(items))) => items
            .iter()
            .enumerate()
            .map(|(i, item)| {
                let label = item
                    .get("label")
                    .and_then(Value::as_str)
                    .map_or_else(|| (i + 1).to_string(), str::to_string);
                let values = item
                    .get("records")
                    .or_else(|| item.get("values"))
                    .ok_or_else(|| fmt_err(format!("population {i} has no 'records' or 'values'")))?;
                Ok((label, values))
            })
            .collect::<Result<_, DataError>>()?,
        (Value::Array(items), None) => items
            .iter()
            .enumerate()
            .map(|(i, v)| ((i + 1).to_string(), v))
            .collect(),
        (Value::Object(map), None) => map.iter().map(|(k, v)| (k.clone(), v)).collect(),
        _ => return Err(fmt_err("expected an array of arrays or an object of arrays".into())),
    };
    if pairs.is_empty() {
        return Err(fmt_err("no populations found".into()));
    }
    let populations = pairs
        .into_iter()
        .map(|(label, v)| {
            let items = v
                .as_array()
                .ok_or_else(|| fmt_err(format!("population '{label}' is not an array")))?;
            if items.is_empty() {
                return Err(fmt_err(format!("population '{label}' is empty")));
            }
            let mut values = Vec::with_capacity(items.len());
            let mut locations = Vec::with_capacity(items.len());
            for (index, item) in items.iter().enumerate() {
                let location = Location::Element { index };
                let x = item.as_f64().ok_or_else(|| DataError::At {
                    path: source.to_string(),
                    location,
                    message: format!("population '{label}': {item} is not a number"),
                })?;
                if x.is_nan() || x <= 0.0 {
                    return Err(DataError::At {
                        path: source.to_string(),
                        location,
                        message: format!("population '{label}': value {x} is not positive"),
                    });
                }
                values.push(x);
                locations.push(location);
            }
            Ok(Population {
                label,
                values,
                locations,
            })
        })
        .collect::<Result<_, DataError>>()?;
    Ok(Dataset {
        source: source.to_string(),
        populations,
    })
}

/// Wide CSV of record series, readable back as `records` input.
pub fn records_to_csv(records: &[LabelledRecords]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(records.iter().map(|r| r.label.as_str()))
        .expect("in-memory write");
    let rows = records.iter().map(|r| r.series.len()).max().unwrap_or(0);
    for i in 0..rows {
        let row: Vec<String> = records
            .iter()
            .map(|r| r.series.values().get(i).map_or_else(String::new, |v| v.to_string()))
            .collect();
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 csv")
}
