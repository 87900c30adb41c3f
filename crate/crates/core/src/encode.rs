//! Tabular preprocessing: drops id columns, expands categoricals into full
//! dummy sets, and adds dummy-by-numeric interaction columns.
//!
//! Column order is deterministic: numeric columns in their original order,
//! then dummies (categorical columns in original order, levels sorted),
//! then interaction columns sorted by name. Numeric-by-numeric pairs are
//! deliberately not interacted.

use crate::error::{Error, Result};
use ndarray::Array2;

/// Declared role of a raw column; no type inference happens anywhere.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColumnKind {
    Numeric,
    Categorical,
    Id,
}

/// One raw column: name, declared kind, and untyped cell text.
#[derive(Clone, Debug)]
pub struct RawColumn {
    pub name: String,
    pub kind: ColumnKind,
    pub values: Vec<String>,
}

/// A rectangular raw table (all columns the same length).
#[derive(Clone, Debug, Default)]
pub struct RawTable {
    pub columns: Vec<RawColumn>,
}

/// Where an encoded column came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColumnOrigin {
    Numeric { source: String },
    Dummy { source: String, level: String },
    Interaction { dummy: String, numeric: String },
}

/// Provenance report for an encoding pass.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EncodingReport {
    pub dropped_ids: Vec<String>,
    /// Each categorical column with its sorted level list.
    pub levels: Vec<(String, Vec<String>)>,
    pub origins: Vec<ColumnOrigin>,
}

impl EncodingReport {
    /// Renders the report as stable, diffable text.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for id in &self.dropped_ids {
            out.push_str(&format!("dropped id column: {id}\n"));
        }
        for (col, levels) in &self.levels {
            out.push_str(&format!("categorical {col}: {} levels [{}]\n", levels.len(), levels.join(", ")));
        }
        for origin in &self.origins {
            match origin {
                ColumnOrigin::Numeric { source } => out.push_str(&format!("numeric: {source}\n")),
                ColumnOrigin::Dummy { source, level } => {
                    out.push_str(&format!("dummy: {source}={level}\n"));
                }
                ColumnOrigin::Interaction { dummy, numeric } => {
                    out.push_str(&format!("interaction: {dummy} * {numeric}\n"));
                }
            }
        }
        out
    }
}

/// A fully numeric design matrix with named columns and provenance.
#[derive(Clone, Debug)]
pub struct EncodedDataset {
    pub column_names: Vec<String>,
    pub matrix: Array2<f64>,
    pub report: EncodingReport,
}

/// Encodes a typed raw table into a numeric design matrix.
///
/// Id columns are dropped; a categorical with `k` levels becomes `k` 0/1
/// dummies (no reference level is dropped); every (dummy, numeric) pair
/// becomes one elementwise product column.
pub fn encode_dataset(raw: &RawTable) -> Result<EncodedDataset> {
    if raw.columns.is_empty() {
        return Err(Error::InvalidArgument("table has no columns".into()));
    }
    let rows = raw.columns[0].values.len();
    if rows == 0 {
        return Err(Error::InvalidArgument("table has no rows".into()));
    }
    for c in &raw.columns {
        if c.values.len() != rows {
            return Err(Error::DimensionMismatch(format!(
                "column {} has {} rows, expected {rows}",
                c.name,
                c.values.len()
            )));
        }
    }
    if raw.columns.iter().all(|c| c.kind == ColumnKind::Id) {
        return Err(Error::InvalidArgument("table has only id columns".into()));
    }

    let mut report = EncodingReport::default();
    let mut names: Vec<String> = Vec::new();
    let mut cols: Vec<Vec<f64>> = Vec::new();

    struct NumericCol {
        name: String,
        data: Vec<f64>,
    }
    struct DummyCol {
        name: String,
        data: Vec<f64>,
    }

    let mut numerics: Vec<NumericCol> = Vec::new();
    let mut dummies: Vec<DummyCol> = Vec::new();

    for c in &raw.columns {
        match c.kind {
            ColumnKind::Id => report.dropped_ids.push(c.name.clone()),
            ColumnKind::Numeric => {
                let mut data = Vec::with_capacity(rows);
                for v in &c.values {
                    let parsed: f64 = v.trim().parse().map_err(|_| {
                        Error::InvalidArgument(format!(
                            "column {} declared numeric, found value {v:?}",
                            c.name
                        ))
                    })?;
                    if !parsed.is_finite() {
                        return Err(Error::NonFinite(format!("column {}", c.name)));
                    }
                    data.push(parsed);
                }
                numerics.push(NumericCol { name: c.name.clone(), data });
            }
            ColumnKind::Categorical => {
                let mut levels: Vec<String> = c.values.clone();
                levels.sort();
                levels.dedup();
                for level in &levels {
                    let data: Vec<f64> =
                        c.values.iter().map(|v| if v == level { 1.0 } else { 0.0 }).collect();
                    dummies.push(DummyCol { name: format!("{}={level}", c.name), data });
                }
                report.levels.push((c.name.clone(), levels));
            }
        }
    }

    for c in &numerics {
        names.push(c.name.clone());
        report.origins.push(ColumnOrigin::Numeric { source: c.name.clone() });
        cols.push(c.data.clone());
    }
    for d in &dummies {
        names.push(d.name.clone());
        let (source, level) = d.name.split_once('=').expect("dummy name carries its level");
        report.origins.push(ColumnOrigin::Dummy {
            source: source.to_string(),
            level: level.to_string(),
        });
        cols.push(d.data.clone());
    }
    let mut interactions: Vec<(String, Vec<f64>, String, String)> = Vec::new();
    for d in &dummies {
        for c in &numerics {
            let name = format!("{}*{}", d.name, c.name);
            let data: Vec<f64> =
                d.data.iter().zip(&c.data).map(|(a, b)| a * b).collect();
            interactions.push((name, data, d.name.clone(), c.name.clone()));
        }
    }
    interactions.sort_by(|a, b| a.0.cmp(&b.0));
    for (name, data, dummy, numeric) in interactions {
        names.push(name);
        report.origins.push(ColumnOrigin::Interaction { dummy, numeric });
        cols.push(data);
    }

    let mut matrix = Array2::zeros((rows, cols.len()));
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            matrix[[i, j]] = v;
        }
    }
    Ok(EncodedDataset { column_names: names, matrix, report })
}
