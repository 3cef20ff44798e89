//! Typed tabular data with a cluster label per row.
//!
//! Columns are either numeric (finite reals) or categorical (interned
//! strings). Missing cells are kept as explicit `None` markers; nothing
//! downstream ever imputes them.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Columns with at most this many distinct numeric values are inferred as
/// categorical.
pub const NUMERIC_DISTINCT_THRESHOLD: usize = 10;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot open {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("label column `{0}` not found in header")]
    MissingLabelColumn(String),
    #[error("row {row}: missing cluster label")]
    MissingLabel { row: usize },
    #[error("column `{column}`, row {row}: cannot parse `{value}` as a finite number")]
    UnparsableCell {
        column: String,
        row: usize,
        value: String,
    },
    #[error("dataset has no rows")]
    Empty,
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),
    #[error("column `{column}` has {len} cells, expected {expected}")]
    LengthMismatch {
        column: String,
        len: usize,
        expected: usize,
    },
    #[error("unknown cluster `{0}`")]
    UnknownCluster(ClusterId),
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("numeric cell in column `{column}` is not finite")]
    NonFinite { column: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttributeKind {
    Numeric,
    Categorical,
}

impl fmt::Display for AttributeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttributeKind::Numeric => f.write_str("numeric"),
            AttributeKind::Categorical => f.write_str("categorical"),
        }
    }
}

/// Position of a feature column in its [`Dataset`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AttrId(pub u32);

impl AttrId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for AttrId {
    fn from(i: usize) -> Self {
        AttrId(i as u32)
    }
}

/// A cluster label as it appears in the input.
///
/// Labels that all parse as integers are ordered numerically, otherwise
/// lexically (see [`Dataset::new`]).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClusterId(pub String);

impl ClusterId {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// JSON form: a number when the label is an integer, a string otherwise.
    pub fn to_json(&self) -> serde_json::Value {
        match self.0.parse::<i64>() {
            Ok(v) if v.to_string() == self.0 => serde_json::Value::from(v),
            _ => serde_json::Value::from(self.0.clone()),
        }
    }
}

impl fmt::Display for ClusterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ClusterId {
    fn from(s: &str) -> Self {
        ClusterId(s.to_string())
    }
}

impl From<String> for ClusterId {
    fn from(s: String) -> Self {
        ClusterId(s)
    }
}

impl From<i64> for ClusterId {
    fn from(v: i64) -> Self {
        ClusterId(v.to_string())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ColumnData {
    Numeric(Vec<Option<f64>>),
    /// `levels` is sorted lexically; `codes` index into it.
    Categorical {
        levels: Vec<String>,
        codes: Vec<Option<u32>>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    name: String,
    data: ColumnData,
}

impl Column {
    pub fn numeric(name: impl Into<String>, values: Vec<Option<f64>>) -> Result<Self, DataError> {
        let name = name.into();
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(DataError::NonFinite { column: name });
        }
        Ok(Column {
            name,
            data: ColumnData::Numeric(values),
        })
    }

    pub fn categorical<S: AsRef<str>>(name: impl Into<String>, values: &[Option<S>]) -> Self {
        let levels: Vec<String> = values
            .iter()
            .flatten()
            .map(|s| s.as_ref())
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .map(str::to_string)
            .collect();
        let index: HashMap<&str, u32> = levels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i as u32))
            .collect();
        let codes = values
            .iter()
            .map(|v| v.as_ref().map(|s| index[s.as_ref()]))
            .collect();
        Column {
            name: name.into(),
            data: ColumnData::Categorical { levels, codes },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> AttributeKind {
        match self.data {
            ColumnData::Numeric(_) => AttributeKind::Numeric,
            ColumnData::Categorical { .. } => AttributeKind::Categorical,
        }
    }

    pub fn data(&self) -> &ColumnData {
        &self.data
    }

    pub fn len(&self) -> usize {
        match &self.data {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Categorical { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_numeric(&self) -> Option<&[Option<f64>]> {
        match &self.data {
            ColumnData::Numeric(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_categorical(&self) -> Option<(&[String], &[Option<u32>])> {
        match &self.data {
            ColumnData::Categorical { levels, codes } => Some((levels, codes)),
            _ => None,
        }
    }

    pub fn is_missing(&self, row: usize) -> bool {
        match &self.data {
            ColumnData::Numeric(v) => v[row].is_none(),
            ColumnData::Categorical { codes, .. } => codes[row].is_none(),
        }
    }

    /// Index of a categorical level, if present.
    pub fn level_code(&self, level: &str) -> Option<u32> {
        let (levels, _) = self.as_categorical()?;
        levels
            .binary_search_by(|l| l.as_str().cmp(level))
            .ok()
            .map(|i| i as u32)
    }

    /// Cell rendered the way it is written to CSV (empty when missing).
    pub fn cell_text(&self, row: usize) -> String {
        match &self.data {
            ColumnData::Numeric(v) => v[row].map(|x| x.to_string()).unwrap_or_default(),
            ColumnData::Categorical { levels, codes } => codes[row]
                .map(|c| levels[c as usize].clone())
                .unwrap_or_default(),
        }
    }
}

/// Feature columns plus one cluster label per row. Immutable once built.
#[derive(Clone, Debug)]
pub struct Dataset {
    columns: Vec<Column>,
    label_name: String,
    cluster_ids: Vec<ClusterId>,
    labels: Vec<u32>,
    cluster_rows: Vec<Vec<usize>>,
}

impl Dataset {
    pub fn new(
        columns: Vec<Column>,
        labels: Vec<ClusterId>,
        label_name: impl Into<String>,
    ) -> Result<Self, DataError> {
        let n = labels.len();
        if n == 0 {
            return Err(DataError::Empty);
        }
        let mut seen = HashSet::new();
        for col in &columns {
            if !seen.insert(col.name.as_str()) {
                return Err(DataError::DuplicateColumn(col.name.clone()));
            }
            if col.len() != n {
                return Err(DataError::LengthMismatch {
                    column: col.name.clone(),
                    len: col.len(),
                    expected: n,
                });
            }
        }

        let mut cluster_ids: Vec<ClusterId> = labels
            .iter()
            .cloned()
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        sort_cluster_ids(&mut cluster_ids);
        let index: HashMap<&ClusterId, u32> = cluster_ids
            .iter()
            .enumerate()
            .map(|(i, c)| (c, i as u32))
            .collect();
        let codes: Vec<u32> = labels.iter().map(|l| index[l]).collect();
        let mut cluster_rows = vec![Vec::new(); cluster_ids.len()];
        for (row, &c) in codes.iter().enumerate() {
            cluster_rows[c as usize].push(row);
        }
        Ok(Dataset {
            columns,
            label_name: label_name.into(),
            cluster_ids,
            labels: codes,
            cluster_rows,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_attributes(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, attr: AttrId) -> &Column {
        &self.columns[attr.index()]
    }

    pub fn attr_ids(&self) -> impl Iterator<Item = AttrId> + '_ {
        (0..self.columns.len()).map(AttrId::from)
    }

    pub fn attr_by_name(&self, name: &str) -> Option<AttrId> {
        self.columns
            .iter()
            .position(|c| c.name == name)
            .map(AttrId::from)
    }

    pub fn attr_name(&self, attr: AttrId) -> &str {
        &self.columns[attr.index()].name
    }

    pub fn label_name(&self) -> &str {
        &self.label_name
    }

    /// Distinct cluster labels in canonical order.
    pub fn cluster_ids(&self) -> &[ClusterId] {
        &self.cluster_ids
    }

    /// Per-row cluster position into [`Dataset::cluster_ids`].
    pub fn label_codes(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, row: usize) -> &ClusterId {
        &self.cluster_ids[self.labels[row] as usize]
    }

    pub fn cluster_index(&self, c: &ClusterId) -> Result<usize, DataError> {
        self.cluster_ids
            .iter()
            .position(|x| x == c)
            .ok_or_else(|| DataError::UnknownCluster(c.clone()))
    }

    /// Row indices labelled `c`, ascending.
    pub fn cluster_rows(&self, c: &ClusterId) -> Result<&[usize], DataError> {
        Ok(&self.cluster_rows[self.cluster_index(c)?])
    }

    pub fn cluster_rows_by_index(&self, idx: usize) -> &[usize] {
        &self.cluster_rows[idx]
    }

    pub fn kinds(&self) -> BTreeMap<String, AttributeKind> {
        self.columns
            .iter()
            .map(|c| (c.name.clone(), c.kind()))
            .collect()
    }

    /// Writes the dataset as CSV: feature columns in order, then the label column.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), DataError> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        header.push(&self.label_name);
        w.write_record(&header)?;
        for row in 0..self.n_rows() {
            let mut record: Vec<String> = self.columns.iter().map(|c| c.cell_text(row)).collect();
            record.push(self.label(row).0.clone());
            w.write_record(&record)?;
        }
        w.flush().map_err(|e| DataError::Csv(e.into()))?;
        Ok(())
    }
}

fn sort_cluster_ids(ids: &mut [ClusterId]) {
    if ids.iter().all(|c| c.0.parse::<i64>().is_ok()) {
        ids.sort_by(|a, b| {
            let key = |c: &ClusterId| c.0.parse::<i64>().unwrap();
            key(a).cmp(&key(b)).then_with(|| a.0.cmp(&b.0))
        });
    } else {
        ids.sort();
    }
}

fn parse_finite(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

fn is_missing_text(s: &str) -> bool {
    s.trim().is_empty()
}

/// Loads a labelled CSV file.
///
/// `type_hints` overrides inference per column; every other column is
/// numeric iff all present cells parse as finite reals and it has more than
/// [`NUMERIC_DISTINCT_THRESHOLD`] distinct values.
pub fn load_csv(
    path: impl AsRef<Path>,
    label_column: &str,
    type_hints: &HashMap<String, AttributeKind>,
) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_csv(file, label_column, type_hints)
}

pub fn read_csv<R: Read>(
    reader: R,
    label_column: &str,
    type_hints: &HashMap<String, AttributeKind>,
) -> Result<Dataset, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let label_pos = header
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| DataError::MissingLabelColumn(label_column.to_string()))?;

    let mut raw: Vec<Vec<String>> = vec![Vec::new(); header.len()];
    for record in rdr.records() {
        let record = record?;
        for (i, cell) in record.iter().enumerate() {
            raw[i].push(cell.to_string());
        }
    }
    let n = raw[label_pos].len();
    if n == 0 {
        return Err(DataError::Empty);
    }

    let mut labels = Vec::with_capacity(n);
    for (row, cell) in raw[label_pos].iter().enumerate() {
        if is_missing_text(cell) {
            return Err(DataError::MissingLabel { row });
        }
        labels.push(ClusterId(cell.trim().to_string()));
    }

    let mut columns = Vec::with_capacity(header.len() - 1);
    for (i, name) in header.iter().enumerate() {
        if i == label_pos {
            continue;
        }
        let cells = &raw[i];
        let kind = match type_hints.get(name) {
            Some(&k) => k,
            None => infer_kind(cells),
        };
        let column = match kind {
            AttributeKind::Numeric => {
                let mut values = Vec::with_capacity(n);
                for (row, cell) in cells.iter().enumerate() {
                    if is_missing_text(cell) {
                        values.push(None);
                    } else {
                        let v = parse_finite(cell).ok_or_else(|| DataError::UnparsableCell {
                            column: name.clone(),
                            row,
                            value: cell.clone(),
                        })?;
                        values.push(Some(v));
                    }
                }
                Column::numeric(name.clone(), values)?
            }
            AttributeKind::Categorical => {
                let values: Vec<Option<&str>> = cells
                    .iter()
                    .map(|c| (!is_missing_text(c)).then_some(c.as_str()))
                    .collect();
                Column::categorical(name.clone(), &values)
            }
        };
        columns.push(column);
    }
    Dataset::new(columns, labels, label_column)
}

/// Kind inference for one raw column.
pub fn infer_kind<S: AsRef<str>>(cells: &[S]) -> AttributeKind {
    let mut distinct = HashSet::new();
    for cell in cells.iter().map(AsRef::as_ref) {
        if is_missing_text(cell) {
            continue;
        }
        match parse_finite(cell) {
            // -0.0 and 0.0 are the same value
            Some(v) => {
                distinct.insert((v + 0.0).to_bits());
            }
            None => return AttributeKind::Categorical,
        }
    }
    if distinct.len() > NUMERIC_DISTINCT_THRESHOLD {
        AttributeKind::Numeric
    } else {
        AttributeKind::Categorical
    }
}
