//! Table ingestion (CSV / JSON), per-column type inference and
//! missing-value-aware column extraction.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hash::fnv64;

/// Fraction of non-missing cells that must parse for a numeric or temporal
/// classification.
pub const PARSE_RATIO_THRESHOLD: f64 = 0.95;

/// Integer-valued numerical columns with at most this many distinct values
/// are also treated as category codes by the frequency modules.
pub const DISCRETE_MAX_DISTINCT: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TableError {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("table has no data rows")]
    EmptyTable,
    #[error("duplicate header `{0}`")]
    DuplicateHeader(String),
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("field `{field}` is {found}, expected {expected}")]
    KindMismatch {
        field: String,
        expected: &'static str,
        found: FieldKind,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Categorical,
    Numerical,
    Temporal,
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldKind::Categorical => "categorical",
            FieldKind::Numerical => "numerical",
            FieldKind::Temporal => "temporal",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

impl FromStr for TableFormat {
    type Err = TableError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            other => Err(TableError::MalformedInput(format!("unsupported format `{other}`"))),
        }
    }
}

/// One cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Text(String),
    Timestamp(NaiveDateTime),
    Missing,
}

impl Value {
    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub name: String,
    pub kind: FieldKind,
    pub distinct_count: usize,
    pub missing_count: usize,
    /// Integer-valued numerical field with few distinct values (e.g. a
    /// cylinder count). Such a field is numerical for the pairwise numeric
    /// modules and categorical for the frequency modules.
    #[serde(default)]
    pub discrete: bool,
}

impl Field {
    pub fn new(name: impl Into<String>, kind: FieldKind) -> Self {
        Field {
            name: name.into(),
            kind,
            distinct_count: 0,
            missing_count: 0,
            discrete: false,
        }
    }

    pub fn with_distinct(mut self, distinct_count: usize) -> Self {
        self.distinct_count = distinct_count;
        self
    }

    pub fn with_discrete(mut self, discrete: bool) -> Self {
        self.discrete = discrete;
        self
    }

    /// Whether the frequency modules may read this field as categories.
    pub fn is_category_source(&self) -> bool {
        match self.kind {
            FieldKind::Categorical | FieldKind::Temporal => true,
            FieldKind::Numerical => self.discrete,
        }
    }
}

/// Schema plus row count: everything the scheduler needs to plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub row_count: usize,
    pub fields: Vec<Field>,
}

/// Number of fields usable in each role. A discrete numerical field counts
/// as both numerical and categorical.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindCounts {
    pub categorical: usize,
    pub temporal: usize,
    pub numerical: usize,
}

/// An immutable, column-major table.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    id: String,
    name: String,
    row_count: usize,
    fields: Vec<Field>,
    columns: Vec<Vec<Value>>,
}

impl Dataset {
    /// Builds a dataset from named raw text columns, inferring each kind.
    pub fn from_text_columns(
        headers: Vec<String>,
        raw_columns: Vec<Vec<Option<String>>>,
    ) -> Result<Self, TableError> {
        let mut seen = HashSet::new();
        for h in &headers {
            if !seen.insert(h.as_str()) {
                return Err(TableError::DuplicateHeader(h.clone()));
            }
        }
        if headers.len() != raw_columns.len() {
            return Err(TableError::MalformedInput("column count differs from header".into()));
        }
        let row_count = raw_columns.first().map_or(0, Vec::len);
        if row_count == 0 {
            return Err(TableError::EmptyTable);
        }
        if raw_columns.iter().any(|c| c.len() != row_count) {
            return Err(TableError::MalformedInput("ragged columns".into()));
        }

        let mut fields = Vec::with_capacity(headers.len());
        let mut columns = Vec::with_capacity(headers.len());
        for (name, raw) in headers.into_iter().zip(raw_columns) {
            let cells: Vec<&str> = raw.iter().map(|c| c.as_deref().unwrap_or("")).collect();
            let (kind, values) = infer_field_kind(&cells);
            fields.push(describe_field(name, kind, &values));
            columns.push(values);
        }
        Ok(Dataset {
            id: String::new(),
            name: "dataset".into(),
            row_count,
            fields,
            columns,
        })
    }

    /// Builds a dataset from already-typed columns.
    pub fn from_columns(columns: Vec<(String, FieldKind, Vec<Value>)>) -> Result<Self, TableError> {
        let mut seen = HashSet::new();
        let row_count = columns.first().map_or(0, |c| c.2.len());
        if row_count == 0 {
            return Err(TableError::EmptyTable);
        }
        let mut fields = Vec::with_capacity(columns.len());
        let mut cells = Vec::with_capacity(columns.len());
        for (name, kind, values) in columns {
            if !seen.insert(name.clone()) {
                return Err(TableError::DuplicateHeader(name));
            }
            if values.len() != row_count {
                return Err(TableError::MalformedInput("ragged columns".into()));
            }
            let fits = values.iter().all(|v| {
                matches!(
                    (kind, v),
                    (_, Value::Missing)
                        | (FieldKind::Numerical, Value::Number(_))
                        | (FieldKind::Categorical, Value::Text(_))
                        | (FieldKind::Temporal, Value::Timestamp(_))
                )
            });
            if !fits {
                return Err(TableError::KindMismatch {
                    field: name,
                    expected: "cells matching the declared kind",
                    found: kind,
                });
            }
            fields.push(describe_field(name, kind, &values));
            cells.push(values);
        }
        Ok(Dataset {
            id: String::new(),
            name: "dataset".into(),
            row_count,
            fields,
            columns: cells,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    pub fn meta(&self) -> DatasetMeta {
        DatasetMeta {
            row_count: self.row_count,
            fields: self.fields.clone(),
        }
    }

    pub fn kind_counts(&self) -> KindCounts {
        let mut counts = KindCounts {
            categorical: 0,
            temporal: 0,
            numerical: 0,
        };
        for f in &self.fields {
            match f.kind {
                FieldKind::Categorical => counts.categorical += 1,
                FieldKind::Temporal => counts.temporal += 1,
                FieldKind::Numerical => {
                    counts.numerical += 1;
                    if f.discrete {
                        counts.categorical += 1;
                    }
                }
            }
        }
        counts
    }

    pub fn field(&self, name: &str) -> Result<&Field, TableError> {
        self.index_of(name).map(|i| &self.fields[i])
    }

    pub fn column(&self, name: &str) -> Result<&[Value], TableError> {
        self.index_of(name).map(|i| self.columns[i].as_slice())
    }

    fn index_of(&self, name: &str) -> Result<usize, TableError> {
        self.fields
            .iter()
            .position(|f| f.name == name)
            .ok_or_else(|| TableError::UnknownField(name.to_string()))
    }

    fn numerical_index(&self, name: &str) -> Result<usize, TableError> {
        let i = self.index_of(name)?;
        let field = &self.fields[i];
        if field.kind != FieldKind::Numerical {
            return Err(TableError::KindMismatch {
                field: field.name.clone(),
                expected: "numerical",
                found: field.kind,
            });
        }
        Ok(i)
    }

    /// Non-missing values of a numerical field, in row order.
    pub fn numeric_column(&self, name: &str) -> Result<Vec<f64>, TableError> {
        let i = self.numerical_index(name)?;
        Ok(self.columns[i].iter().filter_map(Value::as_number).collect())
    }

    /// Rows where both numerical fields are present (pairwise deletion).
    pub fn pair_columns(&self, x: &str, y: &str) -> Result<Vec<(f64, f64)>, TableError> {
        let xi = self.numerical_index(x)?;
        let yi = self.numerical_index(y)?;
        Ok(self.columns[xi]
            .iter()
            .zip(&self.columns[yi])
            .filter_map(|(a, b)| Some((a.as_number()?, b.as_number()?)))
            .collect())
    }

    /// Per-row category labels for a field usable by the frequency modules.
    /// Temporal cells are labelled by year; discrete numbers by their
    /// integer rendering.
    pub fn category_column(&self, name: &str) -> Result<Vec<Option<String>>, TableError> {
        let i = self.index_of(name)?;
        let field = &self.fields[i];
        if !field.is_category_source() {
            return Err(TableError::KindMismatch {
                field: field.name.clone(),
                expected: "categorical",
                found: field.kind,
            });
        }
        Ok(self.columns[i].iter().map(category_label).collect())
    }

    /// Row-aligned category labels of two fields, dropping rows where
    /// either is missing.
    pub fn category_pairs(&self, a: &str, b: &str) -> Result<(Vec<String>, Vec<String>), TableError> {
        let left = self.category_column(a)?;
        let right = self.category_column(b)?;
        Ok(left
            .into_iter()
            .zip(right)
            .filter_map(|(l, r)| Some((l?, r?)))
            .unzip())
    }
}

fn category_label(v: &Value) -> Option<String> {
    match v {
        Value::Missing => None,
        Value::Text(s) => Some(s.clone()),
        Value::Number(n) => Some(format_number_label(*n)),
        Value::Timestamp(t) => Some(t.year().to_string()),
    }
}

fn format_number_label(n: f64) -> String {
    if n.fract() == 0.0 && n.abs() < 1e15 {
        format!("{}", n as i64)
    } else {
        format!("{n}")
    }
}

fn describe_field(name: String, kind: FieldKind, values: &[Value]) -> Field {
    let missing_count = values.iter().filter(|v| v.is_missing()).count();
    let present = values.len() - missing_count;
    let distinct_count = match kind {
        FieldKind::Numerical => values
            .iter()
            .filter_map(Value::as_number)
            // -0.0 and 0.0 are the same value
            .map(|v| (v + 0.0).to_bits())
            .collect::<HashSet<_>>()
            .len(),
        FieldKind::Temporal => values
            .iter()
            .filter_map(|v| match v {
                Value::Timestamp(t) => Some(*t),
                _ => None,
            })
            .collect::<HashSet<_>>()
            .len(),
        FieldKind::Categorical => values
            .iter()
            .filter_map(|v| match v {
                Value::Text(s) => Some(s.as_str()),
                _ => None,
            })
            .collect::<HashSet<_>>()
            .len(),
    };
    let discrete = kind == FieldKind::Numerical
        && distinct_count > 0
        && distinct_count <= DISCRETE_MAX_DISTINCT
        && distinct_count * 4 <= present
        && values
            .iter()
            .filter_map(Value::as_number)
            .all(|v| v.fract() == 0.0);
    Field {
        name,
        kind,
        distinct_count,
        missing_count,
        discrete,
    }
}

/// Empty, `NA` and `null` (any case, surrounding whitespace ignored).
pub fn is_missing_token(cell: &str) -> bool {
    let t = cell.trim();
    t.is_empty() || t.eq_ignore_ascii_case("na") || t.eq_ignore_ascii_case("null")
}

fn parse_number(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_temporal(cell: &str) -> Option<NaiveDateTime> {
    let t = cell.trim();
    if t.len() == 4 && t.bytes().all(|b| b.is_ascii_digit()) {
        let year: i32 = t.parse().ok()?;
        if (1000..=3000).contains(&year) {
            return NaiveDate::from_ymd_opt(year, 1, 1)?.and_hms_opt(0, 0, 0);
        }
        return None;
    }
    if let Ok(d) = NaiveDate::parse_from_str(t, "%Y-%m-%d") {
        return d.and_hms_opt(0, 0, 0);
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(t, fmt) {
            return Some(dt);
        }
    }
    chrono::DateTime::parse_from_rfc3339(t).ok().map(|dt| dt.naive_utc())
}

/// Classifies a column and parses its cells.
///
/// Numerical wins over temporal when both reach the threshold, so a column
/// of bare four-digit years is numerical. Cells that fail to parse under the
/// chosen kind become [`Value::Missing`].
pub fn infer_field_kind(raw: &[&str]) -> (FieldKind, Vec<Value>) {
    let present: Vec<&str> = raw.iter().copied().filter(|c| !is_missing_token(c)).collect();
    let ratio = |hits: usize| {
        !present.is_empty() && hits as f64 >= PARSE_RATIO_THRESHOLD * present.len() as f64
    };

    let numeric_hits = present.iter().filter(|c| parse_number(c).is_some()).count();
    if numeric_hits > 0 && ratio(numeric_hits) {
        let values = raw
            .iter()
            .map(|c| match parse_number(c) {
                Some(v) if !is_missing_token(c) => Value::Number(v),
                _ => Value::Missing,
            })
            .collect();
        return (FieldKind::Numerical, values);
    }

    let temporal_hits = present.iter().filter(|c| parse_temporal(c).is_some()).count();
    if temporal_hits > 0 && ratio(temporal_hits) {
        let values = raw
            .iter()
            .map(|c| match parse_temporal(c) {
                Some(t) if !is_missing_token(c) => Value::Timestamp(t),
                _ => Value::Missing,
            })
            .collect();
        return (FieldKind::Temporal, values);
    }

    let values = raw
        .iter()
        .map(|c| {
            if is_missing_token(c) {
                Value::Missing
            } else {
                Value::Text(c.trim().to_string())
            }
        })
        .collect();
    (FieldKind::Categorical, values)
}

/// Parses CSV (header row required) or JSON (array of flat objects).
pub fn parse_table(bytes: &[u8], format: TableFormat) -> Result<Dataset, TableError> {
    if bytes.is_empty() {
        return Err(TableError::MalformedInput("empty input".into()));
    }
    let text = std::str::from_utf8(bytes)
        .map_err(|e| TableError::MalformedInput(format!("invalid UTF-8: {e}")))?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let (headers, columns) = match format {
        TableFormat::Csv => read_csv(text)?,
        TableFormat::Json => read_json(text)?,
    };
    let id = format!("{:016x}", fnv64(bytes));
    Ok(Dataset::from_text_columns(headers, columns)?.with_id(id))
}

type RawColumns = (Vec<String>, Vec<Vec<Option<String>>>);

fn read_csv(text: &str) -> Result<RawColumns, TableError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| TableError::MalformedInput(e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(TableError::MalformedInput("missing header row".into()));
    }
    let mut columns: Vec<Vec<Option<String>>> = vec![Vec::new(); headers.len()];
    for record in reader.records() {
        let record = record.map_err(|e| TableError::MalformedInput(e.to_string()))?;
        for (col, cell) in columns.iter_mut().zip(record.iter()) {
            col.push(Some(cell.to_string()));
        }
    }
    Ok((headers, columns))
}

fn read_json(text: &str) -> Result<RawColumns, TableError> {
    let doc: serde_json::Value =
        serde_json::from_str(text).map_err(|e| TableError::MalformedInput(e.to_string()))?;
    let rows = doc
        .as_array()
        .ok_or_else(|| TableError::MalformedInput("expected a JSON array of objects".into()))?;

    let mut headers: Vec<String> = Vec::new();
    let mut index = std::collections::HashMap::new();
    for row in rows {
        let obj = row
            .as_object()
            .ok_or_else(|| TableError::MalformedInput("array element is not an object".into()))?;
        for key in obj.keys() {
            if !index.contains_key(key) {
                index.insert(key.clone(), headers.len());
                headers.push(key.clone());
            }
        }
    }

    let mut columns: Vec<Vec<Option<String>>> = vec![Vec::with_capacity(rows.len()); headers.len()];
    for row in rows {
        let obj = row.as_object().expect("checked above");
        for (name, col) in headers.iter().zip(columns.iter_mut()) {
            let cell = match obj.get(name) {
                None | Some(serde_json::Value::Null) => None,
                Some(serde_json::Value::String(s)) => Some(s.clone()),
                Some(serde_json::Value::Number(n)) => Some(n.to_string()),
                Some(serde_json::Value::Bool(b)) => Some(b.to_string()),
                Some(_) => {
                    return Err(TableError::MalformedInput(format!(
                        "nested value in field `{name}`"
                    )))
                }
            };
            col.push(cell);
        }
    }
    Ok((headers, columns))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv(text: &str) -> Result<Dataset, TableError> {
        parse_table(text.as_bytes(), TableFormat::Csv)
    }

    #[test]
    fn minimal_two_column_table() {
        let d = csv("a,b\n1,x\n2,y").unwrap();
        assert_eq!(d.row_count(), 2);
        assert_eq!(d.fields()[0].kind, FieldKind::Numerical);
        assert_eq!(d.fields()[1].kind, FieldKind::Categorical);
        assert_eq!(d.numeric_column("a").unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn header_only_is_empty_table() {
        assert_eq!(csv("a\n"), Err(TableError::EmptyTable));
    }

    #[test]
    fn duplicate_header_rejected() {
        assert_eq!(csv("a,a\n1,2\n"), Err(TableError::DuplicateHeader("a".into())));
    }

    #[test]
    fn ragged_csv_is_malformed() {
        assert!(matches!(csv("a,b\n1\n"), Err(TableError::MalformedInput(_))));
        assert!(matches!(parse_table(b"", TableFormat::Csv), Err(TableError::MalformedInput(_))));
        assert!(matches!(
            parse_table(&[0xff, 0xfe, 0x00], TableFormat::Csv),
            Err(TableError::MalformedInput(_))
        ));
    }

    #[test]
    fn infers_simple_kinds() {
        let (kind, values) = infer_field_kind(&["1", "2", "3"]);
        assert_eq!(kind, FieldKind::Numerical);
        assert_eq!(values, vec![Value::Number(1.0), Value::Number(2.0), Value::Number(3.0)]);

        let (kind, _) = infer_field_kind(&["1970-01-01", "1982-05-01"]);
        assert_eq!(kind, FieldKind::Temporal);

        let (kind, _) = infer_field_kind(&["a", "b"]);
        assert_eq!(kind, FieldKind::Categorical);
    }

    #[test]
    fn ninety_five_percent_rule() {
        // 20 of 21 cells parse: 20/21 = 0.952 >= 0.95
        let mut cells = vec!["1", "x"];
        let nums: Vec<String> = (2..=20).map(|i| i.to_string()).collect();
        cells.extend(nums.iter().map(String::as_str));
        assert_eq!(cells.len(), 21);
        let (kind, values) = infer_field_kind(&cells);
        assert_eq!(kind, FieldKind::Numerical);
        assert_eq!(values.iter().filter(|v| v.is_missing()).count(), 1);
        assert_eq!(values[1], Value::Missing);

        // 19 of 21 parse: 0.905 < 0.95
        let mut cells = vec!["1", "x", "y"];
        cells.extend(nums.iter().skip(1).map(String::as_str));
        let (kind, _) = infer_field_kind(&cells);
        assert_eq!(kind, FieldKind::Categorical);
    }

    #[test]
    fn missing_tokens() {
        let (kind, values) = infer_field_kind(&["1", "", "NA", "null", "Null", " na ", "3"]);
        assert_eq!(kind, FieldKind::Numerical);
        assert_eq!(values.iter().filter(|v| v.is_missing()).count(), 5);
        let (kind, values) = infer_field_kind(&["", "NA"]);
        assert_eq!(kind, FieldKind::Categorical);
        assert!(values.iter().all(Value::is_missing));
    }

    #[test]
    fn four_digit_years_parse_as_temporal_in_mixed_columns() {
        let (kind, values) = infer_field_kind(&["1999", "2001-05-01", "2003-01-01"]);
        // all three are temporal; only one is numeric
        assert_eq!(kind, FieldKind::Temporal);
        assert!(values.iter().all(|v| matches!(v, Value::Timestamp(_))));
        // out of range year is not temporal
        assert_eq!(parse_temporal("0999"), None);
        assert_eq!(parse_temporal("3001"), None);
    }

    #[test]
    fn numeric_column_and_kind_mismatch() {
        let d = csv("a,b\n1,x\n,y\n3,z").unwrap();
        assert_eq!(d.numeric_column("a").unwrap(), vec![1.0, 3.0]);
        assert!(matches!(d.numeric_column("b"), Err(TableError::KindMismatch { .. })));
        assert!(matches!(d.numeric_column("zz"), Err(TableError::UnknownField(_))));
    }

    #[test]
    fn all_missing_numeric_column_is_empty() {
        let d = Dataset::from_columns(vec![(
            "a".into(),
            FieldKind::Numerical,
            vec![Value::Missing, Value::Missing],
        )])
        .unwrap();
        assert_eq!(d.numeric_column("a").unwrap(), Vec::<f64>::new());
        assert_eq!(d.fields()[0].missing_count, 2);

        let bad = Dataset::from_columns(vec![(
            "a".into(),
            FieldKind::Numerical,
            vec![Value::Text("x".into())],
        )]);
        assert!(matches!(bad, Err(TableError::KindMismatch { .. })));
    }

    #[test]
    fn pairwise_deletion() {
        let d = csv("a,b\n1,4\n2,\n,6").unwrap();
        assert_eq!(d.pair_columns("a", "b").unwrap(), vec![(1.0, 4.0)]);
        let d = csv("a,b,c\n1,,x\n,2,y\n3,,z").unwrap();
        assert_eq!(d.pair_columns("a", "b").unwrap(), vec![]);
        assert!(d.pair_columns("a", "c").is_err());
    }

    #[test]
    fn json_rows() {
        let d = parse_table(
            br#"[{"a":1,"b":"x","c":null},{"a":2.5,"b":"y","c":true},{"b":"z","c":false}]"#,
            TableFormat::Json,
        )
        .unwrap();
        assert_eq!(d.row_count(), 3);
        assert_eq!(d.numeric_column("a").unwrap(), vec![1.0, 2.5]);
        assert_eq!(d.field("c").unwrap().missing_count, 1);
        assert_eq!(parse_table(b"[]", TableFormat::Json), Err(TableError::EmptyTable));
        assert!(matches!(
            parse_table(br#"[{"a":{"b":1}}]"#, TableFormat::Json),
            Err(TableError::MalformedInput(_))
        ));
        assert!(matches!(
            parse_table(br#"{"a":1}"#, TableFormat::Json),
            Err(TableError::MalformedInput(_))
        ));
    }

    #[test]
    fn discrete_numeric_fields_are_category_sources() {
        let mut text = String::from("cyl,w\n");
        for i in 0..40 {
            text.push_str(&format!("{},{}\n", [4, 6, 8][i % 3], 1000 + i));
        }
        let d = csv(&text).unwrap();
        let cyl = d.field("cyl").unwrap();
        assert!(cyl.discrete && cyl.is_category_source());
        assert!(!d.field("w").unwrap().discrete);
        assert_eq!(d.category_column("cyl").unwrap()[0].as_deref(), Some("4"));
        assert!(d.category_column("w").is_err());
    }

    #[test]
    fn temporal_categories_are_years() {
        let d = csv("t,c\n1970-01-01,a\n1982-06-01,b\n,c").unwrap();
        assert_eq!(
            d.category_column("t").unwrap(),
            vec![Some("1970".into()), Some("1982".into()), None]
        );
        let (a, b) = d.category_pairs("t", "c").unwrap();
        assert_eq!(a, vec!["1970", "1982"]);
        assert_eq!(b, vec!["a", "b"]);
    }
}
