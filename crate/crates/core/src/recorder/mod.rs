//! Columnar result tables, Arrow IPC files and frame images.
//!
//! Every result table starts with the fixed columns
//! `time, robot_category, robot_id, pogobot_ticks, x, y, angle`; controllers
//! may declare extra nullable columns (`int32`, `float64`, `text`, `bool`)
//! through [`SchemaBuilder`] and fill them per row through [`DataRow`].

mod frames;
mod ipc;

pub use frames::{format_frame_name, render_frame, save_frame, FrameObject, FrameScene};
pub use ipc::{read_ipc, read_ipc_bytes, write_ipc, write_ipc_bytes, CONFIGURATION_KEY};

use std::collections::BTreeMap;

pub const FIXED_COLUMNS: [&str; 7] = ["time", "robot_category", "robot_id", "pogobot_ticks", "x", "y", "angle"];

#[derive(Debug, thiserror::Error)]
pub enum RecorderError {
    #[error("column `{0}` is declared twice")]
    DuplicateColumn(String),
    #[error("column `{0}` was not declared")]
    UndeclaredColumn(String),
    #[error("column `{name}` holds {expected:?}, not {got:?}")]
    TypeMismatch { name: String, expected: ColumnType, got: ColumnType },
    #[error("tables have different columns: {0}")]
    SchemaMismatch(String),
    #[error("bad frame name template `{0}`")]
    Template(String),
    #[error("cannot write `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("arrow: {0}")]
    Arrow(#[from] arrow_schema::ArrowError),
    #[error("image: {0}")]
    Image(#[from] image::ImageError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnType {
    Int32,
    Float64,
    Text,
    Bool,
    UInt16,
    UInt32,
}

/// One cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Null,
    Int32(i32),
    Float64(f64),
    Text(String),
    Bool(bool),
    UInt16(u16),
    UInt32(u32),
}

impl Value {
    pub fn column_type(&self) -> Option<ColumnType> {
        Some(match self {
            Value::Null => return None,
            Value::Int32(_) => ColumnType::Int32,
            Value::Float64(_) => ColumnType::Float64,
            Value::Text(_) => ColumnType::Text,
            Value::Bool(_) => ColumnType::Bool,
            Value::UInt16(_) => ColumnType::UInt16,
            Value::UInt32(_) => ColumnType::UInt32,
        })
    }
}

/// Typed, nullable column storage.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Int32(Vec<Option<i32>>),
    Float64(Vec<Option<f64>>),
    Text(Vec<Option<String>>),
    Bool(Vec<Option<bool>>),
    UInt16(Vec<Option<u16>>),
    UInt32(Vec<Option<u32>>),
}

impl ColumnData {
    pub fn new(ty: ColumnType) -> Self {
        match ty {
            ColumnType::Int32 => ColumnData::Int32(Vec::new()),
            ColumnType::Float64 => ColumnData::Float64(Vec::new()),
            ColumnType::Text => ColumnData::Text(Vec::new()),
            ColumnType::Bool => ColumnData::Bool(Vec::new()),
            ColumnType::UInt16 => ColumnData::UInt16(Vec::new()),
            ColumnType::UInt32 => ColumnData::UInt32(Vec::new()),
        }
    }

    pub fn column_type(&self) -> ColumnType {
        match self {
            ColumnData::Int32(_) => ColumnType::Int32,
            ColumnData::Float64(_) => ColumnType::Float64,
            ColumnData::Text(_) => ColumnType::Text,
            ColumnData::Bool(_) => ColumnType::Bool,
            ColumnData::UInt16(_) => ColumnType::UInt16,
            ColumnData::UInt32(_) => ColumnType::UInt32,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ColumnData::Int32(v) => v.len(),
            ColumnData::Float64(v) => v.len(),
            ColumnData::Text(v) => v.len(),
            ColumnData::Bool(v) => v.len(),
            ColumnData::UInt16(v) => v.len(),
            ColumnData::UInt32(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Appends `value`; `Null` is accepted by every type.
    pub fn push(&mut self, value: Value) -> Result<(), ColumnType> {
        match (self, value) {
            (ColumnData::Int32(v), Value::Int32(x)) => v.push(Some(x)),
            (ColumnData::Float64(v), Value::Float64(x)) => v.push(Some(x)),
            (ColumnData::Text(v), Value::Text(x)) => v.push(Some(x)),
            (ColumnData::Bool(v), Value::Bool(x)) => v.push(Some(x)),
            (ColumnData::UInt16(v), Value::UInt16(x)) => v.push(Some(x)),
            (ColumnData::UInt32(v), Value::UInt32(x)) => v.push(Some(x)),
            (ColumnData::Int32(v), Value::Null) => v.push(None),
            (ColumnData::Float64(v), Value::Null) => v.push(None),
            (ColumnData::Text(v), Value::Null) => v.push(None),
            (ColumnData::Bool(v), Value::Null) => v.push(None),
            (ColumnData::UInt16(v), Value::Null) => v.push(None),
            (ColumnData::UInt32(v), Value::Null) => v.push(None),
            (me, _) => return Err(me.column_type()),
        }
        Ok(())
    }

    pub fn get(&self, row: usize) -> Value {
        fn wrap<T: Clone>(v: &[Option<T>], row: usize, f: impl Fn(T) -> Value) -> Value {
            v[row].clone().map_or(Value::Null, f)
        }
        match self {
            ColumnData::Int32(v) => wrap(v, row, Value::Int32),
            ColumnData::Float64(v) => wrap(v, row, Value::Float64),
            ColumnData::Text(v) => wrap(v, row, Value::Text),
            ColumnData::Bool(v) => wrap(v, row, Value::Bool),
            ColumnData::UInt16(v) => wrap(v, row, Value::UInt16),
            ColumnData::UInt32(v) => wrap(v, row, Value::UInt32),
        }
    }

    fn extend_from(&mut self, other: &ColumnData) -> bool {
        match (self, other) {
            (ColumnData::Int32(a), ColumnData::Int32(b)) => a.extend_from_slice(b),
            (ColumnData::Float64(a), ColumnData::Float64(b)) => a.extend_from_slice(b),
            (ColumnData::Text(a), ColumnData::Text(b)) => a.extend_from_slice(b),
            (ColumnData::Bool(a), ColumnData::Bool(b)) => a.extend_from_slice(b),
            (ColumnData::UInt16(a), ColumnData::UInt16(b)) => a.extend_from_slice(b),
            (ColumnData::UInt32(a), ColumnData::UInt32(b)) => a.extend_from_slice(b),
            _ => return false,
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub data: ColumnData,
    pub nullable: bool,
}

/// In-memory result table. `chunks` holds the row count of each sampling
/// instant so files keep one record batch per instant.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<Column>,
    pub metadata: BTreeMap<String, String>,
    pub chunks: Vec<usize>,
}

impl Table {
    /// Empty table with the fixed columns plus `custom`.
    pub fn with_schema(schema: &RecordSchema) -> Self {
        let fixed = [
            ColumnType::Float64,
            ColumnType::Text,
            ColumnType::UInt16,
            ColumnType::UInt32,
            ColumnType::Float64,
            ColumnType::Float64,
            ColumnType::Float64,
        ];
        let mut columns: Vec<Column> = FIXED_COLUMNS
            .iter()
            .zip(fixed)
            .map(|(n, t)| Column { name: n.to_string(), data: ColumnData::new(t), nullable: false })
            .collect();
        columns.extend(schema.custom.iter().map(|(n, t)| Column {
            name: n.clone(),
            data: ColumnData::new(*t),
            nullable: true,
        }));
        Self { columns, metadata: BTreeMap::new(), chunks: Vec::new() }
    }

    pub fn num_rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.data.len())
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn column(&self, name: &str) -> Option<&ColumnData> {
        self.columns.iter().find(|c| c.name == name).map(|c| &c.data)
    }

    pub fn column_mut(&mut self, name: &str) -> Option<&mut ColumnData> {
        self.columns.iter_mut().find(|c| c.name == name).map(|c| &mut c.data)
    }

    /// Non-null `float64` values of `name` (nulls become NaN).
    pub fn f64s(&self, name: &str) -> Option<Vec<f64>> {
        match self.column(name)? {
            ColumnData::Float64(v) => Some(v.iter().map(|x| x.unwrap_or(f64::NAN)).collect()),
            ColumnData::Int32(v) => Some(v.iter().map(|x| x.map_or(f64::NAN, f64::from)).collect()),
            ColumnData::UInt16(v) => Some(v.iter().map(|x| x.map_or(f64::NAN, f64::from)).collect()),
            ColumnData::UInt32(v) => Some(v.iter().map(|x| x.map_or(f64::NAN, f64::from)).collect()),
            _ => None,
        }
    }

    pub fn u16s(&self, name: &str) -> Option<Vec<u16>> {
        match self.column(name)? {
            ColumnData::UInt16(v) => Some(v.iter().map(|x| x.unwrap_or(0)).collect()),
            _ => None,
        }
    }

    pub fn texts(&self, name: &str) -> Option<Vec<String>> {
        match self.column(name)? {
            ColumnData::Text(v) => Some(v.iter().map(|x| x.clone().unwrap_or_default()).collect()),
            _ => None,
        }
    }

    /// Appends a row given in column order. Fails without modifying the table.
    pub fn push_row(&mut self, values: Vec<Value>) -> Result<(), RecorderError> {
        if values.len() != self.columns.len() {
            return Err(RecorderError::SchemaMismatch(format!(
                "row has {} values, table has {} columns",
                values.len(),
                self.columns.len()
            )));
        }
        for (c, v) in self.columns.iter().zip(&values) {
            if let Some(t) = v.column_type() {
                if t != c.data.column_type() {
                    return Err(RecorderError::TypeMismatch { name: c.name.clone(), expected: c.data.column_type(), got: t });
                }
            }
        }
        for (c, v) in self.columns.iter_mut().zip(values) {
            c.data.push(v).expect("checked above");
        }
        Ok(())
    }

    /// Marks the rows added since the previous call as one sampling instant.
    pub fn close_chunk(&mut self) {
        let done: usize = self.chunks.iter().sum();
        let n = self.num_rows() - done;
        if n > 0 {
            self.chunks.push(n);
        }
    }

    /// Adds a column holding `value` on every existing row.
    pub fn add_constant_column(&mut self, name: &str, ty: ColumnType, value: Value) -> Result<(), RecorderError> {
        if self.column(name).is_some() {
            return Err(RecorderError::DuplicateColumn(name.into()));
        }
        let mut data = ColumnData::new(ty);
        for _ in 0..self.num_rows() {
            data.push(value.clone()).map_err(|expected| RecorderError::TypeMismatch {
                name: name.into(),
                expected,
                got: value.column_type().unwrap_or(expected),
            })?;
        }
        self.columns.push(Column { name: name.into(), data, nullable: true });
        Ok(())
    }

    /// Appends all rows of `other`; column names and types must match.
    pub fn append(&mut self, other: &Table) -> Result<(), RecorderError> {
        let mine: Vec<(&str, ColumnType)> = self.columns.iter().map(|c| (c.name.as_str(), c.data.column_type())).collect();
        let theirs: Vec<(&str, ColumnType)> = other.columns.iter().map(|c| (c.name.as_str(), c.data.column_type())).collect();
        if mine != theirs {
            return Err(RecorderError::SchemaMismatch(format!("{mine:?} vs {theirs:?}")));
        }
        for (a, b) in self.columns.iter_mut().zip(&other.columns) {
            a.data.extend_from(&b.data);
        }
        self.chunks.extend_from_slice(&other.chunks);
        Ok(())
    }
}

/// Custom column declarations collected from controllers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RecordSchema {
    pub custom: Vec<(String, ColumnType)>,
}

impl RecordSchema {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.custom.iter().position(|(n, _)| n == name)
    }

    pub fn column_count(&self) -> usize {
        FIXED_COLUMNS.len() + self.custom.len()
    }
}

/// Passed to controllers so they can declare extra columns.
#[derive(Debug, Default)]
pub struct SchemaBuilder {
    schema: RecordSchema,
}

impl SchemaBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_column(&mut self, name: &str, ty: ColumnType) -> Result<(), RecorderError> {
        if FIXED_COLUMNS.contains(&name) || self.schema.index_of(name).is_some() {
            return Err(RecorderError::DuplicateColumn(name.into()));
        }
        self.schema.custom.push((name.into(), ty));
        Ok(())
    }

    pub fn add_int32(&mut self, name: &str) -> Result<(), RecorderError> {
        self.add_column(name, ColumnType::Int32)
    }

    pub fn add_float64(&mut self, name: &str) -> Result<(), RecorderError> {
        self.add_column(name, ColumnType::Float64)
    }

    pub fn add_text(&mut self, name: &str) -> Result<(), RecorderError> {
        self.add_column(name, ColumnType::Text)
    }

    pub fn add_bool(&mut self, name: &str) -> Result<(), RecorderError> {
        self.add_column(name, ColumnType::Bool)
    }

    pub fn finish(self) -> RecordSchema {
        self.schema
    }
}

/// Custom values for one object at one sampling instant.
#[derive(Debug)]
pub struct DataRow<'a> {
    schema: &'a RecordSchema,
    values: Vec<Value>,
    enabled: bool,
}

impl<'a> DataRow<'a> {
    pub fn new(schema: &'a RecordSchema) -> Self {
        Self { schema, values: vec![Value::Null; schema.custom.len()], enabled: true }
    }

    pub fn set(&mut self, name: &str, value: Value) -> Result<(), RecorderError> {
        let i = self.schema.index_of(name).ok_or_else(|| RecorderError::UndeclaredColumn(name.into()))?;
        let expected = self.schema.custom[i].1;
        if let Some(got) = value.column_type() {
            if got != expected {
                return Err(RecorderError::TypeMismatch { name: name.into(), expected, got });
            }
        }
        self.values[i] = value;
        Ok(())
    }

    pub fn set_int32(&mut self, name: &str, v: i32) -> Result<(), RecorderError> {
        self.set(name, Value::Int32(v))
    }

    pub fn set_float64(&mut self, name: &str, v: f64) -> Result<(), RecorderError> {
        self.set(name, Value::Float64(v))
    }

    pub fn set_text(&mut self, name: &str, v: &str) -> Result<(), RecorderError> {
        self.set(name, Value::Text(v.into()))
    }

    pub fn set_bool(&mut self, name: &str, v: bool) -> Result<(), RecorderError> {
        self.set(name, Value::Bool(v))
    }

    /// Skip this object at this instant.
    pub fn disable_export(&mut self) {
        self.enabled = false;
    }

    pub fn enable_export(&mut self) {
        self.enabled = true;
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled
    }

    pub fn into_values(self) -> Vec<Value> {
        self.values
    }
}

/// Fixed-column values of one row.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedRow {
    pub time: f64,
    pub category: String,
    pub id: u16,
    pub ticks: u32,
    pub x: f64,
    pub y: f64,
    pub angle: f64,
}

impl FixedRow {
    pub fn into_values(self, custom: Vec<Value>) -> Vec<Value> {
        let mut v = vec![
            Value::Float64(self.time),
            Value::Text(self.category),
            Value::UInt16(self.id),
            Value::UInt32(self.ticks),
            Value::Float64(self.x),
            Value::Float64(self.y),
            Value::Float64(self.angle),
        ];
        v.extend(custom);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_columns_only() {
        let t = Table::with_schema(&RecordSchema::default());
        assert_eq!(t.column_names(), FIXED_COLUMNS.to_vec());
    }

    #[test]
    fn custom_column_and_duplicates() {
        let mut b = SchemaBuilder::new();
        b.add_int32("stuff").unwrap();
        assert!(matches!(b.add_int32("stuff"), Err(RecorderError::DuplicateColumn(_))));
        assert!(matches!(b.add_float64("x"), Err(RecorderError::DuplicateColumn(_))));
        let s = b.finish();
        assert_eq!(Table::with_schema(&s).columns.len(), 8);
    }

    #[test]
    fn data_row_checks_names_and_types() {
        let mut b = SchemaBuilder::new();
        b.add_int32("stuff").unwrap();
        let s = b.finish();
        let mut row = DataRow::new(&s);
        row.set_int32("stuff", 4).unwrap();
        assert!(matches!(row.set_int32("other", 1), Err(RecorderError::UndeclaredColumn(_))));
        assert!(matches!(row.set_float64("stuff", 1.0), Err(RecorderError::TypeMismatch { .. })));
        assert_eq!(row.into_values(), vec![Value::Int32(4)]);
    }

    #[test]
    fn append_and_constant_columns() {
        let s = RecordSchema::default();
        let mut a = Table::with_schema(&s);
        let row = FixedRow { time: 1.0, category: "robots".into(), id: 3, ticks: 60, x: 1.0, y: 2.0, angle: 0.5 };
        a.push_row(row.clone().into_values(vec![])).unwrap();
        a.close_chunk();
        let b = a.clone();
        a.append(&b).unwrap();
        assert_eq!(a.num_rows(), 2);
        assert_eq!(a.chunks, vec![1, 1]);
        a.add_constant_column("run", ColumnType::Int32, Value::Int32(7)).unwrap();
        assert_eq!(a.column("run").unwrap().get(1), Value::Int32(7));
        assert!(a.append(&b).is_err());
    }
}
