//! Arrow IPC file (Feather v2) reading and writing.

use std::fs::File;
use std::io::{BufWriter, Cursor, Read, Seek, Write};
use std::path::Path;
use std::sync::Arc;

use arrow_array::{
    Array, ArrayRef, BooleanArray, Float64Array, Int32Array, RecordBatch, StringArray, UInt16Array, UInt32Array,
};
use arrow_ipc::reader::FileReader;
use arrow_ipc::writer::FileWriter;
use arrow_schema::{DataType, Field, Schema};

use super::{Column, ColumnData, ColumnType, RecorderError, Table};

/// Schema metadata key holding the YAML configuration of the run.
pub const CONFIGURATION_KEY: &str = "configuration";

fn data_type(t: ColumnType) -> DataType {
    match t {
        ColumnType::Int32 => DataType::Int32,
        ColumnType::Float64 => DataType::Float64,
        ColumnType::Text => DataType::Utf8,
        ColumnType::Bool => DataType::Boolean,
        ColumnType::UInt16 => DataType::UInt16,
        ColumnType::UInt32 => DataType::UInt32,
    }
}

fn arrow_schema(table: &Table) -> Schema {
    let fields: Vec<Field> = table
        .columns
        .iter()
        .map(|c| Field::new(&c.name, data_type(c.data.column_type()), c.nullable))
        .collect();
    let metadata: arrow_schema::Metadata = table.metadata.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    Schema::new_with_metadata(fields, metadata)
}

fn slice_array(data: &ColumnData, start: usize, end: usize) -> ArrayRef {
    match data {
        ColumnData::Int32(v) => Arc::new(Int32Array::from(v[start..end].to_vec())),
        ColumnData::Float64(v) => Arc::new(Float64Array::from(v[start..end].to_vec())),
        ColumnData::Text(v) => Arc::new(StringArray::from(v[start..end].to_vec())),
        ColumnData::Bool(v) => Arc::new(BooleanArray::from(v[start..end].to_vec())),
        ColumnData::UInt16(v) => Arc::new(UInt16Array::from(v[start..end].to_vec())),
        ColumnData::UInt32(v) => Arc::new(UInt32Array::from(v[start..end].to_vec())),
    }
}

fn write_to<W: Write>(table: &Table, w: W) -> Result<(), RecorderError> {
    let schema = Arc::new(arrow_schema(table));
    let mut writer = FileWriter::try_new(w, &schema)?;
    let total = table.num_rows();
    let mut bounds = Vec::new();
    let mut start = 0;
    for &n in &table.chunks {
        bounds.push((start, (start + n).min(total)));
        start += n;
    }
    if start < total {
        bounds.push((start, total));
    }
    for (a, b) in bounds {
        let arrays: Vec<ArrayRef> = table.columns.iter().map(|c| slice_array(&c.data, a, b)).collect();
        writer.write(&RecordBatch::try_new(schema.clone(), arrays)?)?;
    }
    writer.finish()?;
    Ok(())
}

/// Writes `table` with one record batch per chunk. Parent directories are created.
pub fn write_ipc(table: &Table, path: &Path) -> Result<(), RecorderError> {
    let io = |source| RecorderError::Io { path: path.display().to_string(), source };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io)?;
    }
    let file = File::create(path).map_err(io)?;
    let mut w = BufWriter::new(file);
    write_to(table, &mut w)?;
    w.flush().map_err(io)?;
    Ok(())
}

pub fn write_ipc_bytes(table: &Table) -> Result<Vec<u8>, RecorderError> {
    let mut buf = Vec::new();
    write_to(table, &mut buf)?;
    Ok(buf)
}

fn column_from(array: &dyn Array, field: &Field) -> Result<ColumnData, RecorderError> {
    fn collect<A, T>(a: &dyn Array, get: impl Fn(&A, usize) -> T) -> Vec<Option<T>>
    where
        A: Array + 'static,
    {
        let a = a.as_any().downcast_ref::<A>().expect("type checked by caller");
        (0..a.len()).map(|i| if a.is_null(i) { None } else { Some(get(a, i)) }).collect()
    }
    Ok(match field.data_type() {
        DataType::Int32 => ColumnData::Int32(collect::<Int32Array, _>(array, |a, i| a.value(i))),
        DataType::Float64 => ColumnData::Float64(collect::<Float64Array, _>(array, |a, i| a.value(i))),
        DataType::Utf8 => ColumnData::Text(collect::<StringArray, _>(array, |a, i| a.value(i).to_string())),
        DataType::Boolean => ColumnData::Bool(collect::<BooleanArray, _>(array, |a, i| a.value(i))),
        DataType::UInt16 => ColumnData::UInt16(collect::<UInt16Array, _>(array, |a, i| a.value(i))),
        DataType::UInt32 => ColumnData::UInt32(collect::<UInt32Array, _>(array, |a, i| a.value(i))),
        other => {
            return Err(RecorderError::SchemaMismatch(format!(
                "column `{}` has unsupported type {other}",
                field.name()
            )))
        }
    })
}

fn read_from<R: Read + Seek>(r: R) -> Result<Table, RecorderError> {
    let reader = FileReader::try_new(r, None)?;
    let schema = reader.schema();
    let mut table = Table {
        columns: schema
            .fields()
            .iter()
            .map(|f| {
                let ty = match f.data_type() {
                    DataType::Int32 => ColumnType::Int32,
                    DataType::Float64 => ColumnType::Float64,
                    DataType::Utf8 => ColumnType::Text,
                    DataType::Boolean => ColumnType::Bool,
                    DataType::UInt16 => ColumnType::UInt16,
                    DataType::UInt32 => ColumnType::UInt32,
                    _ => ColumnType::Text,
                };
                Column { name: f.name().clone(), data: ColumnData::new(ty), nullable: f.is_nullable() }
            })
            .collect(),
        metadata: schema.metadata.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
        chunks: Vec::new(),
    };
    for batch in reader {
        let batch = batch?;
        let mut part = Table { columns: Vec::new(), metadata: Default::default(), chunks: vec![batch.num_rows()] };
        for (array, field) in batch.columns().iter().zip(schema.fields()) {
            part.columns.push(Column {
                name: field.name().clone(),
                data: column_from(array.as_ref(), field)?,
                nullable: field.is_nullable(),
            });
        }
        table.append(&part)?;
    }
    Ok(table)
}

pub fn read_ipc(path: &Path) -> Result<Table, RecorderError> {
    let file = File::open(path).map_err(|source| RecorderError::Io { path: path.display().to_string(), source })?;
    read_from(std::io::BufReader::new(file))
}

pub fn read_ipc_bytes(bytes: &[u8]) -> Result<Table, RecorderError> {
    read_from(Cursor::new(bytes))
}

#[cfg(test)]
mod tests {
    use super::super::{FixedRow, SchemaBuilder, Value};
    use super::*;

    #[test]
    fn all_types_round_trip() {
        let mut b = SchemaBuilder::new();
        b.add_int32("i").unwrap();
        b.add_float64("f").unwrap();
        b.add_text("s").unwrap();
        b.add_bool("b").unwrap();
        let schema = b.finish();
        let mut t = Table::with_schema(&schema);
        t.metadata.insert(CONFIGURATION_KEY.into(), "seed: 3\n".into());
        for k in 0..5u16 {
            let fixed = FixedRow {
                time: 0.1 * k as f64,
                category: format!("cat{k}"),
                id: k,
                ticks: 6 * k as u32,
                x: -1.0 / 3.0 * k as f64,
                y: f64::MAX,
                angle: if k == 2 { f64::NAN } else { 1e-300 },
            };
            let custom = if k == 3 {
                vec![Value::Null, Value::Null, Value::Null, Value::Null]
            } else {
                vec![Value::Int32(-(k as i32)), Value::Float64(0.1 + k as f64), Value::Text("é".into()), Value::Bool(k % 2 == 0)]
            };
            t.push_row(fixed.into_values(custom)).unwrap();
            t.close_chunk();
        }
        let bytes = write_ipc_bytes(&t).unwrap();
        let back = read_ipc_bytes(&bytes).unwrap();
        assert_eq!(back.metadata, t.metadata);
        assert_eq!(back.chunks, t.chunks);
        assert_eq!(back.column_names(), t.column_names());
        for (a, b) in back.columns.iter().zip(&t.columns) {
            for r in 0..t.num_rows() {
                match (a.data.get(r), b.data.get(r)) {
                    (Value::Float64(x), Value::Float64(y)) => assert_eq!(x.to_bits(), y.to_bits()),
                    (x, y) => assert_eq!(x, y),
                }
            }
        }
    }

    #[test]
    fn empty_table_keeps_metadata() {
        let mut t = Table::with_schema(&Default::default());
        t.metadata.insert(CONFIGURATION_KEY.into(), "a: 1\n".into());
        let back = read_ipc_bytes(&write_ipc_bytes(&t).unwrap()).unwrap();
        assert_eq!(back.num_rows(), 0);
        assert_eq!(back.metadata.get(CONFIGURATION_KEY).unwrap(), "a: 1\n");
    }
}
