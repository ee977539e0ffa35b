//! Catalog CSV reading and writing.
//!
//! Header (exact): `id,model_family,platform,accuracy,latency_ms,energy_mj,memory_mb,storage_mb`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use swarmids_core::{Catalog, CatalogError, ImplementationProfile};
use thiserror::Error;

pub const HEADER: [&str; 8] = [
    "id",
    "model_family",
    "platform",
    "accuracy",
    "latency_ms",
    "energy_mj",
    "memory_mb",
    "storage_mb",
];

/// Row numbers are 1-based data rows; the header is row 0.
#[derive(Debug, Error)]
pub enum CatalogIoError {
    #[error("cannot read catalog: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad header: expected `{}`, found `{found}`", HEADER.join(","))]
    Header { found: String },
    #[error("row {row}, field `{field}`: {message}")]
    Parse { row: usize, field: String, message: String },
    #[error("row {row}, field `{field}`: {message}")]
    Validation { row: usize, field: String, message: String },
}

impl CatalogIoError {
    pub fn row_and_field(&self) -> Option<(usize, &str)> {
        match self {
            Self::Parse { row, field, .. } | Self::Validation { row, field, .. } => Some((*row, field)),
            _ => None,
        }
    }
}

fn csv_error(e: csv::Error, row: usize) -> CatalogIoError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CatalogIoError::Io(io),
        other => CatalogIoError::Parse { row, field: "row".into(), message: format!("{other:?}") },
    }
}

fn parse_row(record: &csv::StringRecord, row: usize) -> Result<ImplementationProfile, CatalogIoError> {
    let parse_err = |field: &str, message: String| CatalogIoError::Parse { row, field: field.into(), message };
    if record.len() != HEADER.len() {
        return Err(parse_err("row", format!("expected {} fields, found {}", HEADER.len(), record.len())));
    }
    let number = |i: usize| -> Result<f64, CatalogIoError> {
        let raw = record[i].trim();
        raw.parse::<f64>()
            .map_err(|e| parse_err(HEADER[i], format!("`{raw}` is not a number ({e})")))
    };
    Ok(ImplementationProfile {
        id: record[0].trim().to_string(),
        model_family: record[1].trim().parse().map_err(|e| parse_err("model_family", e))?,
        platform: record[2].trim().parse().map_err(|e| parse_err("platform", e))?,
        accuracy: number(3)?,
        latency_ms: number(4)?,
        energy_mj: number(5)?,
        memory_mb: number(6)?,
        storage_mb: number(7)?,
    })
}

/// Parses and validates a catalog, keeping row order.
pub fn read_catalog<R: Read>(reader: R) -> Result<Catalog, CatalogIoError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(e, 0))?.clone();
    if header.iter().map(str::trim).ne(HEADER) {
        return Err(CatalogIoError::Header { found: header.iter().collect::<Vec<_>>().join(",") });
    }
    let mut entries = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| csv_error(e, row))?;
        entries.push(parse_row(&record, row)?);
    }
    Catalog::new(entries).map_err(|CatalogError::Validation { index, field, message }| {
        CatalogIoError::Validation { row: index + 1, field: field.into(), message }
    })
}

pub fn load_catalog(path: &Path) -> Result<Catalog, CatalogIoError> {
    read_catalog(File::open(path)?)
}

pub fn write_catalog<W: Write>(catalog: &Catalog, writer: W) -> Result<(), CatalogIoError> {
    let mut w = csv::Writer::from_writer(writer);
    let to_io = |e: csv::Error| CatalogIoError::Io(e.into());
    w.write_record(HEADER).map_err(to_io)?;
    for p in catalog {
        w.write_record([
            p.id.clone(),
            p.model_family.label(),
            p.platform.label().to_string(),
            p.accuracy.to_string(),
            p.latency_ms.to_string(),
            p.energy_mj.to_string(),
            p.memory_mb.to_string(),
            p.storage_mb.to_string(),
        ])
        .map_err(to_io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn catalog_to_csv(catalog: &Catalog) -> String {
    let mut buf = Vec::new();
    write_catalog(catalog, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("catalog CSV is UTF-8")
}
