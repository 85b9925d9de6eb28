use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Read, Write};
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Map, Value};

use super::record::{MetadataRecord, RejectReason, RECORD_FIELDS};
use super::{Catalog, Insert};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordFormat {
    Csv,
    Jsonl,
}

impl RecordFormat {
    /// Guess from a file extension; anything but `.jsonl`/`.ndjson`/`.json` is CSV.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "ndjson" | "json") => RecordFormat::Jsonl,
            _ => RecordFormat::Csv,
        }
    }
}

impl FromStr for RecordFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(RecordFormat::Csv),
            "jsonl" | "ndjson" => Ok(RecordFormat::Jsonl),
            other => Err(Error::invalid(format!("unknown record format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RejectedRow {
    /// 1-based line number in the input.
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub inserted: usize,
    pub rejected: usize,
    pub duplicates: usize,
    pub rejects: Vec<RejectedRow>,
}

impl IngestReport {
    fn reject(&mut self, line: u64, reason: impl ToString) {
        self.rejected += 1;
        self.rejects.push(RejectedRow {
            line,
            reason: reason.to_string(),
        });
    }

    fn absorb(&mut self, line: u64, outcome: std::result::Result<Insert, RejectReason>) {
        match outcome {
            Ok(Insert::Inserted) => self.inserted += 1,
            Ok(Insert::Duplicate) => self.duplicates += 1,
            Err(reason) => self.reject(line, reason),
        }
    }
}

impl Catalog {
    /// Streams records into the catalog. Bad rows are counted and skipped;
    /// only I/O failures and a missing CSV header abort.
    pub fn ingest<R: Read>(&mut self, reader: R, format: RecordFormat) -> Result<IngestReport> {
        match format {
            RecordFormat::Csv => self.ingest_csv(reader),
            RecordFormat::Jsonl => self.ingest_jsonl(std::io::BufReader::new(reader)),
        }
    }

    fn ingest_csv<R: Read>(&mut self, reader: R) -> Result<IngestReport> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        for required in ["cell", "source", "product_id", "time_start"] {
            if !headers.iter().any(|h| h == required) {
                return Err(Error::invalid(format!("CSV header lacks required column {required:?}")));
            }
        }
        let mut report = IngestReport::default();
        let mut row = csv::StringRecord::new();
        loop {
            let line = rdr.position().line();
            match rdr.read_record(&mut row) {
                Ok(false) => break,
                Ok(true) => {
                    let line = row.position().map(|p| p.line()).unwrap_or(line);
                    let fields = headers.iter().cloned().zip(row.iter().map(str::to_string)).collect();
                    let outcome = MetadataRecord::from_fields(fields).and_then(|r| self.insert(r));
                    report.absorb(line, outcome);
                }
                Err(e) if matches!(e.kind(), csv::ErrorKind::Io(_)) => return Err(e.into()),
                Err(e) => {
                    let line = e.position().map(|p| p.line()).unwrap_or(line);
                    report.reject(line, RejectReason::Malformed(e.to_string()));
                }
            }
        }
        Ok(report)
    }

    fn ingest_jsonl<R: BufRead>(&mut self, reader: R) -> Result<IngestReport> {
        let mut report = IngestReport::default();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx as u64 + 1;
            if line.trim().is_empty() {
                continue;
            }
            let outcome = json_fields(&line)
                .and_then(MetadataRecord::from_fields)
                .and_then(|r| self.insert(r));
            report.absorb(lineno, outcome);
        }
        Ok(report)
    }

    fn extra_columns(&self) -> BTreeSet<&str> {
        self.records()
            .flat_map(|r| r.extra.keys().map(String::as_str))
            .filter(|k| !RECORD_FIELDS.contains(k))
            .collect()
    }

    /// Writes the schema columns followed by the sorted union of extra
    /// columns. LF line endings, RFC 4180 quoting.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let extras: Vec<&str> = self.extra_columns().into_iter().collect();
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        w.write_record(RECORD_FIELDS.iter().copied().chain(extras.iter().copied()))?;
        for r in self.records() {
            let values = r.schema_values();
            let extra_values = extras.iter().map(|k| r.extra.get(*k).map(String::as_str).unwrap_or(""));
            w.write_record(values.iter().map(String::as_str).chain(extra_values))?;
        }
        w.flush()?;
        Ok(())
    }

    /// One JSON object per record; absent schema fields are `null`.
    pub fn write_jsonl<W: Write>(&self, mut writer: W) -> Result<()> {
        for r in self.records() {
            serde_json::to_writer(&mut writer, &record_json(r))?;
            writer.write_all(b"\n")?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn write<W: Write>(&self, writer: W, format: RecordFormat) -> Result<()> {
        match format {
            RecordFormat::Csv => self.write_csv(writer),
            RecordFormat::Jsonl => self.write_jsonl(writer),
        }
    }
}

fn record_json(r: &MetadataRecord) -> Value {
    let mut obj = Map::new();
    let num = |v: Option<f64>| v.map(Value::from).unwrap_or(Value::Null);
    let text = |v: Option<String>| v.map(Value::from).unwrap_or(Value::Null);
    obj.insert("cell".into(), r.cell.to_string().into());
    obj.insert("source".into(), r.source.clone().into());
    obj.insert("product_id".into(), r.product_id.clone().into());
    obj.insert("time_start".into(), r.time_start.to_string().into());
    obj.insert("time_end".into(), text(r.time_end.map(|t| t.to_string())));
    obj.insert("cloud_fraction".into(), num(r.cloud_fraction));
    obj.insert("nodata_fraction".into(), num(r.nodata_fraction));
    obj.insert("crs_label".into(), text(r.crs_label.clone()));
    obj.insert("centre_lat".into(), num(r.centre_lat));
    obj.insert("centre_lon".into(), num(r.centre_lon));
    for (k, v) in &r.extra {
        obj.entry(k.clone()).or_insert_with(|| v.clone().into());
    }
    Value::Object(obj)
}

fn json_fields(line: &str) -> std::result::Result<BTreeMap<String, String>, RejectReason> {
    let value: Value = serde_json::from_str(line).map_err(|e| RejectReason::Malformed(e.to_string()))?;
    let Value::Object(obj) = value else {
        return Err(RejectReason::Malformed("line is not a JSON object".into()));
    };
    Ok(obj
        .into_iter()
        .map(|(k, v)| {
            let text = match v {
                Value::Null => String::new(),
                Value::String(s) => s,
                other => other.to_string(),
            };
            (k, text)
        })
        .collect())
}
