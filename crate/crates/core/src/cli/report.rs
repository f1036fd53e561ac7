//! Report documents. The header carries everything run-specific (version,
//! config echo, timing); the body depends only on the config and seed.

use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::{Command, RunConfig};
use crate::simulate::RngSpec;

pub const ARTIFACT: &str = "suspension-lab";
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Header {
    pub artifact: String,
    pub version: String,
    pub schema_version: u32,
    pub command: Command,
    pub config: RunConfig,
    pub rng: RngSpec,
    /// Seconds since the Unix epoch.
    pub generated_at: u64,
    pub runtime_ms: u64,
}

impl Header {
    pub fn new(command: Command, config: &RunConfig, generated_at: u64, runtime_ms: u64) -> Self {
        Self {
            artifact: ARTIFACT.into(),
            version: crate::VERSION.into(),
            schema_version: SCHEMA_VERSION,
            command,
            config: config.clone(),
            rng: config.rng,
            generated_at,
            runtime_ms,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub header: Header,
    pub body: Value,
}

impl Report {
    /// The body in its canonical serialization.
    pub fn body_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(&self.body).expect("json values always serialize")
    }
}

/// A per-row series for CSV output.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip decimal; empty for missing values.
pub fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_json<W: Write>(report: &Report, mut out: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, report)?;
    out.write_all(b"\n")
}

/// Header as `# key: value` comment lines, then the table.
pub fn write_csv<W: Write>(report: &Report, table: &Table, mut out: W) -> std::io::Result<()> {
    let h = &report.header;
    writeln!(out, "# artifact: {}", h.artifact)?;
    writeln!(out, "# version: {}", h.version)?;
    writeln!(out, "# schema_version: {}", h.schema_version)?;
    writeln!(out, "# command: {}", h.command.name())?;
    writeln!(out, "# rng: seed={} stream={}", h.rng.seed, h.rng.stream)?;
    writeln!(out, "# generated_at: {}", h.generated_at)?;
    writeln!(out, "# runtime_ms: {}", h.runtime_ms)?;
    writeln!(out, "# config: {}", serde_json::to_string(&h.config)?)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()
}
