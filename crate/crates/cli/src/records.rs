//! Output files of a run: `summary.txt`, `records.jsonl`, `witnesses.jsonl`
//! and `timings.jsonl`.
//!
//! Record and witness files contain no wall-clock data, so a fixed config and
//! seed reproduce them byte for byte. Wall times live in `timings.jsonl`,
//! indexed by each record's `timing_ref`.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use matlip::linalg::CMatrix;
use matlip::MatrixElement;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const RECORDS_FILE: &str = "records.jsonl";
pub const WITNESSES_FILE: &str = "witnesses.jsonl";
pub const TIMINGS_FILE: &str = "timings.jsonl";
pub const SUMMARY_FILE: &str = "summary.txt";

/// One computed quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Record {
    pub task: String,
    /// Position of the input item within the run.
    pub index: usize,
    /// Hex hash of the exact input values.
    pub inputs_fingerprint: String,
    pub level: usize,
    pub value: f64,
    /// Line of `witnesses.jsonl` holding the optimizing element.
    pub witness_ref: Option<usize>,
    pub diagnostics: Map<String, Value>,
    pub seed: u64,
    /// Line of `timings.jsonl` with the wall time of this record.
    pub timing_ref: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Witness {
    pub witness_ref: usize,
    pub level: usize,
    /// Coefficient blocks `x_i` as row-major `[re, im]` pairs.
    pub coeffs: Vec<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Timing {
    pub timing_ref: usize,
    pub task: String,
    pub index: usize,
    pub wall_seconds: f64,
}

fn encode(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

impl Witness {
    pub fn new(witness_ref: usize, a: &MatrixElement) -> Self {
        Self {
            witness_ref,
            level: a.level(),
            coeffs: a.coeffs().iter().map(encode).collect(),
        }
    }
}

/// Result of one input item before references are assigned.
#[derive(Debug, Clone)]
pub struct Item {
    pub fingerprint: u64,
    pub level: usize,
    pub value: f64,
    pub witness: Option<MatrixElement>,
    pub diagnostics: Map<String, Value>,
    pub wall_seconds: f64,
}

/// Everything a task writes.
#[derive(Debug, Default)]
pub struct Output {
    pub records: Vec<Record>,
    pub witnesses: Vec<Witness>,
    pub timings: Vec<Timing>,
    pub summary: Vec<String>,
}

impl Output {
    /// Appends items in input order, numbering witnesses and timings.
    pub fn push_items(&mut self, task: &str, seed: u64, items: Vec<Item>) {
        for (index, item) in items.into_iter().enumerate() {
            let witness_ref = item.witness.map(|w| {
                let r = self.witnesses.len();
                self.witnesses.push(Witness::new(r, &w));
                r
            });
            let timing_ref = self.timings.len();
            self.timings.push(Timing {
                timing_ref,
                task: task.to_string(),
                index,
                wall_seconds: item.wall_seconds,
            });
            self.records.push(Record {
                task: task.to_string(),
                index,
                inputs_fingerprint: format!("{:016x}", item.fingerprint),
                level: item.level,
                value: item.value,
                witness_ref,
                diagnostics: item.diagnostics,
                seed,
                timing_ref,
            });
        }
    }

    pub fn write(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        write_lines(&dir.join(RECORDS_FILE), &self.records)?;
        write_lines(&dir.join(WITNESSES_FILE), &self.witnesses)?;
        write_lines(&dir.join(TIMINGS_FILE), &self.timings)?;
        let mut summary = fs::File::create(dir.join(SUMMARY_FILE))?;
        for line in &self.summary {
            writeln!(summary, "{line}")?;
        }
        Ok(())
    }
}

fn write_lines<T: Serialize>(path: &Path, rows: &[T]) -> io::Result<()> {
    let mut out = io::BufWriter::new(fs::File::create(path)?);
    for row in rows {
        serde_json::to_writer(&mut out, row)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Parses a `records.jsonl` file.
pub fn read_records(path: &Path) -> io::Result<Vec<Record>> {
    fs::read_to_string(path)?
        .lines()
        .map(|line| serde_json::from_str(line).map_err(io::Error::from))
        .collect()
}
