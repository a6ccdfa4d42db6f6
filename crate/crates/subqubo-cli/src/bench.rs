//! Bench output records: JSONL rows, the CSV projection, and annotated trace
//! events.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use subqubo::{IterationTrace, SolveResult};

/// One row of bench output: a single (instance, method, d) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance_id: String,
    pub n: usize,
    pub kind: String,
    pub method: String,
    pub d: usize,
    pub subsolver: String,
    pub value: f64,
    pub subroutine_calls: usize,
    pub total_optimizer_evals: usize,
    pub wall_time: f64,
    pub seed: u64,
}

impl BenchRecord {
    pub fn from_result(result: &SolveResult, kind: &str, method: &str, subsolver: &str) -> Self {
        Self {
            instance_id: result.instance_id.clone(),
            n: result.best.bits().len(),
            kind: kind.to_string(),
            method: method.to_string(),
            d: result.config.sub_size,
            subsolver: subsolver.to_string(),
            value: result.best.value(),
            subroutine_calls: result.metrics.subroutine_calls,
            total_optimizer_evals: result.metrics.total_optimizer_evals,
            wall_time: result.metrics.wall_time,
            seed: result.config.seed,
        }
    }
}

/// Trace event annotated with the grid cell it came from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceRecord {
    pub instance_id: String,
    pub method: String,
    pub d: usize,
    #[serde(flatten)]
    pub event: IterationTrace,
}

pub fn write_jsonl(path: &Path, records: &[BenchRecord]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    for record in records {
        serde_json::to_writer(&mut out, record)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_csv(path: &Path, records: &[BenchRecord]) -> Result<()> {
    let mut writer =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for record in records {
        writer.serialize(record)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_trace_jsonl(path: &Path, records: &[TraceRecord]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    for record in records {
        serde_json::to_writer(&mut out, record)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_jsonl(path: &Path) -> Result<Vec<BenchRecord>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .filter(|line| !line.trim().is_empty())
        .map(|line| serde_json::from_str(line).context("parsing bench record"))
        .collect()
}
