//! Row-oriented result emission: CSV or key-value blocks, byte-deterministic
//! for a fixed config and seed (timings are zeroed unless repeats are on).

use std::io::Write;

use crate::cli::config::OutputFormat;
use crate::error::{Result, SinhError};

/// One result row: the input point(s), the value, and the audit columns.
#[derive(Debug, Clone)]
pub struct Row {
    pub label: String,
    pub point: f64,
    pub value: f64,
    pub method: &'static str,
    pub eps: f64,
    pub zeta: f64,
    pub n: usize,
    pub elapsed_us: f64,
    /// Optional benchmark column (table reproduction).
    pub benchmark: Option<f64>,
}

impl Row {
    pub fn error(&self) -> Option<f64> {
        self.benchmark.map(|b| self.value - b)
    }
}

pub fn write_rows<W: Write>(out: &mut W, rows: &[Row], format: OutputFormat) -> Result<()> {
    let io = |e: std::io::Error| SinhError::Config(format!("write failed: {e}"));
    match format {
        OutputFormat::Csv => {
            let with_benchmark = rows.iter().any(|r| r.benchmark.is_some());
            if with_benchmark {
                writeln!(out, "label,point,value,benchmark,error,method,eps,zeta,n,elapsed_us")
                    .map_err(io)?;
            } else {
                writeln!(out, "label,point,value,method,eps,zeta,n,elapsed_us").map_err(io)?;
            }
            for r in rows {
                if with_benchmark {
                    writeln!(
                        out,
                        "{},{:.17e},{:.17e},{},{},{},{:.3e},{:.12e},{},{:.1}",
                        r.label,
                        r.point,
                        r.value,
                        r.benchmark.map(|b| format!("{b:.17e}")).unwrap_or_default(),
                        r.error().map(|e| format!("{e:.3e}")).unwrap_or_default(),
                        r.method,
                        r.eps,
                        r.zeta,
                        r.n,
                        r.elapsed_us
                    )
                    .map_err(io)?;
                } else {
                    writeln!(
                        out,
                        "{},{:.17e},{:.17e},{},{:.3e},{:.12e},{},{:.1}",
                        r.label, r.point, r.value, r.method, r.eps, r.zeta, r.n, r.elapsed_us
                    )
                    .map_err(io)?;
                }
            }
        }
        OutputFormat::Kv => {
            for (i, r) in rows.iter().enumerate() {
                writeln!(out, "row = {i}").map_err(io)?;
                writeln!(out, "label = {}", r.label).map_err(io)?;
                writeln!(out, "point = {:.17e}", r.point).map_err(io)?;
                writeln!(out, "value = {:.17e}", r.value).map_err(io)?;
                if let Some(b) = r.benchmark {
                    writeln!(out, "benchmark = {b:.17e}").map_err(io)?;
                    writeln!(out, "error = {:.3e}", r.value - b).map_err(io)?;
                }
                writeln!(out, "method = {}", r.method).map_err(io)?;
                writeln!(out, "eps = {:.3e}", r.eps).map_err(io)?;
                writeln!(out, "zeta = {:.12e}", r.zeta).map_err(io)?;
                writeln!(out, "n = {}", r.n).map_err(io)?;
                writeln!(out, "elapsed-microseconds = {:.1}", r.elapsed_us).map_err(io)?;
                writeln!(out).map_err(io)?;
            }
        }
    }
    Ok(())
}

/// Mean elapsed microseconds of `repeat` re-evaluations (0 => skip timing so
/// identical config + seed gives byte-identical artifacts).
pub fn time_us<F: FnMut()>(repeat: usize, mut f: F) -> f64 {
    if repeat == 0 {
        return 0.0;
    }
    let start = std::time::Instant::now();
    for _ in 0..repeat {
        f();
    }
    start.elapsed().as_secs_f64() * 1e6 / repeat as f64
}
