//! Report writing: JSON to a file or stdout, CSV rows alongside.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use serde_json::{json, Value};

/// One `parameter,value,diagnostics` record.
#[derive(Debug, Clone, Serialize)]
pub struct CsvRow {
    pub parameter: String,
    pub value: f64,
    pub diagnostics: String,
}

impl CsvRow {
    pub fn new(parameter: &str, value: f64, diagnostics: &str) -> Self {
        CsvRow {
            parameter: parameter.to_string(),
            value,
            diagnostics: diagnostics.to_string(),
        }
    }
}

pub struct Sink {
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
    seed: Option<u64>,
    pub rows: Vec<CsvRow>,
}

impl Sink {
    pub fn new(out: Option<PathBuf>, csv: Option<PathBuf>, seed: Option<u64>) -> Self {
        Sink {
            out,
            csv,
            seed,
            rows: Vec::new(),
        }
    }

    /// JSON goes to `--out` or stdout; CSV only when `--csv` was given.
    pub fn finish_json(self, body: Value) -> anyhow::Result<()> {
        if let Some(p) = &self.csv {
            write_csv(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?, &self.rows)?;
        }
        let body = self.tag(body);
        match &self.out {
            Some(p) => write_json(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?, &body),
            None => write_json(std::io::stdout().lock(), &body),
        }
    }

    /// Sweeps are CSV first: without `--csv` the rows go to stdout, and JSON is only
    /// written when `--out` asks for it.
    pub fn finish_sweep(self, body: Value) -> anyhow::Result<()> {
        match &self.csv {
            Some(p) => write_csv(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?, &self.rows)?,
            None if self.out.is_none() => write_csv(std::io::stdout().lock(), &self.rows)?,
            None => {}
        }
        if let Some(p) = &self.out {
            let body = self.tag(body);
            write_json(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?, &body)?;
        }
        Ok(())
    }

    fn tag(&self, mut body: Value) -> Value {
        if let (Some(seed), Value::Object(map)) = (self.seed, &mut body) {
            map.insert("seed".into(), json!(seed));
        }
        body
    }
}

fn write_json(mut w: impl Write, body: &Value) -> anyhow::Result<()> {
    serde_json::to_writer_pretty(&mut w, body)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_csv(w: impl Write, rows: &[CsvRow]) -> anyhow::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    if rows.is_empty() {
        wr.write_record(["parameter", "value", "diagnostics"])?;
    }
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

/// Reads `(parameter, value)` pairs from a sweep CSV; the parameter must be numeric.
pub fn read_sweep(path: &Path) -> anyhow::Result<Vec<(f64, f64)>> {
    let mut rd = csv::Reader::from_path(path)?;
    let headers = rd.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| super::usage(format!("{}: missing `{name}` column", path.display())))
    };
    let (pc, vc) = (col("parameter")?, col("value")?);
    let mut out = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let num = |c: usize| -> anyhow::Result<f64> {
            rec.get(c)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| super::usage(format!("{}: row {} is not numeric", path.display(), i + 1)))
        };
        out.push((num(pc)?, num(vc)?));
    }
    Ok(out)
}
