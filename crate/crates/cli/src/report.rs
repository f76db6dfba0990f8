//! Comparison tables built from run traces. Nothing is recomputed: every
//! number comes straight from a trace summary.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};

use esvqe::trace::RunTrace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Table,
    Csv,
}

#[derive(Clone, Debug, Args)]
pub struct ReportArgs {
    /// Run-trace files (JSON lines).
    pub traces: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    pub format: ReportFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

struct Cell {
    abs_error: Option<f64>,
    n_operators: usize,
    n_pool: usize,
}

type Row = ((String, String), Vec<Option<Cell>>);

/// Rows are (system, geometry) pairs and columns are method labels, both in
/// order of first appearance.
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Row>,
}

fn label(t: &RunTrace) -> String {
    match &t.header.pool {
        Some(p) => format!("{}[{p}]", t.header.method),
        None => t.header.method.clone(),
    }
}

pub fn build_table(traces: &[RunTrace]) -> Table {
    let mut columns: Vec<String> = Vec::new();
    for t in traces {
        let l = label(t);
        if !columns.contains(&l) {
            columns.push(l);
        }
    }
    let mut rows: Vec<Row> = Vec::new();
    for t in traces {
        let key = (t.header.system.clone(), t.header.geometry.clone());
        let i = match rows.iter().position(|(k, _)| *k == key) {
            Some(i) => i,
            None => {
                rows.push((key, (0..columns.len()).map(|_| None).collect()));
                rows.len() - 1
            }
        };
        let j = columns.iter().position(|c| *c == label(t)).unwrap();
        rows[i].1[j] =
            Some(Cell { abs_error: t.summary.abs_error, n_operators: t.summary.n_operators, n_pool: t.summary.n_pool });
    }
    Table { columns, rows }
}

impl Table {
    fn header(&self) -> Vec<String> {
        let mut h = vec!["system".to_string(), "geometry".to_string()];
        for c in &self.columns {
            h.push(format!("{c} abs_error"));
            h.push(format!("{c} n_operators"));
            h.push(format!("{c} n_pool"));
        }
        h
    }

    fn cells(&self, fmt: impl Fn(f64) -> String) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|((system, geometry), cells)| {
                let mut r = vec![system.clone(), geometry.clone()];
                for c in cells {
                    match c {
                        Some(c) => {
                            r.push(c.abs_error.map(&fmt).unwrap_or_default());
                            r.push(c.n_operators.to_string());
                            r.push(c.n_pool.to_string());
                        }
                        None => r.extend([String::new(), String::new(), String::new()]),
                    }
                }
                r
            })
            .collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header())?;
        for r in self.cells(|x| x.to_string()) {
            w.write_record(r)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn to_text(&self) -> String {
        let header = self.header();
        let body = self.cells(|x| format!("{x:.3e}"));
        let widths: Vec<usize> = (0..header.len())
            .map(|j| body.iter().map(|r| r[j].len()).chain([header[j].len()]).max().unwrap_or(0))
            .collect();
        let line = |r: &[String]| {
            let cols: Vec<String> = r
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(j, (c, &w))| if j < 2 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                .collect();
            cols.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&header);
        for r in &body {
            out.push_str(&line(r));
        }
        out
    }
}

pub fn report(args: &ReportArgs) -> Result<()> {
    let mut traces = Vec::with_capacity(args.traces.len());
    for p in &args.traces {
        let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        traces.push(RunTrace::parse(&text).with_context(|| format!("reading {}", p.display()))?);
    }
    let table = build_table(&traces);
    let text = match args.format {
        ReportFormat::Table => table.to_text(),
        ReportFormat::Csv => table.to_csv()?,
    };
    crate::write_output(args.out.as_deref(), &text)
}
