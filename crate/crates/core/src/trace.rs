//! Run traces: JSON-lines files with a header, one record per iteration and
//! a summary. ES-VQE, ADAPT-VQE and the plain methods share the schema.

use serde::{Deserialize, Serialize};

use crate::adapt::AdaptRunRecord;
use crate::analysis::{circuit_cost, CostReport};
use crate::error::{Error, Result};
use crate::es::{EsRunRecord, EvalCounters};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub schema_version: u32,
    pub method: String,
    pub system: String,
    pub geometry: String,
    pub pool: Option<String>,
    pub pool_size: usize,
    pub n_qubits: usize,
    pub e_hf: f64,
    pub e_fci: Option<f64>,
    /// Method settings, recorded verbatim.
    #[serde(default)]
    pub options: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceIteration {
    pub k: usize,
    pub candidates: Vec<String>,
    pub accepted: bool,
    pub energy: f64,
    pub abs_error: Option<f64>,
    pub n_operators: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub final_energy: f64,
    pub abs_error: Option<f64>,
    pub n_operators: usize,
    pub n_pool: usize,
    pub stop_reason: Option<String>,
    pub operators: Vec<String>,
    pub params: Vec<f64>,
    pub cost: CostReport,
    pub counters: Option<EvalCounters>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum Line {
    Header(TraceHeader),
    Iteration(TraceIteration),
    Summary(TraceSummary),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace {
    pub header: TraceHeader,
    pub iterations: Vec<TraceIteration>,
    pub summary: TraceSummary,
}

impl RunTrace {
    pub fn from_es(header: TraceHeader, r: &EsRunRecord) -> Self {
        let e_fci = header.e_fci.or(r.e_fci);
        let err = |e: f64| e_fci.map(|f| (e - f).abs());
        let iterations = r
            .iterations
            .iter()
            .map(|it| TraceIteration {
                k: it.k,
                candidates: it.candidates.clone(),
                accepted: it.accepted,
                energy: it.energy,
                abs_error: err(it.energy),
                n_operators: it.n_operators,
            })
            .collect();
        let ops = r.ansatz.ops();
        let summary = TraceSummary {
            final_energy: r.final_energy,
            abs_error: err(r.final_energy),
            n_operators: ops.len(),
            n_pool: header.pool_size,
            stop_reason: Some(r.stop_reason.name().to_string()),
            operators: ops.iter().map(|o| o.label().to_string()).collect(),
            params: r.ansatz.params().to_vec(),
            cost: circuit_cost(ops),
            counters: Some(r.counters),
            wall_time_s: None,
        };
        Self { header, iterations, summary }
    }

    pub fn from_adapt(header: TraceHeader, r: &AdaptRunRecord) -> Self {
        let e_fci = header.e_fci.or(r.e_fci);
        let err = |e: f64| e_fci.map(|f| (e - f).abs());
        let iterations = r
            .iterations
            .iter()
            .map(|it| TraceIteration {
                k: it.k,
                candidates: vec![it.selected.clone()],
                accepted: true,
                energy: it.energy,
                abs_error: err(it.energy),
                n_operators: it.n_operators,
            })
            .collect();
        let ops = r.ansatz.ops();
        let summary = TraceSummary {
            final_energy: r.final_energy,
            abs_error: err(r.final_energy),
            n_operators: ops.len(),
            n_pool: header.pool_size,
            stop_reason: Some(r.stop_reason.name().to_string()),
            operators: ops.iter().map(|o| o.label().to_string()).collect(),
            params: r.ansatz.params().to_vec(),
            cost: circuit_cost(ops),
            counters: Some(r.counters),
            wall_time_s: None,
        };
        Self { header, iterations, summary }
    }

    pub fn to_json_lines(&self) -> Result<String> {
        let mut out = serde_json::to_string(&Line::Header(self.header.clone()))?;
        out.push('\n');
        for it in &self.iterations {
            out.push_str(&serde_json::to_string(&Line::Iteration(it.clone()))?);
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(&Line::Summary(self.summary.clone()))?);
        out.push('\n');
        Ok(out)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut header = None;
        let mut iterations = Vec::new();
        let mut summary = None;
        for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let value: serde_json::Value = serde_json::from_str(line)?;
            if n == 0 {
                let version = value.get("schema_version").and_then(|v| v.as_u64());
                if version != Some(u64::from(SCHEMA_VERSION)) {
                    return Err(Error::Schema(format!(
                        "expected schema_version {SCHEMA_VERSION}, found {}",
                        version.map_or("none".to_string(), |v| v.to_string())
                    )));
                }
            }
            let parsed: Line =
                serde_json::from_value(value).map_err(|e| Error::Schema(format!("line {}: {e}", n + 1)))?;
            match (parsed, n) {
                (Line::Header(h), 0) => header = Some(h),
                (Line::Iteration(it), _) if header.is_some() && summary.is_none() => iterations.push(it),
                (Line::Summary(s), _) if header.is_some() && summary.is_none() => summary = Some(s),
                _ => return Err(Error::Schema(format!("line {}: record out of order", n + 1))),
            }
        }
        match (header, summary) {
            (Some(header), Some(summary)) => Ok(Self { header, iterations, summary }),
            (None, _) => Err(Error::Schema("missing header record".into())),
            (_, None) => Err(Error::Schema("missing summary record".into())),
        }
    }
}
