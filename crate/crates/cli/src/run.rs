//! The `run` pipeline: integrals, pool, engine, analysis, one row per input.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;

use esvqe::adapt::{adapt_vqe, AdaptOptions};
use esvqe::analysis::{circuit_cost, fci_ground_state, Sector};
use esvqe::es::{es_vqe, EsOptions};
use esvqe::integrals::{parse_fcidump, IntegralSet};
use esvqe::parallel::{self, Execution};
use esvqe::pools::{
    extend_with_auxiliary, generate_qcc_pool, generate_uccgsd_pool, generate_uccsd_pool, screen_pool, OperatorPool,
    PoolConvention,
};
use esvqe::simulator::Statevector;
use esvqe::trace::{RunTrace, TraceHeader, TraceSummary, SCHEMA_VERSION};
use esvqe::vqe::{pool_vqe, Hamiltonian, MinimizeOptions};

use crate::config::{Format, Method, PoolKind, RunConfig};

/// Longest Pauli string in a QCC pool.
const QCC_MAX_WEIGHT: usize = 4;

/// One output row per input file.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub schema_version: u32,
    pub system: String,
    pub geometry: String,
    pub method: String,
    pub pool: Option<String>,
    pub e_method: f64,
    pub e_hf: f64,
    pub e_fci: f64,
    pub abs_error: f64,
    pub n_pool: usize,
    pub n_selected: usize,
    pub cnot_count: usize,
    pub stop_reason: Option<String>,
    pub wall_time_s: Option<f64>,
}

pub struct Input {
    pub path: PathBuf,
    pub system: String,
    pub geometry: String,
    pub integrals: IntegralSet,
}

/// Reads an FCIDUMP and its optional `<stem>.json` sidecar.
pub fn load_input(path: &Path) -> Result<Input> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let integrals = parse_fcidump(&text).with_context(|| format!("parsing {}", path.display()))?;
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let sidecar = path.with_extension("json");
    let meta: serde_json::Value = match std::fs::read_to_string(&sidecar) {
        Ok(t) => serde_json::from_str(&t).with_context(|| format!("parsing {}", sidecar.display()))?,
        Err(_) => serde_json::Value::Null,
    };
    let field = |k: &str| match &meta[k] {
        serde_json::Value::String(s) => Some(s.clone()),
        serde_json::Value::Number(n) => Some(n.to_string()),
        _ => None,
    };
    Ok(Input {
        path: path.to_path_buf(),
        system: field("name").unwrap_or_else(|| stem.clone()),
        geometry: field("geometry").unwrap_or(stem),
        integrals,
    })
}

pub fn build_pool(s: &IntegralSet, kind: PoolKind, convention: PoolConvention) -> esvqe::Result<OperatorPool> {
    let pool = match kind {
        PoolKind::Uccsd => generate_uccsd_pool(s, convention)?,
        PoolKind::Uccgsd => generate_uccgsd_pool(s, convention)?,
        PoolKind::Qcc => generate_qcc_pool(s.n_spin_orbitals(), QCC_MAX_WEIGHT)?,
        PoolKind::UccsdAux => extend_with_auxiliary(&generate_uccsd_pool(s, convention)?)?,
        PoolKind::UccgsdAux => extend_with_auxiliary(&generate_uccgsd_pool(s, convention)?)?,
    };
    Ok(screen_pool(&pool, s))
}

/// Runs one input to completion.
pub fn run_one(cfg: &RunConfig, input: &Input) -> Result<(ScanRow, RunTrace)> {
    let start = Instant::now();
    let s = &input.integrals;
    let h = Arc::new(Hamiltonian::from_integrals(s)?);
    let hf = Statevector::hf_state(s.n_spin_orbitals(), s.n_electrons())?;
    let e_hf = h.energy(&hf)?;
    let fci = fci_ground_state(&h, Sector::of(s))?;
    let e_fci = fci.energy;
    let target = cfg.fci_target.then_some(e_fci);

    let pool = if cfg.method.uses_pool() { Some(build_pool(s, cfg.pool, cfg.pool_convention.into())?) } else { None };
    let header = TraceHeader {
        schema_version: SCHEMA_VERSION,
        method: cfg.method.name().to_string(),
        system: input.system.clone(),
        geometry: input.geometry.clone(),
        pool: pool.as_ref().map(|_| cfg.pool.name().to_string()),
        pool_size: pool.as_ref().map_or(0, OperatorPool::len),
        n_qubits: s.n_spin_orbitals(),
        e_hf,
        e_fci: Some(e_fci),
        options: serde_json::to_value(cfg)?,
    };
    let plain = |header: TraceHeader, energy: f64| {
        let summary = TraceSummary {
            final_energy: energy,
            abs_error: Some((energy - e_fci).abs()),
            n_operators: 0,
            n_pool: header.pool_size,
            stop_reason: None,
            operators: Vec::new(),
            params: Vec::new(),
            cost: circuit_cost(&[]),
            counters: None,
            wall_time_s: None,
        };
        RunTrace { header, iterations: Vec::new(), summary }
    };

    let mut trace = match (cfg.method, &pool) {
        (Method::Hf, _) => plain(header, e_hf),
        (Method::Fci, _) => plain(header, e_fci),
        (Method::Vqe, Some(pool)) => {
            let opts = MinimizeOptions { gtol: cfg.gtol, max_iter: None, ..Default::default() };
            let (ansatz, r) = pool_vqe(&h, pool, &hf, &opts)?;
            let mut t = plain(header, r.energy);
            let ops = ansatz.ops();
            t.summary.n_operators = ops.len();
            t.summary.operators = ops.iter().map(|o| o.label().to_string()).collect();
            t.summary.params = r.params;
            t.summary.cost = circuit_cost(ops);
            t
        }
        (Method::EsVqe, Some(pool)) => {
            let opts = EsOptions {
                eps_a: cfg.eps_a,
                eps_b: cfg.eps_b,
                eps_c: cfg.eps_c,
                mode: cfg.opt_mode.into(),
                gtol: cfg.gtol,
                fci_target: target,
                max_iter: cfg.max_iter,
                execution: Execution::Parallel,
            };
            RunTrace::from_es(header, &es_vqe(&h, pool, &hf, &opts)?)
        }
        (Method::AdaptVqe, Some(pool)) => {
            let opts = AdaptOptions {
                grad_threshold: cfg.grad_threshold,
                gtol: cfg.gtol,
                fci_target: target,
                max_iter: cfg.max_iter,
                ..Default::default()
            };
            RunTrace::from_adapt(header, &adapt_vqe(&h, pool, &hf, &opts)?)
        }
        _ => unreachable!("pool-based methods always build a pool"),
    };
    let wall = cfg.timing.then(|| start.elapsed().as_secs_f64());
    trace.summary.wall_time_s = wall;

    let row = ScanRow {
        schema_version: SCHEMA_VERSION,
        system: input.system.clone(),
        geometry: input.geometry.clone(),
        method: cfg.method.name().to_string(),
        pool: trace.header.pool.clone(),
        e_method: trace.summary.final_energy,
        e_hf,
        e_fci,
        abs_error: (trace.summary.final_energy - e_fci).abs(),
        n_pool: trace.header.pool_size,
        n_selected: trace.summary.n_operators,
        cnot_count: trace.summary.cost.cnot_count,
        stop_reason: trace.summary.stop_reason.clone(),
        wall_time_s: wall,
    };
    Ok((row, trace))
}

fn trace_name(cfg: &RunConfig, input: &Input) -> String {
    let stem = input.path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    match cfg.method.uses_pool() {
        true => format!("{stem}.{}.{}.jsonl", cfg.method.name(), cfg.pool.name()),
        false => format!("{stem}.{}.jsonl", cfg.method.name()),
    }
}

/// Runs every input (in parallel when available) and writes rows and traces.
/// Rows keep input order.
pub fn run(cfg: &RunConfig) -> Result<()> {
    let inputs = cfg.fcidump.iter().map(|p| load_input(p)).collect::<Result<Vec<_>>>()?;
    let results = parallel::map(Execution::Parallel, &inputs, |input| {
        log::info!("{}: {} ({})", input.path.display(), cfg.method.name(), input.geometry);
        run_one(cfg, input).with_context(|| format!("running {}", input.path.display()))
    });
    let mut rows = Vec::with_capacity(results.len());
    let mut traces = Vec::with_capacity(results.len());
    for r in results {
        let (row, trace) = r?;
        rows.push(row);
        traces.push(trace);
    }
    if let Some(dir) = &cfg.trace_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (input, trace) in inputs.iter().zip(&traces) {
            let path = dir.join(trace_name(cfg, input));
            std::fs::write(&path, trace.to_json_lines()?).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    let text = render_rows(&rows, cfg.format)?;
    crate::write_output(cfg.out.as_deref(), &text)
}

pub fn render_rows(rows: &[ScanRow], format: Format) -> Result<String> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            if rows.is_empty() {
                w.write_record(HEADER)?;
            }
            for r in rows {
                w.serialize(r)?;
            }
            Ok(String::from_utf8(w.into_inner()?)?)
        }
        Format::JsonLines => {
            let mut out = String::new();
            for r in rows {
                out.push_str(&serde_json::to_string(r)?);
                out.push('\n');
            }
            Ok(out)
        }
    }
}

const HEADER: [&str; 14] = [
    "schema_version",
    "system",
    "geometry",
    "method",
    "pool",
    "e_method",
    "e_hf",
    "e_fci",
    "abs_error",
    "n_pool",
    "n_selected",
    "cnot_count",
    "stop_reason",
    "wall_time_s",
];
