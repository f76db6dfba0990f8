//! ADAPT-VQE: grow the ansatz by the operator with the largest energy
//! gradient on the current state, re-optimizing everything after each step.

use std::sync::Arc;

use log::{debug, info};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::es::{EvalCounters, StopReason};
use crate::parallel::{self, Execution};
use crate::pools::OperatorPool;
use crate::simulator::Statevector;
use crate::vqe::{minimize, AnsatzState, Hamiltonian, MinimizeOptions};
use crate::KCAL_PER_MOL;

/// `dE/dθ_i` at `θ_i = 0` for every pool entry appended to `state`:
/// `2 Re⟨Hψ|G_i ψ⟩`.
pub fn adapt_scores(state: &Statevector, pool: &OperatorPool, h: &Hamiltonian, exec: Execution) -> Result<Vec<f64>> {
    let h_psi = h.apply(state)?;
    parallel::map(exec, pool.entries(), |e| -> Result<f64> {
        let g_psi = state.apply_qubit_operator(e.qubit_image())?;
        Ok(2.0 * h_psi.inner(&g_psi).re)
    })
    .into_iter()
    .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GradientNorm {
    #[default]
    Two,
    Max,
}

impl GradientNorm {
    pub fn of(self, v: &[f64]) -> f64 {
        match self {
            GradientNorm::Two => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            GradientNorm::Max => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptOptions {
    pub grad_threshold: f64,
    pub norm: GradientNorm,
    pub gtol: f64,
    pub fci_target: Option<f64>,
    pub max_iter: Option<usize>,
    pub execution: Execution,
}

impl Default for AdaptOptions {
    fn default() -> Self {
        Self {
            grad_threshold: 1e-2,
            norm: GradientNorm::Two,
            gtol: 1e-7,
            fci_target: None,
            max_iter: None,
            execution: Execution::Parallel,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptIteration {
    pub k: usize,
    pub selected: String,
    /// Norm of the score vector that led to this selection.
    pub score_norm: f64,
    pub energy: f64,
    pub params: Vec<f64>,
    pub n_operators: usize,
    pub abs_error: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct AdaptRunRecord {
    pub iterations: Vec<AdaptIteration>,
    pub reference_energy: f64,
    pub final_energy: f64,
    /// Score-vector norm at the last check.
    pub final_score_norm: f64,
    pub ansatz: AnsatzState,
    pub stop_reason: StopReason,
    pub counters: EvalCounters,
    pub e_fci: Option<f64>,
}

impl AdaptRunRecord {
    pub fn n_operators(&self) -> usize {
        self.ansatz.len()
    }

    pub fn abs_error(&self) -> Option<f64> {
        self.e_fci.map(|e| (self.final_energy - e).abs())
    }
}

pub fn adapt_vqe(
    h: &Arc<Hamiltonian>,
    pool: &OperatorPool,
    reference: &Statevector,
    opts: &AdaptOptions,
) -> Result<AdaptRunRecord> {
    if opts.grad_threshold.is_nan() || opts.grad_threshold <= 0.0 {
        return Err(Error::Validation(format!("gradient threshold must be positive, got {}", opts.grad_threshold)));
    }
    let mut ansatz = AnsatzState::new(h.clone(), reference.clone())?;
    let e_ref = ansatz.current_energy()?;
    let mut energy = e_ref;
    let mut counters = EvalCounters::default();
    let mut iterations: Vec<AdaptIteration> = Vec::new();
    let cap = opts.max_iter.unwrap_or(usize::MAX);
    let min_opts = MinimizeOptions { gtol: opts.gtol, ..Default::default() };
    let mut score_norm = f64::NAN;
    let stop_reason = loop {
        if opts.fci_target.is_some_and(|t| (energy - t).abs() <= KCAL_PER_MOL) {
            break StopReason::FciTarget;
        }
        if pool.is_empty() {
            break StopReason::PoolExhausted;
        }
        let state = ansatz.current_state();
        let scores = adapt_scores(&state, pool, h, opts.execution)?;
        counters.score_sweeps += 1;
        counters.scored_entries += scores.len();
        score_norm = opts.norm.of(&scores);
        if score_norm < opts.grad_threshold {
            break StopReason::GradientThreshold;
        }
        if iterations.len() >= cap {
            break StopReason::MaxIter;
        }
        // Largest |s|; the first maximum in generation order wins ties.
        let best = scores.iter().enumerate().fold(0, |b, (i, s)| if s.abs() > scores[b].abs() { i } else { b });
        let entry = &pool.entries()[best];
        ansatz.push(entry.clone(), 0.0)?;
        let theta0 = ansatz.params().to_vec();
        let r = minimize(&ansatz, &theta0, &min_opts)?;
        counters.growth_evals += r.n_objective_evals;
        ansatz.set_params(&r.params)?;
        energy = r.energy;
        debug!("ADAPT step {}: {} |s| = {score_norm:.3e} E = {energy:.10}", iterations.len() + 1, entry.label());
        iterations.push(AdaptIteration {
            k: iterations.len() + 1,
            selected: entry.label().to_string(),
            score_norm,
            energy,
            params: r.params,
            n_operators: ansatz.len(),
            abs_error: opts.fci_target.map(|t| (energy - t).abs()),
        });
    };
    info!("ADAPT-VQE stopped ({}) at {energy:.10} with {} operators", stop_reason.name(), ansatz.len());
    Ok(AdaptRunRecord {
        iterations,
        reference_energy: e_ref,
        final_energy: energy,
        final_score_norm: score_norm,
        ansatz,
        stop_reason,
        counters,
        e_fci: opts.fci_target,
    })
}
