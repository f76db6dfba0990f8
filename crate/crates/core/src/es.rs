//! Energy-sorting VQE.
//!
//! Every pool entry is scored once by a one-parameter minimization on the
//! reference state. Entries scoring above `eps_a` form the first batch; the
//! rest are tried one at a time in score order and kept only if they lower
//! the energy by more than `eps_b`.

use std::cmp::Ordering;
use std::sync::Arc;

use log::{debug, info, warn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel::{self, Execution};
use crate::pools::{OperatorPool, PoolEntry};
use crate::simulator::Statevector;
use crate::vqe::{minimize, AnsatzState, Hamiltonian, MinimizeOptions, OptMode};
use crate::{CHEMICAL_ACCURACY, KCAL_PER_MOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    #[serde(rename = "epsilon_C")]
    EpsilonC,
    PoolExhausted,
    FciTarget,
    MaxIter,
    GradientThreshold,
}

impl StopReason {
    pub fn name(self) -> &'static str {
        match self {
            StopReason::EpsilonC => "epsilon_C",
            StopReason::PoolExhausted => "pool_exhausted",
            StopReason::FciTarget => "fci_target",
            StopReason::MaxIter => "max_iter",
            StopReason::GradientThreshold => "gradient_threshold",
        }
    }
}

/// Work done by an adaptive run, split by phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalCounters {
    /// Passes over the whole pool to score operators.
    pub score_sweeps: usize,
    /// Pool entries scored, summed over sweeps.
    pub scored_entries: usize,
    /// Energy (or energy+gradient) evaluations spent on scoring.
    pub scoring_evals: usize,
    /// Evaluations spent optimizing the growing ansatz.
    pub growth_evals: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EsOptions {
    pub eps_a: f64,
    pub eps_b: f64,
    pub eps_c: f64,
    pub mode: OptMode,
    pub gtol: f64,
    /// Stop once within 1 kcal/mol of this energy.
    pub fci_target: Option<f64>,
    /// Cap on growth iterations (batch plus candidate tests).
    pub max_iter: Option<usize>,
    pub execution: Execution,
}

impl Default for EsOptions {
    fn default() -> Self {
        Self {
            eps_a: 1e-4,
            eps_b: 1e-4,
            eps_c: 1e-8,
            mode: OptMode::Full,
            gtol: 1e-7,
            fci_target: None,
            max_iter: None,
            execution: Execution::Parallel,
        }
    }
}

impl EsOptions {
    fn validate(&self) -> Result<()> {
        for (name, v) in [("eps_a", self.eps_a), ("eps_b", self.eps_b), ("eps_c", self.eps_c), ("gtol", self.gtol)] {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::Validation(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreEntry {
    /// Position of the entry in the scored pool.
    pub pool_index: usize,
    pub generation_order: usize,
    pub label: String,
    /// Energy lowering `E_ref − E_i`.
    pub score: f64,
    pub optimal_theta: f64,
    /// The one-parameter optimization diverged; the score was set to 0.
    pub diverged: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreList {
    pub entries: Vec<ScoreEntry>,
}

impl ScoreList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn by_score(a: &ScoreEntry, b: &ScoreEntry) -> Ordering {
    b.score.total_cmp(&a.score).then(a.generation_order.cmp(&b.generation_order))
}

/// Scores every entry by a one-parameter minimization from θ = 0 on `reference`.
/// Returns the sorted list and the number of objective evaluations used.
pub fn score_pool(
    pool: &OperatorPool,
    h: &Arc<Hamiltonian>,
    reference: &Statevector,
    gtol: f64,
    exec: Execution,
) -> Result<(ScoreList, usize)> {
    let base = AnsatzState::new(h.clone(), reference.clone())?;
    let e_ref = base.current_energy()?;
    let opts = MinimizeOptions { gtol, ..Default::default() };
    let scored = parallel::map(exec, pool.entries(), |entry| -> Result<(ScoreEntry, usize)> {
        let mut a = base.clone();
        a.push(entry.clone(), 0.0)?;
        let (score, theta, diverged, evals) = match minimize(&a, &[0.0], &opts) {
            Ok(r) => (e_ref - r.energy, r.params[0], false, r.n_objective_evals),
            Err(Error::OptimizerDiverged { .. }) => {
                warn!("scoring {} diverged; score set to 0", entry.label());
                (0.0, 0.0, true, 0)
            }
            Err(e) => return Err(e),
        };
        let s = ScoreEntry {
            pool_index: 0,
            generation_order: entry.generation_order(),
            label: entry.label().to_string(),
            score,
            optimal_theta: theta,
            diverged,
        };
        Ok((s, evals))
    });
    let mut entries = Vec::with_capacity(scored.len());
    let mut evals = 0;
    for (k, r) in scored.into_iter().enumerate() {
        let (mut s, n) = r?;
        s.pool_index = k;
        evals += n;
        entries.push(s);
    }
    entries.sort_by(by_score);
    Ok((ScoreList { entries }, evals))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    /// Labels of the operators tried in this iteration.
    pub candidates: Vec<String>,
    pub accepted: bool,
    /// Energy after optimization with the candidates included.
    pub energy: f64,
    pub params: Vec<f64>,
    /// Operators in the ansatz after this iteration.
    pub n_operators: usize,
    pub abs_error: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct EsRunRecord {
    pub score_list: ScoreList,
    pub iterations: Vec<IterationRecord>,
    pub reference_energy: f64,
    pub final_energy: f64,
    pub ansatz: AnsatzState,
    pub stop_reason: StopReason,
    pub counters: EvalCounters,
    pub e_fci: Option<f64>,
    pub chemical_accuracy: Option<bool>,
}

impl EsRunRecord {
    pub fn n_operators(&self) -> usize {
        self.ansatz.len()
    }

    pub fn abs_error(&self) -> Option<f64> {
        self.e_fci.map(|e| (self.final_energy - e).abs())
    }
}

/// Annotates per-iteration errors against an exact reference energy.
pub fn attach_fci_reference(mut record: EsRunRecord, e_fci: f64) -> EsRunRecord {
    for it in &mut record.iterations {
        it.abs_error = Some((it.energy - e_fci).abs());
    }
    record.e_fci = Some(e_fci);
    record.chemical_accuracy = Some((record.final_energy - e_fci).abs() <= CHEMICAL_ACCURACY);
    record
}

fn within_target(e: f64, target: Option<f64>) -> bool {
    target.is_some_and(|t| (e - t).abs() <= KCAL_PER_MOL)
}

/// Runs ES-VQE on `reference` with operators drawn from `pool`.
pub fn es_vqe(
    h: &Arc<Hamiltonian>,
    pool: &OperatorPool,
    reference: &Statevector,
    opts: &EsOptions,
) -> Result<EsRunRecord> {
    opts.validate()?;
    let mut ansatz = AnsatzState::new(h.clone(), reference.clone())?;
    let e_ref = ansatz.current_energy()?;
    let (scores, scoring_evals) = score_pool(pool, h, reference, opts.gtol, opts.execution)?;
    let mut counters = EvalCounters { score_sweeps: 1, scored_entries: scores.len(), scoring_evals, growth_evals: 0 };
    let min_opts = |mode| MinimizeOptions { gtol: opts.gtol, max_iter: None, mode };
    let mut iterations = Vec::new();
    let mut energy = e_ref;
    let finish = |ansatz: AnsatzState, iterations, energy, stop_reason, counters| {
        info!("ES-VQE stopped ({}) at {energy:.10} with {} operators", StopReason::name(stop_reason), ansatz.len());
        let record = EsRunRecord {
            score_list: scores.clone(),
            iterations,
            reference_energy: e_ref,
            final_energy: energy,
            ansatz,
            stop_reason,
            counters,
            e_fci: None,
            chemical_accuracy: None,
        };
        Ok(match opts.fci_target {
            Some(t) => attach_fci_reference(record, t),
            None => record,
        })
    };
    if within_target(energy, opts.fci_target) {
        return finish(ansatz, iterations, energy, StopReason::FciTarget, counters);
    }

    let entry = |s: &ScoreEntry| -> &PoolEntry { &pool.entries()[s.pool_index] };
    let split = scores.entries.iter().take_while(|s| s.score > opts.eps_a).count();
    let (batch, rest) = scores.entries.split_at(split);
    let cap = opts.max_iter.unwrap_or(usize::MAX);

    if !batch.is_empty() {
        if cap == 0 {
            return finish(ansatz, iterations, energy, StopReason::MaxIter, counters);
        }
        for s in batch {
            ansatz.push(entry(s).clone(), 0.0)?;
        }
        let theta0 = ansatz.params().to_vec();
        let r = minimize(&ansatz, &theta0, &min_opts(OptMode::Full))?;
        counters.growth_evals += r.n_objective_evals;
        ansatz.set_params(&r.params)?;
        let delta = (r.energy - energy).abs();
        energy = r.energy;
        debug!("first batch of {} operators: E = {energy:.10}", batch.len());
        iterations.push(IterationRecord {
            k: 1,
            candidates: batch.iter().map(|s| s.label.clone()).collect(),
            accepted: true,
            energy,
            params: r.params,
            n_operators: ansatz.len(),
            abs_error: None,
        });
        if within_target(energy, opts.fci_target) {
            return finish(ansatz, iterations, energy, StopReason::FciTarget, counters);
        }
        if delta < opts.eps_c {
            return finish(ansatz, iterations, energy, StopReason::EpsilonC, counters);
        }
    }

    for s in rest {
        if iterations.len() >= cap {
            return finish(ansatz, iterations, energy, StopReason::MaxIter, counters);
        }
        let previous = ansatz.params().to_vec();
        ansatz.push(entry(s).clone(), 0.0)?;
        let theta0 = ansatz.params().to_vec();
        let r = minimize(&ansatz, &theta0, &min_opts(opts.mode))?;
        counters.growth_evals += r.n_objective_evals;
        let delta = (r.energy - energy).abs();
        let accepted = delta > opts.eps_b;
        if accepted {
            ansatz.set_params(&r.params)?;
            energy = r.energy;
        } else {
            ansatz.pop();
            ansatz.set_params(&previous)?;
        }
        debug!("candidate {}: dE = {delta:.3e} accepted = {accepted}", s.label);
        iterations.push(IterationRecord {
            k: iterations.len() + 1,
            candidates: vec![s.label.clone()],
            accepted,
            energy: r.energy,
            params: r.params,
            n_operators: ansatz.len(),
            abs_error: None,
        });
        if accepted {
            if within_target(energy, opts.fci_target) {
                return finish(ansatz, iterations, energy, StopReason::FciTarget, counters);
            }
            if delta < opts.eps_c {
                return finish(ansatz, iterations, energy, StopReason::EpsilonC, counters);
            }
        }
    }
    finish(ansatz, iterations, energy, StopReason::PoolExhausted, counters)
}
