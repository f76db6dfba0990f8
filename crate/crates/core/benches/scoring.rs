//! Pool scoring and ADAPT gradient sweeps, sequential against rayon.

use std::path::Path;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use esvqe::adapt::adapt_scores;
use esvqe::es::score_pool;
use esvqe::integrals::parse_fcidump;
use esvqe::parallel::Execution;
use esvqe::pools::{generate_uccgsd_pool, generate_uccsd_pool, screen_pool, OperatorPool, PoolConvention};
use esvqe::simulator::Statevector;
use esvqe::vqe::Hamiltonian;

struct Case {
    name: &'static str,
    h: Arc<Hamiltonian>,
    pool: OperatorPool,
    hf: Statevector,
}

fn case(name: &'static str, generalized: bool) -> Case {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.fcidump"));
    let s = parse_fcidump(&std::fs::read_to_string(path).unwrap()).unwrap();
    let pool = match generalized {
        true => generate_uccgsd_pool(&s, PoolConvention::SpinAdapted).unwrap(),
        false => generate_uccsd_pool(&s, PoolConvention::SpinAdapted).unwrap(),
    };
    Case {
        name,
        h: Arc::new(Hamiltonian::from_integrals(&s).unwrap()),
        pool: screen_pool(&pool, &s),
        hf: Statevector::hf_state(s.n_spin_orbitals(), s.n_electrons()).unwrap(),
    }
}

fn scoring(c: &mut Criterion) {
    let cases = [case("h4_1.20", true), case("lih_1.20", true)];
    let mut group = c.benchmark_group("score_pool");
    group.sample_size(10);
    for k in &cases {
        for exec in [Execution::Sequential, Execution::Parallel] {
            let id = BenchmarkId::new(format!("{exec:?}"), format!("{} ({} entries)", k.name, k.pool.len()));
            group.bench_with_input(id, &exec, |b, &exec| {
                b.iter(|| score_pool(&k.pool, &k.h, &k.hf, 1e-7, exec).unwrap())
            });
        }
    }
    group.finish();

    let mut group = c.benchmark_group("adapt_scores");
    for k in &cases {
        for exec in [Execution::Sequential, Execution::Parallel] {
            let id = BenchmarkId::new(format!("{exec:?}"), format!("{} ({} entries)", k.name, k.pool.len()));
            group.bench_with_input(id, &exec, |b, &exec| b.iter(|| adapt_scores(&k.hf, &k.pool, &k.h, exec).unwrap()));
        }
    }
    group.finish();
}

criterion_group!(benches, scoring);
criterion_main!(benches);
