mod common;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::*;
use esvqe::analysis::{fci_ground_state, Sector};
use esvqe::fermion::{build_hamiltonian, FermionOperator, LadderOp};
use esvqe::integrals::IntegralSet;
use esvqe::pools::{extend_with_auxiliary, generate_uccgsd_pool, PoolConvention};
use esvqe::qubit::{jordan_wigner, PauliString};
use esvqe::simulator::{CompiledOperator, Statevector};
use esvqe::vqe::Hamiltonian;

fn random_state(n: usize, rng: &mut impl Rng) -> Statevector {
    let amps: Vec<Complex64> =
        (0..1usize << n).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let mut s = Statevector::from_amplitudes(amps).unwrap();
    s.normalize();
    s
}

fn random_pauli(n: usize, rng: &mut impl Rng) -> PauliString {
    let mask = (1u64 << n) - 1;
    PauliString::from_masks(n, rng.random::<u64>() & mask, rng.random::<u64>() & mask).unwrap()
}

#[test]
fn jordan_wigner_matches_ladder_action() {
    let mut rng = StdRng::seed_from_u64(11);
    for n in [1, 3, 6] {
        let mut f = FermionOperator::zero();
        for _ in 0..25 {
            let len = rng.random_range(1..=4);
            let factors: Vec<LadderOp> = (0..len)
                .map(|_| {
                    let m = rng.random_range(0..n);
                    if rng.random::<bool>() {
                        LadderOp::create(m)
                    } else {
                        LadderOp::annihilate(m)
                    }
                })
                .collect();
            f.add_term(factors, Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        }
        let q = jordan_wigner(&f, n).unwrap();
        let d = max_abs_diff(&qubit_matrix(&q), &fermion_matrix(&f, n));
        assert!(d < 1e-12, "n={n}: {d:e}");
    }
}

fn hamiltonian_cases() -> Vec<IntegralSet> {
    let mut rng = StdRng::seed_from_u64(5);
    vec![fixture("h2_0.74").integrals, random_integrals(3, 2, false, &mut rng), random_integrals(3, 4, true, &mut rng)]
}

#[test]
fn hamiltonian_matches_ladder_action() {
    for s in hamiltonian_cases() {
        let n = s.n_spin_orbitals();
        let h = Hamiltonian::from_integrals(&s).unwrap();
        let dense = fermion_matrix(&build_hamiltonian(&s), n);
        let d = max_abs_diff(&qubit_matrix(h.operator()), &dense);
        assert!(d < 1e-12, "{d:e}");
        assert!(max_abs_diff(&dense, &dense.adjoint()) < 1e-12);
    }
}

#[test]
fn pauli_rotation_matches_matrix_exponential() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..40 {
        let n = rng.random_range(1..=6);
        let p = random_pauli(n, &mut rng);
        let theta = rng.random_range(-3.0..3.0);
        let psi = random_state(n, &mut rng);
        let got = psi.apply_pauli_rotation(&p, theta).unwrap();
        let u = (pauli_matrix(&p) * Complex64::new(0.0, theta)).exp();
        let want = &u * to_cvec(psi.amplitudes());
        let d = (to_cvec(got.amplitudes()) - want).camax();
        assert!(d < 1e-12, "{p} θ={theta}: {d:e}");
    }
}

#[test]
fn pool_generators_match_matrix_exponential() {
    let mut rng = StdRng::seed_from_u64(9);
    let s = random_integrals(3, 2, false, &mut rng);
    for conv in [PoolConvention::SpinOrbital, PoolConvention::SpinAdapted] {
        let pool = extend_with_auxiliary(&generate_uccgsd_pool(&s, conv).unwrap()).unwrap();
        let n = pool.n_qubits();
        let psi = random_state(n, &mut rng);
        for e in pool.entries() {
            let theta = rng.random_range(-1.5..1.5);
            let got = to_cvec(psi.apply_generator(e.qubit_image(), theta).unwrap().amplitudes());
            let terms: Vec<_> = e.qubit_image().iter().map(|(p, _)| *p).collect();
            let commuting = terms.iter().all(|a| terms.iter().all(|b| a.commutes_with(b)));
            // Commuting images are exact exponentials; otherwise the ansatz is
            // the ordered product of term exponentials.
            let want = if commuting {
                let g = fermion_matrix(&e.generator().unwrap(), n);
                (g * Complex64::new(theta, 0.0)).exp() * to_cvec(psi.amplitudes())
            } else {
                let mut v = to_cvec(psi.amplitudes());
                for (p, c) in e.qubit_image().iter() {
                    v = (pauli_matrix(p) * (c * theta)).exp() * v;
                }
                v
            };
            let d = (got - want).camax();
            assert!(d < 1e-12, "{} ({}): {d:e}", e.label(), conv.name());
        }
    }
}

#[test]
fn expectations_match_dense() {
    let mut rng = StdRng::seed_from_u64(3);
    for s in hamiltonian_cases() {
        let n = s.n_spin_orbitals();
        let h = Hamiltonian::from_integrals(&s).unwrap();
        let m = qubit_matrix(h.operator());
        for _ in 0..5 {
            let psi = random_state(n, &mut rng);
            let v = to_cvec(psi.amplitudes());
            let want = v.dotc(&(&m * &v));
            let got = psi.expectation(h.operator()).unwrap();
            assert!((got - want).norm() < 1e-12);
            assert!((h.energy(&psi).unwrap() - want.re).abs() < 1e-12);
            let hv = CompiledOperator::new(h.operator()).apply(&psi).unwrap();
            assert!((to_cvec(hv.amplitudes()) - &m * &v).camax() < 1e-12);
        }
    }
}

/// Ground energy of the sector from the whole Fock-space matrix, with the
/// sector picked out by a penalty on particle number and spin projection.
fn penalised_ground(s: &IntegralSet) -> f64 {
    let n = s.n_spin_orbitals();
    let h = fermion_matrix(&build_hamiltonian(s), n);
    let dim = 1usize << n;
    let id = CMat::identity(dim, dim);
    let dn = number_operator(n) - &id * Complex64::from(s.n_electrons() as f64);
    let ds = two_sz_operator(n) - &id * Complex64::from(s.spin_2s() as f64);
    let scale = h.iter().map(|z| z.norm()).sum::<f64>();
    let penalised = h + (&dn * &dn + &ds * &ds) * Complex64::from(scale);
    hermitian_eigen(&penalised).0[0]
}

#[test]
fn sector_fci_matches_full_space_diagonalisation() {
    let mut rng = StdRng::seed_from_u64(21);
    let mut cases: Vec<IntegralSet> = ["h2_0.74", "h4_0.90", "h4_2.00"].iter().map(|n| fixture(n).integrals).collect();
    cases.push(random_integrals(3, 2, false, &mut rng));
    cases.push(random_integrals(4, 4, true, &mut rng));
    for s in cases {
        let h = Hamiltonian::from_integrals(&s).unwrap();
        let fci = fci_ground_state(&h, Sector::of(&s)).unwrap();
        let want = penalised_ground(&s);
        assert!((fci.energy - want).abs() < 1e-9, "{} vs {want}", fci.energy);
        assert!(fci.residual < 1e-9);
    }
}

#[test]
fn full_sector_is_the_global_minimum() {
    let s = fixture("h2_0.74").integrals;
    let h = Hamiltonian::from_integrals(&s).unwrap();
    let fci = fci_ground_state(&h, Sector::Full).unwrap();
    let want = hermitian_eigen(&qubit_matrix(h.operator())).0[0];
    assert!((fci.energy - want).abs() < 1e-9);
}
