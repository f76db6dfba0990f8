mod common;

use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;

use common::*;
use esvqe::fermion::{FermionOperator, LadderOp};
use esvqe::pools::{extend_with_auxiliary, generate_uccgsd_pool, OperatorPool, PoolConvention};
use esvqe::qubit::{jordan_wigner, pauli_product, PauliString, QubitOperator};
use esvqe::simulator::Statevector;

const N: usize = 6;

fn pauli() -> impl Strategy<Value = PauliString> {
    (0u64..1 << N, 0u64..1 << N).prop_map(|(x, z)| PauliString::from_masks(N, x, z).unwrap())
}

fn coefficient() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn fermion_op() -> impl Strategy<Value = FermionOperator> {
    let factor = (0..N, any::<bool>()).prop_map(|(m, c)| if c { LadderOp::create(m) } else { LadderOp::annihilate(m) });
    prop::collection::vec((prop::collection::vec(factor, 1..=4), coefficient()), 1..6).prop_map(|terms| {
        let mut f = FermionOperator::zero();
        for (factors, c) in terms {
            f.add_term(factors, c);
        }
        f
    })
}

fn state() -> impl Strategy<Value = Statevector> {
    prop::collection::vec(coefficient(), 1 << N).prop_filter_map("zero vector", |amps| {
        let mut s = Statevector::from_amplitudes(amps).ok()?;
        (s.norm() > 1e-3).then(|| {
            s.normalize();
            s
        })
    })
}

fn pool() -> &'static OperatorPool {
    static POOL: OnceLock<OperatorPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut rng = <rand::rngs::StdRng as rand::SeedableRng>::seed_from_u64(1);
        let s = random_integrals(3, 2, false, &mut rng);
        extend_with_auxiliary(&generate_uccgsd_pool(&s, PoolConvention::SpinAdapted).unwrap()).unwrap()
    })
}

fn dist(a: &QubitOperator, b: &QubitOperator) -> f64 {
    (a.clone() - b.clone()).iter().fold(0.0, |m, (_, c)| m.max(c.norm()))
}

proptest! {
    #[test]
    fn pauli_product_is_associative(a in pauli(), b in pauli(), c in pauli()) {
        let (p1, ab) = pauli_product(&a, &b).unwrap();
        let (p2, ab_c) = pauli_product(&ab, &c).unwrap();
        let (q1, bc) = pauli_product(&b, &c).unwrap();
        let (q2, a_bc) = pauli_product(&a, &bc).unwrap();
        prop_assert_eq!(ab_c, a_bc);
        prop_assert!((p1 * p2 - q1 * q2).norm() < 1e-15);
    }

    #[test]
    fn pauli_product_matches_matrices(a in pauli(), b in pauli()) {
        let (phase, ab) = pauli_product(&a, &b).unwrap();
        let want = pauli_matrix(&a) * pauli_matrix(&b);
        prop_assert!(max_abs_diff(&(pauli_matrix(&ab) * phase), &want) < 1e-14);
    }

    #[test]
    fn jordan_wigner_is_linear(f in fermion_op(), g in fermion_op(), a in coefficient(), b in coefficient()) {
        let lhs = jordan_wigner(&(f.scale(a) + g.scale(b)), N).unwrap();
        let rhs = jordan_wigner(&f, N).unwrap().scale(a) + jordan_wigner(&g, N).unwrap().scale(b);
        prop_assert!(dist(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn jordan_wigner_commutes_with_adjoint(f in fermion_op()) {
        let lhs = jordan_wigner(&f.adjoint(), N).unwrap();
        let rhs = jordan_wigner(&f, N).unwrap().adjoint();
        prop_assert!(dist(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn rotations_are_unitary(p in pauli(), theta in -10.0..10.0f64, psi in state(), phi in state()) {
        let a = psi.apply_pauli_rotation(&p, theta).unwrap();
        let b = phi.apply_pauli_rotation(&p, theta).unwrap();
        prop_assert!((a.norm() - 1.0).abs() < 1e-12);
        prop_assert!((a.inner(&b) - psi.inner(&phi)).norm() < 1e-12);
        let back = a.apply_pauli_rotation(&p, -theta).unwrap();
        prop_assert!(back.amplitudes().iter().zip(psi.amplitudes()).all(|(x, y)| (x - y).norm() < 1e-12));
    }

    #[test]
    fn pool_generators_conserve_particle_number_and_spin(k in 0usize..10_000, theta in -3.0..3.0f64, occ in 0usize..15) {
        let pool = pool();
        let entry = &pool.entries()[k % pool.len()];
        // Any two-electron, S_z = 0 determinant: one alpha and one beta mode.
        let alpha = 2 * (occ % 3);
        let beta = 2 * (occ / 5 % 3) + 1;
        let psi = Statevector::basis(N, (1 << alpha) | (1 << beta)).unwrap();
        let out = psi.apply_generator(entry.qubit_image(), theta).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
        for (b, a) in out.amplitudes().iter().enumerate() {
            if a.norm() > 1e-12 {
                prop_assert_eq!(b.count_ones(), 2, "{}", entry.label());
                prop_assert_eq!((b & 0b010101).count_ones(), 1, "{}", entry.label());
            }
        }
    }
}
