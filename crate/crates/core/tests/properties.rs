//! Randomized invariants across module boundaries.

use floquet_synth::basis::{self, Basis, Occupation, Sector};
use floquet_synth::floquet;
use floquet_synth::grape::{self, ChainDrive, Objective, OptimizeOptions};
use floquet_synth::numerics::{self, UnitaryOperator};
use floquet_synth::operators::{pauli_to_matrix, HermitianOperator, PauliTermList, Space};
use floquet_synth::targets::{self, sat, MultilinearPolynomial, VariableEncoding};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sector_strategy() -> impl Strategy<Value = Sector> {
    (1usize..=10, 0usize..=4, any::<bool>()).prop_filter_map("empty hardcore sector", |(l, m, hc)| {
        if hc {
            Sector::hardcore(l, m).ok()
        } else {
            Sector::bosonic(l, m).ok()
        }
    })
}

fn pauli_label(qubits: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(prop_oneof![Just('I'), Just('X'), Just('Y'), Just('Z')], qubits)
        .prop_map(|v| v.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn basis_index_round_trip(sector in sector_strategy()) {
        let b = Basis::new(sector);
        prop_assert_eq!(b.len(), basis::dim(&sector));
        for (i, s) in b.iter().enumerate() {
            prop_assert_eq!(s.total(), sector.excitations());
            prop_assert_eq!(basis::index_of(&sector, &Occupation(s.0.clone())).unwrap(), i);
        }
        // strictly descending lexicographic order
        prop_assert!(b.states().windows(2).all(|w| w[0].0 > w[1].0));
    }

    #[test]
    fn expm_is_additive_in_time(seed in any::<u64>(), dim in 1usize..8, s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let h = numerics::random_hermitian(dim, &mut rng(seed));
        let a = numerics::expm_i(&h, s).unwrap();
        let b = numerics::expm_i(&h, t).unwrap();
        let ab = numerics::expm_i(&h, s + t).unwrap();
        prop_assert!(numerics::max_abs(&(a.compose(&b).matrix() - ab.matrix())) <= 1e-10);
        prop_assert!(ab.deviation() <= 1e-10);
    }

    #[test]
    fn log_inverts_exp_inside_the_zone(seed in any::<u64>(), dim in 1usize..10, period in 0.2f64..5.0) {
        // spectrum squeezed into (-π/T, π/T)
        let raw = numerics::random_hermitian(dim, &mut rng(seed));
        let radius = numerics::eigh(&raw).unwrap().values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let h = raw * Complex64::new(3.0 / (period * radius.max(1e-12)), 0.0);
        let u = numerics::expm_i(&h, period).unwrap();
        let log = numerics::logm_unitary(&u, period).unwrap();
        prop_assert!(numerics::max_abs(&(&log.hamiltonian - &h)) <= 1e-9);
    }

    #[test]
    fn quasienergies_stay_in_the_zone(seed in any::<u64>(), dim in 1usize..10, period in 0.1f64..10.0) {
        let u = UnitaryOperator::new(numerics::random_unitary(dim, &mut rng(seed))).unwrap();
        let log = numerics::logm_unitary(&u, period).unwrap();
        let half = std::f64::consts::PI / period;
        prop_assert!(log.quasienergies.iter().all(|&e| e > -half && e <= half));
        prop_assert!(log.quasienergies.windows(2).all(|w| w[0] <= w[1]));
        let back = numerics::expm_i(&log.hamiltonian, period).unwrap();
        prop_assert!(numerics::max_abs(&(back.matrix() - u.matrix())) <= 1e-9);
    }

    #[test]
    fn compound_matrix_is_multiplicative(seed in any::<u64>(), sites in 1usize..7, m in 0usize..4) {
        prop_assume!(m <= sites);
        let mut r = rng(seed);
        let a = numerics::random_unitary(sites, &mut r);
        let b = numerics::random_unitary(sites, &mut r);
        let lhs = numerics::compound_matrix(&(&a * &b), m).unwrap();
        let rhs = numerics::compound_matrix(&a, m).unwrap() * numerics::compound_matrix(&b, m).unwrap();
        prop_assert!(numerics::max_abs(&(lhs - rhs)) <= 1e-9);
    }

    #[test]
    fn pauli_expansion_is_linear(
        (qubits, first, second) in (1usize..4).prop_flat_map(|q| (Just(q), pauli_label(q), pauli_label(q))),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let one = |c: f64, l: &str| pauli_to_matrix(&[(c, l.to_string())].into_iter().collect(), qubits).unwrap();
        let both: PauliTermList = [(a, first.clone()), (b, second.clone())].into_iter().collect();
        let sum = pauli_to_matrix(&both, qubits).unwrap();
        let expected = one(a, &first).matrix() + one(b, &second).matrix();
        prop_assert!(numerics::max_abs(&(sum.matrix() - expected)) <= 1e-14);
    }

    #[test]
    fn objective_spectrum_is_its_value_table(
        coefficients in proptest::collection::vec(-3i64..=3, 8),
    ) {
        // random multilinear polynomial in three variables
        let mut poly = MultilinearPolynomial::zero();
        for (mask, &c) in coefficients.iter().enumerate() {
            let vars: Vec<usize> = (0..3).filter(|v| mask >> v & 1 == 1).collect();
            poly.add_term(vars, c);
        }
        let enc = VariableEncoding::standard();
        let op = pauli_to_matrix(&targets::objective_to_pauli(&poly, &enc, true).unwrap(), 3).unwrap();
        let mut spectrum = op.eigh().unwrap().values;
        spectrum.sort_by(f64::total_cmp);
        let mut table: Vec<f64> = (0..8u8)
            .map(|i| poly.evaluate(&[i & 1, (i >> 1) & 1, (i >> 2) & 1]) as f64)
            .collect();
        table.sort_by(f64::total_cmp);
        for (s, t) in spectrum.iter().zip(&table) {
            prop_assert!((s - t).abs() <= 1e-12);
        }
    }

    #[test]
    fn stroboscopic_evolution_preserves_norm(seed in any::<u64>(), dim in 1usize..8, periods in 0usize..20) {
        let mut r = rng(seed);
        let u = UnitaryOperator::new(numerics::random_unitary(dim, &mut r)).unwrap();
        let v = numerics::random_unitary(dim, &mut r);
        let psi = v.column(0).into_owned();
        let states = floquet::stroboscopic_evolve(&u, &psi, periods).unwrap();
        prop_assert_eq!(states.len(), periods + 1);
        prop_assert!(states.iter().all(|s| (s.norm() - 1.0).abs() <= 1e-10));
    }
}

#[test]
fn effective_hamiltonian_of_a_static_chain_is_the_chain() {
    // one step of a weak static drive: H_eff equals the step Hamiltonian
    let sector = Sector::hardcore(5, 2).unwrap();
    let problem = ChainDrive::onsite(5, 5.0).problem(&sector, 1, 0.5).unwrap();
    let mut seq = problem.zero_sequence();
    for (k, v) in [0.3, -0.2, 0.1, 0.0, -0.4].into_iter().enumerate() {
        seq.set(k, 0, v);
    }
    let h = problem.step_hamiltonian(&seq, 0);
    let r = floquet::floquet_from_controls(&problem, &seq, None).unwrap();
    assert!(numerics::max_abs(&(r.effective.matrix() - &h)) <= 1e-10);
    assert!(r.round_trip_error().unwrap() <= 1e-10);
}

#[test]
fn lih_table_checksum() {
    use sha2::{Digest, Sha256};
    let digest = Sha256::digest(targets::lih::LIH_TABLE.as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    assert_eq!(hex, "811ada62773969e20d3ec963c5afe7fc187d3cb3a73fe2370a28041eaa4cffb1");
}

#[test]
fn optimization_is_deterministic_byte_for_byte() {
    let sector = Sector::hardcore(4, 1).unwrap();
    let problem = ChainDrive::onsite(4, 5.0).problem(&sector, 5, 5.0).unwrap();
    let target = HermitianOperator::from_real(
        Space::Sector(sector),
        &targets::ring(4, 1.0).unwrap().single_particle(),
    )
    .unwrap()
    .propagator(5.0)
    .unwrap();
    let options = OptimizeOptions {
        restarts: 4,
        max_iter: 40,
        seed: 99,
        ..OptimizeOptions::default()
    };
    let run = || {
        let (seq, report) = grape::optimize(&problem, &target, &options).unwrap();
        serde_json::to_string(&(seq, report)).unwrap()
    };
    assert_eq!(run(), run());
    let other = OptimizeOptions { seed: 100, ..options.clone() };
    let (_, a) = grape::optimize(&problem, &target, &options).unwrap();
    let (_, b) = grape::optimize(&problem, &target, &other).unwrap();
    assert_ne!(a.restarts[0].initial_fidelity, b.restarts[0].initial_fidelity);
}

#[test]
fn gradient_matches_central_differences_on_chain_problems() {
    let sector = Sector::bosonic(4, 2).unwrap();
    let drive = ChainDrive::onsite_and_hopping(4, 5.0, 1.0).with_interaction(4.0);
    let problem = drive.problem(&sector, 3, 2.0).unwrap();
    let target = UnitaryOperator::new(numerics::random_unitary(problem.dim(), &mut rng(5))).unwrap();
    let seq = problem.random_sequence(&mut rng(6));
    for objective in [Objective::AbsTrace, Objective::RealTrace] {
        let eval = grape::fidelity_and_gradient(&problem, &seq, &target, objective).unwrap();
        let h = 1e-6;
        for p in 0..seq.values.len() {
            let mut plus = seq.clone();
            let mut minus = seq.clone();
            plus.values[p] += h;
            minus.values[p] -= h;
            let f = |s| objective.evaluate(&target, &grape::propagate(&problem, s).unwrap());
            let fd = (f(&plus) - f(&minus)) / (2.0 * h);
            assert!((eval.gradient[p] - fd).abs() <= 1e-7, "{objective:?} p={p}: {} vs {fd}", eval.gradient[p]);
        }
    }
}

#[test]
fn clause_pipeline_decodes_the_satisfying_assignment() {
    let system = sat::example_system();
    let op = sat::cost_operator(&system, &VariableEncoding::standard(), true).unwrap();
    let eig = op.eigh().unwrap();
    assert!(eig.values[0].abs() < 1e-12 && eig.values[1] > 0.5);
    let psi = eig.vectors.column(0).into_owned();
    assert_eq!(targets::readout_assignment(&psi).unwrap(), vec![0, 0, 1]);
    assert_eq!(system.violations(&[0, 0, 1]), 0);
}
