//! Property tests: simulator invariants, structural blindness, and the
//! adversary family's defining acceptance property.

mod common;

use mobqc::graph::ResourceKind;
use mobqc::mbqc::gate_by_name;
use mobqc::protocol::{
    blindness_check, AdversaryServer, ClientProgram, FixedStateServer, HonestServer,
    NoisyHonestServer, ServerStrategy,
};
use mobqc::noise::NoiseConfig;
use mobqc::rng::substream;
use mobqc::sim::gates::Gate1;
use mobqc::sim::{MeasurementBasis, QuantumState, StateVector};
use mobqc::verify::{exact_acceptance, linear_tests, random_adversary, AdversaryParams};
use proptest::prelude::*;

fn random_basis(sel: u8, theta: f64, phi: f64) -> MeasurementBasis {
    match sel % 4 {
        0 => MeasurementBasis::PauliX,
        1 => MeasurementBasis::PauliY,
        2 => MeasurementBasis::PauliZ,
        _ => MeasurementBasis::Bloch { theta, phi },
    }
}

/// Permute the qubits of a pure state: qubit `q` of the output is qubit
/// `perm[q-1]` of the input.
fn permute_qubits(sv: &StateVector, perm: &[usize]) -> StateVector {
    let n = sv.num_qubits();
    let mut amps = vec![num_complex::Complex64::ZERO; sv.dim()];
    for (idx, amp) in amps.iter_mut().enumerate() {
        let mut src = 0usize;
        for q in 1..=n {
            let bit = idx >> (n - q) & 1;
            src |= bit << (n - perm[q - 1]);
        }
        *amp = sv.amplitude(src);
    }
    StateVector::from_amplitudes(amps).expect("permutation preserves norm")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gates_preserve_norm(seed in any::<u64>(), q in 1usize..=4, sel in 0u8..4,
                           theta in 0.0..std::f64::consts::PI, phi in 0.0..std::f64::consts::TAU) {
        let mut rng = substream(seed, "norm");
        let mut sv = StateVector::random(4, &mut rng);
        let (t, p) = (theta, phi);
        let u = match sel % 3 {
            0 => Gate1::u3(t, p, 0.3),
            1 => mobqc::sim::gates::HADAMARD,
            _ => mobqc::sim::gates::PAULI_Y,
        };
        sv.apply_1q(q, &u).unwrap();
        sv.apply_cz(1 + q % 4, 1 + (q + 1) % 4).unwrap();
        prop_assert!((sv.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn measurement_branch_stays_normalized(seed in any::<u64>(), q in 1usize..=4,
                                           sel in 0u8..4, theta in 0.0..std::f64::consts::PI,
                                           phi in 0.0..std::f64::consts::TAU) {
        let mut rng = substream(seed, "branch");
        let mut sv = StateVector::random(4, &mut rng);
        let basis = random_basis(sel, theta, phi);
        sv.measure(q, basis, &mut rng).unwrap();
        prop_assert!((sv.norm() - 1.0).abs() < 1e-10);
        let mut dm = StateVector::random(3, &mut rng).to_density();
        dm.measure(1 + q % 3, basis, &mut rng).unwrap();
        prop_assert!((dm.trace().re - 1.0).abs() < 1e-10);
        prop_assert!(dm.hermiticity_deviation() < 1e-10);
    }

    #[test]
    fn cz_commutes_with_relabeling(seed in any::<u64>(), a in 1usize..=4, b in 1usize..=4,
                                   p0 in 0usize..24) {
        prop_assume!(a != b);
        // enumerate the 24 permutations of 4 labels
        let mut labels = vec![1usize, 2, 3, 4];
        let mut k = p0;
        let mut perm = Vec::new();
        for d in (1..=4).rev() {
            perm.push(labels.remove(k % d));
            k /= d;
        }
        let mut rng = substream(seed, "perm");
        let sv = StateVector::random(4, &mut rng);

        // permute then CZ on relabeled wires
        let mut lhs = permute_qubits(&sv, &perm);
        let pa = perm.iter().position(|&x| x == a).unwrap() + 1;
        let pb = perm.iter().position(|&x| x == b).unwrap() + 1;
        lhs.apply_cz(pa, pb).unwrap();

        // CZ then permute
        let mut rhs = sv.clone();
        rhs.apply_cz(a, b).unwrap();
        let rhs = permute_qubits(&rhs, &perm);

        for kk in 0..16 {
            prop_assert!((lhs.amplitude(kk) - rhs.amplitude(kk)).norm() < 1e-10);
        }
    }

    #[test]
    fn partial_trace_of_everything_is_identity(seed in any::<u64>()) {
        let mut rng = substream(seed, "pt");
        let dm = StateVector::random(3, &mut rng).to_density();
        let same = dm.partial_trace(&[1, 2, 3]).unwrap();
        for k in 0..64 {
            prop_assert!((same.elements()[k] - dm.elements()[k]).norm() < 1e-12);
        }
        let red = dm.partial_trace(&[2]).unwrap();
        prop_assert!((red.trace().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn blindness_holds_for_generated_sessions(seed in any::<u64>(), strat in 0u8..5,
                                              k in 0usize..3) {
        let mut rng = substream(seed, "blind");
        let server: Box<dyn ServerStrategy> = match strat {
            0 => Box::new(HonestServer { resource: ResourceKind::Linear }),
            1 => Box::new(HonestServer { resource: ResourceKind::Star }),
            2 => Box::new(NoisyHonestServer {
                resource: ResourceKind::Linear,
                config: NoiseConfig::uniform_depolarizing(0.2),
            }),
            3 => Box::new(FixedStateServer {
                label: "zeros".into(),
                state: QuantumState::from(StateVector::zero(4)),
            }),
            _ => Box::new(AdversaryServer::new(random_adversary(k, &mut rng))),
        };
        let programs = ClientProgram::all(gate_by_name("Y2X3").unwrap());
        prop_assert!(blindness_check(server.as_ref(), &programs, seed).unwrap());
    }

    #[test]
    fn adversary_family_always_passes_first_test(seed in any::<u64>(), k in 0usize..3) {
        let mut rng = substream(seed, "family");
        let params: AdversaryParams = random_adversary(k, &mut rng);
        let psi = QuantumState::from(mobqc::verify::build_adversary_state(&params).unwrap());
        let (test_a, _) = linear_tests();
        let acc = exact_acceptance(&psi, &test_a).unwrap();
        prop_assert!((acc - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mix_acceptance_is_convex(seed in any::<u64>(), w in 0.0f64..=1.0) {
        let mut rng = substream(seed, "convex");
        let params = random_adversary(1, &mut rng);
        let psi = QuantumState::from(mobqc::verify::build_adversary_state(&params).unwrap());
        let (ta, tb) = linear_tests();
        let pa = exact_acceptance(&psi, &ta).unwrap();
        let pb = exact_acceptance(&psi, &tb).unwrap();
        let mix = mobqc::verify::TestMix { p_test_a: w, p_test_b: 1.0 - w };
        let m = mobqc::verify::amplified_acceptance_exact(pa, pb, mix, 1).unwrap();
        prop_assert!(m >= pa.min(pb) - 1e-12 && m <= pa.max(pb) + 1e-12);
    }
}
