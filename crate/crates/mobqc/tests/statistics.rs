//! Statistical agreement between exact acceptance probabilities and sampled
//! estimates over the adversary family, plus statistical properties of the
//! tomography pipeline.

mod common;

use mobqc::rng::substream;
use mobqc::sim::{DensityMatrix, QuantumState};
use mobqc::tomo::{
    fidelity_local_unitary, linear_inversion, project_physical, simulate_counts,
    LocalUnitaryOptions,
};
use mobqc::verify::{
    build_adversary_state, exact_acceptance, linear_tests, random_adversary, sampled_acceptance,
};

#[test]
fn exact_acceptance_matches_sampling_for_fifty_adversaries() {
    let (test_a, test_b) = linear_tests();
    let mut param_rng = substream(2024, "adversaries");
    let mut sample_rng = substream(2024, "shots");
    let shots = 100_000u64;
    for trial in 0..50 {
        let k = trial % 3;
        let params = random_adversary(k, &mut param_rng);
        let psi = QuantumState::from(build_adversary_state(&params).unwrap());
        let test = if trial % 2 == 0 { &test_b } else { &test_a };
        let exact = exact_acceptance(&psi, test).unwrap();
        let sampled = sampled_acceptance(&psi, test, shots, &mut sample_rng).unwrap();
        let sigma = (exact * (1.0 - exact) / shots as f64).sqrt();
        // a fully deterministic test has sigma 0; sampling must then be exact
        let bound = (4.0 * sigma).max(1e-12);
        assert!(
            (sampled - exact).abs() <= bound,
            "trial {trial}: exact {exact}, sampled {sampled}, bound {bound}"
        );
    }
}

fn frobenius_distance(a: &[num_complex::Complex64], b: &DensityMatrix) -> f64 {
    a.iter()
        .zip(b.elements())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[test]
fn physical_projection_does_not_increase_mean_distance() {
    // over repeated finite-shot reconstructions, projecting to the closest
    // physical state moves the estimate toward the true state on average
    let truth = mobqc::graph::linear_cluster4().to_density();
    let mut rng = substream(31415, "projection");
    let mut raw_total = 0.0;
    let mut projected_total = 0.0;
    let trials = 100;
    for _ in 0..trials {
        let counts = simulate_counts(&truth, 400, &mut rng).unwrap();
        let raw = linear_inversion(&counts).unwrap();
        let (physical, _) = project_physical(&raw).unwrap();
        raw_total += frobenius_distance(&raw.elems, &truth);
        projected_total += frobenius_distance(physical.elements(), &truth);
    }
    assert!(
        projected_total <= raw_total,
        "mean distance grew: raw {raw_total}, projected {projected_total}"
    );
}

#[test]
fn local_unitary_search_is_deterministic() {
    let mut rng = substream(999, "det");
    let dm = DensityMatrix::random(4, 2, &mut rng);
    let target = mobqc::graph::star_cluster4();
    let opts = LocalUnitaryOptions {
        restarts: 5,
        seed: 7,
        ..Default::default()
    };
    let (f1, u1) = fidelity_local_unitary(&dm, &target, &opts).unwrap();
    let (f2, u2) = fidelity_local_unitary(&dm, &target, &opts).unwrap();
    assert_eq!(f1.to_bits(), f2.to_bits());
    for (a, b) in u1.iter().zip(&u2) {
        for r in 0..2 {
            for c in 0..2 {
                assert_eq!(a.0[r][c].re.to_bits(), b.0[r][c].re.to_bits());
                assert_eq!(a.0[r][c].im.to_bits(), b.0[r][c].im.to_bits());
            }
        }
    }
}
