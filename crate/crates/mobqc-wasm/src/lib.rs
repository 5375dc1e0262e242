//! Browser bindings: three interactive views onto the simulator, each
//! returning a JSON string for the static demo page to render.
//!
//! - `adversary_report`: detection probabilities of the two linear-cluster
//!   trap tests against the phase/ancilla adversary family, with the
//!   n-round amplification curve;
//! - `noise_trap_report`: per-branch trap pass probabilities of a resource
//!   under depolarizing/dephasing noise;
//! - `gate_report`: residual, correction and ideal output of one entangling
//!   gate branch, noiseless and noisy.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use mobqc::graph::ResourceKind;
use mobqc::mbqc::{apply_byproduct, gate_by_name, run_pattern_postselected, ComparisonMode};
use mobqc::noise::{apply_noise, NoiseConfig};
use mobqc::sim::{Outcome, QuantumState, StateVector};
use mobqc::verify::{
    aligned_adversary, amplified_acceptance_exact, build_adversary_state, exact_acceptance,
    exact_trap_profile, linear_tests, star_tests, AdversaryParams, TestMix,
};

fn err_json(msg: impl std::fmt::Display) -> String {
    format!("{{\"error\":{}}}", serde_json::to_string(&msg.to_string()).unwrap())
}

macro_rules! try_json {
    ($expr:expr) => {
        match $expr {
            Ok(v) => v,
            Err(e) => return err_json(e),
        }
    };
}

#[derive(Serialize)]
struct AdversaryReport {
    thetas: [f64; 3],
    ancilla: String,
    pass_a: f64,
    pass_b: f64,
    fidelity_to_linear: f64,
    /// `(n, acceptance)` for n rounds of a 50/50 test mix.
    amplification: Vec<(u32, f64)>,
}

fn adversary_params(thetas: [f64; 3], ancilla: &str) -> Result<AdversaryParams, String> {
    match ancilla {
        "aligned" => Ok(aligned_adversary(thetas)),
        "orthogonal" => {
            let mut ancillas: [StateVector; 4] = std::array::from_fn(|_| StateVector::zero(1));
            ancillas[1] = StateVector::computational(1, 1).map_err(|e| e.to_string())?;
            Ok(AdversaryParams { thetas, ancillas })
        }
        other => Err(format!("unknown ancilla preset {other:?}")),
    }
}

/// Exact trap-test acceptance of the adversary `(theta2, theta3, theta4,
/// ancilla preset)` plus its n-round amplification curve.
#[wasm_bindgen]
pub fn adversary_report(theta2: f64, theta3: f64, theta4: f64, ancilla: &str) -> String {
    let thetas = [theta2, theta3, theta4];
    let params = try_json!(adversary_params(thetas, ancilla));
    let joint = try_json!(build_adversary_state(&params));
    let state = QuantumState::from(joint.clone());
    let (test_a, test_b) = linear_tests();
    let pass_a = try_json!(exact_acceptance(&state, &test_a));
    let pass_b = try_json!(exact_acceptance(&state, &test_b));
    let reduced = try_json!(joint.reduced(&[1, 2, 3, 4]));
    let fidelity = try_json!(reduced.fidelity_pure(&mobqc::graph::linear_cluster4()));
    let mix = TestMix {
        p_test_a: 0.5,
        p_test_b: 0.5,
    };
    let amplification = (1..=25)
        .map(|n| {
            (
                n,
                amplified_acceptance_exact(pass_a, pass_b, mix, n).expect("valid mix"),
            )
        })
        .collect();
    serde_json::to_string(&AdversaryReport {
        thetas,
        ancilla: ancilla.into(),
        pass_a,
        pass_b,
        fidelity_to_linear: fidelity,
        amplification,
    })
    .unwrap_or_else(err_json)
}

#[derive(Serialize)]
struct TrapRow {
    test: String,
    branch: String,
    trap_qubit: usize,
    expected: u8,
    pass_prob: f64,
}

#[derive(Serialize)]
struct NoiseTrapReport {
    resource: String,
    depolarizing: f64,
    dephasing: f64,
    state_fidelity: f64,
    acceptance_a: f64,
    acceptance_b: f64,
    rows: Vec<TrapRow>,
}

/// Trap pass probabilities of the chosen resource under uniform
/// depolarizing strength `p` and dephasing strength `gamma`.
#[wasm_bindgen]
pub fn noise_trap_report(resource: &str, p: f64, gamma: f64) -> String {
    let kind: ResourceKind = try_json!(resource.parse());
    let ideal = kind.state();
    let config = NoiseConfig {
        depolarizing: [p; 4],
        dephasing: [gamma; 4],
    };
    let noisy = try_json!(apply_noise(&ideal.to_density(), &config));
    let state_fidelity = try_json!(noisy.fidelity_pure(&ideal));
    let state = QuantumState::from(noisy);
    let (test_a, test_b) = match kind {
        ResourceKind::Linear => linear_tests(),
        ResourceKind::Star => star_tests(),
    };
    let mut rows = Vec::new();
    for test in [&test_a, &test_b] {
        for row in try_json!(exact_trap_profile(&state, test)) {
            rows.push(TrapRow {
                test: test.name.clone(),
                branch: row
                    .non_trap_outcomes
                    .iter()
                    .map(|o| char::from(b'0' + o.bit()))
                    .collect(),
                trap_qubit: row.trap_qubit,
                expected: row.expected.bit(),
                pass_prob: row.pass_prob,
            });
        }
    }
    let acceptance_a = try_json!(exact_acceptance(&state, &test_a));
    let acceptance_b = try_json!(exact_acceptance(&state, &test_b));
    serde_json::to_string(&NoiseTrapReport {
        resource: kind.label().into(),
        depolarizing: p,
        dephasing: gamma,
        state_fidelity,
        acceptance_a,
        acceptance_b,
        rows,
    })
    .unwrap_or_else(err_json)
}

#[derive(Serialize)]
struct GateReport {
    gate: String,
    s2: u8,
    s3: u8,
    branch_prob: f64,
    ideal_label: String,
    /// `[re, im]` pairs of the four output amplitudes.
    residual: Vec<[f64; 2]>,
    corrected: Vec<[f64; 2]>,
    ideal: Vec<[f64; 2]>,
    fidelity: f64,
    noisy_fidelity: f64,
}

/// One forced outcome branch of an entangling gate on the star cluster:
/// raw residual, corrected output, ideal output and fidelities (noiseless
/// and under uniform depolarizing noise of strength `noise_p`).
#[wasm_bindgen]
pub fn gate_report(gate: &str, s2: u8, s3: u8, noise_p: f64) -> String {
    let spec = match gate_by_name(gate) {
        Some(s) => s,
        None => return err_json(format!("unknown gate {gate:?}")),
    };
    let star = ResourceKind::Star.state();
    let forced = [Outcome::from_bit(s2), Outcome::from_bit(s3)];
    let state = QuantumState::from(star.clone());
    let (branch_prob, residual) =
        try_json!(run_pattern_postselected(&state, &spec.pattern, &forced));
    let corrected = try_json!(apply_byproduct(
        &spec.row_correction,
        &forced,
        &residual,
        &spec.pattern.output_qubits
    ));
    let ideal = spec.ideal_output(forced[0], forced[1]);
    let fidelity = try_json!(corrected.fidelity_pure(ideal));

    let amps = |qs: &QuantumState| -> Vec<[f64; 2]> {
        match qs {
            QuantumState::Pure(sv) => sv
                .amplitudes()
                .iter()
                .map(|a| [a.re, a.im])
                .collect(),
            QuantumState::Mixed(dm) => (0..dm.dim())
                .map(|k| {
                    let e = dm.element(k, k);
                    [e.re, e.im]
                })
                .collect(),
        }
    };

    let noisy_fidelity = if noise_p > 0.0 {
        let config = NoiseConfig::uniform_depolarizing(noise_p.clamp(0.0, 1.0));
        let noisy = try_json!(apply_noise(&star.to_density(), &config));
        let rows = try_json!(mobqc::mbqc::verify_gate(
            &spec,
            &QuantumState::from(noisy),
            ComparisonMode::PerOutcome
        ));
        rows.iter()
            .find(|((a, b), _)| *a == s2 && *b == s3)
            .map(|(_, f)| *f)
            .unwrap_or(f64::NAN)
    } else {
        fidelity
    };

    serde_json::to_string(&GateReport {
        gate: spec.name.clone(),
        s2,
        s3,
        branch_prob,
        ideal_label: spec.ideal_label(forced[0], forced[1]).into(),
        residual: amps(&residual),
        corrected: amps(&corrected),
        ideal: ideal.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
        fidelity,
        noisy_fidelity,
    })
    .unwrap_or_else(err_json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adversary_report_json_shape() {
        let text = adversary_report(std::f64::consts::PI, 0.0, 0.0, "aligned");
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!((v["pass_a"].as_f64().unwrap() - 1.0).abs() < 1e-9);
        assert!((v["pass_b"].as_f64().unwrap() - 0.25).abs() < 1e-9);
        assert_eq!(v["amplification"].as_array().unwrap().len(), 25);
    }

    #[test]
    fn adversary_report_rejects_bad_preset() {
        let text = adversary_report(0.0, 0.0, 0.0, "nope");
        assert!(text.contains("error"));
    }

    #[test]
    fn noise_report_matches_known_fidelity() {
        let text = noise_trap_report("star", 0.101864613033, 0.0);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!((v["state_fidelity"].as_f64().unwrap() - 0.731).abs() < 1e-3);
        assert_eq!(v["rows"].as_array().unwrap().len(), 16);
    }

    #[test]
    fn gate_report_noiseless_branch() {
        let text = gate_report("Z2X3", 1, 0, 0.0);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!((v["branch_prob"].as_f64().unwrap() - 0.25).abs() < 1e-9);
        assert!((v["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(v["ideal_label"].as_str().unwrap(), "(|01> + |10>)/sqrt(2)");
    }

    #[test]
    fn gate_report_under_noise() {
        let text = gate_report("Y2X3", 0, 0, 0.101864613033);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let f = v["noisy_fidelity"].as_f64().unwrap();
        assert!((f - 0.777).abs() < 1e-2, "noisy fidelity {f}");
    }
}
