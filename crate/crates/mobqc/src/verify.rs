//! Trap tests, exact detection probabilities against a parameterized
//! adversary family, the forced-state check, and n-round amplification.
//!
//! A trap test measures every qubit of a four-qubit resource in a fixed
//! Z/X split. On the honest resource the "trap" outcomes are a deterministic
//! function of the other outcomes, so any deviation from the agreed state
//! shows up as a trap mismatch with computable probability. Expected trap
//! values are always derived by exact conditioning on the ideal resource,
//! never from lookup tables.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_graph_state, GraphSpec};
use crate::rng::unit_f64;
use crate::sim::{MeasurementBasis, Outcome, QuantumState, StateVector, C64, ITERATIVE_TOL};

/// A trap test on a four-qubit resource: a Z/X basis assignment covering all
/// qubits, a subset of measured qubits acting as traps, and the graph whose
/// state defines the expected outcomes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapTest {
    pub name: String,
    pub resource: GraphSpec,
    pub z_qubits: Vec<usize>,
    pub x_qubits: Vec<usize>,
    pub trap_qubits: Vec<usize>,
}

impl TrapTest {
    pub fn new(
        name: &str,
        resource: GraphSpec,
        z_qubits: &[usize],
        x_qubits: &[usize],
        trap_qubits: &[usize],
    ) -> Result<Self> {
        let t = TrapTest {
            name: name.into(),
            resource,
            z_qubits: z_qubits.to_vec(),
            x_qubits: x_qubits.to_vec(),
            trap_qubits: trap_qubits.to_vec(),
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.resource.num_vertices;
        let mut covered = vec![0u8; n + 1];
        for &q in self.z_qubits.iter().chain(&self.x_qubits) {
            if q == 0 || q > n {
                return Err(Error::InvalidTest(format!("qubit {q} out of range")));
            }
            covered[q] += 1;
        }
        if covered[1..].iter().any(|&c| c != 1) {
            return Err(Error::InvalidTest(
                "Z and X qubits must cover every qubit exactly once".into(),
            ));
        }
        for &t in &self.trap_qubits {
            if t == 0 || t > n {
                return Err(Error::InvalidTest(format!("trap {t} out of range")));
            }
        }
        Ok(())
    }

    pub fn basis_for(&self, qubit: usize) -> MeasurementBasis {
        if self.z_qubits.contains(&qubit) {
            MeasurementBasis::PauliZ
        } else {
            MeasurementBasis::PauliX
        }
    }

    /// Measured non-trap qubits, ascending.
    pub fn non_trap_qubits(&self) -> Vec<usize> {
        let mut out: Vec<usize> = (1..=self.resource.num_vertices)
            .filter(|q| !self.trap_qubits.contains(q))
            .collect();
        out.sort_unstable();
        out
    }

    /// Trap qubits, ascending.
    pub fn traps(&self) -> Vec<usize> {
        let mut out = self.trap_qubits.clone();
        out.sort_unstable();
        out
    }

    pub fn ideal_resource(&self) -> StateVector {
        build_graph_state(&self.resource)
    }
}

/// The two complementary trap tests on the linear cluster: the (1,3) test
/// measures qubits 1, 3 in Z and traps 2, 4 in X; the (2,4) test swaps the
/// roles.
pub fn linear_tests() -> (TrapTest, TrapTest) {
    let path = GraphSpec::path(4);
    let a = TrapTest::new("TestA", path.clone(), &[1, 3], &[2, 4], &[2, 4])
        .expect("valid test");
    let b = TrapTest::new("TestB", path, &[2, 4], &[1, 3], &[1, 3]).expect("valid test");
    (a, b)
}

/// The star-cluster analogues. The (1,3) test again traps 2 and 4 in X. In
/// the (2,4) test qubit 2 is measured in Z and qubit 4 in X, which forces
/// trap 1 into the X basis and the center qubit 3 into Z (conditioning the
/// star state determines the split; it is a convention of this artifact,
/// fixed by the Born-rule oracle).
pub fn star_tests() -> (TrapTest, TrapTest) {
    let star = GraphSpec::star(4, 3).expect("valid star");
    let a = TrapTest::new("StarTestA", star.clone(), &[1, 3], &[2, 4], &[2, 4])
        .expect("valid test");
    let b = TrapTest::new("StarTestB", star, &[2, 3], &[1, 4], &[1, 3]).expect("valid test");
    (a, b)
}

pub fn test_by_name(name: &str) -> Option<TrapTest> {
    let (a, b) = linear_tests();
    let (sa, sb) = star_tests();
    [a, b, sa, sb]
        .into_iter()
        .find(|t| t.name.eq_ignore_ascii_case(name))
}

/// Expected trap outcomes given the non-trap outcomes, by exact conditioning
/// on the ideal resource. Deterministic for every branch of the four tests;
/// a non-deterministic conditional distribution is an error.
pub fn expected_trap_outcome(test: &TrapTest, non_trap: &[Outcome]) -> Result<Vec<Outcome>> {
    let nts = test.non_trap_qubits();
    if non_trap.len() != nts.len() {
        return Err(Error::InvalidTest(format!(
            "{} non-trap outcomes for {} qubits",
            non_trap.len(),
            nts.len()
        )));
    }
    let mut state = test.ideal_resource();
    for (&q, &o) in nts.iter().zip(non_trap) {
        state.project(q, test.basis_for(q), o)?;
    }
    let mut expected = Vec::with_capacity(test.trap_qubits.len());
    for &t in &test.traps() {
        let (p_plus, p_minus) = state.born_probabilities(t, test.basis_for(t))?;
        let (outcome, p) = if p_plus >= p_minus {
            (Outcome::Plus, p_plus)
        } else {
            (Outcome::Minus, p_minus)
        };
        if p < 1.0 - crate::sim::ALGEBRAIC_TOL {
            return Err(Error::InvalidTest(format!(
                "trap {t} of {} is not deterministic (p = {p})",
                test.name
            )));
        }
        state.project(t, test.basis_for(t), outcome)?;
        expected.push(outcome);
    }
    Ok(expected)
}

/// 95% Wilson score interval.
pub fn wilson_interval(passes: u64, total: u64) -> (f64, f64) {
    if total == 0 {
        return (0.0, 1.0);
    }
    let z = 1.96f64;
    let n = total as f64;
    let p = passes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = (z / denom) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// One sampled conditional pass probability: a non-trap outcome branch and
/// one trap qubit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrapReportRow {
    pub non_trap_outcomes: Vec<Outcome>,
    pub trap_qubit: usize,
    pub expected: Outcome,
    pub passes: u64,
    pub total: u64,
    pub pass_prob: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrapReport {
    pub test_name: String,
    pub shots: u64,
    pub rows: Vec<TrapReportRow>,
}

/// Sample `shots` runs of the trap test and report conditional per-trap pass
/// probabilities with Wilson intervals. Branches that never occur are
/// omitted.
pub fn run_trap_test(
    state: &QuantumState,
    test: &TrapTest,
    shots: u64,
    rng: &mut dyn RngCore,
) -> Result<TrapReport> {
    test.validate()?;
    let nts = test.non_trap_qubits();
    let traps = test.traps();
    let n_branches = 1usize << nts.len();
    // per branch: occurrences, per-trap passes
    let mut totals = vec![0u64; n_branches];
    let mut passes = vec![vec![0u64; traps.len()]; n_branches];
    let mut expectations: Vec<Option<Vec<Outcome>>> = vec![None; n_branches];

    for _ in 0..shots {
        let mut work = state.clone();
        let mut branch = 0usize;
        let mut outs = Vec::with_capacity(nts.len());
        for &q in &nts {
            let o = work.measure(q, test.basis_for(q), rng)?;
            branch = branch << 1 | o.bit() as usize;
            outs.push(o);
        }
        let expected = match &expectations[branch] {
            Some(e) => e.clone(),
            None => {
                let e = expected_trap_outcome(test, &outs)?;
                expectations[branch] = Some(e.clone());
                e
            }
        };
        totals[branch] += 1;
        for (k, &t) in traps.iter().enumerate() {
            let o = work.measure(t, test.basis_for(t), rng)?;
            if o == expected[k] {
                passes[branch][k] += 1;
            }
        }
    }

    let mut rows = Vec::new();
    for branch in 0..n_branches {
        if totals[branch] == 0 {
            continue;
        }
        let outs: Vec<Outcome> = (0..nts.len())
            .map(|k| Outcome::from_bit((branch >> (nts.len() - 1 - k)) as u8))
            .collect();
        let expected = expectations[branch].as_ref().expect("seen branch");
        for (k, &t) in traps.iter().enumerate() {
            let (lo, hi) = wilson_interval(passes[branch][k], totals[branch]);
            rows.push(TrapReportRow {
                non_trap_outcomes: outs.clone(),
                trap_qubit: t,
                expected: expected[k],
                passes: passes[branch][k],
                total: totals[branch],
                pass_prob: passes[branch][k] as f64 / totals[branch] as f64,
                ci_low: lo,
                ci_high: hi,
            });
        }
    }
    Ok(TrapReport {
        test_name: test.name.clone(),
        shots,
        rows,
    })
}

/// Exact conditional trap profile: for every non-trap branch, the branch
/// probability and each trap's marginal probability of matching its
/// expected value.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrapProfileRow {
    pub non_trap_outcomes: Vec<Outcome>,
    pub trap_qubit: usize,
    pub expected: Outcome,
    pub branch_prob: f64,
    pub pass_prob: f64,
}

pub fn exact_trap_profile(state: &QuantumState, test: &TrapTest) -> Result<Vec<TrapProfileRow>> {
    test.validate()?;
    let nts = test.non_trap_qubits();
    let traps = test.traps();
    let mut rows = Vec::new();
    for branch in 0..1usize << nts.len() {
        let outs: Vec<Outcome> = (0..nts.len())
            .map(|k| Outcome::from_bit((branch >> (nts.len() - 1 - k)) as u8))
            .collect();
        let expected = expected_trap_outcome(test, &outs)?;
        let mut work = state.clone();
        let mut branch_prob = 1.0;
        let mut possible = true;
        for (&q, &o) in nts.iter().zip(&outs) {
            match work.project(q, test.basis_for(q), o) {
                Ok(p) => branch_prob *= p,
                Err(Error::ImpossibleBranch { .. }) => {
                    possible = false;
                    branch_prob = 0.0;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        for (k, &t) in traps.iter().enumerate() {
            let pass_prob = if possible {
                let (p_plus, p_minus) = work.born_probabilities(t, test.basis_for(t))?;
                match expected[k] {
                    Outcome::Plus => p_plus,
                    Outcome::Minus => p_minus,
                }
            } else {
                0.0
            };
            rows.push(TrapProfileRow {
                non_trap_outcomes: outs.clone(),
                trap_qubit: t,
                expected: expected[k],
                branch_prob,
                pass_prob,
            });
        }
    }
    Ok(rows)
}

/// Exact probability that every trap matches its expectation, summed over
/// all non-trap branches. This is the infinite-shot limit of acceptance.
pub fn exact_acceptance(state: &QuantumState, test: &TrapTest) -> Result<f64> {
    test.validate()?;
    let nts = test.non_trap_qubits();
    let traps = test.traps();
    let mut total = 0.0;
    for branch in 0..1usize << nts.len() {
        let outs: Vec<Outcome> = (0..nts.len())
            .map(|k| Outcome::from_bit((branch >> (nts.len() - 1 - k)) as u8))
            .collect();
        let expected = expected_trap_outcome(test, &outs)?;
        let mut work = state.clone();
        let mut joint = 1.0;
        let mut possible = true;
        let steps = nts
            .iter()
            .zip(&outs)
            .map(|(&q, &o)| (q, o))
            .chain(traps.iter().zip(&expected).map(|(&q, &o)| (q, o)));
        for (q, o) in steps {
            match work.project(q, test.basis_for(q), o) {
                Ok(p) => joint *= p,
                Err(Error::ImpossibleBranch { .. }) => {
                    possible = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if possible {
            total += joint;
        }
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Sampled acceptance: fraction of shots in which every trap matched.
pub fn sampled_acceptance(
    state: &QuantumState,
    test: &TrapTest,
    shots: u64,
    rng: &mut dyn RngCore,
) -> Result<f64> {
    let nts = test.non_trap_qubits();
    let traps = test.traps();
    let mut accepted = 0u64;
    for _ in 0..shots {
        let mut work = state.clone();
        let mut outs = Vec::with_capacity(nts.len());
        for &q in &nts {
            outs.push(work.measure(q, test.basis_for(q), rng)?);
        }
        let expected = expected_trap_outcome(test, &outs)?;
        let mut pass = true;
        for (k, &t) in traps.iter().enumerate() {
            if work.measure(t, test.basis_for(t), rng)? != expected[k] {
                pass = false;
                break;
            }
        }
        if pass {
            accepted += 1;
        }
    }
    Ok(accepted as f64 / shots as f64)
}

/// The family of server states that passes the (1,3) test by construction:
/// four phase parameters on the conditional branches plus one ancilla state
/// per branch that the server may keep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdversaryParams {
    /// Phases on branches 2..4 (branch 1 is the reference).
    pub thetas: [f64; 3],
    /// Normalized ancilla states, one per branch, all on the same number of
    /// qubits (0 to 4).
    pub ancillas: [StateVector; 4],
}

/// Largest ancilla register.
pub const MAX_ANCILLA_QUBITS: usize = 4;

impl AdversaryParams {
    pub fn validate(&self) -> Result<()> {
        let k = self.ancillas[0].num_qubits();
        if k > MAX_ANCILLA_QUBITS {
            return Err(Error::BadAncilla {
                max: MAX_ANCILLA_QUBITS,
                got: k,
            });
        }
        for a in &self.ancillas {
            if a.num_qubits() != k {
                return Err(Error::BadAncilla {
                    max: MAX_ANCILLA_QUBITS,
                    got: a.num_qubits(),
                });
            }
            let norm = a.norm();
            if (norm - 1.0).abs() > crate::sim::ALGEBRAIC_TOL {
                return Err(Error::NotNormalized { norm });
            }
        }
        Ok(())
    }

    pub fn ancilla_qubits(&self) -> usize {
        self.ancillas[0].num_qubits()
    }
}

/// Phases only, no ancilla register.
pub fn aligned_adversary(thetas: [f64; 3]) -> AdversaryParams {
    AdversaryParams {
        thetas,
        ancillas: std::array::from_fn(|_| StateVector::zero(0)),
    }
}

/// Random phases in [0, 2pi) and independent random `k`-qubit ancillas.
pub fn random_adversary(k: usize, rng: &mut dyn RngCore) -> AdversaryParams {
    let tau = std::f64::consts::TAU;
    AdversaryParams {
        thetas: std::array::from_fn(|_| unit_f64(rng) * tau),
        ancillas: std::array::from_fn(|_| StateVector::random(k, rng)),
    }
}

fn branch_term(bits: [u8; 4]) -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let zero = [C64::ONE, C64::ZERO];
    let one = [C64::ZERO, C64::ONE];
    let plus = [C64::new(h, 0.0), C64::new(h, 0.0)];
    let minus = [C64::new(h, 0.0), C64::new(-h, 0.0)];
    let pick = |b: u8, z: bool| -> [C64; 2] {
        match (z, b) {
            (true, 0) => zero,
            (true, _) => one,
            (false, 0) => plus,
            (false, _) => minus,
        }
    };
    StateVector::product(&[
        pick(bits[0], true),
        pick(bits[1], false),
        pick(bits[2], true),
        pick(bits[3], false),
    ])
    .expect("product of unit factors")
}

/// Build the joint server state: an equal superposition of the four
/// (1,3)-test branches `|0+0+>, |0-1->, |1-0+>, |1+1->` with phases
/// `1, e^{i t2}, e^{i t3}, e^{i t4}`, each tensored with its ancilla.
/// With all phases zero and equal ancillas this is the linear cluster times
/// the ancilla.
pub fn build_adversary_state(params: &AdversaryParams) -> Result<StateVector> {
    params.validate()?;
    let branches = [
        branch_term([0, 0, 0, 0]),
        branch_term([0, 1, 1, 1]),
        branch_term([1, 1, 0, 0]),
        branch_term([1, 0, 1, 1]),
    ];
    let phases = [
        C64::ONE,
        C64::from_polar(1.0, params.thetas[0]),
        C64::from_polar(1.0, params.thetas[1]),
        C64::from_polar(1.0, params.thetas[2]),
    ];
    let k = params.ancilla_qubits();
    let dim = 1usize << (4 + k);
    let mut amps = vec![C64::ZERO; dim];
    for j in 0..4 {
        let term = branches[j].tensor(&params.ancillas[j]);
        let w = phases[j] * C64::new(0.5, 0.0);
        for (a, t) in amps.iter_mut().zip(term.amplitudes()) {
            *a += w * t;
        }
    }
    StateVector::from_amplitudes(amps)
}

/// One evaluated adversary point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ForcedStatePoint {
    pub thetas: [f64; 3],
    pub ancilla_qubits: usize,
    pub description: String,
    pub pass_a: f64,
    pub pass_b: f64,
    pub fidelity_to_linear: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ForcedStateReport {
    pub points: Vec<ForcedStatePoint>,
    /// Indices of points violating the statement, empty when it holds.
    pub violations: Vec<usize>,
    pub theorem_holds: bool,
}

/// Evaluate the forced-state statement on a set of adversary points: the
/// (1,3) test accepts with probability exactly 1 everywhere, and the (2,4)
/// test accepts with probability 1 exactly at the points whose reduced
/// four-qubit state is the linear cluster.
pub fn forced_state_check(grid: &[AdversaryParams]) -> Result<ForcedStateReport> {
    forced_state_check_described(grid.iter().map(|p| (p.clone(), String::new())))
}

pub fn forced_state_check_described(
    grid: impl IntoIterator<Item = (AdversaryParams, String)>,
) -> Result<ForcedStateReport> {
    let (test_a, test_b) = linear_tests();
    let linear = crate::graph::linear_cluster4();
    let mut points = Vec::new();
    let mut violations = Vec::new();
    for (idx, (params, description)) in grid.into_iter().enumerate() {
        let joint = build_adversary_state(&params)?;
        let state = QuantumState::from(joint.clone());
        let pass_a = exact_acceptance(&state, &test_a)?;
        let pass_b = exact_acceptance(&state, &test_b)?;
        let reduced = joint.reduced(&[1, 2, 3, 4])?;
        let fidelity = reduced.fidelity_pure(&linear)?;
        let b_is_one = pass_b >= 1.0 - ITERATIVE_TOL;
        let f_is_one = fidelity >= 1.0 - ITERATIVE_TOL;
        if pass_a < 1.0 - ITERATIVE_TOL || b_is_one != f_is_one {
            violations.push(idx);
        }
        points.push(ForcedStatePoint {
            thetas: params.thetas,
            ancilla_qubits: params.ancilla_qubits(),
            description,
            pass_a,
            pass_b,
            fidelity_to_linear: fidelity,
        });
    }
    Ok(ForcedStateReport {
        theorem_holds: violations.is_empty(),
        points,
        violations,
    })
}

/// The coarse grid `theta in {0, pi/8, .., pi}^3` with no ancillas, plus
/// `extra_random` points with random phases and random 2-qubit ancillas.
pub fn standard_grid(extra_random: usize, rng: &mut dyn RngCore) -> Vec<(AdversaryParams, String)> {
    let mut grid = Vec::new();
    let steps = 9usize;
    for i in 0..steps {
        for j in 0..steps {
            for k in 0..steps {
                let t = |s: usize| s as f64 * std::f64::consts::PI / 8.0;
                grid.push((
                    aligned_adversary([t(i), t(j), t(k)]),
                    format!("grid({i},{j},{k})"),
                ));
            }
        }
    }
    for r in 0..extra_random {
        grid.push((random_adversary(2, rng), format!("random({r})")));
    }
    grid
}

/// Per-round mix of the two tests.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TestMix {
    pub p_test_a: f64,
    pub p_test_b: f64,
}

impl TestMix {
    pub fn validate(&self) -> Result<()> {
        let s = self.p_test_a + self.p_test_b;
        if (s - 1.0).abs() > 1e-9 || self.p_test_a < 0.0 || self.p_test_b < 0.0 {
            return Err(Error::InvalidMix(s));
        }
        Ok(())
    }
}

/// Probability that `n` independent test rounds all accept, given the exact
/// per-test acceptances: `(pa * mix_a + pb * mix_b)^n`.
pub fn amplified_acceptance_exact(pass_a: f64, pass_b: f64, mix: TestMix, n_rounds: u32) -> Result<f64> {
    mix.validate()?;
    Ok((mix.p_test_a * pass_a + mix.p_test_b * pass_b).powi(n_rounds as i32))
}

/// Sampled n-round acceptance: each trial draws `n_rounds` tests i.i.d. from
/// the mix, runs each on a fresh copy of the state, and accepts only if all
/// rounds pass.
pub fn amplified_acceptance_sampled(
    state: &QuantumState,
    test_a: &TrapTest,
    test_b: &TrapTest,
    mix: TestMix,
    n_rounds: u32,
    trials: u64,
    rng: &mut dyn RngCore,
) -> Result<f64> {
    mix.validate()?;
    let mut accepted = 0u64;
    'trial: for _ in 0..trials {
        for _ in 0..n_rounds {
            let test = if unit_f64(rng) < mix.p_test_a {
                test_a
            } else {
                test_b
            };
            let mut work = state.clone();
            let nts = test.non_trap_qubits();
            let mut outs = Vec::with_capacity(nts.len());
            for &q in &nts {
                outs.push(work.measure(q, test.basis_for(q), rng)?);
            }
            let expected = expected_trap_outcome(test, &outs)?;
            for (k, &t) in test.traps().iter().enumerate() {
                if work.measure(t, test.basis_for(t), rng)? != expected[k] {
                    continue 'trial;
                }
            }
        }
        accepted += 1;
    }
    Ok(accepted as f64 / trials as f64)
}
