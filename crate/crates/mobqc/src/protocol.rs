//! Two-party session engine over a one-way channel.
//!
//! The server prepares a joint state (four protocol qubits plus any ancillas
//! it keeps) and sends the protocol qubits one by one. Once a qubit is sent
//! the engine owns it on the client's behalf; the server acts only inside
//! `prepare`, so it can never touch a sent qubit again. The client measures
//! each qubit on arrival in whatever basis its program dictates for that
//! position label. The server-side transcript records nothing but
//! `QubitSent` events, so no client choice can leak into it by construction.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ResourceKind;
use crate::mbqc::GateSpec;
use crate::noise::{noisy_resource, NoiseConfig};
use crate::rng::{substream, unit_f64};
use crate::sim::{DensityMatrix, MeasurementBasis, Outcome, QuantumState};
use crate::verify::{
    build_adversary_state, expected_trap_outcome, linear_tests, star_tests, AdversaryParams,
    TrapTest,
};

/// A server behavior: how the joint state is prepared and in which order the
/// four protocol qubits leave the laboratory. Ancilla qubits (labels 5 and
/// up) never appear in the send order.
pub trait ServerStrategy {
    fn name(&self) -> String;

    /// The joint state over 4 protocol qubits plus retained ancillas.
    fn prepare(&self, rng: &mut dyn RngCore) -> Result<QuantumState>;

    /// Permutation of 1..=4.
    fn send_order(&self) -> Vec<usize> {
        vec![1, 2, 3, 4]
    }
}

/// Prepares the ideal resource every time.
#[derive(Clone, Debug)]
pub struct HonestServer {
    pub resource: ResourceKind,
}

impl ServerStrategy for HonestServer {
    fn name(&self) -> String {
        format!("honest-{}", self.resource.label())
    }

    fn prepare(&self, _rng: &mut dyn RngCore) -> Result<QuantumState> {
        Ok(QuantumState::from(self.resource.state()))
    }
}

/// Honest preparation followed by the configured noise.
#[derive(Clone, Debug)]
pub struct NoisyHonestServer {
    pub resource: ResourceKind,
    pub config: NoiseConfig,
}

impl ServerStrategy for NoisyHonestServer {
    fn name(&self) -> String {
        format!("noisy-{}", self.resource.label())
    }

    fn prepare(&self, _rng: &mut dyn RngCore) -> Result<QuantumState> {
        Ok(QuantumState::from(noisy_resource(
            &self.resource.state(),
            &self.config,
        )?))
    }
}

/// Prepares a member of the phase/ancilla adversary family, optionally
/// permuting the send order.
#[derive(Clone, Debug)]
pub struct AdversaryServer {
    pub params: AdversaryParams,
    pub send_order: Vec<usize>,
}

impl AdversaryServer {
    pub fn new(params: AdversaryParams) -> Self {
        AdversaryServer {
            params,
            send_order: vec![1, 2, 3, 4],
        }
    }
}

impl ServerStrategy for AdversaryServer {
    fn name(&self) -> String {
        format!(
            "adversary(t=[{:.3},{:.3},{:.3}],k={})",
            self.params.thetas[0],
            self.params.thetas[1],
            self.params.thetas[2],
            self.params.ancilla_qubits()
        )
    }

    fn prepare(&self, _rng: &mut dyn RngCore) -> Result<QuantumState> {
        Ok(QuantumState::from(build_adversary_state(&self.params)?))
    }

    fn send_order(&self) -> Vec<usize> {
        self.send_order.clone()
    }
}

/// Sends a fixed, possibly wrong, state.
#[derive(Clone, Debug)]
pub struct FixedStateServer {
    pub label: String,
    pub state: QuantumState,
}

impl ServerStrategy for FixedStateServer {
    fn name(&self) -> String {
        format!("fixed-{}", self.label)
    }

    fn prepare(&self, _rng: &mut dyn RngCore) -> Result<QuantumState> {
        Ok(self.state.clone())
    }
}

/// What the client runs: one of the four trap tests or a gate computation.
#[derive(Clone, Debug)]
pub enum ClientProgram {
    Computation(GateSpec),
    TestA,
    TestB,
    StarTestA,
    StarTestB,
}

impl ClientProgram {
    pub fn label(&self) -> String {
        match self {
            ClientProgram::Computation(spec) => format!("Computation({})", spec.name),
            ClientProgram::TestA => "TestA".into(),
            ClientProgram::TestB => "TestB".into(),
            ClientProgram::StarTestA => "StarTestA".into(),
            ClientProgram::StarTestB => "StarTestB".into(),
        }
    }

    pub fn trap_test(&self) -> Option<TrapTest> {
        match self {
            ClientProgram::Computation(_) => None,
            ClientProgram::TestA => Some(linear_tests().0),
            ClientProgram::TestB => Some(linear_tests().1),
            ClientProgram::StarTestA => Some(star_tests().0),
            ClientProgram::StarTestB => Some(star_tests().1),
        }
    }

    /// Basis the client uses for a given position label; `None` means the
    /// qubit is kept unmeasured (a computation output).
    pub fn basis_for_position(&self, position: usize) -> Option<MeasurementBasis> {
        match self {
            ClientProgram::Computation(spec) => spec
                .pattern
                .steps
                .iter()
                .find(|(q, _)| *q == position)
                .map(|(_, b)| *b),
            _ => {
                let test = self.trap_test().expect("test program");
                Some(test.basis_for(position))
            }
        }
    }

    /// The five standard programs (computation uses the given gate).
    pub fn all(gate: GateSpec) -> Vec<ClientProgram> {
        vec![
            ClientProgram::Computation(gate),
            ClientProgram::TestA,
            ClientProgram::TestB,
            ClientProgram::StarTestA,
            ClientProgram::StarTestB,
        ]
    }
}

/// Events visible on the server side of the channel. The only variant
/// carries the position of a sent qubit; there is no field that could hold
/// client data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ServerEvent {
    QubitSent { position: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ClientEvent {
    QubitReceived {
        position: usize,
    },
    MeasurementPerformed {
        qubit: usize,
        basis: MeasurementBasis,
        outcome: Outcome,
    },
}

/// The one-way-channel event log of one session.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Transcript {
    pub server_view: Vec<ServerEvent>,
    pub client_view: Vec<ClientEvent>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Accept,
    Abort,
    /// Computation sessions never abort; statistics are left to reporting.
    NotApplicable,
}

/// Outcome of one session.
#[derive(Clone, Debug)]
pub struct SessionResult {
    pub program: String,
    /// `(qubit, outcome)` in measurement order.
    pub outcomes: Vec<(usize, Outcome)>,
    pub verdict: Verdict,
    /// Reduced state on the computation outputs, for computation programs.
    pub residual: Option<DensityMatrix>,
    pub output_qubits: Vec<usize>,
}

fn check_send_order(order: &[usize]) -> Result<()> {
    let mut seen = [false; 5];
    if order.len() != 4 {
        return Err(Error::InvalidPattern(format!(
            "send order must list the 4 protocol qubits, got {order:?}"
        )));
    }
    for &p in order {
        if p == 0 || p > 4 || seen[p] {
            return Err(Error::InvalidPattern(format!("bad send order {order:?}")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Run one session: the server prepares, streams its four protocol qubits,
/// and the client measures each arriving qubit per its program. Trap
/// programs compare the traps against the exact expectation and set the
/// verdict; computation programs return the reduced output state.
pub fn run_session(
    server: &dyn ServerStrategy,
    program: &ClientProgram,
    server_rng: &mut dyn RngCore,
    client_rng: &mut dyn RngCore,
) -> Result<(SessionResult, Transcript)> {
    let order = server.send_order();
    check_send_order(&order)?;
    // From here on the engine owns the state; the server has no further
    // handle on it, which is the in-process analogue of the one-way channel.
    let mut state = server.prepare(server_rng)?;
    if state.num_qubits() < 4 {
        return Err(Error::DimensionMismatch {
            left: state.num_qubits(),
            right: 4,
        });
    }

    let mut server_view = Vec::with_capacity(4);
    let mut client_view = Vec::new();
    let mut outcomes: Vec<(usize, Outcome)> = Vec::new();

    for &position in &order {
        server_view.push(ServerEvent::QubitSent { position });
        client_view.push(ClientEvent::QubitReceived { position });
        if let Some(basis) = program.basis_for_position(position) {
            let outcome = state.measure(position, basis, client_rng)?;
            client_view.push(ClientEvent::MeasurementPerformed {
                qubit: position,
                basis,
                outcome,
            });
            outcomes.push((position, outcome));
        }
    }

    let (verdict, residual, output_qubits) = match program {
        ClientProgram::Computation(spec) => {
            let outputs = spec.pattern.output_qubits.clone();
            let residual = state.reduced(&outputs)?;
            (Verdict::NotApplicable, Some(residual), outputs)
        }
        _ => {
            let test = program.trap_test().expect("test program");
            let lookup = |q: usize| -> Outcome {
                outcomes
                    .iter()
                    .find(|(qq, _)| *qq == q)
                    .expect("all qubits measured by test programs")
                    .1
            };
            let non_trap: Vec<Outcome> =
                test.non_trap_qubits().iter().map(|&q| lookup(q)).collect();
            let expected = expected_trap_outcome(&test, &non_trap)?;
            let pass = test
                .traps()
                .iter()
                .zip(&expected)
                .all(|(&t, &e)| lookup(t) == e);
            (
                if pass { Verdict::Accept } else { Verdict::Abort },
                None,
                Vec::new(),
            )
        }
    };

    Ok((
        SessionResult {
            program: program.label(),
            outcomes,
            verdict,
            residual,
            output_qubits,
        },
        Transcript {
            server_view,
            client_view,
        },
    ))
}

/// Canonical byte encoding of a server view.
pub fn server_view_bytes(view: &[ServerEvent]) -> Vec<u8> {
    serde_json::to_vec(view).expect("server events serialize")
}

/// True iff all encoded views are byte-identical.
pub fn views_identical(views: &[Vec<u8>]) -> bool {
    views.windows(2).all(|w| w[0] == w[1])
}

/// Run one session per program with the server RNG reseeded identically and
/// compare the server-side transcripts byte for byte.
pub fn blindness_check(
    server: &dyn ServerStrategy,
    programs: &[ClientProgram],
    seed: u64,
) -> Result<bool> {
    let mut views = Vec::with_capacity(programs.len());
    for (idx, program) in programs.iter().enumerate() {
        let mut server_rng = substream(seed, "server");
        let mut client_rng = substream(seed, &format!("client-{idx}"));
        let (_, transcript) = run_session(server, program, &mut server_rng, &mut client_rng)?;
        views.push(server_view_bytes(&transcript.server_view));
    }
    Ok(views_identical(&views))
}

/// Negative control for the blindness comparator: a broken channel whose
/// `QubitSent` positions are rewritten to encode the client's basis choice,
/// as a faulty implementation echoing information backwards would. The
/// resulting views differ across programs, so the comparator must say false.
pub fn leaky_server_view_bytes(
    server: &dyn ServerStrategy,
    program: &ClientProgram,
    seed: u64,
) -> Result<Vec<u8>> {
    let mut server_rng = substream(seed, "server");
    let mut client_rng = substream(seed, "client-leak");
    let (_, transcript) = run_session(server, program, &mut server_rng, &mut client_rng)?;
    let leaked: Vec<ServerEvent> = transcript
        .server_view
        .iter()
        .map(|ServerEvent::QubitSent { position }| {
            let code = match program.basis_for_position(*position) {
                Some(MeasurementBasis::PauliX) => 1,
                Some(MeasurementBasis::PauliY) => 2,
                Some(MeasurementBasis::PauliZ) => 3,
                Some(MeasurementBasis::Bloch { .. }) => 4,
                None => 0,
            };
            ServerEvent::QubitSent {
                position: position + 10 * code,
            }
        })
        .collect();
    Ok(server_view_bytes(&leaked))
}

/// Probabilities of drawing each program per session.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SessionMix {
    pub p_test_a: f64,
    pub p_test_b: f64,
    pub p_compute: f64,
}

impl SessionMix {
    pub fn validate(&self) -> Result<()> {
        let s = self.p_test_a + self.p_test_b + self.p_compute;
        if (s - 1.0).abs() > 1e-9
            || self.p_test_a < 0.0
            || self.p_test_b < 0.0
            || self.p_compute < 0.0
        {
            return Err(Error::InvalidMix(s));
        }
        Ok(())
    }
}

/// The three programs a batch draws from.
#[derive(Clone, Debug)]
pub struct BatchPrograms {
    pub test_a: ClientProgram,
    pub test_b: ClientProgram,
    pub computation: ClientProgram,
}

impl BatchPrograms {
    /// Tests matching the resource, plus the given gate for computation.
    pub fn for_resource(resource: ResourceKind, gate: GateSpec) -> Self {
        match resource {
            ResourceKind::Linear => BatchPrograms {
                test_a: ClientProgram::TestA,
                test_b: ClientProgram::TestB,
                computation: ClientProgram::Computation(gate),
            },
            ResourceKind::Star => BatchPrograms {
                test_a: ClientProgram::StarTestA,
                test_b: ClientProgram::StarTestB,
                computation: ClientProgram::Computation(gate),
            },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SessionRecord {
    pub index: u64,
    pub program: String,
    pub outcomes: Vec<(usize, Outcome)>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BatchReport {
    pub master_seed: u64,
    pub n_sessions: u64,
    pub test_a_sessions: u64,
    pub test_b_sessions: u64,
    pub compute_sessions: u64,
    pub accepted: u64,
    pub aborted: u64,
    /// Accepted fraction over test sessions, when any ran.
    pub acceptance_rate: Option<f64>,
    /// Histogram of computation outcome pairs `(s2, s3)`.
    pub compute_outcome_counts: Vec<((u8, u8), u64)>,
    pub records: Vec<SessionRecord>,
}

/// Run `n_sessions` i.i.d. sessions with programs drawn from the mix. Every
/// session gets its own derived server and client streams, so the batch is
/// reproducible from the master seed alone.
pub fn run_batch(
    server: &dyn ServerStrategy,
    programs: &BatchPrograms,
    mix: SessionMix,
    n_sessions: u64,
    master_seed: u64,
) -> Result<BatchReport> {
    mix.validate()?;
    let mut mixer = substream(master_seed, "mixer");
    let mut report = BatchReport {
        master_seed,
        n_sessions,
        test_a_sessions: 0,
        test_b_sessions: 0,
        compute_sessions: 0,
        accepted: 0,
        aborted: 0,
        acceptance_rate: None,
        compute_outcome_counts: Vec::new(),
        records: Vec::with_capacity(n_sessions as usize),
    };
    let mut outcome_hist: std::collections::BTreeMap<(u8, u8), u64> =
        std::collections::BTreeMap::new();

    for index in 0..n_sessions {
        let draw = unit_f64(&mut mixer);
        let program = if draw < mix.p_test_a {
            report.test_a_sessions += 1;
            &programs.test_a
        } else if draw < mix.p_test_a + mix.p_test_b {
            report.test_b_sessions += 1;
            &programs.test_b
        } else {
            report.compute_sessions += 1;
            &programs.computation
        };
        let mut server_rng = substream(master_seed, &format!("server-{index}"));
        let mut client_rng = substream(master_seed, &format!("client-{index}"));
        let (result, _) = run_session(server, program, &mut server_rng, &mut client_rng)?;
        match result.verdict {
            Verdict::Accept => report.accepted += 1,
            Verdict::Abort => report.aborted += 1,
            Verdict::NotApplicable => {
                let s2 = result.outcomes.iter().find(|(q, _)| *q == 2);
                let s3 = result.outcomes.iter().find(|(q, _)| *q == 3);
                if let (Some((_, s2)), Some((_, s3))) = (s2, s3) {
                    *outcome_hist.entry((s2.bit(), s3.bit())).or_default() += 1;
                }
            }
        }
        report.records.push(SessionRecord {
            index,
            program: result.program,
            outcomes: result.outcomes,
            verdict: result.verdict,
        });
    }
    let tests = report.test_a_sessions + report.test_b_sessions;
    if tests > 0 {
        report.acceptance_rate = Some(report.accepted as f64 / tests as f64);
    }
    report.compute_outcome_counts = outcome_hist.into_iter().collect();
    Ok(report)
}
