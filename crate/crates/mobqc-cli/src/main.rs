//! Reproduction driver: regenerates the gate tables, trap-test reports,
//! tomography pipeline outputs and protocol session logs from a seed and an
//! optional JSON config. Identical config and seed give byte-identical
//! outputs.

mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use config::{AdversaryConfig, RunConfig};
use mobqc::graph::ResourceKind;
use mobqc::mbqc::{gate_by_name, gate_library, verify_gate, ComparisonMode};
use mobqc::noise::{apply_noise, calibrate, CalibrationShape, NoiseConfig};
use mobqc::protocol::{
    blindness_check, run_batch, run_session, AdversaryServer, BatchPrograms, ClientProgram,
    HonestServer, NoisyHonestServer, ServerStrategy, SessionMix, Verdict,
};
use mobqc::rng::substream;
use mobqc::sim::{DensityMatrix, QuantumState};
use mobqc::tomo::{
    exact_record, fidelity_local_unitary, linear_inversion, linear_inversion_probs,
    project_physical, simulate_counts, CountRecord, FidelityReport, LocalUnitaryOptions,
    ReconstructionResult,
};
use mobqc::verify::{exact_trap_profile, linear_tests, run_trap_test, star_tests, TrapTest};

/// Errors split by exit code: bad configuration (2) vs numerical failure (3).
#[derive(Debug)]
pub enum AppError {
    Config(String),
    Numerical(String),
}

impl AppError {
    pub fn config(msg: impl Into<String>) -> Self {
        AppError::Config(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        AppError::Numerical(msg.into())
    }
}

impl From<mobqc::Error> for AppError {
    fn from(e: mobqc::Error) -> Self {
        use mobqc::Error::*;
        match e {
            UnreachableTarget { .. } | ImpossibleBranch { .. } | NotPositive { .. }
            | ResidualNotPure(_) | NotNormalized { .. } | NotHermitian { .. }
            | BadTrace { .. } => AppError::Numerical(e.to_string()),
            _ => AppError::Config(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "mobqc", version, about = "measurement-only blind quantum computing simulator")]
struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<String>,

    /// Master seed; all randomness derives from it through named substreams.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output path ("-" or absent = stdout; a directory for `tomography`).
    #[arg(long, global = true)]
    out: Option<String>,

    #[arg(long, global = true)]
    shots: Option<u64>,

    /// Resource state: linear or star.
    #[arg(long, global = true)]
    resource: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entangling-gate branch fidelities, noiseless and optionally noisy.
    Gates {
        /// Write the gate specifications as JSON to this path.
        #[arg(long)]
        specs_out: Option<String>,
        /// Noise config JSON path.
        #[arg(long)]
        noise: Option<String>,
        /// Calibrate uniform depolarizing noise to this state fidelity.
        #[arg(long)]
        calibrate_target: Option<f64>,
    },
    /// Trap-test reports for a resource, optionally noisy or adversarial.
    Verify {
        /// Which tests: a, b or both.
        #[arg(long)]
        test: Option<String>,
        /// Adversary JSON: {"thetas":[t2,t3,t4], "ancillas": null | [[[re,im],..] x4]}.
        #[arg(long)]
        adversary: Option<String>,
        #[arg(long)]
        noise: Option<String>,
        #[arg(long)]
        calibrate_target: Option<f64>,
        /// Emit exact conditional probabilities instead of sampling.
        #[arg(long)]
        exact: bool,
    },
    /// State tomography pipeline; writes counts, matrices and fidelities.
    Tomography {
        /// Read counts from this CSV instead of simulating.
        #[arg(long)]
        counts_in: Option<String>,
        /// Invert exact outcome distributions instead of sampled counts.
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        noise: Option<String>,
        #[arg(long)]
        calibrate_target: Option<f64>,
    },
    /// One protocol session; JSON log.
    Session {
        /// TestA, TestB, StarTestA, StarTestB or computation.
        #[arg(long)]
        program: Option<String>,
        /// Gate for computation programs.
        #[arg(long)]
        gate: Option<String>,
        #[arg(long)]
        adversary: Option<String>,
        #[arg(long)]
        noise: Option<String>,
    },
    /// Many sessions with a random program mix; JSON report.
    Batch {
        /// Mix as "p_test_a,p_test_b,p_compute".
        #[arg(long)]
        mix: Option<String>,
        #[arg(long)]
        sessions: Option<u64>,
        #[arg(long)]
        gate: Option<String>,
        #[arg(long)]
        adversary: Option<String>,
        #[arg(long)]
        noise: Option<String>,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(AppError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}

struct Ctx {
    seed: u64,
    shots: u64,
    resource: ResourceKind,
    out: Option<String>,
    cfg: RunConfig,
}

fn build_ctx(cli: &Cli) -> Result<Ctx, AppError> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let resource = match cli.resource.as_deref() {
        Some(text) => text
            .parse::<ResourceKind>()
            .map_err(|e| AppError::config(e.to_string()))?,
        None => cfg.resource.unwrap_or(ResourceKind::Linear),
    };
    Ok(Ctx {
        seed: cli.seed.or(cfg.seed).unwrap_or(0),
        shots: cli.shots.or(cfg.shots).unwrap_or(10_000),
        resource,
        out: cli.out.clone().or_else(|| cfg.out.clone()),
        cfg,
    })
}

fn run() -> Result<(), AppError> {
    let cli = Cli::parse();
    let ctx = build_ctx(&cli)?;
    match &cli.command {
        Command::Gates {
            specs_out,
            noise,
            calibrate_target,
        } => cmd_gates(&ctx, specs_out.as_deref(), noise.as_deref(), *calibrate_target),
        Command::Verify {
            test,
            adversary,
            noise,
            calibrate_target,
            exact,
        } => cmd_verify(
            &ctx,
            test.as_deref(),
            adversary.as_deref(),
            noise.as_deref(),
            *calibrate_target,
            *exact,
        ),
        Command::Tomography {
            counts_in,
            exact,
            noise,
            calibrate_target,
        } => cmd_tomography(
            &ctx,
            counts_in.as_deref(),
            *exact,
            noise.as_deref(),
            *calibrate_target,
        ),
        Command::Session {
            program,
            gate,
            adversary,
            noise,
        } => cmd_session(
            &ctx,
            program.as_deref(),
            gate.as_deref(),
            adversary.as_deref(),
            noise.as_deref(),
        ),
        Command::Batch {
            mix,
            sessions,
            gate,
            adversary,
            noise,
        } => cmd_batch(
            &ctx,
            mix.as_deref(),
            *sessions,
            gate.as_deref(),
            adversary.as_deref(),
            noise.as_deref(),
        ),
    }
}

// ---- shared plumbing ----

fn write_output(out: &Option<String>, content: &str) -> Result<(), AppError> {
    match out.as_deref() {
        None | Some("-") => {
            print!("{content}");
            Ok(())
        }
        Some(path) => std::fs::write(path, content)
            .map_err(|e| AppError::config(format!("cannot write {path}: {e}"))),
    }
}

fn load_noise_file(path: &str) -> Result<NoiseConfig, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::config(format!("cannot read noise file {path}: {e}")))?;
    let cfg: NoiseConfig = serde_json::from_str(&text)
        .map_err(|e| AppError::config(format!("bad noise file {path}: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Precedence: --noise file, config inline, config path, calibration target.
fn resolve_noise(
    ctx: &Ctx,
    noise_flag: Option<&str>,
    calibrate_flag: Option<f64>,
) -> Result<Option<NoiseConfig>, AppError> {
    if let Some(path) = noise_flag {
        return Ok(Some(load_noise_file(path)?));
    }
    if let Some(cfg) = &ctx.cfg.noise {
        cfg.validate()?;
        return Ok(Some(cfg.clone()));
    }
    if let Some(path) = &ctx.cfg.noise_path {
        return Ok(Some(load_noise_file(path)?));
    }
    if let Some(target) = calibrate_flag.or(ctx.cfg.calibrate_target) {
        let result = calibrate(
            target,
            &ctx.resource.state(),
            CalibrationShape::UniformDepolarizing,
        )?;
        return Ok(Some(result.config));
    }
    Ok(None)
}

fn resolve_adversary(
    ctx: &Ctx,
    adversary_flag: Option<&str>,
) -> Result<Option<mobqc::verify::AdversaryParams>, AppError> {
    let cfg = match adversary_flag {
        Some(text) => Some(AdversaryConfig::parse(text)?),
        None => ctx.cfg.adversary.clone(),
    };
    cfg.map(|c| c.to_params()).transpose()
}

fn fmt_prob(x: f64) -> String {
    format!("{x:.10}")
}

fn outcome_bits(outs: &[mobqc::sim::Outcome]) -> String {
    outs.iter().map(|o| char::from(b'0' + o.bit())).collect()
}

// ---- gates ----

fn cmd_gates(
    ctx: &Ctx,
    specs_out: Option<&str>,
    noise_flag: Option<&str>,
    calibrate_flag: Option<f64>,
) -> Result<(), AppError> {
    let gates = gate_library();
    let mut csv = String::from("condition,gate,s2,s3,ideal_state,fidelity\n");

    let emit = |condition: &str, state: &QuantumState, csv: &mut String| -> Result<(), AppError> {
        for spec in &gates {
            let rows = verify_gate(spec, state, ComparisonMode::PerOutcome)?;
            for ((s2, s3), fidelity) in rows {
                let label = spec.ideal_label(
                    mobqc::sim::Outcome::from_bit(s2),
                    mobqc::sim::Outcome::from_bit(s3),
                );
                let _ = writeln!(
                    csv,
                    "{condition},{},{s2},{s3},{label},{}",
                    spec.name,
                    fmt_prob(fidelity)
                );
            }
        }
        Ok(())
    };

    let star = ResourceKind::Star.state();
    emit("noiseless", &QuantumState::from(star.clone()), &mut csv)?;
    if let Some(noise) = resolve_noise(ctx, noise_flag, calibrate_flag)? {
        let noisy = apply_noise(&star.to_density(), &noise)?;
        emit("noisy", &QuantumState::from(noisy), &mut csv)?;
    }

    if let Some(path) = specs_out {
        let json = serde_json::to_string_pretty(&gates)
            .map_err(|e| AppError::config(format!("serialize specs: {e}")))?;
        std::fs::write(path, json + "\n")
            .map_err(|e| AppError::config(format!("cannot write {path}: {e}")))?;
    }
    write_output(&ctx.out, &csv)
}

// ---- verify ----

fn tests_for(ctx: &Ctx, selection: Option<&str>) -> Result<Vec<TrapTest>, AppError> {
    let (a, b) = match ctx.resource {
        ResourceKind::Linear => linear_tests(),
        ResourceKind::Star => star_tests(),
    };
    match selection.unwrap_or("both").to_ascii_lowercase().as_str() {
        "a" => Ok(vec![a]),
        "b" => Ok(vec![b]),
        "both" => Ok(vec![a, b]),
        other => Err(AppError::config(format!("unknown test selection {other:?}"))),
    }
}

fn cmd_verify(
    ctx: &Ctx,
    test: Option<&str>,
    adversary_flag: Option<&str>,
    noise_flag: Option<&str>,
    calibrate_flag: Option<f64>,
    exact: bool,
) -> Result<(), AppError> {
    let selection = test.or(ctx.cfg.test.as_deref());
    let tests = tests_for(ctx, selection)?;

    let state: QuantumState = if let Some(params) = resolve_adversary(ctx, adversary_flag)? {
        if ctx.resource != ResourceKind::Linear {
            return Err(AppError::config(
                "the adversary family targets the linear-cluster tests",
            ));
        }
        QuantumState::from(mobqc::verify::build_adversary_state(&params)?)
    } else if let Some(noise) = resolve_noise(ctx, noise_flag, calibrate_flag)? {
        QuantumState::from(apply_noise(&ctx.resource.state().to_density(), &noise)?)
    } else {
        QuantumState::from(ctx.resource.state())
    };

    let mut csv = String::from("test,non_trap_outcome,trap_qubit,expected,pass_prob,ci_low,ci_high\n");
    for t in &tests {
        if exact {
            for row in exact_trap_profile(&state, t)? {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{}",
                    t.name,
                    outcome_bits(&row.non_trap_outcomes),
                    row.trap_qubit,
                    row.expected.bit(),
                    fmt_prob(row.pass_prob),
                    fmt_prob(row.pass_prob),
                    fmt_prob(row.pass_prob),
                );
            }
        } else {
            let mut rng = substream(ctx.seed, &format!("verify-{}", t.name));
            let report = run_trap_test(&state, t, ctx.shots, &mut rng)?;
            for row in report.rows {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{}",
                    t.name,
                    outcome_bits(&row.non_trap_outcomes),
                    row.trap_qubit,
                    row.expected.bit(),
                    fmt_prob(row.pass_prob),
                    fmt_prob(row.ci_low),
                    fmt_prob(row.ci_high),
                );
            }
        }
    }
    write_output(&ctx.out, &csv)
}

// ---- tomography ----

#[derive(Serialize)]
struct TomographyFidelityLog {
    resource: &'static str,
    seed: u64,
    shots_per_setting: u64,
    exact: bool,
    plain_fidelity: f64,
    local_unitary_fidelity: f64,
    min_raw_eigenvalue: f64,
    negative_mass: f64,
}

fn matrix_grid_csv(dm: &DensityMatrix, imag: bool) -> String {
    let dim = dm.dim();
    let mut out = String::new();
    for r in 0..dim {
        let row: Vec<String> = (0..dim)
            .map(|c| {
                let e = dm.element(r, c);
                format!("{:.12e}", if imag { e.im } else { e.re })
            })
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn cmd_tomography(
    ctx: &Ctx,
    counts_in: Option<&str>,
    exact_flag: bool,
    noise_flag: Option<&str>,
    calibrate_flag: Option<f64>,
) -> Result<(), AppError> {
    let out_dir = ctx
        .out
        .as_deref()
        .ok_or_else(|| AppError::config("tomography needs --out DIRECTORY"))?;
    let dir = PathBuf::from(out_dir);
    std::fs::create_dir_all(&dir)
        .map_err(|e| AppError::config(format!("cannot create {out_dir}: {e}")))?;
    let write = |name: &str, content: &str| -> Result<(), AppError> {
        let path: &Path = &dir.join(name);
        std::fs::write(path, content)
            .map_err(|e| AppError::config(format!("cannot write {}: {e}", path.display())))
    };

    let exact = exact_flag || ctx.cfg.exact.unwrap_or(false);
    let target = ctx.resource.state();
    let lu_opts = LocalUnitaryOptions {
        seed: ctx.seed,
        ..Default::default()
    };

    let counts_source = counts_in.or(ctx.cfg.counts_in.as_deref());
    let (result, report, counts_csv): (ReconstructionResult, FidelityReport, Option<String>) =
        if let Some(path) = counts_source {
            let text = std::fs::read_to_string(path)
                .map_err(|e| AppError::config(format!("cannot read counts {path}: {e}")))?;
            let counts = CountRecord::from_csv(&text)?;
            let raw = linear_inversion(&counts)?;
            let (physical, diagnostics) = project_physical(&raw)?;
            let plain = physical.fidelity_pure(&target)?;
            let (lu, _) = fidelity_local_unitary(&physical, &target, &lu_opts)?;
            (
                ReconstructionResult {
                    raw,
                    physical,
                    diagnostics,
                },
                FidelityReport {
                    plain,
                    local_unitary: lu,
                },
                Some(counts.to_csv()),
            )
        } else {
            let dm = match resolve_noise(ctx, noise_flag, calibrate_flag)? {
                Some(noise) => apply_noise(&target.to_density(), &noise)?,
                None => target.to_density(),
            };
            if exact {
                let raw = linear_inversion_probs(&exact_record(&dm)?)?;
                let (physical, diagnostics) = project_physical(&raw)?;
                let plain = physical.fidelity_pure(&target)?;
                let (lu, _) = fidelity_local_unitary(&physical, &target, &lu_opts)?;
                (
                    ReconstructionResult {
                        raw,
                        physical,
                        diagnostics,
                    },
                    FidelityReport {
                        plain,
                        local_unitary: lu,
                    },
                    None,
                )
            } else {
                let mut rng = substream(ctx.seed, "tomography");
                let counts = simulate_counts(&dm, ctx.shots, &mut rng)?;
                let csv = counts.to_csv();
                let raw = linear_inversion(&counts)?;
                let (physical, diagnostics) = project_physical(&raw)?;
                let plain = physical.fidelity_pure(&target)?;
                let (lu, _) = fidelity_local_unitary(&physical, &target, &lu_opts)?;
                (
                    ReconstructionResult {
                        raw,
                        physical,
                        diagnostics,
                    },
                    FidelityReport {
                        plain,
                        local_unitary: lu,
                    },
                    Some(csv),
                )
            }
        };

    if let Some(csv) = counts_csv {
        write("counts.csv", &csv)?;
    }
    write("dm_real.csv", &matrix_grid_csv(&result.physical, false))?;
    write("dm_imag.csv", &matrix_grid_csv(&result.physical, true))?;
    let log = TomographyFidelityLog {
        resource: ctx.resource.label(),
        seed: ctx.seed,
        shots_per_setting: ctx.shots,
        exact,
        plain_fidelity: report.plain,
        local_unitary_fidelity: report.local_unitary,
        min_raw_eigenvalue: result.diagnostics.min_raw_eigenvalue,
        negative_mass: result.diagnostics.negative_mass,
    };
    let json = serde_json::to_string_pretty(&log)
        .map_err(|e| AppError::config(format!("serialize fidelity log: {e}")))?;
    write("fidelity.json", &(json + "\n"))
}

// ---- session / batch ----

fn resolve_program(
    program: Option<&str>,
    gate: Option<&str>,
) -> Result<ClientProgram, AppError> {
    let gate_name = gate.unwrap_or("Y2X3");
    let gate_spec = gate_by_name(gate_name)
        .ok_or_else(|| AppError::config(format!("unknown gate {gate_name:?}")))?;
    match program.unwrap_or("TestA").to_ascii_lowercase().as_str() {
        "testa" => Ok(ClientProgram::TestA),
        "testb" => Ok(ClientProgram::TestB),
        "startesta" => Ok(ClientProgram::StarTestA),
        "startestb" => Ok(ClientProgram::StarTestB),
        "computation" | "compute" => Ok(ClientProgram::Computation(gate_spec)),
        other => Err(AppError::config(format!("unknown program {other:?}"))),
    }
}

fn resolve_server(
    ctx: &Ctx,
    adversary_flag: Option<&str>,
    noise_flag: Option<&str>,
) -> Result<Box<dyn ServerStrategy>, AppError> {
    if let Some(params) = resolve_adversary(ctx, adversary_flag)? {
        return Ok(Box::new(AdversaryServer::new(params)));
    }
    if let Some(noise) = resolve_noise(ctx, noise_flag, None)? {
        return Ok(Box::new(NoisyHonestServer {
            resource: ctx.resource,
            config: noise,
        }));
    }
    Ok(Box::new(HonestServer {
        resource: ctx.resource,
    }))
}

#[derive(Serialize)]
struct SessionLog {
    program: String,
    seed: u64,
    resource: &'static str,
    server: String,
    outcomes: Vec<(usize, u8)>,
    verdict: &'static str,
    blindness_check: bool,
}

fn verdict_label(v: Verdict) -> &'static str {
    match v {
        Verdict::Accept => "Accept",
        Verdict::Abort => "Abort",
        Verdict::NotApplicable => "N/A",
    }
}

fn cmd_session(
    ctx: &Ctx,
    program: Option<&str>,
    gate: Option<&str>,
    adversary_flag: Option<&str>,
    noise_flag: Option<&str>,
) -> Result<(), AppError> {
    let program = resolve_program(
        program.or(ctx.cfg.program.as_deref()),
        gate.or(ctx.cfg.gate.as_deref()),
    )?;
    let server = resolve_server(ctx, adversary_flag, noise_flag)?;
    let mut server_rng = substream(ctx.seed, "server");
    let mut client_rng = substream(ctx.seed, "client");
    let (result, _transcript) =
        run_session(server.as_ref(), &program, &mut server_rng, &mut client_rng)?;
    let gate_spec = gate_by_name(gate.or(ctx.cfg.gate.as_deref()).unwrap_or("Y2X3"))
        .expect("gate validated above");
    let blind = blindness_check(server.as_ref(), &ClientProgram::all(gate_spec), ctx.seed)?;
    let log = SessionLog {
        program: result.program,
        seed: ctx.seed,
        resource: ctx.resource.label(),
        server: server.name(),
        outcomes: result.outcomes.iter().map(|(q, o)| (*q, o.bit())).collect(),
        verdict: verdict_label(result.verdict),
        blindness_check: blind,
    };
    let json = serde_json::to_string_pretty(&log)
        .map_err(|e| AppError::config(format!("serialize session log: {e}")))?;
    write_output(&ctx.out, &(json + "\n"))
}

#[derive(Serialize)]
struct BatchLog {
    resource: &'static str,
    server: String,
    mix: SessionMix,
    blindness_check: bool,
    report: mobqc::protocol::BatchReport,
}

fn parse_mix(text: &str) -> Result<SessionMix, AppError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(AppError::config(format!(
            "mix must be \"a,b,c\", got {text:?}"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| AppError::config(format!("bad mix component {p:?}: {e}")))
        })
        .collect::<Result<_, _>>()?;
    Ok(SessionMix {
        p_test_a: nums[0],
        p_test_b: nums[1],
        p_compute: nums[2],
    })
}

fn cmd_batch(
    ctx: &Ctx,
    mix_flag: Option<&str>,
    sessions: Option<u64>,
    gate: Option<&str>,
    adversary_flag: Option<&str>,
    noise_flag: Option<&str>,
) -> Result<(), AppError> {
    let mix = match mix_flag {
        Some(text) => parse_mix(text)?,
        None => ctx.cfg.mix.unwrap_or(SessionMix {
            p_test_a: 0.5,
            p_test_b: 0.5,
            p_compute: 0.0,
        }),
    };
    mix.validate()?;
    let n_sessions = sessions.or(ctx.cfg.sessions).unwrap_or(1_000);
    let gate_name = gate.or(ctx.cfg.gate.as_deref()).unwrap_or("Y2X3");
    let gate_spec = gate_by_name(gate_name)
        .ok_or_else(|| AppError::config(format!("unknown gate {gate_name:?}")))?;
    let server = resolve_server(ctx, adversary_flag, noise_flag)?;
    let programs = BatchPrograms::for_resource(ctx.resource, gate_spec.clone());
    let report = run_batch(server.as_ref(), &programs, mix, n_sessions, ctx.seed)?;
    let blind = blindness_check(server.as_ref(), &ClientProgram::all(gate_spec), ctx.seed)?;
    let log = BatchLog {
        resource: ctx.resource.label(),
        server: server.name(),
        mix,
        blindness_check: blind,
        report,
    };
    let json = serde_json::to_string_pretty(&log)
        .map_err(|e| AppError::config(format!("serialize batch log: {e}")))?;
    write_output(&ctx.out, &(json + "\n"))
}
