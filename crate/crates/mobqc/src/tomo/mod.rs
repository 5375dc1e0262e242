//! Over-complete local-Pauli state tomography of four-qubit registers:
//! forward count simulation, linear inversion over all 81 settings,
//! projection to the closest physical state, and fidelity maximized over
//! local unitaries.

pub mod optim;

use std::collections::BTreeMap;

use nalgebra::SymmetricEigen;
use num_complex::Complex64 as C64;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{substream, unit_f64};
use crate::sim::gates::Gate1;
use crate::sim::{DensityMatrix, StateVector};
use optim::NelderMead;

pub const NUM_QUBITS: usize = 4;
pub const DIM: usize = 1 << NUM_QUBITS;
pub const NUM_SETTINGS: usize = 81;

/// One local measurement axis per qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    fn letter(self) -> char {
        match self {
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
            PauliAxis::Z => 'Z',
        }
    }

    fn from_letter(c: char) -> Result<Self> {
        match c {
            'X' | 'x' => Ok(PauliAxis::X),
            'Y' | 'y' => Ok(PauliAxis::Y),
            'Z' | 'z' => Ok(PauliAxis::Z),
            other => Err(Error::MissingSetting(format!("bad axis {other:?}"))),
        }
    }

    /// Rotation mapping the axis eigenbasis onto the computational basis
    /// (+1 eigenvector to `|0>`).
    fn rotation(self) -> Gate1 {
        let basis = match self {
            PauliAxis::X => crate::sim::MeasurementBasis::PauliX,
            PauliAxis::Y => crate::sim::MeasurementBasis::PauliY,
            PauliAxis::Z => crate::sim::MeasurementBasis::PauliZ,
        };
        let (plus, minus) = basis.eigenvectors();
        Gate1::from_rows([
            [plus[0].conj(), plus[1].conj()],
            [minus[0].conj(), minus[1].conj()],
        ])
    }
}

/// A 4-tuple of measurement axes, e.g. `ZXZX`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TomographySetting(pub [PauliAxis; 4]);

impl TomographySetting {
    pub fn label(&self) -> String {
        self.0.iter().map(|a| a.letter()).collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let chars: Vec<char> = text.chars().collect();
        if chars.len() != 4 {
            return Err(Error::MissingSetting(format!("bad setting {text:?}")));
        }
        let mut axes = [PauliAxis::X; 4];
        for (i, &c) in chars.iter().enumerate() {
            axes[i] = PauliAxis::from_letter(c)?;
        }
        Ok(TomographySetting(axes))
    }
}

/// All 81 settings in lexicographic X < Y < Z order.
pub fn all_settings() -> Vec<TomographySetting> {
    let mut out = Vec::with_capacity(NUM_SETTINGS);
    for a in PauliAxis::ALL {
        for b in PauliAxis::ALL {
            for c in PauliAxis::ALL {
                for d in PauliAxis::ALL {
                    out.push(TomographySetting([a, b, c, d]));
                }
            }
        }
    }
    out
}

/// Exact joint outcome probabilities (16 outcomes, qubit 1 = top bit,
/// bit 0 = +1 eigenvalue) of measuring `dm` in one setting.
pub fn setting_probabilities(dm: &DensityMatrix, setting: &TomographySetting) -> Result<[f64; 16]> {
    if dm.num_qubits() != NUM_QUBITS {
        return Err(Error::DimensionMismatch {
            left: dm.num_qubits(),
            right: NUM_QUBITS,
        });
    }
    let mut rotated = dm.clone();
    for (q, axis) in setting.0.iter().enumerate() {
        rotated.apply_1q(q + 1, &axis.rotation())?;
    }
    let mut probs = [0.0; 16];
    for (k, p) in probs.iter_mut().enumerate() {
        *p = rotated.element(k, k).re.max(0.0);
    }
    Ok(probs)
}

/// Measured counts: 16 outcome tallies per setting, each summing to the
/// per-setting shot count.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CountRecord {
    pub shots_per_setting: u64,
    pub counts: BTreeMap<TomographySetting, [u64; 16]>,
}

impl CountRecord {
    pub fn frequencies(&self) -> ProbabilityRecord {
        let probs = self
            .counts
            .iter()
            .map(|(s, c)| {
                let mut f = [0.0; 16];
                for (fi, &ci) in f.iter_mut().zip(c) {
                    *fi = ci as f64 / self.shots_per_setting as f64;
                }
                (*s, f)
            })
            .collect();
        ProbabilityRecord { probs }
    }

    /// CSV rows `setting,outcome,count` with a header, outcomes 0..15.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("setting,outcome,count\n");
        for (setting, counts) in &self.counts {
            for (o, c) in counts.iter().enumerate() {
                out.push_str(&format!("{},{o},{c}\n", setting.label()));
            }
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut counts: BTreeMap<TomographySetting, [u64; 16]> = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            if lineno == 0 || line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::MissingSetting(format!("bad CSV line {line:?}")));
            }
            let setting = TomographySetting::parse(fields[0])?;
            let outcome: usize = fields[1]
                .parse()
                .map_err(|_| Error::MissingSetting(format!("bad outcome {:?}", fields[1])))?;
            let count: u64 = fields[2]
                .parse()
                .map_err(|_| Error::MissingSetting(format!("bad count {:?}", fields[2])))?;
            if outcome >= 16 {
                return Err(Error::MissingSetting(format!("outcome {outcome} > 15")));
            }
            counts.entry(setting).or_insert([0; 16])[outcome] = count;
        }
        let shots = counts
            .values()
            .next()
            .map(|c| c.iter().sum::<u64>())
            .unwrap_or(0);
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        Ok(CountRecord {
            shots_per_setting: shots,
            counts,
        })
    }
}

/// Exact per-setting outcome distributions (the infinite-shot limit of a
/// [`CountRecord`]).
#[derive(Clone, Debug)]
pub struct ProbabilityRecord {
    pub probs: BTreeMap<TomographySetting, [f64; 16]>,
}

/// The infinite-shot record of a state.
pub fn exact_record(dm: &DensityMatrix) -> Result<ProbabilityRecord> {
    let mut probs = BTreeMap::new();
    for setting in all_settings() {
        probs.insert(setting, setting_probabilities(dm, &setting)?);
    }
    Ok(ProbabilityRecord { probs })
}

/// Multinomial sampling of every setting.
pub fn simulate_counts(
    dm: &DensityMatrix,
    shots_per_setting: u64,
    rng: &mut dyn RngCore,
) -> Result<CountRecord> {
    if shots_per_setting == 0 {
        return Err(Error::ZeroShots);
    }
    let mut counts = BTreeMap::new();
    for setting in all_settings() {
        let probs = setting_probabilities(dm, &setting)?;
        let mut cdf = [0.0; 16];
        let mut acc = 0.0;
        for (k, p) in probs.iter().enumerate() {
            acc += p;
            cdf[k] = acc;
        }
        let total = acc.max(f64::MIN_POSITIVE);
        let mut tally = [0u64; 16];
        for _ in 0..shots_per_setting {
            let draw = unit_f64(rng) * total;
            let idx = cdf.partition_point(|&c| c < draw).min(15);
            tally[idx] += 1;
        }
        counts.insert(setting, tally);
    }
    Ok(CountRecord {
        shots_per_setting,
        counts,
    })
}

/// An un-projected reconstruction: Hermitian, trace one, possibly indefinite.
#[derive(Clone, Debug)]
pub struct RawEstimate {
    pub elems: Vec<C64>,
}

impl RawEstimate {
    pub fn element(&self, r: usize, c: usize) -> C64 {
        self.elems[r * DIM + c]
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = nalgebra::DMatrix::from_row_slice(DIM, DIM, &self.elems);
        let h = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }
}

fn pauli_string_matrix(code: usize) -> Vec<C64> {
    // base-4 digits, qubit 1 first: 0 = I, 1 = X, 2 = Y, 3 = Z
    let mut m = vec![C64::ONE];
    let mut dim = 1;
    for q in 0..NUM_QUBITS {
        let digit = code >> (2 * (NUM_QUBITS - 1 - q)) & 3;
        let g: [[C64; 2]; 2] = match digit {
            0 => crate::sim::gates::IDENT.0,
            1 => crate::sim::gates::PAULI_X.0,
            2 => crate::sim::gates::PAULI_Y.0,
            _ => crate::sim::gates::PAULI_Z.0,
        };
        let mut next = vec![C64::ZERO; (dim * 2) * (dim * 2)];
        for r in 0..dim {
            for c in 0..dim {
                let v = m[r * dim + c];
                if v == C64::ZERO {
                    continue;
                }
                for gr in 0..2 {
                    for gc in 0..2 {
                        next[(r * 2 + gr) * (dim * 2) + (c * 2 + gc)] = v * g[gr][gc];
                    }
                }
            }
        }
        m = next;
        dim *= 2;
    }
    m
}

/// Linear inversion over the full record: every Pauli-string expectation is
/// estimated as the unweighted mean over all settings containing it, and the
/// state is assembled as `(1/16) sum <P> P`. On exact probabilities this
/// reproduces the measured state to numerical precision.
pub fn linear_inversion(record: &CountRecord) -> Result<RawEstimate> {
    linear_inversion_probs(&record.frequencies())
}

pub fn linear_inversion_probs(record: &ProbabilityRecord) -> Result<RawEstimate> {
    for setting in all_settings() {
        if !record.probs.contains_key(&setting) {
            return Err(Error::MissingSetting(setting.label()));
        }
    }
    // accumulate each Pauli string over every compatible setting
    let mut sums = vec![0.0f64; 256];
    let mut counts = vec![0u32; 256];
    for (setting, freqs) in &record.probs {
        for support in 0..16usize {
            // base-4 code of the Pauli string this setting yields on `support`
            let mut code = 0usize;
            for q in 0..NUM_QUBITS {
                let digit = if support >> (NUM_QUBITS - 1 - q) & 1 == 1 {
                    match setting.0[q] {
                        PauliAxis::X => 1,
                        PauliAxis::Y => 2,
                        PauliAxis::Z => 3,
                    }
                } else {
                    0
                };
                code = code << 2 | digit;
            }
            let mut expectation = 0.0;
            for (outcome, f) in freqs.iter().enumerate() {
                let parity = (outcome & support).count_ones() & 1;
                expectation += if parity == 0 { *f } else { -*f };
            }
            sums[code] += expectation;
            counts[code] += 1;
        }
    }
    let mut elems = vec![C64::ZERO; DIM * DIM];
    for code in 0..256 {
        let mean = sums[code] / f64::from(counts[code]);
        if mean == 0.0 {
            continue;
        }
        let p = pauli_string_matrix(code);
        let w = C64::new(mean / DIM as f64, 0.0);
        for (e, pe) in elems.iter_mut().zip(&p) {
            *e += w * pe;
        }
    }
    Ok(RawEstimate { elems })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ProjectionDiagnostics {
    pub min_raw_eigenvalue: f64,
    /// Total weight of the truncated negative eigenvalues.
    pub negative_mass: f64,
}

/// Closest density matrix in Frobenius norm: eigendecompose, project the
/// spectrum onto the probability simplex (water-filling truncation),
/// reassemble.
pub fn project_physical(raw: &RawEstimate) -> Result<(DensityMatrix, ProjectionDiagnostics)> {
    let m = nalgebra::DMatrix::from_row_slice(DIM, DIM, &raw.elems);
    let h = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..DIM).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let sorted: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();

    // largest k with mu_k + (1 - sum_{i<=k} mu_i)/k > 0
    let mut prefix = 0.0;
    let mut k = 0;
    let mut shift = 0.0;
    for (i, &mu) in sorted.iter().enumerate() {
        let s = (1.0 - (prefix + mu)) / (i + 1) as f64;
        if mu + s > 0.0 {
            prefix += mu;
            k = i + 1;
            shift = s;
        } else {
            break;
        }
    }
    let projected: Vec<f64> = sorted
        .iter()
        .enumerate()
        .map(|(i, &mu)| if i < k { mu + shift } else { 0.0 })
        .collect();

    let min_raw = *sorted.last().unwrap();
    let negative_mass: f64 = sorted.iter().filter(|&&e| e < 0.0).map(|e| -e).sum();

    let mut elems = vec![C64::ZERO; DIM * DIM];
    for (pos, &col) in order.iter().enumerate() {
        let lambda = projected[pos];
        if lambda == 0.0 {
            continue;
        }
        let v = eig.eigenvectors.column(col);
        for r in 0..DIM {
            for c in 0..DIM {
                elems[r * DIM + c] += C64::new(lambda, 0.0) * v[r] * v[c].conj();
            }
        }
    }
    let dm = DensityMatrix::from_matrix(NUM_QUBITS, elems)?;
    Ok((
        dm,
        ProjectionDiagnostics {
            min_raw_eigenvalue: min_raw,
            negative_mass,
        },
    ))
}

/// Search settings for [`fidelity_local_unitary`].
#[derive(Clone, Copy, Debug)]
pub struct LocalUnitaryOptions {
    pub restarts: usize,
    pub max_evals: usize,
    pub diameter_tol: f64,
    pub seed: u64,
}

impl Default for LocalUnitaryOptions {
    fn default() -> Self {
        LocalUnitaryOptions {
            restarts: 24,
            max_evals: 2000,
            diameter_tol: 1e-7,
            seed: 0x10ca1,
        }
    }
}

fn lu_objective(dm: &DensityMatrix, target: &StateVector, params: &[f64]) -> f64 {
    let mut v = target.clone();
    for q in 0..NUM_QUBITS {
        let u = Gate1::u3(params[3 * q], params[3 * q + 1], params[3 * q + 2]);
        v.apply_2x2_unchecked(q + 1, &u);
    }
    dm.fidelity_pure(&v).unwrap_or(0.0)
}

/// Maximize `<t| (U1..U4)^dag rho (U1..U4) |t>` over per-qubit unitaries,
/// each parameterized by three angles (a 12-dimensional search), by
/// Nelder-Mead from one identity start plus seeded random restarts, each
/// followed by a refinement run. The identity start guarantees the result is
/// never below the plain fidelity.
pub fn fidelity_local_unitary(
    dm: &DensityMatrix,
    target: &StateVector,
    opts: &LocalUnitaryOptions,
) -> Result<(f64, [Gate1; 4])> {
    if dm.num_qubits() != NUM_QUBITS || target.num_qubits() != NUM_QUBITS {
        return Err(Error::DimensionMismatch {
            left: dm.num_qubits(),
            right: target.num_qubits(),
        });
    }
    let plain = dm.fidelity_pure(target)?;
    let nm = NelderMead {
        max_evals: opts.max_evals,
        diameter_tol: opts.diameter_tol,
    };
    let mut rng = substream(opts.seed, "lu-restarts");
    let mut best_f = plain;
    let mut best_x = vec![0.0; 12];

    for restart in 0..opts.restarts.max(1) {
        let x0: Vec<f64> = if restart == 0 {
            vec![0.0; 12]
        } else {
            (0..12)
                .map(|_| unit_f64(&mut rng) * std::f64::consts::TAU)
                .collect()
        };
        let mut objective = |x: &[f64]| -lu_objective(dm, target, x);
        let (x1, f1, _) = nm.minimize(&mut objective, &x0, 0.6);
        // refinement pass with a tight simplex around the found point
        let (x2, f2, _) = nm.minimize(&mut objective, &x1, 0.02);
        let (x, f) = if f2 < f1 { (x2, f2) } else { (x1, f1) };
        if -f > best_f {
            best_f = -f;
            best_x = x;
        }
    }
    // final polish of the overall winner
    let mut objective = |x: &[f64]| -lu_objective(dm, target, x);
    let (x3, f3, _) = nm.minimize(&mut objective, &best_x, 0.005);
    if -f3 > best_f {
        best_f = -f3;
        best_x = x3;
    }

    let units: [Gate1; 4] = std::array::from_fn(|q| {
        Gate1::u3(best_x[3 * q], best_x[3 * q + 1], best_x[3 * q + 2])
    });
    Ok((best_f.clamp(plain, 1.0), units))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FidelityReport {
    pub plain: f64,
    pub local_unitary: f64,
}

#[derive(Clone, Debug)]
pub struct ReconstructionResult {
    pub raw: RawEstimate,
    pub physical: DensityMatrix,
    pub diagnostics: ProjectionDiagnostics,
}

/// Full pipeline: simulate counts, invert, project, and report plain and
/// local-unitary fidelity against `target`.
pub fn end_to_end_qst(
    dm: &DensityMatrix,
    target: &StateVector,
    shots_per_setting: u64,
    rng: &mut dyn RngCore,
    opts: &LocalUnitaryOptions,
) -> Result<(ReconstructionResult, FidelityReport)> {
    let counts = simulate_counts(dm, shots_per_setting, rng)?;
    let raw = linear_inversion(&counts)?;
    let (physical, diagnostics) = project_physical(&raw)?;
    let plain = physical.fidelity_pure(target)?;
    let (local_unitary, _) = fidelity_local_unitary(&physical, target, opts)?;
    Ok((
        ReconstructionResult {
            raw,
            physical,
            diagnostics,
        },
        FidelityReport {
            plain,
            local_unitary,
        },
    ))
}
