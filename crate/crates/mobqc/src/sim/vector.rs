//! Pure states of a small register.

use num_complex::Complex64 as C64;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::basis::{MeasurementBasis, Outcome};
use super::density::DensityMatrix;
use super::gates::Gate1;
use super::{ALGEBRAIC_TOL, UNITARY_TOL};
use crate::error::{Error, Result};
use crate::rng::unit_f64;

/// A pure n-qubit state, `2^n` complex amplitudes.
///
/// Qubit labels are 1-based and qubit 1 is the most significant bit of the
/// computational index: amplitude `k` belongs to `|b1 b2 .. bn>` where `b1`
/// is the top bit of `k`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawStateVector", into = "RawStateVector")]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<C64>,
}

/// Wire form; converted back through the validating constructor.
#[derive(Serialize, Deserialize)]
pub struct RawStateVector {
    pub amplitudes: Vec<C64>,
}

impl TryFrom<RawStateVector> for StateVector {
    type Error = Error;

    fn try_from(raw: RawStateVector) -> Result<Self> {
        StateVector::from_amplitudes(raw.amplitudes)
    }
}

impl From<StateVector> for RawStateVector {
    fn from(sv: StateVector) -> Self {
        RawStateVector {
            amplitudes: sv.amps,
        }
    }
}

impl StateVector {
    /// `|0..0>` on `n` qubits. `n = 0` yields the scalar state (amplitude 1),
    /// the neutral element of [`StateVector::tensor`].
    pub fn zero(num_qubits: usize) -> Self {
        let mut amps = vec![C64::ZERO; 1 << num_qubits];
        amps[0] = C64::ONE;
        StateVector { num_qubits, amps }
    }

    /// `|+..+>` on `n` qubits.
    pub fn plus(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let a = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        StateVector {
            num_qubits,
            amps: vec![a; dim],
        }
    }

    /// Computational basis state `|index>`.
    pub fn computational(num_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::BadDimension { len: index });
        }
        let mut amps = vec![C64::ZERO; dim];
        amps[index] = C64::ONE;
        Ok(StateVector { num_qubits, amps })
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || (len & (len - 1)) != 0 {
            return Err(Error::BadDimension { len });
        }
        let num_qubits = len.trailing_zeros() as usize;
        let sv = StateVector { num_qubits, amps };
        let norm = sv.norm();
        if (norm - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(sv)
    }

    /// Single-qubit product state from per-qubit `(a|0> + b|1>)` pairs.
    pub fn product(factors: &[[C64; 2]]) -> Result<Self> {
        let mut sv = StateVector::zero(0);
        for f in factors {
            let n = (f[0].norm_sqr() + f[1].norm_sqr()).sqrt();
            if (n - 1.0).abs() > ALGEBRAIC_TOL {
                return Err(Error::NotNormalized { norm: n });
            }
            sv = sv.tensor(&StateVector {
                num_qubits: 1,
                amps: vec![f[0], f[1]],
            });
        }
        Ok(sv)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_same_size(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Pure-state equality up to a global phase: `| <self|other> | ~ 1`.
    pub fn equals_up_to_phase(&self, other: &StateVector, tol: f64) -> bool {
        match self.inner(other) {
            Ok(ip) => (ip.norm() - 1.0).abs() <= tol,
            Err(_) => false,
        }
    }

    /// `self (x) other`; `self`'s qubits become the high-order labels.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        StateVector {
            num_qubits: self.num_qubits + other.num_qubits,
            amps,
        }
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit == 0 || qubit > self.num_qubits {
            return Err(Error::QubitOutOfRange {
                qubit,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    fn check_same_size(&self, other: &StateVector) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        Ok(())
    }

    /// Mask with the bit of `qubit` set (qubit 1 is the top bit).
    fn bit_mask(&self, qubit: usize) -> usize {
        1usize << (self.num_qubits - qubit)
    }

    pub(crate) fn apply_2x2_unchecked(&mut self, qubit: usize, gate: &Gate1) {
        let mask = self.bit_mask(qubit);
        let m = &gate.0;
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            let i0 = base;
            let i1 = base | mask;
            let a0 = self.amps[i0];
            let a1 = self.amps[i1];
            self.amps[i0] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[i1] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    /// Apply a single-qubit unitary. Rejects non-unitary matrices and
    /// out-of-range qubits.
    pub fn apply_1q(&mut self, qubit: usize, gate: &Gate1) -> Result<()> {
        self.check_qubit(qubit)?;
        let deviation = gate.unitarity_deviation();
        if deviation > UNITARY_TOL {
            return Err(Error::NonUnitaryGate { deviation });
        }
        self.apply_2x2_unchecked(qubit, gate);
        Ok(())
    }

    /// Controlled-Z between two distinct qubits (symmetric in its arguments).
    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(Error::IdenticalQubits(a));
        }
        let mask = self.bit_mask(a) | self.bit_mask(b);
        for (idx, amp) in self.amps.iter_mut().enumerate() {
            if idx & mask == mask {
                *amp = -*amp;
            }
        }
        Ok(())
    }

    /// Born probabilities `(p_plus, p_minus)` for measuring `qubit` in `basis`.
    pub fn born_probabilities(
        &self,
        qubit: usize,
        basis: MeasurementBasis,
    ) -> Result<(f64, f64)> {
        self.check_qubit(qubit)?;
        let (plus, _) = basis.eigenvectors();
        let mask = self.bit_mask(qubit);
        let mut p_plus = 0.0;
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            let a0 = self.amps[base];
            let a1 = self.amps[base | mask];
            p_plus += (plus[0].conj() * a0 + plus[1].conj() * a1).norm_sqr();
        }
        let p_plus = p_plus.clamp(0.0, 1.0);
        Ok((p_plus, 1.0 - p_plus))
    }

    /// Project `qubit` onto the `outcome` eigenstate of `basis` and
    /// renormalize, keeping the measured qubit in place. Returns the branch
    /// probability; a branch with probability below 1e-12 is an error.
    pub fn project(
        &mut self,
        qubit: usize,
        basis: MeasurementBasis,
        outcome: Outcome,
    ) -> Result<f64> {
        self.check_qubit(qubit)?;
        let vec = basis.eigenvector(outcome);
        let mask = self.bit_mask(qubit);
        let mut prob = 0.0;
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            let a0 = self.amps[base];
            let a1 = self.amps[base | mask];
            let overlap = vec[0].conj() * a0 + vec[1].conj() * a1;
            prob += overlap.norm_sqr();
            self.amps[base] = overlap * vec[0];
            self.amps[base | mask] = overlap * vec[1];
        }
        if prob < super::IMPOSSIBLE_BRANCH_TOL {
            return Err(Error::ImpossibleBranch { prob });
        }
        let scale = C64::new(1.0 / prob.sqrt(), 0.0);
        for a in &mut self.amps {
            *a *= scale;
        }
        Ok(prob)
    }

    /// Sample a projective measurement of `qubit` in `basis` with Born
    /// probabilities and collapse the state.
    pub fn measure(
        &mut self,
        qubit: usize,
        basis: MeasurementBasis,
        rng: &mut dyn RngCore,
    ) -> Result<Outcome> {
        let (p_plus, _) = self.born_probabilities(qubit, basis)?;
        let outcome = if unit_f64(rng) < p_plus {
            Outcome::Plus
        } else {
            Outcome::Minus
        };
        self.project(qubit, basis, outcome)?;
        Ok(outcome)
    }

    /// Reduced density matrix on `keep` (ascending label order).
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        self.to_density().partial_trace(keep)
    }

    /// Extract the pure state carried by `keep` after the other qubits have
    /// been projected. Fails with [`Error::ResidualNotPure`] when the kept
    /// qubits are still entangled with the rest.
    pub fn keep_qubits(&self, keep: &[usize]) -> Result<StateVector> {
        let reduced = self.reduced(keep)?;
        reduced.dominant_pure_state(ALGEBRAIC_TOL.sqrt())
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }

    /// `<self| P |self>` for a Pauli string given per-qubit as
    /// `(qubit, gate)`; identity on unlisted qubits.
    pub fn expectation(&self, factors: &[(usize, Gate1)]) -> Result<C64> {
        let mut rotated = self.clone();
        for (qubit, gate) in factors {
            rotated.check_qubit(*qubit)?;
            rotated.apply_2x2_unchecked(*qubit, gate);
        }
        self.inner(&rotated)
    }

    /// Haar-like random pure state (Gaussian amplitudes, normalized).
    pub fn random(num_qubits: usize, rng: &mut dyn RngCore) -> StateVector {
        let dim = 1usize << num_qubits;
        let mut amps: Vec<C64> = Vec::with_capacity(dim);
        for _ in 0..dim {
            amps.push(C64::new(gauss(rng), gauss(rng)));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        StateVector { num_qubits, amps }
    }
}

/// Standard normal via Box-Muller.
pub(crate) fn gauss(rng: &mut dyn RngCore) -> f64 {
    let u1 = (1.0 - unit_f64(rng)).max(f64::MIN_POSITIVE);
    let u2 = unit_f64(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
