//! Exact simulation of small qubit registers: pure state vectors, density
//! matrices, single- and two-qubit gates, projective measurement in
//! arbitrary local bases, partial trace and fidelity.

pub mod basis;
pub mod density;
pub mod gates;
pub mod vector;

pub use basis::{MeasurementBasis, Outcome};
pub use density::DensityMatrix;
pub use gates::{Gate1, C64};
pub use vector::StateVector;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Tolerance for algebraic identities.
pub const ALGEBRAIC_TOL: f64 = 1e-10;
/// Tolerance for optimized / iterative results.
pub const ITERATIVE_TOL: f64 = 1e-9;
/// Eigenvalues of physical density matrices may dip this far below zero.
pub const PSD_TOL: f64 = 1e-9;
/// Unitarity check tolerance for gate application.
pub const UNITARY_TOL: f64 = 1e-10;
/// Branches below this probability are treated as impossible postselections.
pub const IMPOSSIBLE_BRANCH_TOL: f64 = 1e-12;

/// Either a pure or a mixed register; every operation delegates to the
/// underlying representation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum QuantumState {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl From<StateVector> for QuantumState {
    fn from(sv: StateVector) -> Self {
        QuantumState::Pure(sv)
    }
}

impl From<DensityMatrix> for QuantumState {
    fn from(dm: DensityMatrix) -> Self {
        QuantumState::Mixed(dm)
    }
}

impl QuantumState {
    pub fn num_qubits(&self) -> usize {
        match self {
            QuantumState::Pure(sv) => sv.num_qubits(),
            QuantumState::Mixed(dm) => dm.num_qubits(),
        }
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, QuantumState::Pure(_))
    }

    pub fn apply_1q(&mut self, qubit: usize, gate: &Gate1) -> Result<()> {
        match self {
            QuantumState::Pure(sv) => sv.apply_1q(qubit, gate),
            QuantumState::Mixed(dm) => dm.apply_1q(qubit, gate),
        }
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<()> {
        match self {
            QuantumState::Pure(sv) => sv.apply_cz(a, b),
            QuantumState::Mixed(dm) => dm.apply_cz(a, b),
        }
    }

    pub fn born_probabilities(
        &self,
        qubit: usize,
        basis: MeasurementBasis,
    ) -> Result<(f64, f64)> {
        match self {
            QuantumState::Pure(sv) => sv.born_probabilities(qubit, basis),
            QuantumState::Mixed(dm) => dm.born_probabilities(qubit, basis),
        }
    }

    pub fn project(
        &mut self,
        qubit: usize,
        basis: MeasurementBasis,
        outcome: Outcome,
    ) -> Result<f64> {
        match self {
            QuantumState::Pure(sv) => sv.project(qubit, basis, outcome),
            QuantumState::Mixed(dm) => dm.project(qubit, basis, outcome),
        }
    }

    pub fn measure(
        &mut self,
        qubit: usize,
        basis: MeasurementBasis,
        rng: &mut dyn RngCore,
    ) -> Result<Outcome> {
        match self {
            QuantumState::Pure(sv) => sv.measure(qubit, basis, rng),
            QuantumState::Mixed(dm) => dm.measure(qubit, basis, rng),
        }
    }

    /// Reduced state on `keep` as a density matrix.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        match self {
            QuantumState::Pure(sv) => sv.reduced(keep),
            QuantumState::Mixed(dm) => dm.partial_trace(keep),
        }
    }

    /// Restrict to `keep`, staying pure when the state factorizes.
    pub fn restricted(&self, keep: &[usize]) -> Result<QuantumState> {
        match self {
            QuantumState::Pure(sv) => match sv.keep_qubits(keep) {
                Ok(pure) => Ok(QuantumState::Pure(pure)),
                Err(crate::error::Error::ResidualNotPure(_)) => {
                    Ok(QuantumState::Mixed(sv.reduced(keep)?))
                }
                Err(e) => Err(e),
            },
            QuantumState::Mixed(dm) => Ok(QuantumState::Mixed(dm.partial_trace(keep)?)),
        }
    }

    /// `<target| rho |target>`.
    pub fn fidelity_pure(&self, target: &StateVector) -> Result<f64> {
        match self {
            QuantumState::Pure(sv) => Ok(sv.inner(target)?.norm_sqr()),
            QuantumState::Mixed(dm) => dm.fidelity_pure(target),
        }
    }

    pub fn expectation(&self, factors: &[(usize, Gate1)]) -> Result<C64> {
        match self {
            QuantumState::Pure(sv) => sv.expectation(factors),
            QuantumState::Mixed(dm) => dm.expectation(factors),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            QuantumState::Pure(sv) => sv.to_density(),
            QuantumState::Mixed(dm) => dm.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn pure_and_mixed_agree_on_measurement_statistics() {
        let mut rng = substream(9, "qs");
        for _ in 0..5 {
            let sv = StateVector::random(3, &mut rng);
            let pure = QuantumState::from(sv.clone());
            let mixed = QuantumState::from(sv.to_density());
            for q in 1..=3 {
                for basis in [
                    MeasurementBasis::PauliX,
                    MeasurementBasis::PauliY,
                    MeasurementBasis::PauliZ,
                ] {
                    let (a0, _) = pure.born_probabilities(q, basis).unwrap();
                    let (b0, _) = mixed.born_probabilities(q, basis).unwrap();
                    assert!((a0 - b0).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn restricted_keeps_purity_when_possible() {
        let sv = StateVector::zero(2);
        let qs = QuantumState::from(sv);
        assert!(qs.restricted(&[2]).unwrap().is_pure());
    }
}
