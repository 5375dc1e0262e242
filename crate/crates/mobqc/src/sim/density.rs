//! Mixed states of a small register.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::basis::{MeasurementBasis, Outcome};
use super::gates::Gate1;
use super::vector::StateVector;
use super::{ALGEBRAIC_TOL, PSD_TOL, UNITARY_TOL};
use crate::error::{Error, Result};
use crate::rng::unit_f64;

/// An n-qubit density matrix, stored dense row-major. Same label convention
/// as [`StateVector`]: qubit 1 is the most significant index bit.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawDensityMatrix", into = "RawDensityMatrix")]
pub struct DensityMatrix {
    num_qubits: usize,
    elems: Vec<C64>,
}

/// Wire form; converted back through the validating constructor.
#[derive(Serialize, Deserialize)]
pub struct RawDensityMatrix {
    pub num_qubits: usize,
    pub elements: Vec<C64>,
}

impl TryFrom<RawDensityMatrix> for DensityMatrix {
    type Error = Error;

    fn try_from(raw: RawDensityMatrix) -> Result<Self> {
        DensityMatrix::from_matrix(raw.num_qubits, raw.elements)
    }
}

impl From<DensityMatrix> for RawDensityMatrix {
    fn from(dm: DensityMatrix) -> Self {
        RawDensityMatrix {
            num_qubits: dm.num_qubits,
            elements: dm.elems,
        }
    }
}

impl DensityMatrix {
    pub fn from_pure(sv: &StateVector) -> Self {
        let dim = sv.dim();
        let amps = sv.amplitudes();
        let mut elems = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                elems.push(amps[r] * amps[c].conj());
            }
        }
        DensityMatrix {
            num_qubits: sv.num_qubits(),
            elems,
        }
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let mut elems = vec![C64::ZERO; dim * dim];
        let p = C64::new(1.0 / dim as f64, 0.0);
        for r in 0..dim {
            elems[r * dim + r] = p;
        }
        DensityMatrix { num_qubits, elems }
    }

    /// Validated constructor: Hermitian and trace-1 within 1e-10, eigenvalues
    /// above -1e-9.
    pub fn from_matrix(num_qubits: usize, elems: Vec<C64>) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if elems.len() != dim * dim {
            return Err(Error::BadDimension { len: elems.len() });
        }
        let dm = DensityMatrix { num_qubits, elems };
        let herm = dm.hermiticity_deviation();
        if herm > ALGEBRAIC_TOL {
            return Err(Error::NotHermitian { deviation: herm });
        }
        let tr = dm.trace();
        if (tr.re - 1.0).abs() > ALGEBRAIC_TOL || tr.im.abs() > ALGEBRAIC_TOL {
            return Err(Error::BadTrace { trace: tr.re });
        }
        let min = dm.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(dm)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.num_qubits
    }

    pub fn element(&self, row: usize, col: usize) -> C64 {
        self.elems[row * self.dim() + col]
    }

    pub fn elements(&self) -> &[C64] {
        &self.elems
    }

    pub fn trace(&self) -> C64 {
        let dim = self.dim();
        (0..dim).map(|r| self.elems[r * dim + r]).sum()
    }

    pub fn purity(&self) -> f64 {
        // tr(rho^2) = sum |rho_rc|^2 for Hermitian rho
        self.elems.iter().map(|e| e.norm_sqr()).sum()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let dim = self.dim();
        let mut dev: f64 = 0.0;
        for r in 0..dim {
            for c in r..dim {
                dev = dev.max((self.elems[r * dim + c] - self.elems[c * dim + r].conj()).norm());
            }
        }
        dev
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

    fn bit_mask(&self, qubit: usize) -> usize {
        1usize << (self.num_qubits - qubit)
    }

    /// `rho <- (M_q (x) I) rho`, `M` arbitrary 2x2.
    pub(crate) fn mul_2x2_left(&mut self, qubit: usize, m: &Gate1) {
        let dim = self.dim();
        let mask = self.bit_mask(qubit);
        let g = &m.0;
        for r in 0..dim {
            if r & mask != 0 {
                continue;
            }
            let (r0, r1) = (r, r | mask);
            for c in 0..dim {
                let a0 = self.elems[r0 * dim + c];
                let a1 = self.elems[r1 * dim + c];
                self.elems[r0 * dim + c] = g[0][0] * a0 + g[0][1] * a1;
                self.elems[r1 * dim + c] = g[1][0] * a0 + g[1][1] * a1;
            }
        }
    }

    /// `rho <- rho (M_q (x) I)^dag`.
    pub(crate) fn mul_2x2_right_adjoint(&mut self, qubit: usize, m: &Gate1) {
        let dim = self.dim();
        let mask = self.bit_mask(qubit);
        let g = &m.0;
        for c in 0..dim {
            if c & mask != 0 {
                continue;
            }
            let (c0, c1) = (c, c | mask);
            for r in 0..dim {
                let a0 = self.elems[r * dim + c0];
                let a1 = self.elems[r * dim + c1];
                self.elems[r * dim + c0] = a0 * g[0][0].conj() + a1 * g[0][1].conj();
                self.elems[r * dim + c1] = a0 * g[1][0].conj() + a1 * g[1][1].conj();
            }
        }
    }

    pub(crate) fn conjugate_2x2_unchecked(&mut self, qubit: usize, m: &Gate1) {
        self.mul_2x2_left(qubit, m);
        self.mul_2x2_right_adjoint(qubit, m);
    }

    /// Apply a single-qubit unitary, `rho -> U rho U^dag`.
    pub fn apply_1q(&mut self, qubit: usize, gate: &Gate1) -> Result<()> {
        self.check_qubit(qubit)?;
        let deviation = gate.unitarity_deviation();
        if deviation > UNITARY_TOL {
            return Err(Error::NonUnitaryGate { deviation });
        }
        self.conjugate_2x2_unchecked(qubit, gate);
        Ok(())
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(Error::IdenticalQubits(a));
        }
        let dim = self.dim();
        let mask = self.bit_mask(a) | self.bit_mask(b);
        for r in 0..dim {
            let fr = r & mask == mask;
            for c in 0..dim {
                if fr != (c & mask == mask) {
                    self.elems[r * dim + c] = -self.elems[r * dim + c];
                }
            }
        }
        Ok(())
    }

    /// `rho -> sum_k K rho K^dag` on one qubit.
    pub fn apply_kraus_1q(&mut self, qubit: usize, kraus: &[Gate1]) -> Result<()> {
        self.check_qubit(qubit)?;
        let mut out = vec![C64::ZERO; self.elems.len()];
        for k in kraus {
            let mut term = self.clone();
            term.conjugate_2x2_unchecked(qubit, k);
            for (o, t) in out.iter_mut().zip(&term.elems) {
                *o += t;
            }
        }
        self.elems = out;
        Ok(())
    }

    pub fn born_probabilities(
        &self,
        qubit: usize,
        basis: MeasurementBasis,
    ) -> Result<(f64, f64)> {
        self.check_qubit(qubit)?;
        let (v, _) = basis.eigenvectors();
        let dim = self.dim();
        let mask = self.bit_mask(qubit);
        let mut p = 0.0;
        for k in 0..dim {
            if k & mask != 0 {
                continue;
            }
            let (i0, i1) = (k, k | mask);
            let b00 = self.elems[i0 * dim + i0];
            let b01 = self.elems[i0 * dim + i1];
            let b10 = self.elems[i1 * dim + i0];
            let b11 = self.elems[i1 * dim + i1];
            p += (v[0].conj() * (b00 * v[0] + b01 * v[1])
                + v[1].conj() * (b10 * v[0] + b11 * v[1]))
                .re;
        }
        let p = p.clamp(0.0, 1.0);
        Ok((p, 1.0 - p))
    }

    /// Project and renormalize; returns branch probability.
    pub fn project(
        &mut self,
        qubit: usize,
        basis: MeasurementBasis,
        outcome: Outcome,
    ) -> Result<f64> {
        self.check_qubit(qubit)?;
        let v = basis.eigenvector(outcome);
        let proj = Gate1::from_rows([
            [v[0] * v[0].conj(), v[0] * v[1].conj()],
            [v[1] * v[0].conj(), v[1] * v[1].conj()],
        ]);
        self.conjugate_2x2_unchecked(qubit, &proj);
        let prob = self.trace().re;
        if prob < super::IMPOSSIBLE_BRANCH_TOL {
            return Err(Error::ImpossibleBranch { prob });
        }
        let scale = C64::new(1.0 / prob, 0.0);
        for e in &mut self.elems {
            *e *= scale;
        }
        Ok(prob)
    }

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

    /// Trace out every qubit not in `keep`. The kept qubits are relabeled
    /// 1..k in ascending order of their old labels.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::EmptyKeepSet);
        }
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        for &q in &keep {
            self.check_qubit(q)?;
        }
        let kept_masks: Vec<usize> = keep.iter().map(|&q| self.bit_mask(q)).collect();
        let traced_masks: Vec<usize> = (1..=self.num_qubits)
            .filter(|q| !keep.contains(q))
            .map(|q| self.bit_mask(q))
            .collect();
        let k = keep.len();
        let kdim = 1usize << k;
        let tdim = 1usize << traced_masks.len();
        let dim = self.dim();

        let spread = |bits: usize, masks: &[usize]| -> usize {
            let mut out = 0;
            for (pos, m) in masks.iter().enumerate() {
                if bits >> (masks.len() - 1 - pos) & 1 == 1 {
                    out |= m;
                }
            }
            out
        };

        let mut elems = vec![C64::ZERO; kdim * kdim];
        for r in 0..kdim {
            let rbase = spread(r, &kept_masks);
            for c in 0..kdim {
                let cbase = spread(c, &kept_masks);
                let mut acc = C64::ZERO;
                for t in 0..tdim {
                    let toff = spread(t, &traced_masks);
                    acc += self.elems[(rbase | toff) * dim + (cbase | toff)];
                }
                elems[r * kdim + c] = acc;
            }
        }
        Ok(DensityMatrix {
            num_qubits: k,
            elems,
        })
    }

    /// `<target| rho |target>`.
    pub fn fidelity_pure(&self, target: &StateVector) -> Result<f64> {
        if target.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                left: self.num_qubits,
                right: target.num_qubits(),
            });
        }
        let dim = self.dim();
        let t = target.amplitudes();
        let mut acc = C64::ZERO;
        for r in 0..dim {
            let mut row = C64::ZERO;
            for c in 0..dim {
                row += self.elems[r * dim + c] * t[c];
            }
            acc += t[r].conj() * row;
        }
        Ok(acc.re.clamp(0.0, 1.0))
    }

    /// `tr(P rho)` for a product operator given as `(qubit, gate)` factors.
    pub fn expectation(&self, factors: &[(usize, Gate1)]) -> Result<C64> {
        let mut m = self.clone();
        for (qubit, gate) in factors {
            m.check_qubit(*qubit)?;
            m.mul_2x2_left(*qubit, gate);
        }
        Ok(m.trace())
    }

    pub(crate) fn to_na(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.dim(), self.dim(), &self.elems)
    }

    /// Eigenvalues in ascending order (input hermitized first).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = self.to_na();
        let h = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// If the state is pure up to `tol` (second eigenvalue below `tol`),
    /// return the dominant eigenvector as a [`StateVector`].
    pub fn dominant_pure_state(&self, tol: f64) -> Result<StateVector> {
        let m = self.to_na();
        let h = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
        let second = if order.len() > 1 {
            eig.eigenvalues[order[1]]
        } else {
            0.0
        };
        if second.abs() > tol {
            return Err(Error::ResidualNotPure(second));
        }
        let col = eig.eigenvectors.column(order[0]);
        let norm = col.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let amps: Vec<C64> = col.iter().map(|a| a / norm).collect();
        StateVector::from_amplitudes(amps)
    }

    /// Random mixed state from a Ginibre draw with `rank` columns.
    pub fn random(num_qubits: usize, rank: usize, rng: &mut dyn RngCore) -> DensityMatrix {
        let dim = 1usize << num_qubits;
        let rank = rank.clamp(1, dim);
        let mut g = vec![C64::ZERO; dim * rank];
        for e in &mut g {
            *e = C64::new(super::vector::gauss(rng), super::vector::gauss(rng));
        }
        let mut elems = vec![C64::ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                let mut acc = C64::ZERO;
                for k in 0..rank {
                    acc += g[r * rank + k] * g[c * rank + k].conj();
                }
                elems[r * dim + c] = acc;
            }
        }
        let tr: f64 = (0..dim).map(|r| elems[r * dim + r].re).sum();
        for e in &mut elems {
            *e /= tr;
        }
        DensityMatrix { num_qubits, elems }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use crate::sim::gates::PAULI_X;

    fn bell() -> StateVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::from_amplitudes(vec![
            C64::new(h, 0.0),
            C64::ZERO,
            C64::ZERO,
            C64::new(h, 0.0),
        ])
        .unwrap()
    }

    #[test]
    fn pure_state_roundtrip() {
        let sv = bell();
        let dm = DensityMatrix::from_pure(&sv);
        assert!((dm.trace().re - 1.0).abs() < 1e-12);
        assert!((dm.purity() - 1.0).abs() < 1e-12);
        assert!((dm.fidelity_pure(&sv).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trace_out_half_of_bell_is_mixed() {
        let dm = DensityMatrix::from_pure(&bell());
        let red = dm.partial_trace(&[1]).unwrap();
        assert_eq!(red.num_qubits(), 1);
        assert!((red.element(0, 0).re - 0.5).abs() < 1e-12);
        assert!((red.element(1, 1).re - 0.5).abs() < 1e-12);
        assert!(red.element(0, 1).norm() < 1e-12);
    }

    #[test]
    fn trace_out_nothing_is_identity_map() {
        let dm = DensityMatrix::from_pure(&bell());
        let same = dm.partial_trace(&[1, 2]).unwrap();
        for k in 0..4 * 4 {
            assert!((same.elements()[k] - dm.elements()[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn empty_keep_set_rejected() {
        let dm = DensityMatrix::maximally_mixed(2);
        assert!(matches!(dm.partial_trace(&[]), Err(Error::EmptyKeepSet)));
    }

    #[test]
    fn partial_trace_preserves_trace_and_psd() {
        let mut rng = substream(5, "pt");
        for _ in 0..10 {
            let dm = DensityMatrix::random(3, 4, &mut rng);
            let red = dm.partial_trace(&[2, 3]).unwrap();
            assert!((red.trace().re - 1.0).abs() < 1e-10);
            assert!(red.min_eigenvalue() > -1e-9);
        }
    }

    #[test]
    fn fidelity_of_maximally_mixed() {
        let dm = DensityMatrix::maximally_mixed(4);
        let target = crate::graph::star_cluster4();
        assert!((dm.fidelity_pure(&target).unwrap() - 0.0625).abs() < 1e-12);
    }

    #[test]
    fn gate_preserves_trace() {
        let mut dm = DensityMatrix::maximally_mixed(2);
        dm.apply_1q(2, &PAULI_X).unwrap();
        dm.apply_cz(1, 2).unwrap();
        assert!((dm.trace().re - 1.0).abs() < 1e-12);
        assert!(dm.hermiticity_deviation() < 1e-12);
    }

    #[test]
    fn measure_statistics_on_mixed_state() {
        let dm = DensityMatrix::maximally_mixed(1);
        let (p0, p1) = dm.born_probabilities(1, MeasurementBasis::PauliZ).unwrap();
        assert!((p0 - 0.5).abs() < 1e-12 && (p1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn project_renormalizes() {
        let mut dm = DensityMatrix::from_pure(&bell());
        let p = dm.project(1, MeasurementBasis::PauliZ, Outcome::Plus).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        assert!((dm.trace().re - 1.0).abs() < 1e-12);
        // residual on qubit 2 is |0>
        let red = dm.partial_trace(&[2]).unwrap();
        assert!((red.element(0, 0).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dominant_pure_state_of_projected_bell() {
        let mut dm = DensityMatrix::from_pure(&bell());
        dm.project(1, MeasurementBasis::PauliZ, Outcome::Minus).unwrap();
        let red = dm.partial_trace(&[2]).unwrap();
        let sv = red.dominant_pure_state(1e-9).unwrap();
        assert!((sv.amplitude(1).norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dominant_pure_state_rejects_mixed() {
        let dm = DensityMatrix::maximally_mixed(1);
        assert!(matches!(
            dm.dominant_pure_state(1e-9),
            Err(Error::ResidualNotPure(_))
        ));
    }

    #[test]
    fn eigenvalues_of_maximally_mixed() {
        let dm = DensityMatrix::maximally_mixed(2);
        for ev in dm.eigenvalues() {
            assert!((ev - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn from_matrix_validates() {
        // non-hermitian
        let bad = vec![C64::ONE, C64::ONE, C64::ZERO, C64::ZERO];
        assert!(DensityMatrix::from_matrix(1, bad).is_err());
        // valid
        let ok = vec![
            C64::new(0.5, 0.0),
            C64::ZERO,
            C64::ZERO,
            C64::new(0.5, 0.0),
        ];
        assert!(DensityMatrix::from_matrix(1, ok).is_ok());
    }
}
