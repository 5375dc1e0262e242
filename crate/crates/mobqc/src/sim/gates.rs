//! Single-qubit gates as dense 2x2 matrices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type C64 = Complex64;

pub(crate) const C_ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const C_ONE: C64 = C64::new(1.0, 0.0);

/// A 2x2 complex matrix in row-major order. Public constructors are unitary;
/// arbitrary matrices (e.g. Kraus operators) go through [`Gate1::from_rows`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate1(pub [[C64; 2]; 2]);

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

pub const IDENT: Gate1 = Gate1([[C_ONE, C_ZERO], [C_ZERO, C_ONE]]);
pub const PAULI_X: Gate1 = Gate1([[C_ZERO, C_ONE], [C_ONE, C_ZERO]]);
pub const PAULI_Y: Gate1 = Gate1([
    [C_ZERO, C64::new(0.0, -1.0)],
    [C64::new(0.0, 1.0), C_ZERO],
]);
pub const PAULI_Z: Gate1 = Gate1([[C_ONE, C_ZERO], [C_ZERO, C64::new(-1.0, 0.0)]]);
/// Hadamard, (Z + X)/sqrt(2).
pub const HADAMARD: Gate1 = Gate1([
    [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)],
    [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(-FRAC_1_SQRT_2, 0.0)],
]);
/// The Y-axis analogue of the Hadamard, (Z + Y)/sqrt(2).
pub const HADAMARD_Y: Gate1 = Gate1([
    [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, -FRAC_1_SQRT_2)],
    [C64::new(0.0, FRAC_1_SQRT_2), C64::new(-FRAC_1_SQRT_2, 0.0)],
]);
pub const PHASE_S: Gate1 = Gate1([[C_ONE, C_ZERO], [C_ZERO, C64::new(0.0, 1.0)]]);

impl Gate1 {
    pub fn from_rows(rows: [[C64; 2]; 2]) -> Self {
        Gate1(rows)
    }

    /// General single-qubit rotation with three Euler-like angles:
    /// `[[cos(t/2), -e^{il} sin(t/2)], [e^{ip} sin(t/2), e^{i(p+l)} cos(t/2)]]`.
    pub fn u3(theta: f64, phi: f64, lambda: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Gate1([
            [C64::new(c, 0.0), -C64::from_polar(s, lambda)],
            [
                C64::from_polar(s, phi),
                C64::from_polar(c, phi + lambda),
            ],
        ])
    }

    pub fn adjoint(&self) -> Self {
        Gate1([
            [self.0[0][0].conj(), self.0[1][0].conj()],
            [self.0[0][1].conj(), self.0[1][1].conj()],
        ])
    }

    pub fn matmul(&self, rhs: &Gate1) -> Self {
        let a = &self.0;
        let b = &rhs.0;
        Gate1([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }

    /// Largest absolute entry of `U U^dag - I`.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = self.matmul(&self.adjoint());
        let mut dev: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                let want = if r == c { C_ONE } else { C_ZERO };
                dev = dev.max((p.0[r][c] - want).norm());
            }
        }
        dev
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub fn apply_to(&self, v: [C64; 2]) -> [C64; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_gates_are_unitary() {
        for g in [IDENT, PAULI_X, PAULI_Y, PAULI_Z, HADAMARD, HADAMARD_Y, PHASE_S] {
            assert!(g.is_unitary(1e-12), "{g:?}");
        }
    }

    #[test]
    fn u3_covers_named_gates() {
        let h = Gate1::u3(std::f64::consts::FRAC_PI_2, 0.0, std::f64::consts::PI);
        for r in 0..2 {
            for c in 0..2 {
                assert!((h.0[r][c] - HADAMARD.0[r][c]).norm() < 1e-12);
            }
        }
        let id = Gate1::u3(0.0, 0.0, 0.0);
        assert!(id.0[0][0].re > 1.0 - 1e-12 && id.0[1][1].re > 1.0 - 1e-12);
    }

    #[test]
    fn hadamard_y_squares_to_identity() {
        let sq = HADAMARD_Y.matmul(&HADAMARD_Y);
        assert!((sq.0[0][0] - C_ONE).norm() < 1e-12);
        assert!(sq.0[0][1].norm() < 1e-12);
        assert!((sq.0[1][1] - C_ONE).norm() < 1e-12);
    }
}
