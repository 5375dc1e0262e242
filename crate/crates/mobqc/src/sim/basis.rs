//! Measurement bases and outcomes.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::fmt;

/// A single-qubit projective measurement basis.
///
/// The Pauli bases are fixed points of the general Bloch parameterization:
/// X = Bloch(pi/2, 0), Y = Bloch(pi/2, pi/2), Z = Bloch(0, 0).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum MeasurementBasis {
    PauliX,
    PauliY,
    PauliZ,
    Bloch { theta: f64, phi: f64 },
}

impl MeasurementBasis {
    /// Polar and azimuthal angle of the +1 eigenvector on the Bloch sphere.
    pub fn angles(&self) -> (f64, f64) {
        match *self {
            MeasurementBasis::PauliX => (std::f64::consts::FRAC_PI_2, 0.0),
            MeasurementBasis::PauliY => {
                (std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2)
            }
            MeasurementBasis::PauliZ => (0.0, 0.0),
            MeasurementBasis::Bloch { theta, phi } => (theta, phi),
        }
    }

    /// Orthonormal eigenvectors `(plus, minus)`; outcome bit 0 collapses onto
    /// `plus` (the +1 eigenstate), bit 1 onto `minus`.
    pub fn eigenvectors(&self) -> ([C64; 2], [C64; 2]) {
        let (theta, phi) = self.angles();
        let (s, c) = (theta / 2.0).sin_cos();
        let plus = [C64::new(c, 0.0), C64::from_polar(s, phi)];
        let minus = [C64::new(s, 0.0), -C64::from_polar(c, phi)];
        (plus, minus)
    }

    pub fn eigenvector(&self, outcome: Outcome) -> [C64; 2] {
        let (plus, minus) = self.eigenvectors();
        match outcome {
            Outcome::Plus => plus,
            Outcome::Minus => minus,
        }
    }

    pub fn label(&self) -> String {
        match self {
            MeasurementBasis::PauliX => "X".into(),
            MeasurementBasis::PauliY => "Y".into(),
            MeasurementBasis::PauliZ => "Z".into(),
            MeasurementBasis::Bloch { theta, phi } => format!("B({theta:.4},{phi:.4})"),
        }
    }
}

/// A measurement outcome; `Plus` (bit 0) is the +1 eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn bit(self) -> u8 {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Self {
        if bit & 1 == 0 {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }

    /// Eigenvalue this outcome stands for.
    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bit())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn pauli_bases_match_bloch_cases() {
        let pairs = [
            (MeasurementBasis::PauliX, MeasurementBasis::Bloch { theta: std::f64::consts::FRAC_PI_2, phi: 0.0 }),
            (MeasurementBasis::PauliY, MeasurementBasis::Bloch { theta: std::f64::consts::FRAC_PI_2, phi: std::f64::consts::FRAC_PI_2 }),
            (MeasurementBasis::PauliZ, MeasurementBasis::Bloch { theta: 0.0, phi: 0.0 }),
        ];
        for (pauli, bloch) in pairs {
            let (p0, p1) = pauli.eigenvectors();
            let (b0, b1) = bloch.eigenvectors();
            for k in 0..2 {
                assert!(close(p0[k], b0[k]) && close(p1[k], b1[k]));
            }
        }
    }

    #[test]
    fn eigenvectors_are_orthonormal() {
        for basis in [
            MeasurementBasis::PauliX,
            MeasurementBasis::PauliY,
            MeasurementBasis::PauliZ,
            MeasurementBasis::Bloch { theta: 1.1, phi: 2.3 },
        ] {
            let (p, m) = basis.eigenvectors();
            let np = p[0].norm_sqr() + p[1].norm_sqr();
            let nm = m[0].norm_sqr() + m[1].norm_sqr();
            let dot = p[0].conj() * m[0] + p[1].conj() * m[1];
            assert!((np - 1.0).abs() < 1e-12);
            assert!((nm - 1.0).abs() < 1e-12);
            assert!(dot.norm() < 1e-12);
        }
    }

    #[test]
    fn y_plus_eigenvector() {
        // |+i> = (|0> + i|1>)/sqrt(2)
        let (p, _) = MeasurementBasis::PauliY.eigenvectors();
        assert!(close(p[0], C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)));
        assert!(close(p[1], C64::new(0.0, std::f64::consts::FRAC_1_SQRT_2)));
    }
}
