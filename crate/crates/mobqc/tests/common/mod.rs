//! Independent oracles for integration tests: states and residuals are
//! built from explicit ket expansions and direct tensor contractions, never
//! through the library's gate/measurement code paths.

#![allow(dead_code)]

use num_complex::Complex64 as C64;

pub const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Amplitudes of the linear cluster from its four-branch expansion:
/// branch terms `|0+0+>, |0-1->, |1-0+>, |1+1->` with weight 1/2 each.
/// Index convention: qubit 1 = top bit.
pub fn linear_cluster_amplitudes() -> Vec<C64> {
    let mut amps = vec![C64::ZERO; 16];
    for idx in 0..16usize {
        let b1 = idx >> 3 & 1;
        let b2 = idx >> 2 & 1;
        let b3 = idx >> 1 & 1;
        let b4 = idx & 1;
        // sign of the |b2>, |b4> components inside each branch
        let sign: f64 = match (b1, b3) {
            (0, 0) => 1.0,
            (0, 1) => if (b2 + b4) % 2 == 0 { 1.0 } else { -1.0 },
            (1, 0) => if b2 == 0 { 1.0 } else { -1.0 },
            _ => if b4 == 0 { 1.0 } else { -1.0 },
        };
        amps[idx] = C64::new(0.25 * sign, 0.0);
    }
    amps
}

/// Amplitudes of the star cluster (center 3) from
/// `(|++0+> + |--1->)/sqrt(2)`.
pub fn star_cluster_amplitudes() -> Vec<C64> {
    let mut amps = vec![C64::ZERO; 16];
    for idx in 0..16usize {
        let b1 = idx >> 3 & 1;
        let b2 = idx >> 2 & 1;
        let b3 = idx >> 1 & 1;
        let b4 = idx & 1;
        let sign: f64 = if b3 == 0 {
            1.0
        } else if (b1 + b2 + b4) % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        amps[idx] = C64::new(0.25 * sign, 0.0);
    }
    amps
}

/// +1/-1 eigenvectors for the X, Y, Z axes, outcome bit 0 first.
pub fn axis_eigenvectors(axis: char) -> ([C64; 2], [C64; 2]) {
    let h = SQRT_HALF;
    match axis {
        'X' => (
            [C64::new(h, 0.0), C64::new(h, 0.0)],
            [C64::new(h, 0.0), C64::new(-h, 0.0)],
        ),
        'Y' => (
            [C64::new(h, 0.0), C64::new(0.0, h)],
            [C64::new(h, 0.0), C64::new(0.0, -h)],
        ),
        'Z' => ([C64::ONE, C64::ZERO], [C64::ZERO, C64::ONE]),
        other => panic!("unknown axis {other}"),
    }
}

pub fn eigenvector(axis: char, bit: u8) -> [C64; 2] {
    let (plus, minus) = axis_eigenvectors(axis);
    if bit == 0 {
        plus
    } else {
        minus
    }
}

/// Project qubits 2 and 3 of a 16-amplitude state onto the given
/// single-qubit vectors by direct contraction. Returns the branch
/// probability and the normalized residual on qubits (1, 4).
pub fn project_23(amps: &[C64], v2: [C64; 2], v3: [C64; 2]) -> (f64, [C64; 4]) {
    let mut residual = [C64::ZERO; 4];
    for b1 in 0..2usize {
        for b4 in 0..2usize {
            let mut acc = C64::ZERO;
            for b2 in 0..2usize {
                for b3 in 0..2usize {
                    let idx = b1 << 3 | b2 << 2 | b3 << 1 | b4;
                    acc += v2[b2].conj() * v3[b3].conj() * amps[idx];
                }
            }
            residual[b1 << 1 | b4] = acc;
        }
    }
    let prob: f64 = residual.iter().map(|a| a.norm_sqr()).sum();
    let scale = C64::new(1.0 / prob.sqrt(), 0.0);
    let normalized: [C64; 4] = std::array::from_fn(|k| residual[k] * scale);
    (prob, normalized)
}

/// Project an arbitrary subset of qubits of a 16-amplitude state onto axis
/// eigenvectors; returns the branch probability and the unnormalized
/// residual over the full register (projected qubits collapsed in place).
pub fn project_subset(amps: &[C64], picks: &[(usize, char, u8)]) -> (f64, Vec<C64>) {
    let mut work = amps.to_vec();
    for &(qubit, axis, bit) in picks {
        let v = eigenvector(axis, bit);
        let mask = 1usize << (4 - qubit);
        let mut next = vec![C64::ZERO; 16];
        for base in 0..16usize {
            if base & mask != 0 {
                continue;
            }
            let overlap = v[0].conj() * work[base] + v[1].conj() * work[base | mask];
            next[base] = overlap * v[0];
            next[base | mask] = overlap * v[1];
        }
        work = next;
    }
    let prob: f64 = work.iter().map(|a| a.norm_sqr()).sum();
    (prob, work)
}

/// 4x4 product of two single-qubit operators.
pub fn kron2(a: [[C64; 2]; 2], b: [[C64; 2]; 2]) -> [[C64; 4]; 4] {
    let mut out = [[C64::ZERO; 4]; 4];
    for r1 in 0..2 {
        for c1 in 0..2 {
            for r2 in 0..2 {
                for c2 in 0..2 {
                    out[r1 * 2 + r2][c1 * 2 + c2] = a[r1][c1] * b[r2][c2];
                }
            }
        }
    }
    out
}

pub fn matvec4(m: &[[C64; 4]; 4], v: &[C64; 4]) -> [C64; 4] {
    std::array::from_fn(|r| (0..4).map(|c| m[r][c] * v[c]).sum())
}

pub fn overlap4(a: &[C64; 4], b: &[C64; 4]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub const ID2: [[C64; 2]; 2] = [[C64::ONE, C64::ZERO], [C64::ZERO, C64::ONE]];

pub fn pauli_x() -> [[C64; 2]; 2] {
    [[C64::ZERO, C64::ONE], [C64::ONE, C64::ZERO]]
}

pub fn pauli_z() -> [[C64; 2]; 2] {
    [[C64::ONE, C64::ZERO], [C64::ZERO, C64::new(-1.0, 0.0)]]
}

pub fn hadamard() -> [[C64; 2]; 2] {
    let h = SQRT_HALF;
    [
        [C64::new(h, 0.0), C64::new(h, 0.0)],
        [C64::new(h, 0.0), C64::new(-h, 0.0)],
    ]
}
