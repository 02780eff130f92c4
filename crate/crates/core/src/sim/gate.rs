//! Gate set and matrix forms.

use crate::error::{Error, Result};
use num_complex::Complex64;

pub type Mat2 = [[Complex64; 2]; 2];
pub type Mat4 = [[Complex64; 4]; 4];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// One instruction of a circuit. Rotation angles are in radians and use the
/// half-angle convention exp(-i·angle·P/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Rz { target: usize, angle: f64 },
    Ry { target: usize, angle: f64 },
    Rx { target: usize, angle: f64 },
    Crx { control: usize, target: usize, angle: f64 },
    X { target: usize },
    H { target: usize },
}

impl Gate {
    pub fn arity(&self) -> usize {
        match self {
            Gate::Crx { .. } => 2,
            _ => 1,
        }
    }

    /// Qubits the gate acts on, control first for the controlled gate.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Rz { target, .. }
            | Gate::Ry { target, .. }
            | Gate::Rx { target, .. }
            | Gate::X { target }
            | Gate::H { target } => vec![target],
            Gate::Crx { control, target, .. } => vec![control, target],
        }
    }

    /// 2x2 matrix of a single-qubit gate; `None` for the controlled gate.
    pub fn matrix2(&self) -> Option<Mat2> {
        match *self {
            Gate::Rz { angle, .. } => Some(rz_matrix(angle)),
            Gate::Ry { angle, .. } => Some(ry_matrix(angle)),
            Gate::Rx { angle, .. } => Some(rx_matrix(angle)),
            Gate::X { .. } => Some(x_matrix()),
            Gate::H { .. } => Some(h_matrix()),
            Gate::Crx { .. } => None,
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        for &q in &self.qubits() {
            if q >= n_qubits {
                return Err(Error::QubitIndex {
                    index: q,
                    n_qubits,
                });
            }
        }
        if let Gate::Crx { control, target, .. } = *self {
            if control == target {
                return Err(Error::DuplicateQubit(control));
            }
        }
        Ok(())
    }
}

pub fn rz_matrix(angle: f64) -> Mat2 {
    let h = angle / 2.0;
    [
        [c(h.cos(), -h.sin()), c(0.0, 0.0)],
        [c(0.0, 0.0), c(h.cos(), h.sin())],
    ]
}

pub fn ry_matrix(angle: f64) -> Mat2 {
    let h = angle / 2.0;
    [
        [c(h.cos(), 0.0), c(-h.sin(), 0.0)],
        [c(h.sin(), 0.0), c(h.cos(), 0.0)],
    ]
}

pub fn rx_matrix(angle: f64) -> Mat2 {
    let h = angle / 2.0;
    [
        [c(h.cos(), 0.0), c(0.0, -h.sin())],
        [c(0.0, -h.sin()), c(h.cos(), 0.0)],
    ]
}

#[rustfmt::skip]
pub fn x_matrix() -> Mat2 {
    [
        [c(0.0, 0.0), c(1.0, 0.0)],
        [c(1.0, 0.0), c(0.0, 0.0)],
    ]
}

#[rustfmt::skip]
pub fn h_matrix() -> Mat2 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        [c(s, 0.0), c(s, 0.0)],
        [c(s, 0.0), c(-s, 0.0)],
    ]
}

/// 4x4 controlled-RX in the |control target> sub-basis: identity on the
/// control-0 block, RX(angle) on the control-1 block.
pub fn crx_matrix(angle: f64) -> Mat4 {
    let rx = rx_matrix(angle);
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    [
        [one, z, z, z],
        [z, one, z, z],
        [z, z, rx[0][0], rx[0][1]],
        [z, z, rx[1][0], rx[1][1]],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matvec2(m: &Mat2, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    fn assert_unitary2(m: &Mat2) {
        // U†U == I
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = c(0.0, 0.0);
                for k in 0..2 {
                    acc += m[k][i].conj() * m[k][j];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((acc - c(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn builders_are_unitary() {
        for &angle in &[0.0, 0.3, -1.7, std::f64::consts::PI, 5.5] {
            assert_unitary2(&rz_matrix(angle));
            assert_unitary2(&ry_matrix(angle));
            assert_unitary2(&rx_matrix(angle));
        }
        assert_unitary2(&x_matrix());
        assert_unitary2(&h_matrix());
    }

    #[test]
    fn ry_pi_rotates_zero_to_one() {
        let out = matvec2(&ry_matrix(std::f64::consts::PI), [c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(out[0].norm() < 1e-15);
        assert!((out[1] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn crx_identity_block_and_zero_angle() {
        let m = crx_matrix(0.0);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((m[i][j] - c(expect, 0.0)).norm() < 1e-15);
            }
        }
        let m = crx_matrix(1.3);
        for i in 0..2 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((m[i][j] - c(expect, 0.0)).norm() < 1e-15);
                assert!((m[j][i] - c(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn gate_validation_rejects_bad_indices() {
        assert!(Gate::H { target: 3 }.validate(3).is_err());
        assert!(Gate::Crx { control: 1, target: 1, angle: 0.2 }.validate(4).is_err());
        assert!(Gate::Crx { control: 0, target: 3, angle: 0.2 }.validate(4).is_ok());
    }
}
