//! Kraus channels and classical readout error.

use super::gate::{Mat2, Mat4};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Maximum allowed deviation of sum K†K from the identity.
pub const COMPLETENESS_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub enum KrausOps {
    One(Vec<Mat2>),
    Two(Vec<Mat4>),
}

/// A completeness-checked set of Kraus operators on one or two qubits.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    ops: KrausOps,
}

impl KrausChannel {
    pub fn one_qubit(ops: Vec<Mat2>) -> Result<Self> {
        let dev = completeness_deviation_2(&ops);
        if dev > COMPLETENESS_TOL {
            return Err(Error::IncompleteKraus(dev));
        }
        Ok(Self { ops: KrausOps::One(ops) })
    }

    pub fn two_qubit(ops: Vec<Mat4>) -> Result<Self> {
        let dev = completeness_deviation_4(&ops);
        if dev > COMPLETENESS_TOL {
            return Err(Error::IncompleteKraus(dev));
        }
        Ok(Self { ops: KrausOps::Two(ops) })
    }

    pub fn arity(&self) -> usize {
        match self.ops {
            KrausOps::One(_) => 1,
            KrausOps::Two(_) => 2,
        }
    }

    pub fn len(&self) -> usize {
        match &self.ops {
            KrausOps::One(v) => v.len(),
            KrausOps::Two(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ops(&self) -> &KrausOps {
        &self.ops
    }
}

/// Depolarizing channel mixing toward the maximally mixed state with
/// probability `p`: E(rho) = (1-p)·rho + p·I/d, d = 2^arity. In Kraus form
/// the identity carries weight sqrt(1 - p(d²-1)/d²) and each of the d²-1
/// non-identity Pauli products carries sqrt(p/d²).
pub fn depolarizing(p: f64, arity: usize) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    match arity {
        1 => {
            if p == 0.0 {
                return KrausChannel::one_qubit(vec![identity2()]);
            }
            let d2 = 4.0;
            let w_id = (1.0 - p * (d2 - 1.0) / d2).sqrt();
            let w = (p / d2).sqrt();
            let mut ops = vec![scale2(&identity2(), w_id)];
            for pauli in [pauli_x(), pauli_y(), pauli_z()] {
                ops.push(scale2(&pauli, w));
            }
            KrausChannel::one_qubit(ops)
        }
        2 => {
            if p == 0.0 {
                return KrausChannel::two_qubit(vec![kron2(&identity2(), &identity2())]);
            }
            let d2 = 16.0;
            let w_id = (1.0 - p * (d2 - 1.0) / d2).sqrt();
            let w = (p / d2).sqrt();
            let paulis = [identity2(), pauli_x(), pauli_y(), pauli_z()];
            let mut ops = Vec::with_capacity(16);
            for (i, a) in paulis.iter().enumerate() {
                for (j, b) in paulis.iter().enumerate() {
                    let weight = if i == 0 && j == 0 { w_id } else { w };
                    ops.push(scale4(&kron2(a, b), weight));
                }
            }
            KrausChannel::two_qubit(ops)
        }
        other => Err(Error::ChannelArity(other)),
    }
}

/// Symmetric classical bit flip on a binary distribution:
/// [p0(1-eps) + p1·eps, p1(1-eps) + p0·eps].
pub fn readout_flip(probs: [f64; 2], eps: f64) -> Result<[f64; 2]> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidProbability(eps));
    }
    const SLACK: f64 = 1e-6;
    for p in probs {
        if !(-SLACK..=1.0 + SLACK).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
    }
    let p0 = probs[0].clamp(0.0, 1.0);
    let p1 = probs[1].clamp(0.0, 1.0);
    Ok([p0 * (1.0 - eps) + p1 * eps, p1 * (1.0 - eps) + p0 * eps])
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[rustfmt::skip]
pub(crate) fn identity2() -> Mat2 {
    [
        [c(1.0, 0.0), c(0.0, 0.0)],
        [c(0.0, 0.0), c(1.0, 0.0)],
    ]
}

#[rustfmt::skip]
fn pauli_x() -> Mat2 {
    [
        [c(0.0, 0.0), c(1.0, 0.0)],
        [c(1.0, 0.0), c(0.0, 0.0)],
    ]
}

#[rustfmt::skip]
fn pauli_y() -> Mat2 {
    [
        [c(0.0, 0.0), c(0.0, -1.0)],
        [c(0.0, 1.0), c(0.0, 0.0)],
    ]
}

#[rustfmt::skip]
fn pauli_z() -> Mat2 {
    [
        [c(1.0, 0.0), c(0.0, 0.0)],
        [c(0.0, 0.0), c(-1.0, 0.0)],
    ]
}

fn scale2(m: &Mat2, s: f64) -> Mat2 {
    let mut out = *m;
    for row in &mut out {
        for e in row {
            *e *= s;
        }
    }
    out
}

fn scale4(m: &Mat4, s: f64) -> Mat4 {
    let mut out = *m;
    for row in &mut out {
        for e in row {
            *e *= s;
        }
    }
    out
}

/// Kronecker product with `a` on the high sub-bit, matching the convention
/// that the first listed qubit is the more significant one.
pub fn kron2(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = [[c(0.0, 0.0); 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[i * 2 + k][j * 2 + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn completeness_deviation_2(ops: &[Mat2]) -> f64 {
    let mut sum = [[c(0.0, 0.0); 2]; 2];
    for k in ops {
        for i in 0..2 {
            for j in 0..2 {
                for r in 0..2 {
                    sum[i][j] += k[r][i].conj() * k[r][j];
                }
            }
        }
    }
    let mut dev: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let expect = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((sum[i][j] - c(expect, 0.0)).norm());
        }
    }
    dev
}

fn completeness_deviation_4(ops: &[Mat4]) -> f64 {
    let mut sum = [[c(0.0, 0.0); 4]; 4];
    for k in ops {
        for i in 0..4 {
            for j in 0..4 {
                for r in 0..4 {
                    sum[i][j] += k[r][i].conj() * k[r][j];
                }
            }
        }
    }
    let mut dev: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let expect = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((sum[i][j] - c(expect, 0.0)).norm());
        }
    }
    dev
}
