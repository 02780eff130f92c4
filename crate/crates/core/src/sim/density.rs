//! Density-matrix simulation.
//!
//! Unitaries and Kraus operators are applied as U·rho·U† through the same
//! index-pair kernels the statevector uses: the left factor updates row pairs
//! within each column, the right (daggered) factor updates column pairs within
//! each row using the conjugated matrix. Nothing is ever expanded to the full
//! register dimension.

use super::channel::{KrausChannel, KrausOps};
use super::gate::{rx_matrix, Gate, Mat2, Mat4};
use super::state::StateVector;
use crate::error::{Error, Result};
use num_complex::Complex64;

pub const MAX_DM_QUBITS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    dim: usize,
    elems: Vec<Complex64>, // row-major dim x dim
}

impl DensityMatrix {
    /// |0...0><0...0| on `n_qubits` qubits.
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut elems = vec![Complex64::new(0.0, 0.0); dim * dim];
        elems[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, dim, elems })
    }

    /// The pure state |psi><psi|.
    pub fn from_statevector(sv: &StateVector) -> Result<Self> {
        check_qubit_count(sv.n_qubits())?;
        let dim = sv.dim();
        let amps = sv.amplitudes();
        let mut elems = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                elems.push(amps[r] * amps[c].conj());
            }
        }
        Ok(Self { n_qubits: sv.n_qubits(), dim, elems })
    }

    /// Wrap explicit elements; validates the dimension only.
    pub fn from_elements(n_qubits: usize, elems: Vec<Complex64>) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        if elems.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                got: elems.len(),
                expected: dim * dim,
            });
        }
        Ok(Self { n_qubits, dim, elems })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[Complex64] {
        &self.elems
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.elems[row * self.dim + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.elems[i * self.dim + i]).sum()
    }

    fn bit_pos(&self, qubit: usize) -> usize {
        self.n_qubits - 1 - qubit
    }

    /// rho <- U rho U† for one gate.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match *gate {
            Gate::Crx { control, target, angle } => {
                let u = rx_matrix(angle);
                self.left_ctrl2(control, target, &u);
                self.right_ctrl2_dagger(control, target, &u);
            }
            _ => {
                let u = gate.matrix2().expect("single-qubit gate has a matrix");
                let target = gate.qubits()[0];
                self.left_mat2(target, &u);
                self.right_mat2_dagger(target, &u);
            }
        }
        Ok(())
    }

    /// rho <- sum_k K_k rho K_k† over the channel's listed qubits.
    pub fn apply_channel(&mut self, channel: &KrausChannel, qubits: &[usize]) -> Result<()> {
        if qubits.len() != channel.arity() {
            return Err(Error::ChannelTargets {
                arity: channel.arity(),
                got: qubits.len(),
            });
        }
        for &q in qubits {
            if q >= self.n_qubits {
                return Err(Error::QubitIndex { index: q, n_qubits: self.n_qubits });
            }
        }
        match channel.ops() {
            KrausOps::One(ops) => {
                let target = qubits[0];
                let mut acc = vec![Complex64::new(0.0, 0.0); self.elems.len()];
                for k in ops {
                    let mut term = self.clone();
                    term.left_mat2(target, k);
                    term.right_mat2_dagger(target, k);
                    for (a, t) in acc.iter_mut().zip(&term.elems) {
                        *a += t;
                    }
                }
                self.elems = acc;
            }
            KrausOps::Two(ops) => {
                let (qa, qb) = (qubits[0], qubits[1]);
                if qa == qb {
                    return Err(Error::DuplicateQubit(qa));
                }
                let mut acc = vec![Complex64::new(0.0, 0.0); self.elems.len()];
                for k in ops {
                    let mut term = self.clone();
                    term.left_mat4(qa, qb, k);
                    term.right_mat4_dagger(qa, qb, k);
                    for (a, t) in acc.iter_mut().zip(&term.elems) {
                        *a += t;
                    }
                }
                self.elems = acc;
            }
        }
        Ok(())
    }

    /// Marginal distribution of one qubit from the diagonal: [p(0), p(1)].
    /// Tiny negative diagonal mass from roundoff is clamped to zero.
    pub fn marginal_probs(&self, qubit: usize) -> Result<[f64; 2]> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitIndex { index: qubit, n_qubits: self.n_qubits });
        }
        let mask = 1usize << self.bit_pos(qubit);
        let mut probs = [0.0; 2];
        for i in 0..self.dim {
            probs[usize::from(i & mask != 0)] += self.elems[i * self.dim + i].re;
        }
        Ok([probs[0].max(0.0), probs[1].max(0.0)])
    }

    // ---- left/right kernels ----

    fn left_mat2(&mut self, target: usize, u: &Mat2) {
        let stride = 1usize << self.bit_pos(target);
        let dim = self.dim;
        for col in 0..dim {
            let mut base = 0;
            while base < dim {
                for r in base..base + stride {
                    let i = r * dim + col;
                    let j = (r + stride) * dim + col;
                    let a = self.elems[i];
                    let b = self.elems[j];
                    self.elems[i] = u[0][0] * a + u[0][1] * b;
                    self.elems[j] = u[1][0] * a + u[1][1] * b;
                }
                base += stride * 2;
            }
        }
    }

    fn right_mat2_dagger(&mut self, target: usize, u: &Mat2) {
        let stride = 1usize << self.bit_pos(target);
        let dim = self.dim;
        for row in 0..dim {
            let off = row * dim;
            let mut base = 0;
            while base < dim {
                for c in base..base + stride {
                    let i = off + c;
                    let j = off + c + stride;
                    let a = self.elems[i];
                    let b = self.elems[j];
                    self.elems[i] = u[0][0].conj() * a + u[0][1].conj() * b;
                    self.elems[j] = u[1][0].conj() * a + u[1][1].conj() * b;
                }
                base += stride * 2;
            }
        }
    }

    fn left_ctrl2(&mut self, control: usize, target: usize, u: &Mat2) {
        let st = 1usize << self.bit_pos(target);
        let sc = 1usize << self.bit_pos(control);
        let dim = self.dim;
        for col in 0..dim {
            for r in 0..dim {
                if r & st == 0 && r & sc != 0 {
                    let i = r * dim + col;
                    let j = (r | st) * dim + col;
                    let a = self.elems[i];
                    let b = self.elems[j];
                    self.elems[i] = u[0][0] * a + u[0][1] * b;
                    self.elems[j] = u[1][0] * a + u[1][1] * b;
                }
            }
        }
    }

    fn right_ctrl2_dagger(&mut self, control: usize, target: usize, u: &Mat2) {
        let st = 1usize << self.bit_pos(target);
        let sc = 1usize << self.bit_pos(control);
        let dim = self.dim;
        for row in 0..dim {
            let off = row * dim;
            for c in 0..dim {
                if c & st == 0 && c & sc != 0 {
                    let i = off + c;
                    let j = off + (c | st);
                    let a = self.elems[i];
                    let b = self.elems[j];
                    self.elems[i] = u[0][0].conj() * a + u[0][1].conj() * b;
                    self.elems[j] = u[1][0].conj() * a + u[1][1].conj() * b;
                }
            }
        }
    }

    fn left_mat4(&mut self, qa: usize, qb: usize, m: &Mat4) {
        // Sub-basis: qa is the high bit, matching list order elsewhere.
        let sa = 1usize << self.bit_pos(qa);
        let sb = 1usize << self.bit_pos(qb);
        let dim = self.dim;
        for col in 0..dim {
            for r in 0..dim {
                if r & sa == 0 && r & sb == 0 {
                    let idx = [
                        r * dim + col,
                        (r | sb) * dim + col,
                        (r | sa) * dim + col,
                        (r | sa | sb) * dim + col,
                    ];
                    let v = [
                        self.elems[idx[0]],
                        self.elems[idx[1]],
                        self.elems[idx[2]],
                        self.elems[idx[3]],
                    ];
                    for s in 0..4 {
                        self.elems[idx[s]] =
                            m[s][0] * v[0] + m[s][1] * v[1] + m[s][2] * v[2] + m[s][3] * v[3];
                    }
                }
            }
        }
    }

    fn right_mat4_dagger(&mut self, qa: usize, qb: usize, m: &Mat4) {
        let sa = 1usize << self.bit_pos(qa);
        let sb = 1usize << self.bit_pos(qb);
        let dim = self.dim;
        for row in 0..dim {
            let off = row * dim;
            for c in 0..dim {
                if c & sa == 0 && c & sb == 0 {
                    let idx = [off + c, off + (c | sb), off + (c | sa), off + (c | sa | sb)];
                    let v = [
                        self.elems[idx[0]],
                        self.elems[idx[1]],
                        self.elems[idx[2]],
                        self.elems[idx[3]],
                    ];
                    for s in 0..4 {
                        self.elems[idx[s]] = m[s][0].conj() * v[0]
                            + m[s][1].conj() * v[1]
                            + m[s][2].conj() * v[2]
                            + m[s][3].conj() * v[3];
                    }
                }
            }
        }
    }
}

fn check_qubit_count(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_DM_QUBITS {
        return Err(Error::QubitCount { got: n_qubits, max: MAX_DM_QUBITS });
    }
    Ok(())
}
