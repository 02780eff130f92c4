//! Pure statevector simulation.

use super::gate::{Gate, Mat2};
use crate::error::{Error, Result};
use num_complex::Complex64;

pub const MAX_QUBITS: usize = 6;

const NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0...0> on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Wrap an explicit amplitude vector; must be normalized.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        if amps.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                got: amps.len(),
                expected: 1 << n_qubits,
            });
        }
        let state = Self { n_qubits, amps };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Bit position (from least significant) of `qubit` in a basis index.
    fn bit_pos(&self, qubit: usize) -> usize {
        self.n_qubits - 1 - qubit
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match *gate {
            Gate::Crx { control, target, angle } => {
                self.apply_controlled(control, target, &super::gate::rx_matrix(angle));
            }
            _ => {
                let u = gate.matrix2().expect("single-qubit gate has a matrix");
                self.apply_single(gate.qubits()[0], &u);
            }
        }
        Ok(())
    }

    fn apply_single(&mut self, target: usize, u: &Mat2) {
        let stride = 1usize << self.bit_pos(target);
        let dim = self.amps.len();
        let mut base = 0;
        while base < dim {
            for i in base..base + stride {
                let j = i + stride;
                let a = self.amps[i];
                let b = self.amps[j];
                self.amps[i] = u[0][0] * a + u[0][1] * b;
                self.amps[j] = u[1][0] * a + u[1][1] * b;
            }
            base += stride * 2;
        }
    }

    fn apply_controlled(&mut self, control: usize, target: usize, u: &Mat2) {
        let st = 1usize << self.bit_pos(target);
        let sc = 1usize << self.bit_pos(control);
        for i in 0..self.amps.len() {
            if i & st == 0 && i & sc != 0 {
                let j = i | st;
                let a = self.amps[i];
                let b = self.amps[j];
                self.amps[i] = u[0][0] * a + u[0][1] * b;
                self.amps[j] = u[1][0] * a + u[1][1] * b;
            }
        }
    }

    /// Probability of each basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Marginal distribution of one qubit: [p(0), p(1)].
    pub fn marginal_probs(&self, qubit: usize) -> Result<[f64; 2]> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitIndex {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        let mask = 1usize << self.bit_pos(qubit);
        let mut probs = [0.0; 2];
        for (i, a) in self.amps.iter().enumerate() {
            probs[usize::from(i & mask != 0)] += a.norm_sqr();
        }
        Ok(probs)
    }
}

fn check_qubit_count(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::QubitCount {
            got: n_qubits,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_state_is_basis_zero() {
        let sv = StateVector::zero(3).unwrap();
        assert_eq!(sv.dim(), 8);
        assert_eq!(sv.amplitudes()[0], c(1.0, 0.0));
        assert!((sv.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn qubit_zero_is_most_significant_bit() {
        // RY(pi) on qubit 0 of |00> lands on basis index 2 = |10>.
        let mut sv = StateVector::zero(2).unwrap();
        sv.apply(&Gate::Ry { target: 0, angle: std::f64::consts::PI }).unwrap();
        let probs = sv.probabilities();
        assert!((probs[2] - 1.0).abs() < 1e-12, "{probs:?}");
    }

    #[test]
    fn x_flips_target_bit() {
        let mut sv = StateVector::zero(3).unwrap();
        sv.apply(&Gate::X { target: 2 }).unwrap();
        assert!((sv.probabilities()[1] - 1.0).abs() < 1e-15);
        sv.apply(&Gate::X { target: 0 }).unwrap();
        assert!((sv.probabilities()[0b101] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rz_quarter_turn_on_plus_has_zero_z_expectation() {
        // Independent 2x2 oracle.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = [c(s, 0.0), c(s, 0.0)];
        let rz = rz_oracle(std::f64::consts::FRAC_PI_2);
        let rotated = [
            rz[0][0] * plus[0] + rz[0][1] * plus[1],
            rz[1][0] * plus[0] + rz[1][1] * plus[1],
        ];
        let z_oracle = rotated[0].norm_sqr() - rotated[1].norm_sqr();
        assert!(z_oracle.abs() < 1e-12);

        // Simulator path: H then RZ(pi/2), <Z> from the marginal.
        let mut sv = StateVector::zero(1).unwrap();
        sv.apply(&Gate::H { target: 0 }).unwrap();
        sv.apply(&Gate::Rz { target: 0, angle: std::f64::consts::FRAC_PI_2 }).unwrap();
        let [p0, p1] = sv.marginal_probs(0).unwrap();
        assert!((p0 - p1 - z_oracle).abs() < 1e-12);
    }

    fn rz_oracle(angle: f64) -> [[Complex64; 2]; 2] {
        let h = angle / 2.0;
        [
            [Complex64::from_polar(1.0, -h), c(0.0, 0.0)],
            [c(0.0, 0.0), Complex64::from_polar(1.0, h)],
        ]
    }

    #[test]
    fn crx_acts_only_when_control_set() {
        let theta = 1.1;
        let mut sv = StateVector::zero(2).unwrap();
        sv.apply(&Gate::Crx { control: 0, target: 1, angle: theta }).unwrap();
        assert!((sv.probabilities()[0] - 1.0).abs() < 1e-15, "control clear: no-op");

        let mut sv = StateVector::zero(2).unwrap();
        sv.apply(&Gate::X { target: 0 }).unwrap();
        sv.apply(&Gate::Crx { control: 0, target: 1, angle: theta }).unwrap();
        let probs = sv.probabilities();
        let half = theta / 2.0;
        assert!((probs[2] - half.cos().powi(2)).abs() < 1e-12);
        assert!((probs[3] - half.sin().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn random_circuits_preserve_norm() {
        let mut rng = crate::rng::stream_rng(42, "test", 0);
        for n_qubits in 1..=MAX_QUBITS {
            let mut sv = StateVector::zero(n_qubits).unwrap();
            for _ in 0..40 {
                sv.apply(&crate::sim::testutil::random_gate(&mut rng, n_qubits)).unwrap();
            }
            assert!((sv.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn marginal_matches_grouped_probabilities() {
        let mut rng = crate::rng::stream_rng(7, "test", 1);
        let mut sv = StateVector::zero(4).unwrap();
        for _ in 0..25 {
            sv.apply(&crate::sim::testutil::random_gate(&mut rng, 4)).unwrap();
        }
        let probs = sv.probabilities();
        for qubit in 0..4 {
            let mask = 1usize << (3 - qubit);
            let mut oracle = [0.0; 2];
            for (i, p) in probs.iter().enumerate() {
                oracle[usize::from(i & mask != 0)] += p;
            }
            let got = sv.marginal_probs(qubit).unwrap();
            assert!((got[0] - oracle[0]).abs() < 1e-12);
            assert!((got[1] - oracle[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn construction_validates() {
        assert!(StateVector::zero(0).is_err());
        assert!(StateVector::zero(7).is_err());
        assert!(StateVector::from_amplitudes(1, vec![c(1.0, 0.0)]).is_err());
        assert!(StateVector::from_amplitudes(1, vec![c(0.7, 0.0), c(0.7, 0.0)]).is_err());
        assert!(StateVector::from_amplitudes(
            1,
            vec![c(std::f64::consts::FRAC_1_SQRT_2, 0.0), c(0.0, std::f64::consts::FRAC_1_SQRT_2)]
        )
        .is_ok());
        let sv = StateVector::zero(2).unwrap();
        assert!(sv.marginal_probs(2).is_err());
    }
}
