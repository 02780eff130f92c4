//! Shared helpers for the simulation unit tests.

use super::gate::Gate;
use rand::Rng;

pub(crate) fn random_gate<R: Rng>(rng: &mut R, n_qubits: usize) -> Gate {
    let target = rng.gen_range(0..n_qubits);
    let angle = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    match rng.gen_range(0..6) {
        0 => Gate::Rz { target, angle },
        1 => Gate::Ry { target, angle },
        2 => Gate::Rx { target, angle },
        3 => Gate::X { target },
        4 => Gate::H { target },
        _ if n_qubits >= 2 => {
            let control = (target + 1 + rng.gen_range(0..n_qubits - 1)) % n_qubits;
            Gate::Crx { control, target, angle }
        }
        _ => Gate::Rx { target, angle },
    }
}
