//! First-order product formula for the same Hamiltonian.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianModel;
use crate::observables::Trajectory;
use crate::scalar::{Complex, Scalar};
use crate::statevector::{GateOp, QftDirection, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrotterConfig {
    /// Step size τ′, GeV⁻¹.
    pub tau_prime: f64,
    pub steps: usize,
}

/// Gates of one step: the interaction exponentials inside the transform
/// pair, then the kinetic exponentials, in the model's term order.
pub fn step_gates<T: Scalar>(model: &HamiltonianModel<T>, tau_prime: T) -> Vec<GateOp<T>> {
    let block = model.system_block();
    let rot = |t: &crate::hamiltonian::PauliTerm<T>| GateOp::PauliRotation {
        block,
        string: t.string.clone(),
        theta: tau_prime * t.coeff,
    };
    let qft = |direction| {
        model.qft_blocks.iter().map(move |b| GateOp::ShiftedQft { block: *b, sites: model.qft_sites, direction })
    };
    let mut ops = Vec::new();
    if !model.interaction_terms.is_empty() {
        ops.extend(qft(QftDirection::Forward));
        ops.extend(model.interaction_terms.iter().map(rot));
        ops.extend(qft(QftDirection::Inverse));
    }
    ops.extend(model.kinetic_terms.iter().map(rot));
    ops
}

pub fn trotter_step<T: Scalar>(state: &mut StateVector<T>, model: &HamiltonianModel<T>, tau_prime: T) -> Result<()> {
    if state.n_qubits() != model.n_qubits {
        return Err(Error::WidthMismatch { expected: model.n_qubits, found: state.n_qubits() });
    }
    state.apply_all(&step_gates(model, tau_prime))
}

pub fn trotter_evolve<T: Scalar>(
    initial: &[Complex<T>],
    model: &HamiltonianModel<T>,
    config: &TrotterConfig,
) -> Result<Trajectory<T>> {
    if !(config.tau_prime >= 0.0) {
        return Err(Error::Config(format!("step size must be non-negative, got {}", config.tau_prime)));
    }
    let n = model.n_qubits;
    let mut state = StateVector::from_amplitudes(initial.to_vec(), n)?;
    if state.n_qubits() != n {
        return Err(Error::WidthMismatch { expected: n, found: state.n_qubits() });
    }
    let tau = T::lit(config.tau_prime);
    let gates = step_gates(model, tau);
    let mut traj = Trajectory::new(n);
    traj.record_state(0, T::zero(), state.amplitudes(), None);
    for k in 1..=config.steps {
        state.apply_all(&gates)?;
        traj.record_state(k, T::lit(config.tau_prime * k as f64), state.amplitudes(), None);
    }
    Ok(traj)
}

/// `r′ = ⌈(Λx⁺)²/ε⌉`
pub fn trotter_steps_for(epsilon: f64, lambda: f64, x_plus: f64) -> Result<u64> {
    if !(epsilon > 0.0) {
        return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    let lx = lambda * x_plus;
    Ok((lx * lx / epsilon).ceil() as u64)
}
