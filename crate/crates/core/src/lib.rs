//! Light-front simulation of an ultra-relativistic quark scattering off the
//! SU(3) color field of a nucleus.
//!
//! The crate builds the light-front Hamiltonian `H = P⁻/2` as a linear
//! combination of Pauli strings (kinetic terms diagonal in the transverse
//! momentum basis, interaction terms diagonal in the transverse coordinate
//! basis and conjugated by a shifted Fourier transform) and evolves a quark
//! state with one of several engines:
//!
//! - [`tts`]: gate-level truncated Taylor series with oblivious amplitude
//!   amplification, run on the dense [`statevector`] simulator;
//! - [`trotter`]: first-order product formula;
//! - [`reference`]: dense exact propagation and a matrix emulation of the
//!   amplified Taylor step.
//!
//! All numerics are generic over the real scalar type (see [`Scalar`]); the
//! `*64` / `*32` aliases below pin the usual choices.

pub mod cgc;
pub mod error;
pub mod hamiltonian;
pub mod lattice;
pub mod observables;
pub mod reference;
pub mod run;
pub mod scalar;
pub mod statevector;
pub mod trotter;
pub mod tts;

pub use error::{Error, Result};
pub use scalar::{Complex, Scalar};

pub type LatticeSpec64 = lattice::LatticeSpec<f64>;
pub type HamiltonianModel64 = hamiltonian::HamiltonianModel<f64>;
pub type StateVector64 = statevector::StateVector<f64>;
pub type Trajectory64 = observables::Trajectory<f64>;
pub type DenseOperator64 = reference::DenseOperator<f64>;

pub type LatticeSpec32 = lattice::LatticeSpec<f32>;
pub type HamiltonianModel32 = hamiltonian::HamiltonianModel<f32>;
pub type StateVector32 = statevector::StateVector<f32>;
pub type Trajectory32 = observables::Trajectory<f32>;
