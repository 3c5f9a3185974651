//! State-vector simulation of `H(t) = A(t) H_mixing + B(t) H_problem` with
//! `H_mixing = −Σ σ_x` and `H_problem` the diagonal Ising energy.
//!
//! The anneal starts in `|+⟩^⊗n`, the mixer ground state. Two propagators are
//! provided: fixed-step RK4 on the Schrödinger equation (the reference) and a
//! piecewise-constant Strang splitting (the gate-model counterpart).

mod evolve;
mod problem;
mod state;

pub use evolve::{
    beta_of_state, beta_unitary, beta_unitary_two_level, evolve_continuous, evolve_continuous_from, evolve_trotter,
    evolve_trotter_from, two_level_beta, two_level_populations, EvolutionReport, DEFAULT_STEPS_PER_UNIT_TIME,
    RENORMALIZE_THRESHOLD, UNSTABLE_THRESHOLD,
};
pub use problem::{index_of, spin_of, spins_of, Coupling, Field, IsingProblem};
pub use state::{apply_hamiltonian, mixer_ground_state, StateVector, MAX_QUBITS};
