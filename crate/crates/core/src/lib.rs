//! Resonant normal forms and energy-drift measurements for systems of fast
//! harmonic oscillators coupled to a slow mechanical system.

pub mod config;
pub mod diophantine;
pub mod error;
pub mod harness;
pub mod integrator;
pub mod model;
pub mod number;
pub mod normal_form;
pub mod poisson;
pub mod stats;

pub use error::{Error, ParseError, Result};
pub use model::{
    eval_full_hamiltonian, fast_energy_norm, from_complex, h_omega, to_complex, ComplexFastState,
    FrequencyVector, FullState, PotentialTerm, SlowHamiltonian,
};
pub use number::{Coeff, QuadSurd};
pub use poisson::{GradedPolynomial, MonomialKey, PhasePoint, PoissonAlgebra};
