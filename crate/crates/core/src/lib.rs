//! Structure-preserving finite-volume solver for compressible flows of real
//! gases described by a Helmholtz-energy equation of state.

pub mod discrete_gradient;
pub mod eos;
pub mod flux;
pub mod reduce;
pub mod solver;
pub mod diagnostics;
pub mod cases;
pub mod cli;
pub mod sampling;
