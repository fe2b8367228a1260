//! Spectral functional calculus for the biharmonic operator Delta^2 on
//! periodic grid approximations of R^n, with Lipschitz-seminorm estimation
//! and a theorem-verification harness.

pub mod calculus;
pub mod cli;
pub mod grid;
pub mod kernel;
pub mod lipschitz;
pub mod quadrature;
pub mod verify;
