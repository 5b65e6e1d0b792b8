//! Numerical toolkit for the one-dimensional heat-conducting Korteweg fluid.
//!
//! The crate is organised bottom-up:
//!
//! - [`thermo`]: closures, derived potentials and hypothesis sweeps.
//! - [`convex_extension`]: entropy pair and symmetric coefficients of the
//!   capillarity-free system.
//! - [`symbols`]: conservation form, perturbation variables, nonlinear terms
//!   and the Fourier symbols at an equilibrium.
//! - [`dissipativity`]: symmetrizer, genuine coupling, compensating matrix and
//!   spectral-bound classification.
//! - [`linear_evolution`]: exact modal evolution and decay-rate fits.
//! - [`nonlinear`]: pseudo-spectral solver with conservation and entropy
//!   ledgers.

// `!(x > 0.0)` style comparisons reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convex_extension;
pub mod dissipativity;
pub mod error;
pub mod fit;
pub mod grid;
pub mod linalg;
pub mod linear_evolution;
pub mod nonlinear;
pub mod symbols;
pub mod thermo;

pub use error::{Error, Result};
pub use thermo::{Domain, EquationOfState, IdealGas, State};
