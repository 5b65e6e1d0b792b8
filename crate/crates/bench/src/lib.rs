//! Shared fixtures for the benchmarks.

use nsfk_core::nonlinear::{Solver, StateField};
use nsfk_core::symbols::EquilibriumCoefficients;
use nsfk_core::{Domain, EquationOfState, IdealGas, State};

/// Reference equilibrium `(1, 0, 1)`.
pub const EQUILIBRIUM: State = State {
    rho: 1.0,
    u: 0.0,
    theta: 1.0,
    rho_x: 0.0,
};

pub fn reference_eos() -> EquationOfState {
    IdealGas::REFERENCE.build().expect("reference gas is valid")
}

pub fn reference_coefficients() -> EquilibriumCoefficients {
    EquilibriumCoefficients::new(&reference_eos(), &EQUILIBRIUM)
}

pub fn solver(n: usize, length: f64) -> Solver {
    Solver::new(&reference_eos(), &EQUILIBRIUM, n, length, Domain::default())
        .expect("reference solver")
}

/// Gaussian bump of size `amplitude` centred in the box.
pub fn bump(s: &Solver, amplitude: f64) -> StateField {
    let (n, l) = (s.grid.n, s.grid.length);
    let mut f = StateField::constant(&s.equilibrium, n, l);
    for j in 0..n {
        let x = s.grid.x(j) - 0.5 * l;
        let g = (-x * x / 4.0).exp();
        f.rho[j] += amplitude * g;
        f.u[j] += 0.5 * amplitude * x * g;
        f.theta[j] -= 0.3 * amplitude * g;
    }
    f
}
