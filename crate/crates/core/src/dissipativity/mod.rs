//! Dissipative structure of the linearized symbol.
//!
//! The symbol `(A0, A(xi), B(xi))` is not Friedrichs symmetrizable, but the
//! diagonal symbol symmetrizer `S(xi) = diag(beta(xi)/p_rho, 1, 1)` makes
//! `S A(xi)` and `S B(xi)` symmetric. In the variables
//! `V = S^{1/2} A0^{1/2} W` the system becomes `V_t + (i xi At + xi^2 Bt) V = 0`
//! with
//!
//! ```text
//! At(xi) = [[u, beta^{1/2}, 0], [beta^{1/2}, u, c], [0, c, u]]
//! Bt     = diag(0, mu/rho, alpha/(e_theta rho))
//! ```
//!
//! Submodules check genuine coupling, build the compensating matrix and
//! classify the decay of the spectrum.

mod compensating;
mod coupling;
mod spectral;

pub use compensating::{
    compensating_matrix, dissipation_diagonal, lyapunov_check, verify_certificate,
    CompensatingCertificate, CompensatingMatrix, LyapunovReport, RATE_GRID,
};
pub use coupling::{
    check_friedrichs, check_genuine_coupling, friedrichs_search, CouplingReport, CouplingSample,
    FriedrichsReport,
};
pub use spectral::{
    balanced_symbol, sigma, spectral_bound, Classification, DissipativityType, SpectralBound,
};

use nalgebra::{Matrix3, SymmetricEigen, Vector3};

use crate::symbols::{EquilibriumCoefficients, SymbolFamily};

/// `S(xi) = diag(beta(xi)/p_rho, 1, 1)`.
pub fn symbol_symmetrizer(coeffs: &EquilibriumCoefficients, xi: f64) -> Matrix3<f64> {
    Matrix3::from_diagonal(&Vector3::new(coeffs.beta(xi) / coeffs.p_rho, 1.0, 1.0))
}

/// The symmetric triplet `(I, At(xi), Bt)`.
#[derive(Debug, Clone)]
pub struct TransformedTriplet {
    pub coeffs: EquilibriumCoefficients,
    pub btilde: Matrix3<f64>,
}

pub fn transformed_triplet(coeffs: &EquilibriumCoefficients) -> TransformedTriplet {
    TransformedTriplet::new(coeffs)
}

impl TransformedTriplet {
    pub fn new(coeffs: &EquilibriumCoefficients) -> Self {
        let (rho, et) = (coeffs.state.rho, coeffs.e_theta);
        TransformedTriplet {
            coeffs: coeffs.clone(),
            btilde: Matrix3::from_diagonal(&Vector3::new(
                0.0,
                coeffs.mu / rho,
                coeffs.alpha / (et * rho),
            )),
        }
    }

    /// Closed form of `At(xi)`.
    pub fn atilde(&self, xi: f64) -> Matrix3<f64> {
        let u = self.coeffs.state.u;
        let sb = self.coeffs.beta(xi).sqrt();
        let c = self.coeffs.cbar;
        Matrix3::new(u, sb, 0.0, sb, u, c, 0.0, c, u)
    }

    /// Diagonal of `T(xi) = S(xi)^{1/2} A0^{1/2}`, the change of variables
    /// `V = T W`.
    pub fn scaling(&self, xi: f64) -> Vector3<f64> {
        let s = symbol_symmetrizer(&self.coeffs, xi).diagonal();
        s.component_mul(&self.coeffs.a0.diagonal()).map(f64::sqrt)
    }

    /// `S^{1/2} A0^{-1/2} A(xi) A0^{-1/2} S^{-1/2}` evaluated numerically.
    pub fn atilde_congruence(&self, xi: f64) -> Matrix3<f64> {
        let s = symbol_symmetrizer(&self.coeffs, xi)
            .diagonal()
            .map(f64::sqrt);
        let r = self.coeffs.a0.diagonal().map(|d| 1.0 / d.sqrt());
        let a = self.coeffs.a_of(xi);
        Matrix3::from_fn(|i, j| s[i] * r[i] * a[(i, j)] * r[j] / s[j])
    }

    /// `A0^{-1/2} B A0^{-1/2}` evaluated numerically.
    pub fn btilde_congruence(&self) -> Matrix3<f64> {
        let r = self.coeffs.a0.diagonal().map(|d| 1.0 / d.sqrt());
        Matrix3::from_fn(|i, j| r[i] * self.coeffs.b[(i, j)] * r[j])
    }
}

impl SymbolFamily for TransformedTriplet {
    fn a0(&self) -> Matrix3<f64> {
        Matrix3::identity()
    }
    fn a(&self, xi: f64) -> Matrix3<f64> {
        self.atilde(xi)
    }
    fn b(&self, xi: f64) -> Matrix3<f64> {
        self.btilde * (xi * xi)
    }
}

/// Closed-form eigenvalues of `At(xi)`, ascending.
pub fn atilde_eigenvalues(coeffs: &EquilibriumCoefficients, xi: f64) -> [f64; 3] {
    let u = coeffs.state.u;
    let r = (coeffs.cbar * coeffs.cbar + coeffs.beta(xi)).sqrt();
    [u - r, u, u + r]
}

/// Eigenvalues of `At(xi)` from a general symmetric eigensolver, ascending.
pub fn atilde_eigenvalues_numeric(triplet: &TransformedTriplet, xi: f64) -> [f64; 3] {
    let e = SymmetricEigen::new(triplet.atilde(xi)).eigenvalues;
    let mut v = [e[0], e[1], e[2]];
    v.sort_by(|a, b| a.total_cmp(b));
    v
}
