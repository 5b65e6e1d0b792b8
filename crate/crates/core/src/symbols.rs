//! Conservation form of the capillary system and its Fourier symbols.
//!
//! With `U = (rho, u, theta)` the system is
//!
//! ```text
//! F0(U, U_x)_t + F1(U, U_x)_x = (G(U) U_x + H(U) U_xx + g(U, U_x))_x
//! ```
//!
//! where `F0 = (rho, rho u, rho (eps + u^2/2))` carries the gradient energy.
//! At an equilibrium `Ubar` the perturbation `W = Df0bar^{-1} (F0 - F0bar)`
//! obeys
//!
//! ```text
//! A0 W_t + A1 W_x = B W_xx + C W_xxx + A0 N_x
//! ```
//!
//! with constant coefficients and a quadratic remainder `N`; in Fourier space
//! the linear part is `W_t + M(i xi) W = 0`.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::convex_extension::{coefficient_matrices_from, NsfMaps};
use crate::linalg::{complexify, CMatrix3};
use crate::thermo::{EquationOfState, Potentials, State};

/// A state with the spatial derivatives needed by the conservation form.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ExtendedState {
    pub rho: f64,
    pub u: f64,
    pub theta: f64,
    pub rho_x: f64,
    pub u_x: f64,
    pub theta_x: f64,
    pub rho_xx: f64,
    pub u_xx: f64,
    pub theta_xx: f64,
    pub rho_xxx: f64,
}

impl ExtendedState {
    /// A state with all gradients zero.
    pub fn constant(s: &State) -> Self {
        ExtendedState {
            rho: s.rho,
            u: s.u,
            theta: s.theta,
            ..Default::default()
        }
    }

    pub fn state(&self) -> State {
        State::new(self.rho, self.u, self.theta).with_rho_x(self.rho_x)
    }

    pub fn grad(&self) -> Vector3<f64> {
        Vector3::new(self.rho_x, self.u_x, self.theta_x)
    }

    pub fn grad2(&self) -> Vector3<f64> {
        Vector3::new(self.rho_xx, self.u_xx, self.theta_xx)
    }
}

/// `F0 = (rho, rho u, rho (eps + u^2/2))`.
pub fn conserved_quantities(eos: &EquationOfState, ext: &ExtendedState) -> Vector3<f64> {
    conserved_from(&eos.at(ext.rho, ext.theta), ext)
}

pub(crate) fn conserved_from(q: &Potentials, x: &ExtendedState) -> Vector3<f64> {
    let eps = q.eps(x.rho_x);
    Vector3::new(x.rho, x.rho * x.u, x.rho * (eps + 0.5 * x.u * x.u))
}

/// Gradient parts `Gamma0 = (0, 0, rho (kappa - theta kappa_theta) rho_x^2)` and
/// `Gamma1 = u Gamma0` of the conserved quantities and flux.
pub fn gradient_parts(eos: &EquationOfState, ext: &ExtendedState) -> (Vector3<f64>, Vector3<f64>) {
    let q = eos.at(ext.rho, ext.theta);
    let g0 = Vector3::new(0.0, 0.0, ext.rho * q.g() * ext.rho_x * ext.rho_x);
    (g0, g0 * ext.u)
}

/// Flux and dissipation tensors of the conservation form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxTensors {
    pub f1: Vector3<f64>,
    pub g: Matrix3<f64>,
    pub h: Matrix3<f64>,
    pub gtilde: Vector3<f64>,
}

impl FluxTensors {
    /// Right-hand flux `-F1 + G U_x + H U_xx + gtilde`.
    pub fn total_flux(&self, ext: &ExtendedState) -> Vector3<f64> {
        -self.f1 + self.g * ext.grad() + self.h * ext.grad2() + self.gtilde
    }
}

pub fn flux_and_tensors(eos: &EquationOfState, ext: &ExtendedState) -> FluxTensors {
    flux_from(&eos.at(ext.rho, ext.theta), ext)
}

pub(crate) fn flux_from(q: &Potentials, x: &ExtendedState) -> FluxTensors {
    let (rho, u) = (x.rho, x.u);
    let p = q.p();
    let tot = q.eps(x.rho_x) + 0.5 * u * u;
    let k = q.k();
    let f1 = Vector3::new(rho * u, rho * u * u + p, rho * u * tot + p * u);
    let g = Matrix3::new(0.0, 0.0, 0.0, 0.0, q.mu, 0.0, 0.0, q.mu * u, q.alpha);
    let h = Matrix3::new(0.0, 0.0, 0.0, k * rho, 0.0, 0.0, k * rho * u, 0.0, 0.0);
    let t = 0.5 * rho * x.rho_x * x.rho_x * q.k_rho() + rho * x.rho_x * x.theta_x * q.k_theta()
        - 0.5 * k * x.rho_x * x.rho_x;
    let gtilde = Vector3::new(0.0, t, u * t - rho * x.rho_x * x.u_x * k);
    FluxTensors { f1, g, h, gtilde }
}

/// Korteweg stress `K` and interstitial work flux `w`.
pub fn korteweg_stress(eos: &EquationOfState, ext: &ExtendedState) -> (f64, f64) {
    korteweg_from(&eos.at(ext.rho, ext.theta), ext)
}

pub(crate) fn korteweg_from(q: &Potentials, x: &ExtendedState) -> (f64, f64) {
    let k = q.k();
    let k_x = q.k_rho() * x.rho_x + q.k_theta() * x.theta_x;
    let kk = k * x.rho * x.rho_xx + x.rho * k_x * x.rho_x
        - 0.5 * q.k_rho() * x.rho * x.rho_x * x.rho_x
        - 0.5 * k * x.rho_x * x.rho_x;
    let w = -k * x.rho * x.rho_x * x.u_x;
    (kk, w)
}

/// `D_U F0` including the gradient energy.
pub fn jac_conserved(q: &Potentials, x: &ExtendedState) -> Matrix3<f64> {
    let (rho, u) = (x.rho, x.u);
    Matrix3::new(
        1.0,
        0.0,
        0.0,
        u,
        rho,
        0.0,
        q.eps(x.rho_x) + 0.5 * u * u + rho * q.eps_rho(x.rho_x),
        rho * u,
        rho * q.eps_theta(x.rho_x),
    )
}

/// `d/dx (D_U F0) U_x + d/dx (D_{U_x} F0) U_xx + D_{U_x} F0 U_xxx`, so that
/// `F0_xx = D_U F0 U_xx + bracket`.
pub fn second_derivative_bracket(q: &Potentials, x: &ExtendedState) -> Vector3<f64> {
    let (rho, u, rx, ux, tx, rxx) = (x.rho, x.u, x.rho_x, x.u_x, x.theta_x, x.rho_xx);
    let r2 = rx * rx;
    let (g, g_r, g_t) = (q.g(), q.g_rho(), q.g_theta());
    let eps_r = q.eps_rho(rx);
    let eps_t = q.eps_theta(rx);
    let eps_rr = q.e_rho_rho() + q.g_rho_rho() * r2;
    let eps_rt = q.e_rho_theta() + q.g_rho_theta() * r2;
    let eps_tt = q.e_theta_theta() + q.g_theta_theta() * r2;

    let eps_x = eps_r * rx + eps_t * tx + 2.0 * g * rx * rxx;
    let eps_r_x = eps_rr * rx + eps_rt * tx + 2.0 * g_r * rx * rxx;
    let eps_t_x = eps_rt * rx + eps_tt * tx + 2.0 * g_t * rx * rxx;

    let a31_x = eps_x + u * ux + rx * eps_r + rho * eps_r_x;
    let a32_x = rx * u + rho * ux;
    let a33_x = rx * eps_t + rho * eps_t_x;

    let d31 = 2.0 * rho * g * rx;
    let d31_x = 2.0 * rx * g * rx + 2.0 * rho * (g_r * rx + g_t * tx) * rx + 2.0 * rho * g * rxx;

    Vector3::new(
        0.0,
        2.0 * rx * ux,
        a31_x * rx + a32_x * ux + a33_x * tx + d31_x * rxx + d31 * x.rho_xxx,
    )
}

/// Constant coefficients of the perturbation system at an equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumCoefficients {
    pub state: State,
    pub a0: Matrix3<f64>,
    pub a1: Matrix3<f64>,
    pub b: Matrix3<f64>,
    pub c: Matrix3<f64>,
    pub p_rho: f64,
    pub p_theta: f64,
    pub e_theta: f64,
    pub k: f64,
    pub mu: f64,
    pub alpha: f64,
    pub cbar: f64,
    /// Jacobians of the capillarity-free maps at the equilibrium.
    pub maps: NsfMaps,
    /// `Hbar` of the conservation form.
    pub h: Matrix3<f64>,
}

impl EquilibriumCoefficients {
    pub fn new(eos: &EquationOfState, equilibrium: &State) -> Self {
        let st = State {
            rho_x: 0.0,
            ..*equilibrium
        };
        let q = eos.at(st.rho, st.theta);
        let cm = coefficient_matrices_from(&q, st.u);
        let (rho, theta) = (st.rho, st.theta);
        let k = q.k();
        let mut c = Matrix3::zeros();
        c[(1, 0)] = k * rho / theta;
        let h = Matrix3::new(0.0, 0.0, 0.0, k * rho, 0.0, 0.0, k * rho * st.u, 0.0, 0.0);
        EquilibriumCoefficients {
            state: st,
            a0: cm.a0,
            a1: cm.a1,
            b: cm.b,
            c,
            p_rho: q.p_rho(),
            p_theta: q.p_theta(),
            e_theta: q.e_theta(),
            k,
            mu: q.mu,
            alpha: q.alpha,
            cbar: q.p_theta() * theta.sqrt() / (q.e_theta().sqrt() * rho),
            maps: NsfMaps::from_potentials(&q, st.u),
            h,
        }
    }

    /// Same equilibrium with viscosity and conductivity replaced.
    pub fn with_transport(&self, mu: f64, alpha: f64) -> Self {
        let theta = self.state.theta;
        let mut out = self.clone();
        out.mu = mu;
        out.alpha = alpha;
        out.b = Matrix3::from_diagonal(&Vector3::new(0.0, mu, alpha / theta)) / theta;
        out.maps.g_visc = Matrix3::new(0.0, 0.0, 0.0, 0.0, mu, 0.0, 0.0, mu * self.state.u, alpha);
        out
    }

    /// `beta(xi) = p_rho + xi^2 k rho`.
    pub fn beta(&self, xi: f64) -> f64 {
        self.p_rho + xi * xi * self.k * self.state.rho
    }

    /// `A(xi) = A1 + xi^2 C`.
    pub fn a_of(&self, xi: f64) -> Matrix3<f64> {
        self.a1 + self.c * (xi * xi)
    }

    /// `B(xi) = xi^2 B`.
    pub fn b_of(&self, xi: f64) -> Matrix3<f64> {
        self.b * (xi * xi)
    }
}

pub fn equilibrium_coefficients(
    eos: &EquationOfState,
    equilibrium: &State,
) -> EquilibriumCoefficients {
    EquilibriumCoefficients::new(eos, equilibrium)
}

/// `W = Df0bar^{-1} (F0(U, U_x) - F0(Ubar, 0))`.
pub fn w_variables(
    eos: &EquationOfState,
    equilibrium: &State,
    ext: &ExtendedState,
) -> Vector3<f64> {
    let m = NsfMaps::new(
        eos,
        &State {
            rho_x: 0.0,
            ..*equilibrium
        },
    );
    m.jac_f0_inv * (conserved_quantities(eos, ext) - m.f0)
}

/// Parts of the nonlinear remainder at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearTerms {
    pub r: Vector3<f64>,
    pub r_ux: Vector3<f64>,
    pub i: Vector3<f64>,
    pub gtilde: Vector3<f64>,
    /// `Hbar Df0bar^{-1}` applied to the second-derivative bracket.
    pub bracket_term: Vector3<f64>,
    /// `N = Df0bar^{-1} (r + R U_x + I + gtilde)`.
    pub n: Vector3<f64>,
}

/// Nonlinear remainder `N` of the perturbation system `W_t = -M W + N_x`.
pub fn nonlinear_terms(
    eos: &EquationOfState,
    coeffs: &EquilibriumCoefficients,
    ext: &ExtendedState,
) -> NonlinearTerms {
    let q = eos.at(ext.rho, ext.theta);
    let bar = &coeffs.maps;
    let dfi = bar.jac_f0_inv;
    let gbar_dfi = bar.g_visc * dfi;
    let hbar_dfi = coeffs.h * dfi;

    let f0 = conserved_from(&q, ext);
    let fl = flux_from(&q, ext);
    let df0 = jac_conserved(&q, ext);
    let df0_inv = df0
        .try_inverse()
        .unwrap_or_else(|| Matrix3::from_element(f64::NAN));

    let r = -(fl.f1 - bar.f1) + bar.jac_f1 * (dfi * (f0 - bar.f0));
    let r_mat = (fl.g * df0_inv - gbar_dfi) * df0;
    let r_ux = r_mat * ext.grad();

    let mut d_ux_f0 = Matrix3::zeros();
    d_ux_f0[(2, 0)] = 2.0 * ext.rho * q.g() * ext.rho_x;
    let bracket = second_derivative_bracket(&q, ext);
    let bracket_term = hbar_dfi * bracket;
    let i = -gbar_dfi * (d_ux_f0 * ext.grad2()) + (fl.h * df0_inv - hbar_dfi) * (df0 * ext.grad2())
        - bracket_term;

    let n = dfi * (r + r_ux + i + fl.gtilde);
    NonlinearTerms {
        r,
        r_ux,
        i,
        gtilde: fl.gtilde,
        bracket_term,
        n,
    }
}

/// Raw coefficients `D1 = A1`, `D2 = -B`, `D3 = -C` with `A0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolTriplet {
    pub a0: Matrix3<f64>,
    pub d1: Matrix3<f64>,
    pub d2: Matrix3<f64>,
    pub d3: Matrix3<f64>,
}

impl SymbolTriplet {
    /// `A(xi) = D1 - xi^2 D3`.
    pub fn a(&self, xi: f64) -> Matrix3<f64> {
        self.d1 - self.d3 * (xi * xi)
    }

    /// `B(xi) = -xi^2 D2`.
    pub fn b(&self, xi: f64) -> Matrix3<f64> {
        -self.d2 * (xi * xi)
    }
}

pub fn symbol_triplet(coeffs: &EquilibriumCoefficients) -> SymbolTriplet {
    SymbolTriplet {
        a0: coeffs.a0,
        d1: coeffs.a1,
        d2: -coeffs.b,
        d3: -coeffs.c,
    }
}

/// Symbol family `(A0, A(xi), B(xi))` for structural checks.
pub trait SymbolFamily: Sync {
    fn a0(&self) -> Matrix3<f64>;
    fn a(&self, xi: f64) -> Matrix3<f64>;
    fn b(&self, xi: f64) -> Matrix3<f64>;
}

impl SymbolFamily for SymbolTriplet {
    fn a0(&self) -> Matrix3<f64> {
        self.a0
    }
    fn a(&self, xi: f64) -> Matrix3<f64> {
        SymbolTriplet::a(self, xi)
    }
    fn b(&self, xi: f64) -> Matrix3<f64> {
        SymbolTriplet::b(self, xi)
    }
}

/// `M(i xi) = A0^{-1} (i xi A(xi) + xi^2 B)`.
pub fn evolution_symbol(coeffs: &EquilibriumCoefficients, xi: f64) -> CMatrix3 {
    let a0_inv = Matrix3::from_diagonal(&coeffs.a0.diagonal().map(|d| 1.0 / d));
    let ai = complexify(&(a0_inv * coeffs.a_of(xi))) * Complex64::new(0.0, xi);
    ai + complexify(&(a0_inv * coeffs.b_of(xi)))
}
