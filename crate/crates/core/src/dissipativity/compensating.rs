//! Compensating matrix symbol and the Lyapunov functional built from it.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::grid::symmetric_log_grid;
use crate::linalg::{complexify, sym, CMatrix3, CVector3};
use crate::symbols::EquilibriumCoefficients;

use super::TransformedTriplet;

/// The skew-symmetric symbol
/// `K(xi) = (eps / beta^{1/2}) [[0, 1, 0], [-1, 0, c beta^{-1/2}], [0, -c beta^{-1/2}, 0]]`.
#[derive(Debug, Clone)]
pub struct CompensatingMatrix {
    pub eps: f64,
    pub gamma_bar: f64,
    pub window: (f64, f64),
    triplet: TransformedTriplet,
}

fn constants(coeffs: &EquilibriumCoefficients) -> (f64, (f64, f64)) {
    let (rho, et, c) = (coeffs.state.rho, coeffs.e_theta, coeffs.cbar);
    let heat = coeffs.alpha / (et * rho);
    let visc = coeffs.mu / rho;
    let cross = if c == 0.0 {
        f64::INFINITY
    } else {
        coeffs.alpha * coeffs.p_rho / (et * rho * c * c)
    };
    let gamma = 0.25 * heat.min(visc).min(cross);
    (gamma, (gamma, 0.5 * visc.min(cross)))
}

impl CompensatingMatrix {
    /// Builds `K` with `eps` inside the admissible window, defaulting to its
    /// midpoint.
    pub fn new(coeffs: &EquilibriumCoefficients, eps: Option<f64>) -> Result<Self> {
        let (gamma_bar, window) = constants(coeffs);
        if !(gamma_bar > 0.0 && window.1 > window.0) {
            return Err(invalid(
                "eps",
                format!(
                    "empty window ({}, {}): viscosity and conductivity must be positive",
                    window.0, window.1
                ),
            ));
        }
        let eps = eps.unwrap_or(0.5 * (window.0 + window.1));
        if !(eps > window.0 && eps < window.1) {
            return Err(invalid(
                "eps",
                format!("{eps} outside the window ({}, {})", window.0, window.1),
            ));
        }
        Ok(Self::unchecked(coeffs, eps))
    }

    /// Builds `K` for any `eps`, without the window check.
    pub fn unchecked(coeffs: &EquilibriumCoefficients, eps: f64) -> Self {
        let (gamma_bar, window) = constants(coeffs);
        CompensatingMatrix {
            eps,
            gamma_bar,
            window,
            triplet: TransformedTriplet::new(coeffs),
        }
    }

    pub fn in_window(&self) -> bool {
        self.eps > self.window.0 && self.eps < self.window.1
    }

    pub fn triplet(&self) -> &TransformedTriplet {
        &self.triplet
    }

    pub fn eval(&self, xi: f64) -> Matrix3<f64> {
        let beta = self.triplet.coeffs.beta(xi);
        let sb = beta.sqrt();
        let r = self.triplet.coeffs.cbar / sb;
        Matrix3::new(0.0, 1.0, 0.0, -1.0, 0.0, r, 0.0, -r, 0.0) * (self.eps / sb)
    }

    /// `[K At]^s + Bt`.
    pub fn dissipation(&self, xi: f64) -> Matrix3<f64> {
        sym(&(self.eval(xi) * self.triplet.atilde(xi))) + self.triplet.btilde
    }
}

pub fn compensating_matrix(
    coeffs: &EquilibriumCoefficients,
    eps: Option<f64>,
) -> Result<CompensatingMatrix> {
    CompensatingMatrix::new(coeffs, eps)
}

/// Verified bounds for the compensating matrix over a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompensatingCertificate {
    pub eps_k: f64,
    pub gamma_bar: f64,
    pub window: (f64, f64),
    pub in_window: bool,
    pub sup_k: f64,
    pub sup_xi_k: f64,
    pub min_eig: f64,
    pub argmin_xi: f64,
    /// Largest `|K + K^T|` over the grid.
    pub skew_residual: f64,
    /// Largest off-diagonal entry of `[K At]^s`.
    pub offdiag_residual: f64,
    pub tol: f64,
    pub passed: bool,
}

fn spectral_norm(m: &Matrix3<f64>) -> f64 {
    m.singular_values().max()
}

/// Checks `[K At]^s + Bt >= gamma_bar I` on `xi_grid`.
pub fn verify_certificate(
    coeffs: &EquilibriumCoefficients,
    eps: f64,
    xi_grid: &[f64],
    tol: f64,
) -> CompensatingCertificate {
    let k = CompensatingMatrix::unchecked(coeffs, eps);
    let rows: Vec<(f64, f64, f64, f64, f64, f64)> = xi_grid
        .par_iter()
        .map(|&xi| {
            let kx = k.eval(xi);
            let ka = sym(&(kx * k.triplet.atilde(xi)));
            let off = (0..3)
                .flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| ka[(i, j)].abs())
                .fold(0.0, f64::max);
            let d = ka + k.triplet.btilde;
            let e = SymmetricEigen::new(d).eigenvalues.min();
            let nk = spectral_norm(&kx);
            let skew = crate::linalg::max_abs(&(kx + kx.transpose()));
            (xi, e, nk, xi.abs() * nk, skew, off)
        })
        .collect();
    let mut cert = CompensatingCertificate {
        eps_k: eps,
        gamma_bar: k.gamma_bar,
        window: k.window,
        in_window: k.in_window(),
        sup_k: 0.0,
        sup_xi_k: 0.0,
        min_eig: f64::INFINITY,
        argmin_xi: f64::NAN,
        skew_residual: 0.0,
        offdiag_residual: 0.0,
        tol,
        passed: false,
    };
    for (xi, e, nk, xk, skew, off) in rows {
        if e < cert.min_eig || e.is_nan() {
            cert.min_eig = e;
            cert.argmin_xi = xi;
        }
        cert.sup_k = cert.sup_k.max(nk);
        cert.sup_xi_k = cert.sup_xi_k.max(xk);
        cert.skew_residual = cert.skew_residual.max(skew);
        cert.offdiag_residual = cert.offdiag_residual.max(off);
    }
    cert.passed = cert.gamma_bar > 0.0 && cert.min_eig >= cert.gamma_bar - tol;
    cert
}

/// Outcome of the Lyapunov-functional check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LyapunovReport {
    pub delta: f64,
    pub eps: f64,
    /// Uniform rate in `dU/dt + c0 xi^2 U <= 0`.
    pub c0: f64,
    /// `sup |delta xi K(xi)|`; the functional is equivalent to `|V|^2` when below 1/2.
    pub equivalence: f64,
    /// Largest `dU/dt + c0 xi^2 U` over samples.
    pub max_residual: f64,
    /// Largest relative imaginary part of `U` and `dU/dt` over samples.
    pub max_imag: f64,
    pub samples: usize,
    pub violations: Vec<(f64, usize)>,
    pub tol: f64,
    /// `delta = 0` leaves no rate to certify.
    pub inconclusive: bool,
    pub passed: bool,
}

impl LyapunovReport {
    /// Constant `C` with `|V(t)|^2 <= C exp(-c0 xi^2 t) |V(0)|^2`.
    pub fn equivalence_constant(&self) -> f64 {
        (1.0 + self.equivalence) / (1.0 - self.equivalence)
    }
}

/// Per-wavenumber operators of the functional
/// `U = <V, H V>`, `H = I - delta xi i K`, along `V_t = -G V`,
/// `G = i xi At + xi^2 Bt`; returns `(H, Q)` with `dU/dt = <V, Q V>`.
fn lyapunov_ops(k: &CompensatingMatrix, delta: f64, xi: f64) -> (CMatrix3, CMatrix3) {
    let t = &k.triplet;
    let i = Complex64::new(0.0, 1.0);
    let g = complexify(&t.atilde(xi)) * (i * xi) + complexify(&(t.btilde * (xi * xi)));
    let h = CMatrix3::identity() - complexify(&k.eval(xi)) * (i * (delta * xi));
    let q = -(g.adjoint() * h + h * g);
    (h, q)
}

fn hermitian(m: &CMatrix3) -> CMatrix3 {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Largest `c` with `-Q >= c xi^2 H` at one wavenumber.
fn rate_at(k: &CompensatingMatrix, delta: f64, xi: f64) -> f64 {
    if xi == 0.0 {
        return f64::INFINITY;
    }
    let (h, q) = lyapunov_ops(k, delta, xi);
    let he = SymmetricEigen::new(hermitian(&h));
    if he.eigenvalues.min() <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let inv_sqrt = he.eigenvectors
        * CMatrix3::from_diagonal(&he.eigenvalues.map(|l| Complex64::new(1.0 / l.sqrt(), 0.0)))
        * he.eigenvectors.adjoint();
    let p = hermitian(&(inv_sqrt * (-q) * inv_sqrt));
    SymmetricEigen::new(p).eigenvalues.min() / (xi * xi)
}

fn random_unit(rng: &mut ChaCha8Rng) -> CVector3 {
    loop {
        let v = CVector3::from_fn(|_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let n = v.norm();
        if n > 1e-3 {
            return v / Complex64::new(n, 0.0);
        }
    }
}

/// Wavenumbers used to fit the uniform rate, in addition to the check grid.
pub const RATE_GRID: (f64, f64, usize) = (1e-4, 1e4, 2001);

type XiResult = (f64, Vec<(usize, f64)>, f64);

/// Checks `dU/dt + c0 xi^2 U <= tol` for `n_modes` seeded random unit modes
/// at each grid wavenumber, with `c0` fitted over the grid.
pub fn lyapunov_check(
    coeffs: &EquilibriumCoefficients,
    eps: Option<f64>,
    delta: f64,
    xi_grid: &[f64],
    n_modes: usize,
    seed: u64,
    tol: f64,
) -> Result<LyapunovReport> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(invalid("delta", "must be >= 0"));
    }
    let k = CompensatingMatrix::new(coeffs, eps)?;
    let equivalence = xi_grid
        .iter()
        .map(|&xi| delta * xi.abs() * spectral_norm(&k.eval(xi)))
        .fold(0.0, f64::max);
    if equivalence > 0.5 {
        return Err(invalid(
            "delta",
            format!("|delta xi K| reaches {equivalence:.3}, above 1/2"),
        ));
    }

    let mut fit_grid = symmetric_log_grid(RATE_GRID.0, RATE_GRID.1, RATE_GRID.2 - 1);
    fit_grid.extend_from_slice(xi_grid);
    let c0 = fit_grid
        .par_iter()
        .map(|&xi| rate_at(&k, delta, xi))
        .reduce(|| f64::INFINITY, f64::min);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes: Vec<CVector3> = (0..n_modes).map(|_| random_unit(&mut rng)).collect();
    // (worst residual, violating modes, worst imaginary part) per wavenumber.
    let per_xi: Vec<XiResult> = xi_grid
        .par_iter()
        .map(|&xi| {
            let (h, q) = lyapunov_ops(&k, delta, xi);
            let mut worst: f64 = f64::NEG_INFINITY;
            let mut imag: f64 = 0.0;
            let mut bad = Vec::new();
            for (m, v) in modes.iter().enumerate() {
                let ups = v.dotc(&(h * v));
                let du = v.dotc(&(q * v));
                imag = imag
                    .max(ups.im.abs() / ups.norm())
                    .max(du.im.abs() / du.norm().max(f64::MIN_POSITIVE));
                let r = du.re + c0 * xi * xi * ups.re;
                if r > tol {
                    bad.push((m, r));
                }
                worst = worst.max(r);
            }
            (worst, bad, imag)
        })
        .collect();

    let mut max_residual = f64::NEG_INFINITY;
    let mut max_imag: f64 = 0.0;
    let mut violations = Vec::new();
    for ((worst, bad, imag), &xi) in per_xi.into_iter().zip(xi_grid) {
        max_residual = max_residual.max(worst);
        max_imag = max_imag.max(imag);
        violations.extend(bad.into_iter().map(|(m, _)| (xi, m)));
    }
    let inconclusive = delta == 0.0 || !(c0 > 0.0);
    Ok(LyapunovReport {
        delta,
        eps: k.eps,
        c0,
        equivalence,
        max_residual,
        max_imag,
        samples: n_modes * xi_grid.len(),
        passed: !inconclusive && violations.is_empty(),
        violations,
        tol,
        inconclusive,
    })
}

/// Diagonal of `[K At]^s + Bt` in closed form.
pub fn dissipation_diagonal(k: &CompensatingMatrix, xi: f64) -> Vector3<f64> {
    let c = &k.triplet.coeffs;
    let (rho, beta, cb) = (c.state.rho, c.beta(xi), c.cbar);
    let r = cb * cb / beta;
    Vector3::new(
        k.eps,
        c.mu / rho + k.eps * (r - 1.0),
        c.alpha / (c.e_theta * rho) - k.eps * r,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::linear_grid;
    use crate::thermo::{IdealGas, State};

    fn coeffs() -> EquilibriumCoefficients {
        EquilibriumCoefficients::new(
            &IdealGas::REFERENCE.build().unwrap(),
            &State::new(1.0, 0.0, 1.0),
        )
    }

    #[test]
    fn reference_window() {
        let k = CompensatingMatrix::new(&coeffs(), None).unwrap();
        assert!((k.gamma_bar - 1.0 / 6.0).abs() < 1e-15);
        assert!((k.window.1 - 0.5).abs() < 1e-15);
        assert!((k.eps - 1.0 / 3.0).abs() < 1e-15);
        assert!(CompensatingMatrix::new(&coeffs(), Some(0.6)).is_err());
        assert!(CompensatingMatrix::new(&coeffs(), Some(0.1)).is_err());
    }

    #[test]
    fn skew_and_decay() {
        let k = CompensatingMatrix::new(&coeffs(), Some(1.0 / 3.0)).unwrap();
        for xi in [0.0, 0.5, 10.0, 1e3] {
            let m = k.eval(xi);
            assert_eq!(m + m.transpose(), Matrix3::zeros());
        }
        let a = spectral_norm(&k.eval(1e3)) * 1e3;
        let b = spectral_norm(&k.eval(1e4)) * 1e4;
        assert!((a - b).abs() < 1e-3 * a);
    }

    #[test]
    fn closed_form_dissipation_is_diagonal() {
        let c = EquilibriumCoefficients::new(
            &IdealGas::REFERENCE.build().unwrap(),
            &State::new(1.2, 0.4, 0.8),
        );
        let k = CompensatingMatrix::new(&c, None).unwrap();
        for xi in [0.0, 0.3, 5.0, 80.0] {
            let d = k.dissipation(xi);
            let diag = dissipation_diagonal(&k, xi);
            let expect = Matrix3::from_diagonal(&diag);
            assert!(crate::linalg::max_abs(&(d - expect)) < 1e-14);
        }
    }

    #[test]
    fn certificate_passes_at_reference() {
        let grid = linear_grid(-100.0, 100.0, 2001);
        let cert = verify_certificate(&coeffs(), 1.0 / 3.0, &grid, 1e-10);
        assert!(cert.passed);
        assert!(cert.min_eig >= 1.0 / 6.0);
        assert!(cert.offdiag_residual <= 1e-14);
        assert!(cert.sup_k.is_finite() && cert.sup_xi_k.is_finite());
        let zero = verify_certificate(&coeffs(), 0.0, &grid, 1e-10);
        assert!(!zero.passed);
        assert!(!zero.in_window);
    }

    #[test]
    fn lyapunov_reference() {
        let grid = crate::grid::symmetric_log_grid(1e-2, 50.0, 40);
        let r = lyapunov_check(&coeffs(), Some(1.0 / 3.0), 0.05, &grid, 20, 11, 1e-10).unwrap();
        assert!(r.passed, "{r:?}");
        assert!((r.c0 - 0.033266).abs() < 1e-5, "c0 = {}", r.c0);
        assert!(r.c0 > 0.0);
        assert!(r.max_imag <= 1e-14);
        let z = lyapunov_check(&coeffs(), None, 0.0, &grid, 5, 11, 1e-10).unwrap();
        assert!(z.inconclusive && !z.passed);
    }

    #[test]
    fn large_delta_rejected() {
        let grid = [1.0, 10.0, 100.0];
        assert!(lyapunov_check(&coeffs(), None, 10.0, &grid, 5, 1, 1e-10).is_err());
    }

    #[test]
    fn empty_window_without_dissipation() {
        let c = coeffs().with_transport(0.0, 0.0);
        assert!(CompensatingMatrix::new(&c, None).is_err());
    }
}
