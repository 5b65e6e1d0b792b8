//! Spectral bound of `-M(i xi)` and the dissipativity type.

use rayon::prelude::*;
use serde::Serialize;

use crate::fit::{loglog_fit, LineFit};
use crate::grid::log_grid;
use crate::linalg::{complex_eigenvalues, CMatrix3};
use crate::symbols::{evolution_symbol, EquilibriumCoefficients};

use super::TransformedTriplet;

/// Small-wavenumber fit window.
pub const LOW_WINDOW: (f64, f64) = (1e-3, 1e-1);
/// Large-wavenumber fit window.
pub const HIGH_WINDOW: (f64, f64) = (1e1, 1e3);
/// Points per fit window.
const FIT_POINTS: usize = 41;

/// `T M T^{-1}` with the diagonal scaling `T = S^{1/2} A0^{1/2}`, which has
/// the same spectrum as `M` and entries of comparable size.
pub fn balanced_symbol(coeffs: &EquilibriumCoefficients, xi: f64) -> CMatrix3 {
    let t = TransformedTriplet::new(coeffs).scaling(xi);
    let m = evolution_symbol(coeffs, xi);
    CMatrix3::from_fn(|i, j| m[(i, j)] * (t[i] / t[j]))
}

/// `sigma(xi) = max Re lambda(-M(i xi))`.
pub fn sigma(coeffs: &EquilibriumCoefficients, xi: f64) -> f64 {
    sigma_scaled(coeffs, xi).0
}

/// `sigma(xi)` with the norm of the balanced symbol, which bounds its
/// rounding error.
fn sigma_scaled(coeffs: &EquilibriumCoefficients, xi: f64) -> (f64, f64) {
    if xi == 0.0 {
        return (0.0, 0.0);
    }
    let m = balanced_symbol(coeffs, xi);
    let s = match complex_eigenvalues(&m) {
        Some(ev) => ev.iter().map(|z| -z.re).fold(f64::NEG_INFINITY, f64::max),
        None => f64::NAN,
    };
    (s, m.norm())
}

/// `sigma` counts as negative only below this fraction of the symbol norm.
pub const SIGMA_TOL: f64 = 1e-12;

/// Regularity class of a dissipativity type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    /// `p = q`.
    Standard,
    /// `p < q`.
    RegularityLoss,
    /// `p > q`.
    RegularityGain,
}

/// Fitted type `(p, q)` in `sigma(xi) <= -c0 xi^{2p} / (1 + xi^2)^q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DissipativityType {
    pub p: f64,
    pub q: f64,
    pub c0: f64,
    /// Larger RMS residual of the two asymptotic log-log fits.
    pub residual: f64,
    pub low: LineFit,
    pub high: LineFit,
}

impl DissipativityType {
    /// Nearest integer exponents.
    pub fn rounded(&self) -> (i32, i32) {
        (self.p.round() as i32, self.q.round() as i32)
    }

    pub fn classify(&self) -> Classification {
        let (p, q) = self.rounded();
        match p.cmp(&q) {
            std::cmp::Ordering::Equal => Classification::Standard,
            std::cmp::Ordering::Less => Classification::RegularityLoss,
            std::cmp::Ordering::Greater => Classification::RegularityGain,
        }
    }

    /// `-c0 xi^{2p} / (1 + xi^2)^q` with the rounded exponents.
    pub fn predicted_bound(&self, xi: f64) -> f64 {
        let (p, q) = self.rounded();
        -self.c0 * xi.powi(2 * p) / (1.0 + xi * xi).powi(q)
    }
}

/// Spectral bound over a grid with the fitted type.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralBound {
    pub samples: Vec<(f64, f64)>,
    /// Grid points `xi != 0` with `sigma(xi) >= 0`.
    pub violations: Vec<f64>,
    pub dtype: Option<DissipativityType>,
    pub fit_error: Option<String>,
}

impl SpectralBound {
    pub fn strictly_dissipative(&self) -> bool {
        self.violations.is_empty()
    }
}

fn window_fit(coeffs: &EquilibriumCoefficients, w: (f64, f64)) -> crate::Result<LineFit> {
    let xs = log_grid(w.0, w.1, FIT_POINTS);
    let ys: Vec<f64> = xs.par_iter().map(|&x| -sigma(coeffs, x)).collect();
    loglog_fit(&xs, &ys)
}

/// Samples `sigma` on `xi_grid` and fits the two asymptotic exponents.
pub fn spectral_bound(coeffs: &EquilibriumCoefficients, xi_grid: &[f64]) -> SpectralBound {
    let scaled: Vec<(f64, f64, f64)> = xi_grid
        .par_iter()
        .map(|&x| {
            let (s, n) = sigma_scaled(coeffs, x);
            (x, s, n)
        })
        .collect();
    let violations: Vec<f64> = scaled
        .iter()
        .filter(|(x, s, n)| *x != 0.0 && !(*s < -SIGMA_TOL * n))
        .map(|(x, _, _)| *x)
        .collect();
    let samples: Vec<(f64, f64)> = scaled.iter().map(|(x, s, _)| (*x, *s)).collect();

    let fit = if violations.is_empty() {
        window_fit(coeffs, LOW_WINDOW)
    } else {
        Err(crate::Error::Fit(format!(
            "sigma >= 0 at {} grid points",
            violations.len()
        )))
    };
    let fit = fit.and_then(|low| {
        let high = window_fit(coeffs, HIGH_WINDOW)?;
        let p = low.slope / 2.0;
        let q = p - high.slope / 2.0;
        let mut dtype = DissipativityType {
            p,
            q,
            c0: 0.0,
            residual: low.residual.max(high.residual),
            low,
            high,
        };
        let (pi, qi) = dtype.rounded();
        dtype.c0 = samples
            .iter()
            .filter(|(x, _)| *x != 0.0)
            .map(|(x, s)| -s * (1.0 + x * x).powi(qi) / x.abs().powi(2 * pi))
            .fold(f64::INFINITY, f64::min);
        if dtype.c0 > 0.0 {
            Ok(dtype)
        } else {
            Err(crate::Error::Fit(format!(
                "non-positive constant c0 = {}",
                dtype.c0
            )))
        }
    });
    let (dtype, fit_error) = match fit {
        Ok(d) => (Some(d), None),
        Err(e) => (None, Some(e.to_string())),
    };
    SpectralBound {
        samples,
        violations,
        dtype,
        fit_error,
    }
}
