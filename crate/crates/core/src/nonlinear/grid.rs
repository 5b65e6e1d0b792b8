//! Periodic grid with FFT-based derivatives.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, Result};

/// `N` equispaced points on `[0, L)` with their discrete wavenumbers.
#[derive(Clone)]
pub struct PeriodicGrid {
    pub n: usize,
    pub length: f64,
    /// Wavenumbers `2 pi j / L` in FFT order, with the Nyquist mode set to 0.
    pub xi: Vec<f64>,
    /// Modes kept by the 2/3 rule.
    pub dealias: Vec<bool>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for PeriodicGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PeriodicGrid")
            .field("n", &self.n)
            .field("length", &self.length)
            .finish()
    }
}

impl PeriodicGrid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(invalid("n", format!("{n} is not a power of two >= 8")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(invalid("length", "must be positive"));
        }
        let signed = |j: usize| -> i64 {
            if j <= n / 2 {
                j as i64
            } else {
                j as i64 - n as i64
            }
        };
        let k0 = 2.0 * std::f64::consts::PI / length;
        let xi = (0..n)
            .map(|j| {
                if j == n / 2 {
                    0.0
                } else {
                    k0 * signed(j) as f64
                }
            })
            .collect();
        let dealias = (0..n)
            .map(|j| j != n / 2 && 3 * signed(j).unsigned_abs() as usize <= n)
            .collect();
        let mut planner = FftPlanner::new();
        Ok(PeriodicGrid {
            n,
            length,
            xi,
            dealias,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        })
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.dx()
    }

    /// Largest resolved wavenumber.
    pub fn xi_max(&self) -> f64 {
        self.xi.iter().fold(0.0, |a, b| a.max(b.abs()))
    }

    /// Largest wavenumber kept by the 2/3 rule.
    pub fn xi_dealiased(&self) -> f64 {
        self.xi
            .iter()
            .zip(&self.dealias)
            .filter(|(_, k)| **k)
            .fold(0.0, |a, (b, _)| a.max(b.abs()))
    }

    pub fn forward(&self, v: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = v.iter().map(|x| Complex64::new(*x, 0.0)).collect();
        self.fwd.process(&mut buf);
        buf
    }

    /// Inverse transform keeping the real part.
    pub fn inverse(&self, c: &[Complex64]) -> Vec<f64> {
        let mut buf = c.to_vec();
        self.inv.process(&mut buf);
        let s = 1.0 / self.n as f64;
        buf.iter().map(|z| z.re * s).collect()
    }

    /// `d^order/dx^order` of the field with coefficients `hat`.
    pub fn derivative(&self, hat: &[Complex64], order: u32) -> Vec<f64> {
        let d: Vec<Complex64> = hat
            .iter()
            .zip(&self.xi)
            .map(|(z, &k)| z * Complex64::new(0.0, k).powu(order))
            .collect();
        self.inverse(&d)
    }

    /// Trapezoid (spectrally exact) integral over the period.
    pub fn integrate(&self, v: &[f64]) -> f64 {
        self.dx() * v.iter().sum::<f64>()
    }
}
