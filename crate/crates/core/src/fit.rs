//! Least-squares fits of power laws.

use serde::Serialize;

use crate::error::{Error, Result};

/// Straight-line least-squares fit `y = intercept + slope x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
    pub points: usize,
}

pub fn line_fit(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() {
        return Err(Error::Fit("length mismatch".into()));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::Fit(format!("need at least two points, got {n}")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Fit("non-finite sample".into()));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx <= 0.0 {
        return Err(Error::Fit("degenerate abscissae".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - intercept - slope * a;
            r * r
        })
        .sum();
    Ok(LineFit {
        slope,
        intercept,
        residual: (ss / nf).sqrt(),
        points: n,
    })
}

/// Fits `log y = intercept + slope log x` over positive samples.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::Fit("log-log fit needs positive samples".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    line_fit(&lx, &ly)
}

/// Power-law decay `norm ~ amplitude (1 + t)^exponent` over a time window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub amplitude: f64,
    pub residual: f64,
    pub t_window: (f64, f64),
    pub points: usize,
}

impl DecayFit {
    /// Whether the RMS residual of the log fit is below `threshold`.
    pub fn well_conditioned(&self, threshold: f64) -> bool {
        self.residual.is_finite() && self.residual <= threshold
    }
}

/// Fits `log norm` against `log(1 + t)` for samples with `t` in `window`.
pub fn fit_decay(times: &[f64], norms: &[f64], window: (f64, f64)) -> Result<DecayFit> {
    let (x, y): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(norms)
        .filter(|(t, _)| **t >= window.0 && **t <= window.1)
        .map(|(t, n)| (1.0 + t, *n))
        .unzip();
    let f = loglog_fit(&x, &y)?;
    Ok(DecayFit {
        exponent: f.slope,
        amplitude: f.intercept.exp(),
        residual: f.residual,
        t_window: window,
        points: f.points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let f = line_fit(&x, &y).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-14);
        assert!((f.intercept - 2.0).abs() < 1e-14);
        assert!(f.residual < 1e-14);
    }

    #[test]
    fn decay_recovers_exponent() {
        let t: Vec<f64> = (0..50).map(|i| 10f64.powf(i as f64 / 10.0)).collect();
        let n: Vec<f64> = t.iter().map(|s| 3.0 * (1.0 + s).powf(-0.25)).collect();
        let f = fit_decay(&t, &n, (10.0, 1e4)).unwrap();
        assert!((f.exponent + 0.25).abs() < 1e-12);
        assert!((f.amplitude - 3.0).abs() < 1e-10);
        assert!(f.well_conditioned(1e-8));
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(line_fit(&[1.0], &[1.0]).is_err());
        assert!(line_fit(&[1.0, 1.0], &[1.0, 2.0]).is_err());
        assert!(loglog_fit(&[1.0, 2.0], &[0.0, 1.0]).is_err());
        assert!(fit_decay(&[1.0, 2.0], &[1.0, 0.5], (10.0, 20.0)).is_err());
    }
}
