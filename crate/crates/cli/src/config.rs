//! Run configuration read from TOML.
//!
//! Every section is optional; omitted keys take the reference values. All
//! fields are validated before any computation starts.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nsfk_core::nonlinear::RunSpec;
use nsfk_core::{Domain, EquationOfState, IdealGas, State};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::UsageError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub closure: Closure,
    pub equilibrium: Equilibrium,
    pub domain: Domain,
    pub seed: u64,
    /// Output directory; `--out` takes precedence.
    pub output: Option<PathBuf>,
    pub thermo: ThermoConfig,
    pub symbol: SymbolConfig,
    pub linear: LinearConfig,
    pub nonlinear: RunSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            closure: Closure::default(),
            equilibrium: Equilibrium::default(),
            domain: Domain::default(),
            seed: 1,
            output: None,
            thermo: ThermoConfig::default(),
            symbol: SymbolConfig::default(),
            linear: LinearConfig::default(),
            nonlinear: RunSpec::default(),
        }
    }
}

/// Ideal-gas closure with constant transport coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Closure {
    pub r: f64,
    pub gamma: f64,
    pub kappa0: f64,
    pub mu0: f64,
    pub alpha0: f64,
}

impl Default for Closure {
    fn default() -> Self {
        let g = IdealGas::REFERENCE;
        Closure {
            r: g.r,
            gamma: g.gamma,
            kappa0: g.kappa0,
            mu0: g.mu0,
            alpha0: g.alpha0,
        }
    }
}

impl Closure {
    pub fn gas(&self) -> IdealGas {
        IdealGas {
            r: self.r,
            gamma: self.gamma,
            kappa0: self.kappa0,
            mu0: self.mu0,
            alpha0: self.alpha0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Equilibrium {
    pub rho: f64,
    pub u: f64,
    pub theta: f64,
}

impl Default for Equilibrium {
    fn default() -> Self {
        Equilibrium {
            rho: 1.0,
            u: 0.0,
            theta: 1.0,
        }
    }
}

impl Equilibrium {
    pub fn state(&self) -> State {
        State::new(self.rho, self.u, self.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThermoConfig {
    /// Grid points per axis of the hypothesis sweep.
    pub samples: usize,
    /// Random states for the entropy-pair certificate.
    pub entropy_samples: usize,
    pub fd_step: f64,
}

impl Default for ThermoConfig {
    fn default() -> Self {
        ThermoConfig {
            samples: 50,
            entropy_samples: 100,
            fd_step: 1e-4,
        }
    }
}

/// Symmetric logarithmic wavenumber grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XiGrid {
    pub xi_min: f64,
    pub xi_max: f64,
    pub points: usize,
}

impl XiGrid {
    fn validate(&self, field: &str) -> Result<()> {
        if !(self.xi_min > 0.0 && self.xi_max > self.xi_min && self.xi_max.is_finite()) {
            bail!(UsageError(format!(
                "{field}: need 0 < xi_min < xi_max, got ({}, {})",
                self.xi_min, self.xi_max
            )));
        }
        if self.points < 4 {
            bail!(UsageError(format!("{field}.points: need at least 4")));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        nsfk_core::grid::symmetric_log_grid(self.xi_min, self.xi_max, self.points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymbolConfig {
    pub grid: XiGrid,
    /// Compensating-matrix parameter; the middle of its window when absent.
    pub eps: Option<f64>,
    /// Certificate grid is `points` equispaced values on `[-xi_max, xi_max]`.
    pub certificate_xi_max: f64,
    pub certificate_points: usize,
    pub certificate_tol: f64,
    pub lyapunov_delta: f64,
    pub lyapunov_modes: usize,
    pub lyapunov_grid: XiGrid,
    pub lyapunov_tol: f64,
}

impl Default for SymbolConfig {
    fn default() -> Self {
        SymbolConfig {
            grid: XiGrid {
                xi_min: 1e-3,
                xi_max: 1e3,
                points: 4001,
            },
            eps: None,
            certificate_xi_max: 100.0,
            certificate_points: 20001,
            certificate_tol: 1e-10,
            lyapunov_delta: 0.05,
            lyapunov_modes: 100,
            lyapunov_grid: XiGrid {
                xi_min: 1e-2,
                xi_max: 1e2,
                points: 200,
            },
            lyapunov_tol: 1e-10,
        }
    }
}

/// Initial spectral profile for the linear evolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", deny_unknown_fields)]
pub enum ProfileConfig {
    /// `exp(-xi^2)` in every component.
    Gaussian,
    /// `i xi exp(-xi^2)` in every component.
    ZeroMass,
    /// Samples read from a CSV file; see `docs/csv-schema.md`.
    Samples { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinearConfig {
    pub nodes: usize,
    pub xi_max: f64,
    pub min_spacing: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub times: usize,
    pub ells: Vec<u32>,
    /// Fit window; `[t_max / 100, t_max]` when absent.
    pub window: Option<(f64, f64)>,
    pub profile: ProfileConfig,
    /// Expected exponent per `ell`; `-(1/4 + ell/2)` for Gaussian data when absent.
    pub expected: Option<Vec<f64>>,
    pub tolerance: f64,
}

impl Default for LinearConfig {
    fn default() -> Self {
        LinearConfig {
            nodes: 4096,
            xi_max: 200.0,
            min_spacing: 1e-4,
            t_min: 1.0,
            t_max: 1e4,
            times: 81,
            ells: vec![0, 1],
            window: None,
            profile: ProfileConfig::Gaussian,
            expected: None,
            tolerance: 0.05,
        }
    }
}

impl LinearConfig {
    /// `0` followed by `times` log-spaced values on `[t_min, t_max]`.
    pub fn time_grid(&self) -> Vec<f64> {
        let mut t = vec![0.0];
        t.extend(nsfk_core::grid::log_grid(
            self.t_min, self.t_max, self.times,
        ));
        t
    }

    /// Expected exponents, one per entry of `ells`.
    pub fn expected_exponents(&self) -> Option<Vec<f64>> {
        match (&self.expected, &self.profile) {
            (Some(e), _) => Some(e.clone()),
            (None, ProfileConfig::Gaussian) => Some(
                self.ells
                    .iter()
                    .map(|l| -(0.25 + 0.5 * *l as f64))
                    .collect(),
            ),
            (None, _) => None,
        }
    }
}

impl RunConfig {
    /// Reads and validates a TOML file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| UsageError(format!("config parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let usage = |e: nsfk_core::Error| UsageError(e.to_string());
        self.closure.gas().build_limit().map_err(usage)?;
        let d = &self.domain;
        Domain::new(d.rho_min, d.theta_min, d.rho_max, d.theta_max).map_err(usage)?;
        let e = &self.equilibrium;
        if !(e.rho > 0.0 && e.theta > 0.0 && e.rho.is_finite() && e.theta.is_finite()) {
            bail!(UsageError(
                "equilibrium: rho and theta must be positive".into()
            ));
        }
        if !e.u.is_finite() {
            bail!(UsageError("equilibrium.u: must be finite".into()));
        }
        let t = &self.thermo;
        if t.samples == 0 || t.entropy_samples == 0 {
            bail!(UsageError("thermo: sample counts must be >= 1".into()));
        }
        if !(t.fd_step > 0.0 && t.fd_step.is_finite()) {
            bail!(UsageError("thermo.fd_step: must be > 0".into()));
        }
        let s = &self.symbol;
        s.grid.validate("symbol.grid")?;
        s.lyapunov_grid.validate("symbol.lyapunov_grid")?;
        if let Some(eps) = s.eps {
            if !(eps > 0.0 && eps.is_finite()) {
                bail!(UsageError("symbol.eps: must be > 0".into()));
            }
        }
        if !(s.certificate_xi_max > 0.0 && s.certificate_xi_max.is_finite())
            || s.certificate_points < 2
        {
            bail!(UsageError(
                "symbol: certificate grid needs xi_max > 0 and >= 2 points".into()
            ));
        }
        if !(s.lyapunov_delta >= 0.0 && s.lyapunov_delta.is_finite()) || s.lyapunov_modes == 0 {
            bail!(UsageError(
                "symbol: lyapunov_delta must be >= 0 and lyapunov_modes >= 1".into()
            ));
        }
        if !(s.certificate_tol >= 0.0 && s.lyapunov_tol >= 0.0) {
            bail!(UsageError("symbol: tolerances must be >= 0".into()));
        }
        let l = &self.linear;
        if !(l.xi_max > 0.0 && l.min_spacing > 0.0 && l.nodes >= 4) {
            bail!(UsageError(
                "linear: need nodes >= 4, xi_max > 0, min_spacing > 0".into()
            ));
        }
        if !(l.t_min > 0.0 && l.t_max > l.t_min && l.t_max.is_finite()) || l.times < 2 {
            bail!(UsageError(
                "linear: need 0 < t_min < t_max and times >= 2".into()
            ));
        }
        if l.ells.is_empty() {
            bail!(UsageError("linear.ells: must not be empty".into()));
        }
        if let Some(e) = &l.expected {
            if e.len() != l.ells.len() {
                bail!(UsageError(
                    "linear.expected: need one exponent per entry of ells".into()
                ));
            }
        }
        if l.tolerance.is_nan() || l.tolerance <= 0.0 {
            bail!(UsageError("linear.tolerance: must be > 0".into()));
        }
        self.nonlinear.validate().map_err(usage)?;
        Ok(())
    }

    pub fn eos(&self) -> Result<EquationOfState> {
        Ok(self
            .closure
            .gas()
            .build_limit()
            .map_err(|e| UsageError(e.to_string()))?)
    }

    /// SHA-256 of the canonical JSON form of the resolved configuration.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}
