//! Full runs with conservation, entropy and perturbation-norm ledgers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fit::{fit_decay, DecayFit};
use crate::symbols::{nonlinear_terms, ExtendedState};
use crate::thermo::{Domain, EquationOfState, State};

use super::{Integrals, Recovered, Scheme, Solver, StateField};

/// Spatial shape of the initial perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Shape {
    /// `exp(-(x - c)^2 / w^2)`.
    Gaussian,
    /// `exp(-(x - c)^2 / w^2) cos(k (x - c))`.
    WavePacket { wavenumber: f64 },
}

/// Which primitive fields are perturbed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PerturbedFields {
    pub rho: bool,
    pub u: bool,
    pub theta: bool,
}

impl Default for PerturbedFields {
    fn default() -> Self {
        PerturbedFields {
            rho: true,
            u: false,
            theta: false,
        }
    }
}

/// Localized initial perturbation of the equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Perturbation {
    pub shape: Shape,
    pub amplitude: f64,
    pub width: f64,
    /// Centre of the bump; the middle of the domain when absent.
    pub center: Option<f64>,
    pub fields: PerturbedFields,
}

impl Default for Perturbation {
    fn default() -> Self {
        Perturbation {
            shape: Shape::Gaussian,
            amplitude: 1e-2,
            width: 2.0,
            center: None,
            fields: PerturbedFields::default(),
        }
    }
}

impl Perturbation {
    pub fn validate(&self, length: f64) -> Result<()> {
        if !self.amplitude.is_finite() {
            return Err(invalid("amplitude", "must be finite"));
        }
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(invalid("width", "must be positive"));
        }
        if 8.0 * self.width > length {
            return Err(invalid(
                "width",
                format!(
                    "support {} is not small against the period {length}",
                    8.0 * self.width
                ),
            ));
        }
        if let Shape::WavePacket { wavenumber } = self.shape {
            if !wavenumber.is_finite() {
                return Err(invalid("wavenumber", "must be finite"));
            }
        }
        Ok(())
    }

    /// Profile value at `x` on a period of `length`.
    pub fn profile(&self, x: f64, length: f64) -> f64 {
        let c = self.center.unwrap_or(0.5 * length);
        let d = (x - c + 0.5 * length).rem_euclid(length) - 0.5 * length;
        let g = self.amplitude * (-(d / self.width).powi(2)).exp();
        match self.shape {
            Shape::Gaussian => g,
            Shape::WavePacket { wavenumber } => g * (wavenumber * d).cos(),
        }
    }

    pub fn field(&self, equilibrium: &State, n: usize, length: f64) -> StateField {
        let mut f = StateField::constant(equilibrium, n, length);
        let dx = length / n as f64;
        for j in 0..n {
            let p = self.profile(j as f64 * dx, length);
            if self.fields.rho {
                f.rho[j] += p;
            }
            if self.fields.u {
                f.u[j] += p;
            }
            if self.fields.theta {
                f.theta[j] += p;
            }
        }
        f
    }
}

/// Parameters of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunSpec {
    pub length: f64,
    pub n: usize,
    pub dt: f64,
    pub t_final: f64,
    pub sample_interval: f64,
    pub scheme: Scheme,
    pub perturbation: Perturbation,
    pub domain: Domain,
}

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec {
            length: 400.0,
            n: 4096,
            dt: 0.05,
            t_final: 150.0,
            sample_interval: 1.0,
            scheme: Scheme::IfRk4,
            perturbation: Perturbation::default(),
            domain: Domain::default(),
        }
    }
}

impl RunSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt", "must be positive"));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(invalid("t_final", "must be >= 0"));
        }
        if !(self.sample_interval > 0.0 && self.sample_interval.is_finite()) {
            return Err(invalid("sample_interval", "must be positive"));
        }
        let d = &self.domain;
        Domain::new(d.rho_min, d.theta_min, d.rho_max, d.theta_max)?;
        self.perturbation.validate(self.length)
    }
}

/// One ledger sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LedgerRow {
    pub t: f64,
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
    pub entropy: f64,
    /// Order-0 triple norm of `U - Ubar`.
    pub norm_u: f64,
    /// Order-0 triple norm of `W`.
    pub norm_w: f64,
    /// `norm_w / norm_u`, undefined at the equilibrium.
    pub ratio: Option<f64>,
    pub n1_max: f64,
    pub n_max: f64,
    /// `max |U|` over the grid.
    pub field_scale: f64,
}

/// Time series of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsLedger {
    pub rows: Vec<LedgerRow>,
    pub dt: f64,
    pub steps: usize,
    /// Largest decrease of total entropy over a single step; negative when
    /// entropy increased at every step.
    pub max_entropy_decrease: f64,
    /// Stability bound evaluated at each sample.
    pub stability_bounds: Vec<f64>,
}

/// Derived checks of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub mass_drift: f64,
    /// Momentum drift relative to `max(|momentum_0|, mass_0)`.
    pub momentum_drift: f64,
    pub energy_drift: f64,
    pub max_entropy_decrease: f64,
    /// `(min, max)` of the defined `W / (U - Ubar)` ratios.
    pub ratio_band: Option<(f64, f64)>,
    /// Largest `max |N_1| / max |U|`.
    pub n1_relative: f64,
    /// `L / (2 c)` with `c` the largest long-wave speed.
    pub t_wrap: f64,
    pub fit_window: (f64, f64),
    pub fit: Option<DecayFit>,
    pub fit_error: Option<String>,
    /// Norm of `U - Ubar` smaller at the end of the fit window than at its
    /// start, with negative fitted exponent.
    pub trend_decreasing: bool,
    /// Consecutive samples in the fit window where the norm increased.
    pub norm_increases: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub ledger: DiagnosticsLedger,
    pub summary: RunSummary,
    /// Set when the run ended before `t_final`.
    pub termination: Option<String>,
    #[serde(skip)]
    pub final_field: StateField,
}

/// `W` with its order-0 triple norm, the ratio to that of `U - Ubar`, and
/// the size of the nonlinear remainder.
#[derive(Debug, Clone, PartialEq)]
pub struct WDiagnostics {
    pub w: [Vec<f64>; 3],
    pub norm_u: f64,
    pub norm_w: f64,
    pub ratio: Option<f64>,
    pub n1_max: f64,
    pub n_max: f64,
}

/// Largest long-wave speed `|u| + (p_rho + c^2)^{1/2}`.
pub fn max_wave_speed(solver: &Solver) -> f64 {
    let c = &solver.coeffs;
    solver.equilibrium.u.abs() + (c.p_rho + c.cbar * c.cbar).sqrt()
}

impl Solver {
    fn triple_norm(&self, v: [&[f64]; 3], v1_x: &[f64]) -> f64 {
        let s: Vec<f64> = (0..self.n())
            .map(|j| v[0][j].powi(2) + v1_x[j].powi(2) + v[1][j].powi(2) + v[2][j].powi(2))
            .collect();
        self.grid.integrate(&s).sqrt()
    }

    fn diagnostics_with(&self, rec: &Recovered) -> WDiagnostics {
        let f = &rec.field;
        let g = &self.grid;
        let e = &self.equilibrium;
        let rh = g.forward(&f.rho);
        let uh = g.forward(&f.u);
        let th = g.forward(&f.theta);
        let rho_xx = g.derivative(&rh, 2);
        let rho_xxx = g.derivative(&rh, 3);
        let u_x = g.derivative(&uh, 1);
        let u_xx = g.derivative(&uh, 2);
        let theta_x = g.derivative(&th, 1);
        let theta_xx = g.derivative(&th, 2);

        let pts: Vec<(nalgebra::Vector3<f64>, nalgebra::Vector3<f64>)> = (0..self.n())
            .into_par_iter()
            .map(|j| {
                let ext = ExtendedState {
                    rho: f.rho[j],
                    u: f.u[j],
                    theta: f.theta[j],
                    rho_x: rec.rho_x[j],
                    u_x: u_x[j],
                    theta_x: theta_x[j],
                    rho_xx: rho_xx[j],
                    u_xx: u_xx[j],
                    theta_xx: theta_xx[j],
                    rho_xxx: rho_xxx[j],
                };
                let q = self.eos.at(ext.rho, ext.theta);
                let w = self.df_inv * (crate::symbols::conserved_from(&q, &ext) - self.f0bar);
                let n = nonlinear_terms(&self.eos, &self.coeffs, &ext).n;
                (w, n)
            })
            .collect();
        let w: [Vec<f64>; 3] = std::array::from_fn(|c| pts.iter().map(|p| p.0[c]).collect());
        let n1_max = pts.iter().fold(0.0_f64, |a, p| a.max(p.1[0].abs()));
        let n_max = pts.iter().fold(0.0_f64, |a, p| a.max(p.1.amax()));

        let du: [Vec<f64>; 3] = [
            f.rho.iter().map(|v| v - e.rho).collect(),
            f.u.iter().map(|v| v - e.u).collect(),
            f.theta.iter().map(|v| v - e.theta).collect(),
        ];
        let norm_u = self.triple_norm([&du[0], &du[1], &du[2]], &rec.rho_x);
        let w1_x = g.derivative(&g.forward(&w[0]), 1);
        let norm_w = self.triple_norm([&w[0], &w[1], &w[2]], &w1_x);
        let ratio = (norm_u > 0.0).then(|| norm_w / norm_u);
        WDiagnostics {
            w,
            norm_u,
            norm_w,
            ratio,
            n1_max,
            n_max,
        }
    }

    /// [`WDiagnostics`] of a field.
    pub fn w_diagnostics(&self, field: &StateField) -> Result<WDiagnostics> {
        self.check_field(field)?;
        let rho_x = self.grid.derivative(&self.grid.forward(&field.rho), 1);
        Ok(self.diagnostics_with(&Recovered {
            field: field.clone(),
            rho_x,
        }))
    }

    fn sample(&self, t: f64, rec: &Recovered) -> LedgerRow {
        let Integrals {
            mass,
            momentum,
            energy,
            entropy,
        } = self.integrals_with(&rec.field, &rec.rho_x);
        let d = self.diagnostics_with(rec);
        LedgerRow {
            t,
            mass,
            momentum,
            energy,
            entropy,
            norm_u: d.norm_u,
            norm_w: d.norm_w,
            ratio: d.ratio,
            n1_max: d.n1_max,
            n_max: d.n_max,
            field_scale: rec.field.scale(),
        }
    }
}

/// [`WDiagnostics`] of a field about `equilibrium`.
pub fn w_diagnostics(
    eos: &EquationOfState,
    equilibrium: &State,
    field: &StateField,
) -> Result<WDiagnostics> {
    Solver::new(
        eos,
        equilibrium,
        field.len(),
        field.length,
        Domain::default(),
    )?
    .w_diagnostics(field)
}

fn summarize(solver: &Solver, spec: &RunSpec, ledger: &DiagnosticsLedger) -> RunSummary {
    let rows = &ledger.rows;
    let r0 = rows[0];
    let drift = |f: fn(&LedgerRow) -> f64, scale: f64| {
        rows.iter()
            .map(|r| (f(r) - f(&r0)).abs())
            .fold(0.0, f64::max)
            / scale
    };
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    let ratio_band = (!ratios.is_empty()).then(|| {
        (
            ratios.iter().copied().fold(f64::INFINITY, f64::min),
            ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        )
    });
    let t_wrap = spec.length / (2.0 * max_wave_speed(solver));
    let t_end = rows.last().map_or(0.0, |r| r.t);
    let fit_window = (t_wrap / 10.0, t_end.min(t_wrap));
    let (times, norms): (Vec<f64>, Vec<f64>) = rows.iter().map(|r| (r.t, r.norm_u)).unzip();
    let (fit, fit_error) = if norms.iter().all(|n| *n == 0.0) {
        (None, Some("zero perturbation".to_string()))
    } else {
        match fit_decay(&times, &norms, fit_window) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    let window: Vec<f64> = rows
        .iter()
        .filter(|r| r.t >= fit_window.0 && r.t <= fit_window.1)
        .map(|r| r.norm_u)
        .collect();
    let norm_increases = window.windows(2).filter(|w| w[1] > w[0]).count();
    let trend_decreasing = fit.is_some_and(|f| f.exponent < 0.0)
        && window.len() >= 2
        && window[window.len() - 1] < window[0];
    RunSummary {
        mass_drift: drift(|r| r.mass, r0.mass.abs()),
        momentum_drift: drift(|r| r.momentum, r0.momentum.abs().max(r0.mass.abs())),
        energy_drift: drift(|r| r.energy, r0.energy.abs()),
        max_entropy_decrease: ledger.max_entropy_decrease,
        ratio_band,
        n1_relative: rows
            .iter()
            .map(|r| r.n1_max / r.field_scale)
            .fold(0.0, f64::max),
        t_wrap,
        fit_window,
        fit,
        fit_error,
        trend_decreasing,
        norm_increases,
    }
}

/// Integrates from the perturbed equilibrium to `spec.t_final`.
///
/// Invalid parameters and a step size above the initial stability bound are
/// errors. Failures during the run end it early with a partial ledger and
/// `termination` set.
pub fn run(eos: &EquationOfState, equilibrium: &State, spec: &RunSpec) -> Result<RunResult> {
    spec.validate()?;
    let solver = Solver::new(eos, equilibrium, spec.n, spec.length, spec.domain)?;
    let field0 = spec
        .perturbation
        .field(&solver.equilibrium, spec.n, spec.length);
    solver.check_field(&field0)?;

    let steps = if spec.t_final == 0.0 {
        0
    } else {
        ((spec.t_final / spec.dt) - 1e-9).ceil().max(1.0) as usize
    };
    let dt = if steps == 0 {
        spec.dt
    } else {
        spec.t_final / steps as f64
    };
    let stride = ((spec.sample_interval / dt).round() as usize).max(1);

    let bound = solver.stability_bound(&field0, spec.scheme);
    if dt > bound {
        return Err(Error::StepRejected { dt, bound });
    }
    let exps = (spec.scheme == Scheme::IfRk4).then(|| solver.exponentials(dt));

    let mut w = solver.to_modes(&field0)?;
    let mut rec = solver.recover(&w, &field0.theta)?;
    let mut ledger = DiagnosticsLedger {
        rows: vec![solver.sample(0.0, &rec)],
        dt,
        steps: 0,
        max_entropy_decrease: f64::NEG_INFINITY,
        stability_bounds: vec![bound],
    };
    let mut entropy = ledger.rows[0].entropy;
    let mut termination = None;
    for step in 1..=steps {
        match solver.advance(&w, &rec, spec.scheme, exps.as_ref(), dt) {
            Ok((w2, r2)) => {
                w = w2;
                rec = r2;
            }
            Err(e) => {
                termination = Some(format!("t = {}: {e}", (step - 1) as f64 * dt));
                break;
            }
        }
        ledger.steps = step;
        let s = solver.entropy_with(&rec.field, &rec.rho_x);
        ledger.max_entropy_decrease = ledger.max_entropy_decrease.max(entropy - s);
        entropy = s;
        if step % stride == 0 || step == steps {
            let t = step as f64 * dt;
            ledger.rows.push(solver.sample(t, &rec));
            let b = solver.stability_bound(&rec.field, spec.scheme);
            ledger.stability_bounds.push(b);
            if dt > b && step < steps {
                termination = Some(format!("t = {t}: {}", Error::StepRejected { dt, bound: b }));
                break;
            }
        }
    }
    if steps == 0 {
        ledger.max_entropy_decrease = 0.0;
    }
    let summary = summarize(&solver, spec, &ledger);
    Ok(RunResult {
        ledger,
        summary,
        termination,
        final_field: rec.field,
    })
}
