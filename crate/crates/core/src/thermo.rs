//! Thermodynamic closure for a capillary, heat-conducting fluid.
//!
//! A closure is a Helmholtz free energy `psi(rho, theta)` together with the
//! capillarity `kappa`, viscosity `mu` and heat conductivity `alpha`. Every
//! coefficient is a [`ThermoFunction`] returning a [`Jet`] of analytic partial
//! derivatives up to third order, so pressures, energies and entropies are all
//! derived in closed form.
//!
//! Gradient-dependent potentials use the density gradient `rho_x`:
//!
//! ```text
//! eps = e + (kappa - theta kappa_theta) rho_x^2
//! s   = eta - kappa_theta rho_x^2
//! Psi = psi + kappa rho_x^2        (so that eps = Psi + theta s)
//! ```

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Value and partial derivatives in `(rho, theta)` up to third order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub r: f64,
    pub t: f64,
    pub rr: f64,
    pub rt: f64,
    pub tt: f64,
    pub rrr: f64,
    pub rrt: f64,
    pub rtt: f64,
    pub ttt: f64,
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        Jet {
            v,
            ..Jet::default()
        }
    }
}

/// A smooth function of `(rho, theta)` with analytic derivatives.
pub trait ThermoFunction: Send + Sync + fmt::Debug {
    fn jet(&self, rho: f64, theta: f64) -> Jet;

    fn value(&self, rho: f64, theta: f64) -> f64 {
        self.jet(rho, theta).v
    }
}

/// A constant coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub f64);

impl ThermoFunction for Constant {
    fn jet(&self, _rho: f64, _theta: f64) -> Jet {
        Jet::constant(self.0)
    }

    fn value(&self, _rho: f64, _theta: f64) -> f64 {
        self.0
    }
}

/// `coeff * rho^rho_exp * theta^theta_exp`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    pub coeff: f64,
    pub rho_exp: f64,
    pub theta_exp: f64,
}

fn falling(a: f64, m: i32) -> f64 {
    (0..m).fold(1.0, |acc, j| acc * (a - j as f64))
}

impl ThermoFunction for PowerLaw {
    fn jet(&self, rho: f64, theta: f64) -> Jet {
        let (a, b) = (self.rho_exp, self.theta_exp);
        let d = |m: i32, n: i32| {
            self.coeff
                * falling(a, m)
                * falling(b, n)
                * rho.powf(a - m as f64)
                * theta.powf(b - n as f64)
        };
        Jet {
            v: d(0, 0),
            r: d(1, 0),
            t: d(0, 1),
            rr: d(2, 0),
            rt: d(1, 1),
            tt: d(0, 2),
            rrr: d(3, 0),
            rrt: d(2, 1),
            rtt: d(1, 2),
            ttt: d(0, 3),
        }
    }
}

/// `c0 + c1 * theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineTheta {
    pub c0: f64,
    pub c1: f64,
}

impl ThermoFunction for AffineTheta {
    fn jet(&self, _rho: f64, theta: f64) -> Jet {
        Jet {
            v: self.c0 + self.c1 * theta,
            t: self.c1,
            ..Jet::default()
        }
    }
}

/// Polytropic ideal gas: `psi = R theta (ln rho - ln theta / (gamma - 1))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealGasFreeEnergy {
    pub r: f64,
    pub gamma: f64,
}

impl ThermoFunction for IdealGasFreeEnergy {
    fn jet(&self, rho: f64, theta: f64) -> Jet {
        let r = self.r;
        let c = 1.0 / (self.gamma - 1.0);
        let (lr, lt) = (rho.ln(), theta.ln());
        Jet {
            v: r * theta * (lr - c * lt),
            r: r * theta / rho,
            t: r * (lr - c * lt) - r * c,
            rr: -r * theta / (rho * rho),
            rt: r / rho,
            tt: -r * c / theta,
            rrr: 2.0 * r * theta / (rho * rho * rho),
            rrt: -r / (rho * rho),
            rtt: 0.0,
            ttt: r * c / (theta * theta),
        }
    }
}

/// Barotropic free energy `a ln rho - cv theta ln theta`; pressure `a rho`
/// does not depend on temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarotropicFreeEnergy {
    pub a: f64,
    pub cv: f64,
}

impl ThermoFunction for BarotropicFreeEnergy {
    fn jet(&self, rho: f64, theta: f64) -> Jet {
        let (a, cv) = (self.a, self.cv);
        Jet {
            v: a * rho.ln() - cv * theta * theta.ln(),
            r: a / rho,
            t: -cv * (theta.ln() + 1.0),
            rr: -a / (rho * rho),
            rt: 0.0,
            tt: -cv / theta,
            rrr: 2.0 * a / (rho * rho * rho),
            rrt: 0.0,
            rtt: 0.0,
            ttt: cv / (theta * theta),
        }
    }
}

/// Thermodynamic closure `(psi, kappa, mu, alpha)`.
#[derive(Debug, Clone)]
pub struct EquationOfState {
    pub psi: Arc<dyn ThermoFunction>,
    pub kappa: Arc<dyn ThermoFunction>,
    pub mu: Arc<dyn ThermoFunction>,
    pub alpha: Arc<dyn ThermoFunction>,
}

impl EquationOfState {
    /// Assembles a closure without checking any hypothesis; use
    /// [`verify_hypotheses`] to certify it.
    pub fn new(
        psi: impl ThermoFunction + 'static,
        kappa: impl ThermoFunction + 'static,
        mu: impl ThermoFunction + 'static,
        alpha: impl ThermoFunction + 'static,
    ) -> Self {
        EquationOfState {
            psi: Arc::new(psi),
            kappa: Arc::new(kappa),
            mu: Arc::new(mu),
            alpha: Arc::new(alpha),
        }
    }

    /// Replaces the capillarity coefficient.
    pub fn with_kappa(mut self, kappa: impl ThermoFunction + 'static) -> Self {
        self.kappa = Arc::new(kappa);
        self
    }

    /// Evaluates every potential at `(rho, theta)`.
    pub fn at(&self, rho: f64, theta: f64) -> Potentials {
        Potentials {
            rho,
            theta,
            psi: self.psi.jet(rho, theta),
            kappa: self.kappa.jet(rho, theta),
            mu: self.mu.value(rho, theta),
            alpha: self.alpha.value(rho, theta),
        }
    }
}

/// Parameters of the polytropic ideal gas with constant transport coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdealGas {
    pub r: f64,
    pub gamma: f64,
    pub kappa0: f64,
    pub mu0: f64,
    pub alpha0: f64,
}

impl IdealGas {
    /// `R = 1`, `gamma = 5/3`, unit capillarity, viscosity and conductivity.
    pub const REFERENCE: IdealGas = IdealGas {
        r: 1.0,
        gamma: 5.0 / 3.0,
        kappa0: 1.0,
        mu0: 1.0,
        alpha0: 1.0,
    };

    /// Builds the closure; all coefficients must be strictly positive.
    pub fn build(&self) -> Result<EquationOfState> {
        ideal_gas_eos(self.r, self.gamma, self.kappa0, self.mu0, self.alpha0)
    }

    /// Builds the closure allowing zero capillarity, viscosity or
    /// conductivity (the capillarity-free and inviscid limits).
    pub fn build_limit(&self) -> Result<EquationOfState> {
        check_gas(self.r, self.gamma)?;
        for (name, v) in [
            ("kappa0", self.kappa0),
            ("mu0", self.mu0),
            ("alpha0", self.alpha0),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be >= 0, got {v}")));
            }
        }
        Ok(self.assemble())
    }

    fn assemble(&self) -> EquationOfState {
        EquationOfState::new(
            IdealGasFreeEnergy {
                r: self.r,
                gamma: self.gamma,
            },
            Constant(self.kappa0),
            Constant(self.mu0),
            Constant(self.alpha0),
        )
    }
}

fn check_gas(r: f64, gamma: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid("R", format!("must be > 0, got {r}")));
    }
    if !(gamma > 1.0 && gamma.is_finite()) {
        return Err(invalid("gamma", format!("must be > 1, got {gamma}")));
    }
    Ok(())
}

/// Polytropic ideal gas with constant `kappa0`, `mu0`, `alpha0`.
pub fn ideal_gas_eos(
    r: f64,
    gamma: f64,
    kappa0: f64,
    mu0: f64,
    alpha0: f64,
) -> Result<EquationOfState> {
    check_gas(r, gamma)?;
    for (name, v) in [("kappa0", kappa0), ("mu0", mu0), ("alpha0", alpha0)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(invalid(name, format!("must be > 0, got {v}")));
        }
    }
    Ok(IdealGas {
        r,
        gamma,
        kappa0,
        mu0,
        alpha0,
    }
    .assemble())
}

/// Admissible states: `rho > rho_min`, `theta > theta_min`; the upper bounds
/// only delimit verification sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Domain {
    pub rho_min: f64,
    pub theta_min: f64,
    pub rho_max: f64,
    pub theta_max: f64,
}

impl Default for Domain {
    fn default() -> Self {
        Domain {
            rho_min: 0.1,
            theta_min: 0.1,
            rho_max: 5.0,
            theta_max: 5.0,
        }
    }
}

impl Domain {
    pub fn new(rho_min: f64, theta_min: f64, rho_max: f64, theta_max: f64) -> Result<Self> {
        if !(rho_min > 0.0) {
            return Err(invalid("rho_min", "must be > 0"));
        }
        if !(theta_min > 0.0) {
            return Err(invalid("theta_min", "must be > 0"));
        }
        if !(rho_max > rho_min && rho_max.is_finite()) {
            return Err(invalid("rho_max", "must be finite and > rho_min"));
        }
        if !(theta_max > theta_min && theta_max.is_finite()) {
            return Err(invalid("theta_max", "must be finite and > theta_min"));
        }
        Ok(Domain {
            rho_min,
            theta_min,
            rho_max,
            theta_max,
        })
    }

    pub fn contains(&self, rho: f64, theta: f64) -> bool {
        rho > self.rho_min && theta > self.theta_min
    }

    pub fn check(&self, rho: f64, theta: f64) -> Result<()> {
        if self.contains(rho, theta) {
            Ok(())
        } else {
            Err(Error::DomainViolation { rho, theta })
        }
    }

    /// Cell-centred `n x n` grid of `(rho, theta)` over the sampling box.
    pub fn grid(&self, n: usize) -> Vec<(f64, f64)> {
        let dr = (self.rho_max - self.rho_min) / n as f64;
        let dt = (self.theta_max - self.theta_min) / n as f64;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push((
                    self.rho_min + (i as f64 + 0.5) * dr,
                    self.theta_min + (j as f64 + 0.5) * dt,
                ));
            }
        }
        out
    }
}

/// Pointwise state `(rho, u, theta)` with an optional density gradient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct State {
    pub rho: f64,
    pub u: f64,
    pub theta: f64,
    pub rho_x: f64,
}

impl State {
    pub fn new(rho: f64, u: f64, theta: f64) -> Self {
        State {
            rho,
            u,
            theta,
            rho_x: 0.0,
        }
    }

    pub fn with_rho_x(self, rho_x: f64) -> Self {
        State { rho_x, ..self }
    }
}

/// All potentials at one `(rho, theta)`.
#[derive(Debug, Clone, Copy)]
pub struct Potentials {
    pub rho: f64,
    pub theta: f64,
    pub psi: Jet,
    pub kappa: Jet,
    pub mu: f64,
    pub alpha: f64,
}

impl Potentials {
    pub fn p(&self) -> f64 {
        self.rho * self.rho * self.psi.r
    }
    pub fn p_rho(&self) -> f64 {
        2.0 * self.rho * self.psi.r + self.rho * self.rho * self.psi.rr
    }
    pub fn p_theta(&self) -> f64 {
        self.rho * self.rho * self.psi.rt
    }
    pub fn e(&self) -> f64 {
        self.psi.v - self.theta * self.psi.t
    }
    pub fn e_rho(&self) -> f64 {
        self.psi.r - self.theta * self.psi.rt
    }
    pub fn e_theta(&self) -> f64 {
        -self.theta * self.psi.tt
    }
    pub fn e_rho_rho(&self) -> f64 {
        self.psi.rr - self.theta * self.psi.rrt
    }
    pub fn e_rho_theta(&self) -> f64 {
        -self.theta * self.psi.rtt
    }
    pub fn e_theta_theta(&self) -> f64 {
        -self.psi.tt - self.theta * self.psi.ttt
    }
    pub fn eta(&self) -> f64 {
        -self.psi.t
    }
    pub fn eta_rho(&self) -> f64 {
        -self.psi.rt
    }
    pub fn eta_theta(&self) -> f64 {
        -self.psi.tt
    }

    /// Modified capillarity `k = 2 rho kappa`.
    pub fn k(&self) -> f64 {
        2.0 * self.rho * self.kappa.v
    }
    pub fn k_rho(&self) -> f64 {
        2.0 * self.kappa.v + 2.0 * self.rho * self.kappa.r
    }
    pub fn k_theta(&self) -> f64 {
        2.0 * self.rho * self.kappa.t
    }

    /// `g = kappa - theta kappa_theta`, the coefficient of `rho_x^2` in `eps`.
    pub fn g(&self) -> f64 {
        self.kappa.v - self.theta * self.kappa.t
    }
    pub fn g_rho(&self) -> f64 {
        self.kappa.r - self.theta * self.kappa.rt
    }
    pub fn g_theta(&self) -> f64 {
        -self.theta * self.kappa.tt
    }
    pub fn g_rho_rho(&self) -> f64 {
        self.kappa.rr - self.theta * self.kappa.rrt
    }
    pub fn g_rho_theta(&self) -> f64 {
        -self.theta * self.kappa.rtt
    }
    pub fn g_theta_theta(&self) -> f64 {
        -self.kappa.tt - self.theta * self.kappa.ttt
    }

    pub fn eps(&self, rho_x: f64) -> f64 {
        self.e() + self.g() * rho_x * rho_x
    }
    pub fn eps_rho(&self, rho_x: f64) -> f64 {
        self.e_rho() + self.g_rho() * rho_x * rho_x
    }
    pub fn eps_theta(&self, rho_x: f64) -> f64 {
        self.e_theta() + self.g_theta() * rho_x * rho_x
    }
    /// Derivative of `eps` with respect to `rho_x`.
    pub fn eps_grad(&self, rho_x: f64) -> f64 {
        2.0 * self.g() * rho_x
    }
    pub fn entropy(&self, rho_x: f64) -> f64 {
        self.eta() - self.kappa.t * rho_x * rho_x
    }
    pub fn free_energy(&self, rho_x: f64) -> f64 {
        self.psi.v + self.kappa.v * rho_x * rho_x
    }
}

/// `eps = e + (kappa - theta kappa_theta) rho_x^2`.
pub fn nonstandard_energy(eos: &EquationOfState, s: &State) -> f64 {
    eos.at(s.rho, s.theta).eps(s.rho_x)
}

/// `s = eta - kappa_theta rho_x^2`.
pub fn nonstandard_entropy(eos: &EquationOfState, s: &State) -> f64 {
    eos.at(s.rho, s.theta).entropy(s.rho_x)
}

/// `Psi = psi + kappa rho_x^2`.
pub fn nonstandard_free_energy(eos: &EquationOfState, s: &State) -> f64 {
    eos.at(s.rho, s.theta).free_energy(s.rho_x)
}

/// `k = 2 rho kappa(rho, theta)`.
pub fn modified_capillarity(eos: &EquationOfState, s: &State) -> f64 {
    eos.at(s.rho, s.theta).k()
}

/// Outcome of one checked condition over a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub name: String,
    pub passed: bool,
    /// Smallest margin for sign conditions, largest residual otherwise.
    pub worst: f64,
    pub tolerance: f64,
    /// `(rho, theta)` where `worst` was attained.
    pub worst_state: Option<(f64, f64)>,
}

/// Collection of condition checks.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct ConditionReport {
    pub samples: usize,
    pub conditions: Vec<ConditionCheck>,
}

impl ConditionReport {
    pub fn all_passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&ConditionCheck> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.conditions.iter().filter(|c| !c.passed)
    }
}

/// Accumulates a sign condition (`value > 0`, or `>= 0` when `strict` is false).
#[derive(Debug)]
pub(crate) struct SignTracker {
    name: &'static str,
    strict: bool,
    worst: f64,
    at: Option<(f64, f64)>,
}

impl SignTracker {
    pub(crate) fn new(name: &'static str, strict: bool) -> Self {
        SignTracker {
            name,
            strict,
            worst: f64::INFINITY,
            at: None,
        }
    }

    pub(crate) fn push(&mut self, value: f64, at: (f64, f64)) {
        if value < self.worst || value.is_nan() {
            self.worst = value;
            self.at = Some(at);
        }
    }

    pub(crate) fn finish(self) -> ConditionCheck {
        let passed = if self.strict {
            self.worst > 0.0
        } else {
            self.worst >= 0.0
        };
        ConditionCheck {
            name: self.name.to_string(),
            passed,
            worst: self.worst,
            tolerance: 0.0,
            worst_state: self.at,
        }
    }
}

/// Accumulates a residual condition (`residual <= tolerance`).
#[derive(Debug)]
pub(crate) struct ResidualTracker {
    name: &'static str,
    tolerance: f64,
    worst: f64,
    at: Option<(f64, f64)>,
}

impl ResidualTracker {
    pub(crate) fn new(name: &'static str, tolerance: f64) -> Self {
        ResidualTracker {
            name,
            tolerance,
            worst: 0.0,
            at: None,
        }
    }

    pub(crate) fn push(&mut self, residual: f64, at: (f64, f64)) {
        if residual > self.worst || residual.is_nan() {
            self.worst = residual;
            self.at = Some(at);
        }
    }

    pub(crate) fn finish(self) -> ConditionCheck {
        ConditionCheck {
            name: self.name.to_string(),
            passed: self.worst <= self.tolerance,
            worst: self.worst,
            tolerance: self.tolerance,
            worst_state: self.at,
        }
    }
}

/// Tolerance for the compatibility relations between `p`, `e` and `eta`.
pub const RELATION_TOL: f64 = 1e-10;
/// Tolerance for `eps = Psi + theta s`.
pub const LEGENDRE_TOL: f64 = 1e-12;
/// Relative tolerance of analytic derivatives against central differences.
pub const FD_TOL: f64 = 1e-6;
/// Central-difference step used by the sweep.
pub const FD_STEP: f64 = 1e-5;

/// Density gradients at which the Legendre identity is probed.
const LEGENDRE_GRADIENTS: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

fn fd_rel(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(1.0)
}

/// Sweeps an `n x n` grid over `domain` and checks every closure hypothesis.
pub fn verify_hypotheses(
    eos: &EquationOfState,
    domain: &Domain,
    n_samples: usize,
) -> Result<ConditionReport> {
    if n_samples == 0 {
        return Err(invalid("n_samples", "must be >= 1"));
    }
    let mut mu = SignTracker::new("mu > 0", true);
    let mut alpha = SignTracker::new("alpha > 0", true);
    let mut kappa = SignTracker::new("kappa > 0", true);
    let mut concave = SignTracker::new("kappa_theta_theta <= 0", false);
    let mut p = SignTracker::new("p > 0", true);
    let mut p_rho = SignTracker::new("p_rho > 0", true);
    let mut p_theta = SignTracker::new("p_theta > 0", true);
    let mut e_theta = SignTracker::new("e_theta > 0", true);
    let mut rel_e = ResidualTracker::new("e_rho = (p - theta p_theta)/rho^2", RELATION_TOL);
    let mut rel_et = ResidualTracker::new("eta_theta = e_theta/theta", RELATION_TOL);
    let mut rel_er = ResidualTracker::new("eta_rho = -p_theta/rho^2", RELATION_TOL);
    let mut legendre = ResidualTracker::new("eps = Psi + theta s", LEGENDRE_TOL);
    let mut fd_p = ResidualTracker::new("finite differences of p", FD_TOL);
    let mut fd_e = ResidualTracker::new("finite differences of e", FD_TOL);
    let mut fd_eta = ResidualTracker::new("finite differences of eta", FD_TOL);

    let h = FD_STEP;
    for (r, t) in domain.grid(n_samples) {
        let at = (r, t);
        let q = eos.at(r, t);
        mu.push(q.mu, at);
        alpha.push(q.alpha, at);
        kappa.push(q.kappa.v, at);
        concave.push(-q.kappa.tt, at);
        p.push(q.p(), at);
        p_rho.push(q.p_rho(), at);
        p_theta.push(q.p_theta(), at);
        e_theta.push(q.e_theta(), at);

        rel_e.push((q.e_rho() - (q.p() - t * q.p_theta()) / (r * r)).abs(), at);
        rel_et.push((q.eta_theta() - q.e_theta() / t).abs(), at);
        rel_er.push((q.eta_rho() + q.p_theta() / (r * r)).abs(), at);

        for rx in LEGENDRE_GRADIENTS {
            let lhs = q.eps(rx);
            let rhs = q.free_energy(rx) + t * q.entropy(rx);
            legendre.push((lhs - rhs).abs(), at);
        }

        let (qrp, qrm) = (eos.at(r + h, t), eos.at(r - h, t));
        let (qtp, qtm) = (eos.at(r, t + h), eos.at(r, t - h));
        let d =
            |f: fn(&Potentials) -> f64, a: &Potentials, b: &Potentials| (f(a) - f(b)) / (2.0 * h);
        fd_p.push(
            fd_rel(q.p_rho(), d(Potentials::p, &qrp, &qrm))
                .max(fd_rel(q.p_theta(), d(Potentials::p, &qtp, &qtm))),
            at,
        );
        fd_e.push(
            fd_rel(q.e_rho(), d(Potentials::e, &qrp, &qrm))
                .max(fd_rel(q.e_theta(), d(Potentials::e, &qtp, &qtm))),
            at,
        );
        fd_eta.push(
            fd_rel(q.eta_rho(), d(Potentials::eta, &qrp, &qrm))
                .max(fd_rel(q.eta_theta(), d(Potentials::eta, &qtp, &qtm))),
            at,
        );
    }

    Ok(ConditionReport {
        samples: n_samples * n_samples,
        conditions: vec![
            mu.finish(),
            alpha.finish(),
            kappa.finish(),
            concave.finish(),
            p.finish(),
            p_rho.finish(),
            p_theta.finish(),
            e_theta.finish(),
            rel_e.finish(),
            rel_et.finish(),
            rel_er.finish(),
            legendre.finish(),
            fd_p.finish(),
            fd_e.finish(),
            fd_eta.finish(),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> EquationOfState {
        IdealGas::REFERENCE.build().unwrap()
    }

    #[test]
    fn ideal_gas_values_at_unit_state() {
        let q = reference().at(1.0, 1.0);
        assert!((q.p() - 1.0).abs() < 1e-15);
        assert!((q.e() - 1.5).abs() < 1e-15);
        assert!((q.e_theta() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn ideal_gas_pressure_derivatives() {
        let q = reference().at(2.0, 3.0);
        assert!((q.p() - 6.0).abs() < 1e-14);
        assert!((q.p_rho() - 3.0).abs() < 1e-14);
        assert!((q.p_theta() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ideal_gas_eos(1.0, 0.5, 1.0, 1.0, 1.0).is_err());
        assert!(ideal_gas_eos(0.0, 1.4, 1.0, 1.0, 1.0).is_err());
        assert!(ideal_gas_eos(1.0, 1.4, 0.0, 1.0, 1.0).is_err());
        assert!(ideal_gas_eos(1.0, 1.4, 1.0, -1.0, 1.0).is_err());
        let nsf = IdealGas {
            kappa0: 0.0,
            ..IdealGas::REFERENCE
        };
        assert!(nsf.build().is_err());
        assert!(nsf.build_limit().is_ok());
    }

    #[test]
    fn energy_with_gradient() {
        let eos = reference();
        let s = State::new(1.0, 0.0, 1.0);
        assert!((nonstandard_energy(&eos, &s) - 1.5).abs() < 1e-15);
        assert!((nonstandard_energy(&eos, &s.with_rho_x(1.0)) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn linear_kappa_gives_standard_energy() {
        let eos = reference().with_kappa(AffineTheta { c0: 0.0, c1: 0.7 });
        let s = State::new(1.3, 0.0, 0.8).with_rho_x(2.0);
        let e = eos.at(1.3, 0.8).e();
        assert!((nonstandard_energy(&eos, &s) - e).abs() < 1e-15);
    }

    #[test]
    fn entropy_with_decreasing_kappa() {
        let (k0, ts) = (0.5, 2.0);
        let eos = reference().with_kappa(AffineTheta {
            c0: 2.0 * k0,
            c1: -k0 / ts,
        });
        let s = State::new(1.0, 0.0, 1.5).with_rho_x(0.7);
        let eta = eos.at(1.0, 1.5).eta();
        let expect = eta + (k0 / ts) * 0.49;
        assert!((nonstandard_entropy(&eos, &s) - expect).abs() < 1e-14);
        let domain = Domain::new(0.1, 0.1, 5.0, 3.9).unwrap();
        let c = verify_hypotheses(&eos, &domain, 10).unwrap();
        assert!(c.all_passed());
    }

    #[test]
    fn capillarity_examples() {
        let eos = reference();
        assert_eq!(modified_capillarity(&eos, &State::new(1.0, 0.0, 1.0)), 2.0);
        let k1 = modified_capillarity(&eos, &State::new(1.7, 0.0, 1.0));
        let k2 = modified_capillarity(&eos, &State::new(3.4, 0.0, 1.0));
        assert!((k2 - 2.0 * k1).abs() < 1e-14);
        let half = reference().with_kappa(Constant(0.5));
        assert!((modified_capillarity(&half, &State::new(3.0, 0.0, 1.0)) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn reference_sweep_passes() {
        let r = verify_hypotheses(&reference(), &Domain::default(), 20).unwrap();
        assert!(r.all_passed(), "{:?}", r.failures().collect::<Vec<_>>());
        assert_eq!(r.samples, 400);
    }

    #[test]
    fn convex_kappa_fails_h4() {
        let eos = reference().with_kappa(PowerLaw {
            coeff: 1.0,
            rho_exp: 0.0,
            theta_exp: 2.0,
        });
        let r = verify_hypotheses(&eos, &Domain::default(), 8).unwrap();
        let c = r.get("kappa_theta_theta <= 0").unwrap();
        assert!(!c.passed);
        assert!((c.worst + 2.0).abs() < 1e-12);
        assert!(c.worst_state.is_some());
    }

    #[test]
    fn barotropic_pressure_fails_weyl() {
        let eos = EquationOfState::new(
            BarotropicFreeEnergy { a: 1.0, cv: 1.5 },
            Constant(1.0),
            Constant(1.0),
            Constant(1.0),
        );
        let r = verify_hypotheses(&eos, &Domain::default(), 8).unwrap();
        assert!(!r.get("p_theta > 0").unwrap().passed);
        assert!(r.get("p_rho > 0").unwrap().passed);
        assert!(r.get("e_theta > 0").unwrap().passed);
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(verify_hypotheses(&reference(), &Domain::default(), 0).is_err());
    }

    #[test]
    fn domain_validation() {
        assert!(Domain::new(0.0, 0.1, 1.0, 1.0).is_err());
        assert!(Domain::new(0.1, 0.1, 0.05, 1.0).is_err());
        let d = Domain::default();
        assert!(d.contains(0.2, 0.2));
        assert!(!d.contains(0.1, 0.2));
        assert!(d.check(0.05, 1.0).is_err());
    }

    #[test]
    fn power_law_jet_matches_finite_differences() {
        let f = PowerLaw {
            coeff: 1.7,
            rho_exp: 1.5,
            theta_exp: -0.5,
        };
        let (r, t, h) = (1.3, 0.9, 1e-5);
        let j = f.jet(r, t);
        let fd_rt = (f.jet(r + h, t).t - f.jet(r - h, t).t) / (2.0 * h);
        let fd_ttt = (f.jet(r, t + h).tt - f.jet(r, t - h).tt) / (2.0 * h);
        assert!((j.rt - fd_rt).abs() < 1e-8);
        assert!((j.ttt - fd_ttt).abs() < 1e-7);
    }
}
