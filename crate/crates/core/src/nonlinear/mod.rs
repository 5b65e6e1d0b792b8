//! Pseudo-spectral solver for the full nonlinear system on a periodic domain.
//!
//! The evolved unknowns are the Fourier coefficients of the perturbation
//! variables `W = Df0bar^{-1} (F0(U, U_x) - F0bar)`, a fixed linear image of
//! the conserved quantities. Their zero modes never change, so mass, momentum
//! and total energy are conserved to rounding. In Fourier space
//!
//! ```text
//! W_t = -M(i xi) W + P (Df0bar^{-1} i xi Phi + M(i xi) W)
//! ```
//!
//! where `Phi = -F1 + G U_x + H U_xx + gtilde` is the total flux and `P` the
//! 2/3-rule projection. The integrating-factor scheme treats the first term
//! exactly per mode.

mod grid;
mod run;

pub use grid::PeriodicGrid;
pub use run::{
    max_wave_speed, run, w_diagnostics, DiagnosticsLedger, LedgerRow, Perturbation,
    PerturbedFields, RunResult, RunSpec, RunSummary, Shape, WDiagnostics,
};

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{complex_eigenvalues, CMatrix3};
use crate::linear_evolution::ModePropagator;
use crate::symbols::{
    conserved_from, evolution_symbol, flux_from, EquilibriumCoefficients, ExtendedState,
};
use crate::thermo::{Domain, EquationOfState, State};

/// Largest `|lambda| dt` treated as stable by classical RK4 on the
/// imaginary axis.
pub const RK4_STABILITY: f64 = 2.8;
/// Newton tolerance, relative, for temperature recovery.
const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITER: usize = 50;

/// Time-stepping scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Classical explicit RK4.
    Rk4,
    /// RK4 in Lawson form with the constant-coefficient linear part
    /// integrated exactly.
    #[default]
    IfRk4,
}

/// Primitive fields on the periodic grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateField {
    pub length: f64,
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub theta: Vec<f64>,
}

impl StateField {
    pub fn constant(s: &State, n: usize, length: f64) -> Self {
        StateField {
            length,
            rho: vec![s.rho; n],
            u: vec![s.u; n],
            theta: vec![s.theta; n],
        }
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    /// Largest pointwise `max(|rho|, |u|, |theta|)`.
    pub fn scale(&self) -> f64 {
        self.rho
            .iter()
            .chain(&self.u)
            .chain(&self.theta)
            .fold(0.0, |a, v| a.max(v.abs()))
    }

    fn check(&self, domain: &Domain) -> Result<()> {
        for j in 0..self.len() {
            let (r, u, t) = (self.rho[j], self.u[j], self.theta[j]);
            if !(r.is_finite() && u.is_finite() && t.is_finite()) {
                return Err(Error::NonFinite {
                    context: format!("field at grid point {j}"),
                });
            }
            if !(r > domain.rho_min && t > domain.theta_min) {
                return Err(Error::DomainViolation { rho: r, theta: t });
            }
        }
        Ok(())
    }
}

/// Spectral coefficients of a three-component field.
pub type Modes = [Vec<Complex64>; 3];

fn zero_modes(n: usize) -> Modes {
    std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); n])
}

/// Field with its spectral density gradient.
#[derive(Debug, Clone)]
struct Recovered {
    field: StateField,
    rho_x: Vec<f64>,
}

/// Derivatives needed by the total flux.
struct Gradients {
    rho_x: Vec<f64>,
    rho_xx: Vec<f64>,
    u_x: Vec<f64>,
    theta_x: Vec<f64>,
}

fn gradients(grid: &PeriodicGrid, field: &StateField, rho_x: Option<&[f64]>) -> Gradients {
    let rh = grid.forward(&field.rho);
    let uh = grid.forward(&field.u);
    let th = grid.forward(&field.theta);
    Gradients {
        rho_x: rho_x.map_or_else(|| grid.derivative(&rh, 1), <[f64]>::to_vec),
        rho_xx: grid.derivative(&rh, 2),
        u_x: grid.derivative(&uh, 1),
        theta_x: grid.derivative(&th, 1),
    }
}

/// Pointwise total flux `Phi`.
fn total_flux(eos: &EquationOfState, field: &StateField, d: &Gradients) -> Vec<Vector3<f64>> {
    (0..field.len())
        .into_par_iter()
        .map(|j| {
            let ext = ExtendedState {
                rho: field.rho[j],
                u: field.u[j],
                theta: field.theta[j],
                rho_x: d.rho_x[j],
                u_x: d.u_x[j],
                theta_x: d.theta_x[j],
                rho_xx: d.rho_xx[j],
                ..Default::default()
            };
            let q = eos.at(ext.rho, ext.theta);
            flux_from(&q, &ext).total_flux(&ext)
        })
        .collect()
}

fn split(v: &[Vector3<f64>]) -> [Vec<f64>; 3] {
    std::array::from_fn(|c| v.iter().map(|x| x[c]).collect())
}

/// Time derivative `(rho_t, u_t, theta_t)` of a field, from the conservation
/// form through the chain rule.
pub fn rhs(eos: &EquationOfState, field: &StateField) -> Result<StateField> {
    let grid = PeriodicGrid::new(field.len(), field.length)?;
    field.check(&Domain {
        rho_min: 0.0,
        theta_min: 0.0,
        rho_max: f64::INFINITY,
        theta_max: f64::INFINITY,
    })?;
    let d = gradients(&grid, field, None);
    let phi = split(&total_flux(eos, field, &d));
    let phi_x: [Vec<f64>; 3] = std::array::from_fn(|c| grid.derivative(&grid.forward(&phi[c]), 1));
    let rho_t = phi_x[0].clone();
    let rho_tx = grid.derivative(&grid.forward(&rho_t), 1);
    let n = field.len();
    let mut out = StateField {
        length: field.length,
        rho: rho_t,
        u: vec![0.0; n],
        theta: vec![0.0; n],
    };
    for j in 0..n {
        let (rho, u, rx) = (field.rho[j], field.u[j], d.rho_x[j]);
        let q = eos.at(rho, field.theta[j]);
        let rt = out.rho[j];
        let ut = (phi_x[1][j] - u * rt) / rho;
        let tot = q.eps(rx) + 0.5 * u * u;
        let et = phi_x[2][j];
        let tt = (et
            - rt * tot
            - rho * u * ut
            - rho * q.eps_rho(rx) * rt
            - rho * q.eps_grad(rx) * rho_tx[j])
            / (rho * q.eps_theta(rx));
        out.u[j] = ut;
        out.theta[j] = tt;
    }
    Ok(out)
}

/// Conserved integrals of a field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Integrals {
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
    pub entropy: f64,
}

/// Precomputed linear data for one equilibrium and grid.
#[derive(Debug, Clone)]
pub struct Solver {
    pub eos: EquationOfState,
    pub equilibrium: State,
    pub coeffs: EquilibriumCoefficients,
    pub grid: PeriodicGrid,
    pub domain: Domain,
    f0bar: Vector3<f64>,
    df: Matrix3<f64>,
    df_inv: Matrix3<f64>,
    symbol: Vec<CMatrix3>,
    propagators: Vec<ModePropagator>,
}

/// Cached `exp(-h M)` and `exp(-h M / 2)` per mode.
#[derive(Debug, Clone)]
struct Exponentials {
    full: Vec<CMatrix3>,
    half: Vec<CMatrix3>,
}

fn apply(mats: &[CMatrix3], w: &Modes) -> Modes {
    let n = mats.len();
    let mut out = zero_modes(n);
    for j in 0..n {
        let m = &mats[j];
        for r in 0..3 {
            out[r][j] = m[(r, 0)] * w[0][j] + m[(r, 1)] * w[1][j] + m[(r, 2)] * w[2][j];
        }
    }
    out
}

/// `a + s b`.
fn axpy(a: &Modes, s: f64, b: &Modes) -> Modes {
    std::array::from_fn(|c| a[c].iter().zip(&b[c]).map(|(x, y)| x + y * s).collect())
}

impl Solver {
    pub fn new(
        eos: &EquationOfState,
        equilibrium: &State,
        n: usize,
        length: f64,
        domain: Domain,
    ) -> Result<Self> {
        let grid = PeriodicGrid::new(n, length)?;
        let equilibrium = State {
            rho_x: 0.0,
            ..*equilibrium
        };
        domain.check(equilibrium.rho, equilibrium.theta)?;
        let coeffs = EquilibriumCoefficients::new(eos, &equilibrium);
        let symbol: Vec<CMatrix3> = grid
            .xi
            .iter()
            .map(|&k| evolution_symbol(&coeffs, k))
            .collect();
        let propagators = grid
            .xi
            .par_iter()
            .map(|&k| ModePropagator::new(&coeffs, k))
            .collect();
        Ok(Solver {
            eos: eos.clone(),
            equilibrium,
            f0bar: coeffs.maps.f0,
            df: coeffs.maps.jac_f0,
            df_inv: coeffs.maps.jac_f0_inv,
            coeffs,
            grid,
            domain,
            symbol,
            propagators,
        })
    }

    pub fn n(&self) -> usize {
        self.grid.n
    }

    fn check_field(&self, field: &StateField) -> Result<()> {
        if field.len() != self.n() || field.u.len() != self.n() || field.theta.len() != self.n() {
            return Err(invalid("field", format!("expected {} points", self.n())));
        }
        if (field.length - self.grid.length).abs() > 1e-12 * self.grid.length {
            return Err(invalid("field", "period does not match the solver grid"));
        }
        field.check(&self.domain)
    }

    /// Pointwise `W` of a field.
    pub fn w_field(&self, field: &StateField) -> Result<[Vec<f64>; 3]> {
        self.check_field(field)?;
        let rho_x = self.grid.derivative(&self.grid.forward(&field.rho), 1);
        Ok(split(&self.w_points(field, &rho_x)))
    }

    fn w_points(&self, field: &StateField, rho_x: &[f64]) -> Vec<Vector3<f64>> {
        (0..field.len())
            .into_par_iter()
            .map(|j| {
                let ext = ExtendedState {
                    rho: field.rho[j],
                    u: field.u[j],
                    theta: field.theta[j],
                    rho_x: rho_x[j],
                    ..Default::default()
                };
                let q = self.eos.at(ext.rho, ext.theta);
                self.df_inv * (conserved_from(&q, &ext) - self.f0bar)
            })
            .collect()
    }

    /// Spectral coefficients of `W`.
    pub fn to_modes(&self, field: &StateField) -> Result<Modes> {
        let w = self.w_field(field)?;
        let mut m: Modes = std::array::from_fn(|c| self.grid.forward(&w[c]));
        self.project(&mut m);
        Ok(m)
    }

    /// Projects onto coefficients of real fields with no Nyquist content.
    ///
    /// Rounding in the per-mode exponentials breaks the conjugate symmetry
    /// between `xi` and `-xi`; the imaginary part of the physical field is
    /// invisible to the flux but not to the linear part of `N`, so it must
    /// not be allowed to accumulate.
    fn project(&self, m: &mut Modes) {
        let n = self.n();
        for c in m.iter_mut() {
            c[0].im = 0.0;
            c[n / 2] = Complex64::new(0.0, 0.0);
            for j in 1..n / 2 {
                let a = 0.5 * (c[j] + c[n - j].conj());
                c[j] = a;
                c[n - j] = a.conj();
            }
        }
    }

    /// Primitive fields from `W`, with temperature found by Newton iteration
    /// on the energy starting from `guess`.
    fn recover(&self, w: &Modes, guess: &[f64]) -> Result<Recovered> {
        let rho_x = self.grid.derivative(&w[0], 1);
        let wr: [Vec<f64>; 3] = std::array::from_fn(|c| self.grid.inverse(&w[c]));
        let pts: Vec<Result<(f64, f64, f64)>> = (0..self.n())
            .into_par_iter()
            .map(|j| {
                let q = self.f0bar + self.df * Vector3::new(wr[0][j], wr[1][j], wr[2][j]);
                let rho = q[0];
                if !rho.is_finite() {
                    return Err(Error::NonFinite {
                        context: format!("density at grid point {j}"),
                    });
                }
                if rho <= self.domain.rho_min {
                    return Err(Error::DomainViolation {
                        rho,
                        theta: guess[j],
                    });
                }
                let u = q[1] / rho;
                let target = q[2] / rho - 0.5 * u * u;
                let theta = self.newton_theta(rho, rho_x[j], target, guess[j])?;
                Ok((rho, u, theta))
            })
            .collect();
        let n = self.n();
        let mut field = StateField {
            length: self.grid.length,
            rho: Vec::with_capacity(n),
            u: Vec::with_capacity(n),
            theta: Vec::with_capacity(n),
        };
        for p in pts {
            let (r, u, t) = p?;
            field.rho.push(r);
            field.u.push(u);
            field.theta.push(t);
        }
        Ok(Recovered { field, rho_x })
    }

    fn newton_theta(&self, rho: f64, rho_x: f64, target: f64, guess: f64) -> Result<f64> {
        let fail = || Error::TemperatureRecovery {
            rho,
            energy: target,
        };
        let mut theta = if guess > self.domain.theta_min && guess.is_finite() {
            guess
        } else {
            self.equilibrium.theta
        };
        for _ in 0..NEWTON_MAX_ITER {
            let q = self.eos.at(rho, theta);
            let f = q.eps(rho_x) - target;
            let d = q.eps_theta(rho_x);
            if !(d > 0.0) {
                return Err(fail());
            }
            let mut next = theta - f / d;
            if next <= 0.0 {
                next = 0.5 * theta;
            }
            if (next - theta).abs() <= NEWTON_TOL * theta {
                if next <= self.domain.theta_min {
                    return Err(Error::DomainViolation { rho, theta: next });
                }
                return Ok(next);
            }
            theta = next;
        }
        Err(fail())
    }

    /// Projected nonlinear part `P (Df0bar^{-1} i xi Phi + M W)`.
    fn nonlinear_from(&self, w: &Modes, rec: &Recovered) -> Modes {
        let d = gradients(&self.grid, &rec.field, Some(&rec.rho_x));
        let phi = split(&total_flux(&self.eos, &rec.field, &d));
        let ph: [Vec<Complex64>; 3] = std::array::from_fn(|c| self.grid.forward(&phi[c]));
        let mut out = zero_modes(self.n());
        for j in 0..self.n() {
            if !self.grid.dealias[j] {
                continue;
            }
            let ik = Complex64::new(0.0, self.grid.xi[j]);
            let m = &self.symbol[j];
            for r in 0..3 {
                let mut acc = Complex64::new(0.0, 0.0);
                for c in 0..3 {
                    acc += self.df_inv[(r, c)] * ik * ph[c][j] + m[(r, c)] * w[c][j];
                }
                out[r][j] = acc;
            }
        }
        out
    }

    fn nonlinear(&self, w: &Modes, guess: &[f64]) -> Result<Modes> {
        let mut w = w.clone();
        self.project(&mut w);
        let rec = self.recover(&w, guess)?;
        Ok(self.nonlinear_from(&w, &rec))
    }

    fn full_rhs(&self, w: &Modes, guess: &[f64], rec: Option<&Recovered>) -> Result<Modes> {
        let nl = match rec {
            Some(r) => self.nonlinear_from(w, r),
            None => self.nonlinear(w, guess)?,
        };
        let lin = apply(&self.symbol, w);
        Ok(axpy(&nl, -1.0, &lin))
    }

    fn exponentials(&self, dt: f64) -> Exponentials {
        let pairs: Vec<(CMatrix3, CMatrix3)> = self
            .propagators
            .par_iter()
            .map(|p| (p.matrix(dt), p.matrix(0.5 * dt)))
            .collect();
        let (full, half) = pairs.into_iter().unzip();
        Exponentials { full, half }
    }

    /// Heuristic largest stable step for `scheme` at `field`.
    ///
    /// RK4 is limited by the spectral radius of the frozen-coefficient symbol
    /// at the largest wavenumber; the integrating-factor scheme only by its
    /// deviation from the equilibrium symbol at the largest dealiased
    /// wavenumber.
    pub fn stability_bound(&self, field: &StateField, scheme: Scheme) -> f64 {
        let (xi, subtract) = match scheme {
            Scheme::Rk4 => (self.grid.xi_max(), false),
            Scheme::IfRk4 => (self.grid.xi_dealiased(), true),
        };
        let mbar = evolution_symbol(&self.coeffs, xi);
        let radius = (0..field.len())
            .into_par_iter()
            .map(|j| {
                let s = State::new(field.rho[j], field.u[j], field.theta[j]);
                let c = EquilibriumCoefficients::new(&self.eos, &s);
                let mut m = evolution_symbol(&c, xi);
                if subtract {
                    m -= mbar;
                }
                complex_eigenvalues(&m)
                    .map(|ev| ev.iter().fold(0.0_f64, |a, z| a.max(z.norm())))
                    .unwrap_or(f64::INFINITY)
            })
            .reduce(|| 0.0, f64::max);
        if radius == 0.0 {
            f64::INFINITY
        } else {
            RK4_STABILITY / radius
        }
    }

    fn advance(
        &self,
        w: &Modes,
        rec: &Recovered,
        scheme: Scheme,
        exps: Option<&Exponentials>,
        dt: f64,
    ) -> Result<(Modes, Recovered)> {
        let g = &rec.field.theta;
        let h = dt;
        let mut next = match scheme {
            Scheme::Rk4 => {
                let k1 = self.full_rhs(w, g, Some(rec))?;
                let k2 = self.full_rhs(&axpy(w, 0.5 * h, &k1), g, None)?;
                let k3 = self.full_rhs(&axpy(w, 0.5 * h, &k2), g, None)?;
                let k4 = self.full_rhs(&axpy(w, h, &k3), g, None)?;
                let s = axpy(&axpy(&k1, 2.0, &k2), 2.0, &k3);
                axpy(w, h / 6.0, &axpy(&s, 1.0, &k4))
            }
            Scheme::IfRk4 => {
                let e = exps.expect("integrating-factor step needs exponentials");
                let k1 = self.nonlinear_from(w, rec);
                let ew = apply(&e.full, w);
                let hw = apply(&e.half, w);
                let k2 = self.nonlinear(&apply(&e.half, &axpy(w, 0.5 * h, &k1)), g)?;
                let k3 = self.nonlinear(&axpy(&hw, 0.5 * h, &k2), g)?;
                let k4 = self.nonlinear(&axpy(&ew, h, &apply(&e.half, &k3)), g)?;
                let mid = apply(&e.half, &axpy(&k2, 1.0, &k3));
                let s = axpy(&axpy(&apply(&e.full, &k1), 2.0, &mid), 1.0, &k4);
                axpy(&ew, h / 6.0, &s)
            }
        };
        self.project(&mut next);
        let r = self.recover(&next, g)?;
        Ok((next, r))
    }

    /// One step of size `dt` from `field`.
    pub fn step(&self, field: &StateField, dt: f64, scheme: Scheme) -> Result<StateField> {
        if !(dt >= 0.0 && dt.is_finite()) {
            return Err(invalid("dt", "must be finite and >= 0"));
        }
        self.check_field(field)?;
        if dt == 0.0 {
            return Ok(field.clone());
        }
        let bound = self.stability_bound(field, scheme);
        if dt > bound {
            return Err(Error::StepRejected { dt, bound });
        }
        let w = self.to_modes(field)?;
        let rec = self.recover(&w, &field.theta)?;
        let exps = (scheme == Scheme::IfRk4).then(|| self.exponentials(dt));
        let (_, r) = self.advance(&w, &rec, scheme, exps.as_ref(), dt)?;
        Ok(r.field)
    }

    /// Mass, momentum, total energy and total entropy.
    pub fn integrals(&self, field: &StateField) -> Result<Integrals> {
        self.check_field(field)?;
        let rho_x = self.grid.derivative(&self.grid.forward(&field.rho), 1);
        Ok(self.integrals_with(field, &rho_x))
    }

    fn integrals_with(&self, field: &StateField, rho_x: &[f64]) -> Integrals {
        let pts: Vec<[f64; 4]> = (0..field.len())
            .into_par_iter()
            .map(|j| {
                let (rho, u) = (field.rho[j], field.u[j]);
                let q = self.eos.at(rho, field.theta[j]);
                [
                    rho,
                    rho * u,
                    rho * (q.eps(rho_x[j]) + 0.5 * u * u),
                    rho * q.entropy(rho_x[j]),
                ]
            })
            .collect();
        let dx = self.grid.dx();
        let mut s = [0.0; 4];
        for p in &pts {
            for k in 0..4 {
                s[k] += p[k];
            }
        }
        Integrals {
            mass: dx * s[0],
            momentum: dx * s[1],
            energy: dx * s[2],
            entropy: dx * s[3],
        }
    }

    fn entropy_with(&self, field: &StateField, rho_x: &[f64]) -> f64 {
        let v: Vec<f64> = (0..field.len())
            .into_par_iter()
            .map(|j| field.rho[j] * self.eos.at(field.rho[j], field.theta[j]).entropy(rho_x[j]))
            .collect();
        self.grid.integrate(&v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermo::IdealGas;

    fn setup(n: usize, l: f64) -> Solver {
        Solver::new(
            &IdealGas::REFERENCE.build().unwrap(),
            &State::new(1.0, 0.0, 1.0),
            n,
            l,
            Domain::default(),
        )
        .unwrap()
    }

    fn bump(s: &Solver, a: f64) -> StateField {
        let mut f = StateField::constant(&s.equilibrium, s.n(), s.grid.length);
        let c = 0.5 * s.grid.length;
        for j in 0..s.n() {
            let x = s.grid.x(j) - c;
            f.rho[j] += a * (-x * x / 4.0).exp();
            f.u[j] += 0.5 * a * (-x * x / 4.0).exp() * x;
        }
        f
    }

    #[test]
    fn constant_field_is_stationary() {
        let s = setup(64, 20.0);
        let f = StateField::constant(&s.equilibrium, 64, 20.0);
        let d = rhs(&s.eos, &f).unwrap();
        assert!(d
            .rho
            .iter()
            .chain(&d.u)
            .chain(&d.theta)
            .all(|v| v.abs() < 1e-14));
        for scheme in [Scheme::Rk4, Scheme::IfRk4] {
            let mut g = f.clone();
            for _ in 0..5 {
                g = s.step(&g, 1e-3, scheme).unwrap();
            }
            assert!(g.rho.iter().all(|v| (v - 1.0).abs() < 1e-14));
            assert!(g.theta.iter().all(|v| (v - 1.0).abs() < 1e-14));
        }
    }

    #[test]
    fn zero_step_is_identity() {
        let s = setup(64, 20.0);
        let f = bump(&s, 1e-2);
        assert_eq!(s.step(&f, 0.0, Scheme::IfRk4).unwrap(), f);
        assert!(s.step(&f, -1e-3, Scheme::IfRk4).is_err());
    }

    #[test]
    fn roundtrip_through_modes() {
        let s = setup(128, 20.0);
        let f = bump(&s, 1e-1);
        let w = s.to_modes(&f).unwrap();
        let r = s.recover(&w, &vec![1.0; 128]).unwrap();
        for j in 0..128 {
            assert!((r.field.rho[j] - f.rho[j]).abs() < 1e-13);
            assert!((r.field.u[j] - f.u[j]).abs() < 1e-13);
            assert!((r.field.theta[j] - f.theta[j]).abs() < 1e-12);
        }
        let wf = s.w_field(&f).unwrap();
        for (w, rho) in wf[0].iter().zip(&f.rho) {
            assert_eq!(*w, rho - 1.0);
        }
    }

    #[test]
    fn step_rejected_above_bound() {
        let s = setup(64, 20.0);
        let f = bump(&s, 1e-2);
        let b = s.stability_bound(&f, Scheme::Rk4);
        assert!(b.is_finite() && b > 0.0);
        match s.step(&f, 2.0 * b, Scheme::Rk4) {
            Err(Error::StepRejected { dt, bound }) => {
                assert_eq!(dt, 2.0 * b);
                assert_eq!(bound, b);
            }
            other => panic!("{other:?}"),
        }
        let eq = StateField::constant(&s.equilibrium, 64, 20.0);
        assert_eq!(s.stability_bound(&eq, Scheme::IfRk4), f64::INFINITY);
    }

    #[test]
    fn domain_violation_reported() {
        let s = setup(64, 20.0);
        let mut f = bump(&s, 1e-2);
        f.rho[3] = 0.05;
        assert!(matches!(s.to_modes(&f), Err(Error::DomainViolation { .. })));
    }

    #[test]
    fn mass_rate_vanishes() {
        let s = setup(128, 30.0);
        let f = bump(&s, 5e-2);
        let d = rhs(&s.eos, &f).unwrap();
        assert!(s.grid.integrate(&d.rho).abs() < 1e-13);
    }
}
