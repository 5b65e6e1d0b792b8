//! Convex entropy extension of the capillarity-free system.
//!
//! In the state variables `U = (rho, u, theta)` the heat-conducting viscous
//! system reads `f0(U)_t + f1(U)_x = (G(U) U_x)_x` with
//!
//! ```text
//! f0 = (rho, rho u, rho (e + u^2/2))
//! f1 = (rho u, rho u^2 + p, rho u (e + u^2/2) + p u)
//! ```
//!
//! The entropy `E = -rho eta` with flux `Theta = -rho u eta` is strictly
//! convex in the conserved variables; its gradient `Z` and Hessian
//! `D_U Z (D_U f0)^{-1}` symmetrize the system into `(A0, A1, B)`.

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::linalg::{asymmetry, max_abs, min_sym_eigenvalue};
use crate::thermo::{
    ConditionReport, Domain, EquationOfState, Potentials, ResidualTracker, SignTracker, State,
};

/// Flux, viscosity tensor and Jacobians of the capillarity-free system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NsfMaps {
    pub f0: Vector3<f64>,
    pub f1: Vector3<f64>,
    pub g_visc: Matrix3<f64>,
    pub jac_f0: Matrix3<f64>,
    pub jac_f0_inv: Matrix3<f64>,
    pub jac_f1: Matrix3<f64>,
    pub z: Vector3<f64>,
    pub jac_z: Matrix3<f64>,
}

impl NsfMaps {
    pub fn new(eos: &EquationOfState, s: &State) -> Self {
        Self::from_potentials(&eos.at(s.rho, s.theta), s.u)
    }

    pub fn from_potentials(q: &Potentials, u: f64) -> Self {
        let (rho, theta) = (q.rho, q.theta);
        let (p, p_r, p_t) = (q.p(), q.p_rho(), q.p_theta());
        let (e, e_r, e_t, eta) = (q.e(), q.e_rho(), q.e_theta(), q.eta());
        let kin = 0.5 * u * u;
        let a = e + kin + rho * e_r;
        let b = e - kin + rho * e_r;

        let f0 = Vector3::new(rho, rho * u, rho * (e + kin));
        let f1 = Vector3::new(rho * u, rho * u * u + p, rho * u * (e + kin) + p * u);
        let g_visc = Matrix3::new(0.0, 0.0, 0.0, 0.0, q.mu, 0.0, 0.0, q.mu * u, q.alpha);
        let jac_f0 = Matrix3::new(1.0, 0.0, 0.0, u, rho, 0.0, a, rho * u, rho * e_t);
        let ret = rho * e_t;
        let jac_f0_inv = Matrix3::new(
            1.0,
            0.0,
            0.0,
            -u / rho,
            1.0 / rho,
            0.0,
            (kin - e - rho * e_r) / ret,
            -u / ret,
            1.0 / ret,
        );
        let jac_f1 = Matrix3::new(
            u,
            rho,
            0.0,
            u * u + p_r,
            2.0 * rho * u,
            p_t,
            u * (e + kin) + rho * u * e_r + u * p_r,
            rho * (e + kin) + rho * u * u + p,
            rho * u * e_t + u * p_t,
        );
        let z = Vector3::new(-eta + (e - kin + p / rho) / theta, u / theta, -1.0 / theta);
        let jac_z = Matrix3::new(
            p_r / rho,
            -u,
            -b / theta,
            0.0,
            1.0,
            -u / theta,
            0.0,
            0.0,
            1.0 / theta,
        ) / theta;
        NsfMaps {
            f0,
            f1,
            g_visc,
            jac_f0,
            jac_f0_inv,
            jac_f1,
            z,
            jac_z,
        }
    }
}

/// Entropy `E = -rho eta` and entropy flux `Theta = -rho u eta`.
#[derive(Debug, Clone, Copy, Default)]
pub struct EntropyPair;

impl EntropyPair {
    pub fn entropy(&self, eos: &EquationOfState, s: &State) -> f64 {
        -s.rho * eos.at(s.rho, s.theta).eta()
    }

    pub fn flux(&self, eos: &EquationOfState, s: &State) -> f64 {
        -s.rho * s.u * eos.at(s.rho, s.theta).eta()
    }
}

/// `Z = (-eta + (e - u^2/2 + p/rho)/theta, u/theta, -1/theta)`.
pub fn z_map(eos: &EquationOfState, s: &State) -> Vector3<f64> {
    NsfMaps::new(eos, s).z
}

/// Hessian of the entropy in conserved variables, `D_U Z (D_U f0)^{-1}`.
pub fn hessian_entropy(eos: &EquationOfState, s: &State) -> Matrix3<f64> {
    let m = NsfMaps::new(eos, s);
    m.jac_z * m.jac_f0_inv
}

/// Closed-form symmetric coefficients `(A0, A1, B)` at a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientMatrices {
    pub a0: Matrix3<f64>,
    pub a1: Matrix3<f64>,
    pub b: Matrix3<f64>,
}

pub fn coefficient_matrices(eos: &EquationOfState, s: &State) -> CoefficientMatrices {
    coefficient_matrices_from(&eos.at(s.rho, s.theta), s.u)
}

pub(crate) fn coefficient_matrices_from(q: &Potentials, u: f64) -> CoefficientMatrices {
    let (rho, theta) = (q.rho, q.theta);
    let (p_r, p_t, e_t) = (q.p_rho(), q.p_theta(), q.e_theta());
    let a0 = Matrix3::from_diagonal(&Vector3::new(p_r / rho, rho, rho * e_t / theta)) / theta;
    let a1 = Matrix3::new(
        u * p_r / rho,
        p_r,
        0.0,
        p_r,
        u * rho,
        p_t,
        0.0,
        p_t,
        rho * u * e_t / theta,
    ) / theta;
    let b = Matrix3::from_diagonal(&Vector3::new(0.0, q.mu, q.alpha / theta)) / theta;
    CoefficientMatrices { a0, a1, b }
}

/// A flux `f1` with its Jacobian, so that the entropy-flux compatibility can
/// be checked against alternatives.
pub trait FluxFunction {
    fn flux(&self, eos: &EquationOfState, s: &State) -> Vector3<f64>;
    fn jacobian(&self, eos: &EquationOfState, s: &State) -> Matrix3<f64>;
}

/// The physical flux of the capillarity-free system.
#[derive(Debug, Clone, Copy, Default)]
pub struct NsfFlux;

impl FluxFunction for NsfFlux {
    fn flux(&self, eos: &EquationOfState, s: &State) -> Vector3<f64> {
        NsfMaps::new(eos, s).f1
    }

    fn jacobian(&self, eos: &EquationOfState, s: &State) -> Matrix3<f64> {
        NsfMaps::new(eos, s).jac_f1
    }
}

/// Central-difference Jacobian of a vector map of `(rho, u, theta)`.
pub fn fd_jacobian(s: &State, h: f64, mut f: impl FnMut(&State) -> Vector3<f64>) -> Matrix3<f64> {
    let mut j = Matrix3::zeros();
    for c in 0..3 {
        let (mut sp, mut sm) = (*s, *s);
        match c {
            0 => {
                sp.rho += h;
                sm.rho -= h;
            }
            1 => {
                sp.u += h;
                sm.u -= h;
            }
            _ => {
                sp.theta += h;
                sm.theta -= h;
            }
        }
        j.set_column(c, &((f(&sp) - f(&sm)) / (2.0 * h)));
    }
    j
}

/// Central-difference gradient of a scalar map of `(rho, u, theta)`.
pub fn fd_gradient(s: &State, h: f64, mut f: impl FnMut(&State) -> f64) -> Vector3<f64> {
    let j = fd_jacobian(s, h, |st| Vector3::new(f(st), 0.0, 0.0));
    j.row(0).transpose()
}

/// Relative residual of `D_U Theta = Z^T D_U f1` at one state.
pub fn flux_condition_residual(
    eos: &EquationOfState,
    s: &State,
    fd_step: f64,
    flux: &dyn FluxFunction,
) -> f64 {
    let pair = EntropyPair;
    let d_theta = fd_gradient(s, fd_step, |st| pair.flux(eos, st));
    let z = z_map(eos, s);
    let rhs = flux.jacobian(eos, s).transpose() * z;
    (d_theta - rhs).amax() / d_theta.amax().max(1.0)
}

/// Tolerance for exact matrix identities.
pub const MATRIX_TOL: f64 = 1e-12;
/// Tolerance for finite-difference checks.
pub const FD_CHECK_TOL: f64 = 1e-6;

/// Draws `n` interior states of `domain` with velocity in `[-1, 1]`.
pub fn sample_states(domain: &Domain, n: usize, seed: u64) -> Vec<State> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pad_r = 1e-3 * (domain.rho_max - domain.rho_min);
    let pad_t = 1e-3 * (domain.theta_max - domain.theta_min);
    (0..n)
        .map(|_| {
            State::new(
                rng.random_range(domain.rho_min + pad_r..domain.rho_max),
                rng.random_range(-1.0..1.0),
                rng.random_range(domain.theta_min + pad_t..domain.theta_max),
            )
        })
        .collect()
}

/// Certifies the entropy pair at `n_samples` seeded random states.
pub fn verify_entropy_pair(
    eos: &EquationOfState,
    domain: &Domain,
    n_samples: usize,
    fd_step: f64,
    seed: u64,
) -> Result<ConditionReport> {
    verify_entropy_pair_with_flux(eos, domain, n_samples, fd_step, seed, &NsfFlux)
}

/// As [`verify_entropy_pair`] with a user-supplied flux.
pub fn verify_entropy_pair_with_flux(
    eos: &EquationOfState,
    domain: &Domain,
    n_samples: usize,
    fd_step: f64,
    seed: u64,
    flux: &dyn FluxFunction,
) -> Result<ConditionReport> {
    if !(fd_step > 0.0 && fd_step.is_finite()) {
        return Err(invalid("fd_step", "must be > 0"));
    }
    if n_samples == 0 {
        return Err(invalid("n_samples", "must be >= 1"));
    }
    let mut hess_sym = ResidualTracker::new("hessian symmetric", MATRIX_TOL);
    let mut hess_pd = SignTracker::new("hessian positive definite", true);
    let mut a0_sym = ResidualTracker::new("A0 symmetric", MATRIX_TOL);
    let mut a1_sym = ResidualTracker::new("A1 symmetric", MATRIX_TOL);
    let mut b_sym = ResidualTracker::new("B symmetric", MATRIX_TOL);
    let mut b_psd = SignTracker::new("B positive semidefinite", false);
    let mut closed = ResidualTracker::new("congruence matches closed forms", MATRIX_TOL);
    let mut inverse = ResidualTracker::new("jac_f0 inverse", MATRIX_TOL);
    let mut det = ResidualTracker::new("det jac_f0 = rho^2 e_theta", MATRIX_TOL);
    let mut jac_fd = ResidualTracker::new("jacobians match finite differences", FD_CHECK_TOL);
    let mut flux_cond = ResidualTracker::new("flux condition", FD_CHECK_TOL);

    for s in sample_states(domain, n_samples, seed) {
        let at = (s.rho, s.theta);
        let q = eos.at(s.rho, s.theta);
        let m = NsfMaps::from_potentials(&q, s.u);
        let h = m.jac_z * m.jac_f0_inv;
        let rel = |x: &Matrix3<f64>| asymmetry(x) / max_abs(x).max(f64::MIN_POSITIVE);
        hess_sym.push(rel(&h), at);
        hess_pd.push(min_sym_eigenvalue(&h), at);

        let a0 = m.jac_f0.transpose() * h * m.jac_f0;
        let a1 = m.jac_f0.transpose() * h * flux.jacobian(eos, &s);
        let b = m.jac_f0.transpose() * h * m.g_visc;
        a0_sym.push(rel(&a0), at);
        a1_sym.push(rel(&a1), at);
        b_sym.push(asymmetry(&b) / max_abs(&b).max(1.0), at);
        b_psd.push(min_sym_eigenvalue(&b) + MATRIX_TOL * max_abs(&b), at);

        let c = coefficient_matrices_from(&q, s.u);
        let dev = [(a0, c.a0), (a1, c.a1), (b, c.b)]
            .iter()
            .map(|(x, y)| max_abs(&(x - y)) / max_abs(y).max(1.0))
            .fold(0.0, f64::max);
        closed.push(dev, at);

        inverse.push(
            max_abs(&(m.jac_f0 * m.jac_f0_inv - Matrix3::identity())),
            at,
        );
        let expect = s.rho * s.rho * q.e_theta();
        det.push((m.jac_f0.determinant() - expect).abs() / expect.abs(), at);

        let fd0 = fd_jacobian(&s, fd_step, |st| NsfMaps::new(eos, st).f0);
        let fd1 = fd_jacobian(&s, fd_step, |st| flux.flux(eos, st));
        let fdz = fd_jacobian(&s, fd_step, |st| z_map(eos, st));
        let jr = |a: &Matrix3<f64>, b: &Matrix3<f64>| max_abs(&(a - b)) / max_abs(a).max(1.0);
        jac_fd.push(
            jr(&m.jac_f0, &fd0)
                .max(jr(&flux.jacobian(eos, &s), &fd1))
                .max(jr(&m.jac_z, &fdz)),
            at,
        );
        flux_cond.push(flux_condition_residual(eos, &s, fd_step, flux), at);
    }

    Ok(ConditionReport {
        samples: n_samples,
        conditions: vec![
            hess_sym.finish(),
            hess_pd.finish(),
            a0_sym.finish(),
            a1_sym.finish(),
            b_sym.finish(),
            b_psd.finish(),
            closed.finish(),
            inverse.finish(),
            det.finish(),
            jac_fd.finish(),
            flux_cond.finish(),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermo::IdealGas;

    fn reference() -> EquationOfState {
        IdealGas::REFERENCE.build().unwrap()
    }

    #[test]
    fn z_at_reference_state() {
        let eos = reference();
        let eta = eos.at(1.0, 1.0).eta();
        let z = z_map(&eos, &State::new(1.0, 0.0, 1.0));
        assert!((z[0] - (-eta + 2.5)).abs() < 1e-15);
        assert_eq!(z[1], 0.0);
        assert_eq!(z[2], -1.0);
        let z2 = z_map(&eos, &State::new(1.4, 0.3, 2.0));
        assert_eq!(z2[2], -0.5);
    }

    #[test]
    fn congruence_gives_a0_at_reference() {
        let eos = reference();
        let s = State::new(1.0, 0.0, 1.0);
        let m = NsfMaps::new(&eos, &s);
        let a0 = m.jac_f0.transpose() * hessian_entropy(&eos, &s) * m.jac_f0;
        let expect = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 1.5));
        assert!(max_abs(&(a0 - expect)) < 1e-14);
    }

    #[test]
    fn reference_closed_forms() {
        let c = coefficient_matrices(&reference(), &State::new(1.0, 0.0, 1.0));
        let a0 = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 1.5));
        let a1 = Matrix3::new(0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0);
        let b = Matrix3::from_diagonal(&Vector3::new(0.0, 1.0, 1.0));
        assert!(max_abs(&(c.a0 - a0)) < 1e-15);
        assert!(max_abs(&(c.a1 - a1)) < 1e-15);
        assert!(max_abs(&(c.b - b)) < 1e-15);
    }

    #[test]
    fn velocity_enters_only_transport_diagonal() {
        let eos = reference();
        let c0 = coefficient_matrices(&eos, &State::new(1.2, 0.0, 0.9));
        let c1 = coefficient_matrices(&eos, &State::new(1.2, 0.7, 0.9));
        let d = c1.a1 - c0.a1;
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(d[(i, j)], 0.0);
                }
            }
        }
        let c2 = coefficient_matrices(&eos, &State::new(1.2, 1.4, 0.9));
        assert!(((c2.a1 - c0.a1)[(0, 0)] - 2.0 * d[(0, 0)]).abs() < 1e-14);
        assert_eq!(c1.b[(0, 0)], 0.0);
    }

    #[test]
    fn inverse_and_determinant() {
        let eos = reference();
        let s = State::new(0.7, -0.4, 2.2);
        let m = NsfMaps::new(&eos, &s);
        assert!(max_abs(&(m.jac_f0 * m.jac_f0_inv - Matrix3::identity())) < 1e-14);
        let et = eos.at(0.7, 2.2).e_theta();
        assert!((m.jac_f0.determinant() - 0.49 * et).abs() < 1e-14);
    }

    #[test]
    fn reference_pair_verifies() {
        let r = verify_entropy_pair(&reference(), &Domain::default(), 50, 1e-5, 7).unwrap();
        assert!(r.all_passed(), "{:?}", r.failures().collect::<Vec<_>>());
        assert!(r.get("A0 symmetric").unwrap().worst <= 1e-12);
    }

    #[derive(Debug)]
    struct NoPressure;

    impl FluxFunction for NoPressure {
        fn flux(&self, eos: &EquationOfState, s: &State) -> Vector3<f64> {
            let e = eos.at(s.rho, s.theta).e();
            let u = s.u;
            Vector3::new(s.rho * u, s.rho * u * u, s.rho * u * (e + 0.5 * u * u))
        }

        fn jacobian(&self, eos: &EquationOfState, s: &State) -> Matrix3<f64> {
            fd_jacobian(s, 1e-6, |st| self.flux(eos, st))
        }
    }

    #[test]
    fn dropping_pressure_breaks_flux_condition() {
        let r = verify_entropy_pair_with_flux(
            &reference(),
            &Domain::default(),
            10,
            1e-5,
            3,
            &NoPressure,
        )
        .unwrap();
        assert!(!r.get("flux condition").unwrap().passed);
    }

    #[test]
    fn rejects_bad_step() {
        assert!(verify_entropy_pair(&reference(), &Domain::default(), 5, 0.0, 1).is_err());
    }
}
