//! Exact per-mode evolution of the linearized system `W_t + M(i xi) W = 0`.
//!
//! The whole line is represented by a quadrature over a graded wavenumber
//! grid. Each mode is propagated with the matrix exponential of the balanced
//! symbol, so arbitrarily late times cost the same as early ones.

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dissipativity::{balanced_symbol, lyapunov_check, TransformedTriplet};
use crate::error::{invalid, Error, Result};
use crate::fit::{fit_decay, DecayFit};
use crate::linalg::{complex_eigen, CMatrix3, CVector3};
use crate::symbols::EquilibriumCoefficients;

/// Default number of quadrature nodes.
pub const DEFAULT_NODES: usize = 4096;
/// Default cutoff `|xi| <= XI_MAX`.
pub const DEFAULT_XI_MAX: f64 = 200.0;
/// Default smallest node spacing, reached at the origin.
pub const DEFAULT_MIN_SPACING: f64 = 1e-4;
/// Eigenvector bases worse conditioned than this use the exponential fallback.
pub const MAX_EIGEN_CONDITION: f64 = 1e10;
/// Fits with an RMS log residual above this are flagged.
pub const FIT_RESIDUAL_THRESHOLD: f64 = 5e-2;

/// Nodes `xi = a sinh(s)` on a uniform `s` grid with trapezoid weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Quadrature {
    /// `n` nodes symmetric about 0 covering `[-xi_max, xi_max]`, spaced by
    /// roughly `min_spacing` at the origin.
    pub fn sinh_graded(n: usize, xi_max: f64, min_spacing: f64) -> Result<Self> {
        if n < 4 {
            return Err(invalid("nodes", "need at least 4"));
        }
        if !(xi_max > 0.0 && min_spacing > 0.0) {
            return Err(invalid("xi_max", "cutoff and spacing must be positive"));
        }
        let m = (n - 1) as f64;
        let target = 2.0 * xi_max / (min_spacing * m);
        if target <= 1.0 {
            return Err(invalid(
                "min_spacing",
                format!("{min_spacing} too coarse for {n} nodes up to {xi_max}"),
            ));
        }
        // sinh(s)/s = target
        let (mut lo, mut hi) = (1e-12_f64, 1.0_f64);
        while hi.sinh() / hi < target {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid.sinh() / mid < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let s_max = 0.5 * (lo + hi);
        let a = xi_max / s_max.sinh();
        let h = 2.0 * s_max / m;
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for j in 0..n {
            let s = -s_max + j as f64 * h;
            // exact antisymmetry of the node set
            let s = if 2 * j + 1 == n { 0.0 } else { s };
            nodes.push(a * s.sinh());
            let end = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            weights.push(end * h * a * s.cosh());
        }
        for j in 0..n / 2 {
            nodes[n - 1 - j] = -nodes[j];
            weights[n - 1 - j] = weights[j];
        }
        Ok(Quadrature { nodes, weights })
    }

    pub fn default_grid() -> Self {
        Self::sinh_graded(DEFAULT_NODES, DEFAULT_XI_MAX, DEFAULT_MIN_SPACING)
            .expect("default quadrature parameters are valid")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum w_j f(xi_j)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(*x))
            .sum()
    }
}

/// Fourier-side data `W(xi)` sampled on a quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralProfile {
    pub quadrature: Quadrature,
    pub modes: Vec<CVector3>,
}

impl SpectralProfile {
    pub fn from_fn(quadrature: Quadrature, f: impl Fn(f64) -> CVector3) -> Self {
        let modes = quadrature.nodes.iter().map(|&x| f(x)).collect();
        SpectralProfile { quadrature, modes }
    }

    /// `(e^{-xi^2}, e^{-xi^2}, e^{-xi^2})`.
    pub fn gaussian(quadrature: Quadrature) -> Self {
        Self::from_fn(quadrature, |x| {
            let g = Complex64::new((-x * x).exp(), 0.0);
            CVector3::new(g, g, g)
        })
    }

    /// `i xi e^{-xi^2}` in every component, which vanishes at the origin.
    pub fn zero_mass(quadrature: Quadrature) -> Self {
        Self::from_fn(quadrature, |x| {
            let g = Complex64::new(0.0, x * (-x * x).exp());
            CVector3::new(g, g, g)
        })
    }

    /// Linear interpolation of samples `(xi, W)` sorted by `xi`, zero outside
    /// their range. Samples covering only `xi >= 0` are mirrored by
    /// conjugation.
    pub fn from_samples(quadrature: Quadrature, samples: &[(f64, CVector3)]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(invalid("profile", "need at least two samples"));
        }
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(invalid(
                "profile",
                "wavenumbers must be strictly increasing",
            ));
        }
        if samples.iter().any(|(x, v)| {
            !x.is_finite() || v.iter().any(|z| !(z.re.is_finite() && z.im.is_finite()))
        }) {
            return Err(Error::NonFinite {
                context: "profile samples".into(),
            });
        }
        let mirror = samples[0].0 >= 0.0;
        let lookup = |x: f64| -> CVector3 {
            let i = samples.partition_point(|s| s.0 <= x);
            if i == 0 || (i == samples.len() && x > samples[i - 1].0) {
                return CVector3::zeros();
            }
            if i == samples.len() {
                return samples[i - 1].1;
            }
            let (x0, v0) = samples[i - 1];
            let (x1, v1) = samples[i];
            let t = (x - x0) / (x1 - x0);
            v0 * Complex64::new(1.0 - t, 0.0) + v1 * Complex64::new(t, 0.0)
        };
        Ok(Self::from_fn(quadrature, |x| {
            if mirror && x < 0.0 {
                lookup(-x).map(|z| z.conj())
            } else {
                lookup(x)
            }
        }))
    }

    /// Largest `|W(-xi) - conj W(xi)|` over node pairs.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.modes.len();
        (0..n)
            .map(|j| (self.modes[n - 1 - j] - self.modes[j].map(|z| z.conj())).norm())
            .fold(0.0, f64::max)
    }
}

/// `xi^{2 ell} [(1 + xi^2) |W1|^2 + |W2|^2 + |W3|^2]`.
pub fn modal_energy(xi: f64, w: &CVector3, ell: u32) -> f64 {
    let e = (1.0 + xi * xi) * w[0].norm_sqr() + w[1].norm_sqr() + w[2].norm_sqr();
    if ell == 0 {
        e
    } else {
        xi.powi(2 * ell as i32) * e
    }
}

/// Square root of the quadrature of [`modal_energy`] over the profile.
pub fn weighted_norm(profile: &SpectralProfile, ell: u32) -> f64 {
    let q = &profile.quadrature;
    q.nodes
        .iter()
        .zip(&q.weights)
        .zip(&profile.modes)
        .map(|((x, w), m)| w * modal_energy(*x, m, ell))
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone)]
enum Propagation {
    Identity,
    Eigen {
        scaling: Vector3<f64>,
        lam: CVector3,
        v: CMatrix3,
        v_inv: CMatrix3,
    },
    Exponential {
        scaling: Vector3<f64>,
        m: CMatrix3,
    },
}

/// Precomputed `exp(-t M(i xi))` for one wavenumber.
#[derive(Debug, Clone)]
pub struct ModePropagator {
    pub xi: f64,
    kind: Propagation,
}

fn condition(v: &CMatrix3) -> f64 {
    let s = v.singular_values();
    s.max() / s.min()
}

impl ModePropagator {
    pub fn new(coeffs: &EquilibriumCoefficients, xi: f64) -> Self {
        if xi == 0.0 {
            return ModePropagator {
                xi,
                kind: Propagation::Identity,
            };
        }
        let scaling = TransformedTriplet::new(coeffs).scaling(xi);
        let m = balanced_symbol(coeffs, xi);
        let eigen = complex_eigen(&m, 1e-13).and_then(|(lam, v)| {
            if condition(&v) > MAX_EIGEN_CONDITION {
                return None;
            }
            v.try_inverse().map(|v_inv| (lam, v, v_inv))
        });
        let kind = match eigen {
            Some((lam, v, v_inv)) => Propagation::Eigen {
                scaling,
                lam,
                v,
                v_inv,
            },
            None => Propagation::Exponential { scaling, m },
        };
        ModePropagator { xi, kind }
    }

    /// Whether the scaling-and-squaring fallback is in use.
    pub fn uses_fallback(&self) -> bool {
        matches!(self.kind, Propagation::Exponential { .. })
    }

    /// `exp(-t M)` as a matrix.
    pub fn matrix(&self, t: f64) -> CMatrix3 {
        let mut out = CMatrix3::zeros();
        for j in 0..3 {
            let mut e = CVector3::zeros();
            e[j] = Complex64::new(1.0, 0.0);
            out.set_column(j, &self.propagate(&e, t));
        }
        out
    }

    /// `exp(-t M) w` for `t >= 0`.
    pub fn propagate(&self, w: &CVector3, t: f64) -> CVector3 {
        if t == 0.0 {
            return *w;
        }
        match &self.kind {
            Propagation::Identity => *w,
            Propagation::Eigen {
                scaling,
                lam,
                v,
                v_inv,
            } => {
                let y = CVector3::from_fn(|i, _| w[i] * scaling[i]);
                let mut c = v_inv * y;
                for i in 0..3 {
                    c[i] *= (-lam[i] * t).exp();
                }
                let z = v * c;
                CVector3::from_fn(|i, _| z[i] / scaling[i])
            }
            Propagation::Exponential { scaling, m } => {
                let y = CVector3::from_fn(|i, _| w[i] * scaling[i]);
                let z = (m * Complex64::new(-t, 0.0)).exp() * y;
                CVector3::from_fn(|i, _| z[i] / scaling[i])
            }
        }
    }
}

/// `exp(-t M(i xi)) mode`.
pub fn propagate_mode(
    coeffs: &EquilibriumCoefficients,
    mode: &CVector3,
    xi: f64,
    t: f64,
) -> Result<CVector3> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("t", "must be finite and >= 0"));
    }
    Ok(ModePropagator::new(coeffs, xi).propagate(mode, t))
}

/// Profile evolved to time `t`.
pub fn evolve_profile(
    coeffs: &EquilibriumCoefficients,
    profile: &SpectralProfile,
    t: f64,
) -> Result<SpectralProfile> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("t", "must be finite and >= 0"));
    }
    let modes = profile
        .quadrature
        .nodes
        .par_iter()
        .zip(&profile.modes)
        .map(|(&x, w)| ModePropagator::new(coeffs, x).propagate(w, t))
        .collect();
    Ok(SpectralProfile {
        quadrature: profile.quadrature.clone(),
        modes,
    })
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(invalid("times", "empty"));
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(invalid("times", "must be finite and >= 0"));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("times", "must be strictly increasing"));
    }
    Ok(())
}

/// Weighted norms `norms[k][i]` of order `ells[k]` at `times[i]`.
pub fn evolve_norms(
    coeffs: &EquilibriumCoefficients,
    initial: &SpectralProfile,
    times: &[f64],
    ells: &[u32],
) -> Result<Vec<Vec<f64>>> {
    check_times(times)?;
    let q = &initial.quadrature;
    // Per-node contributions are summed sequentially so the result does not
    // depend on the thread count.
    let per_node: Vec<Vec<f64>> = q
        .nodes
        .par_iter()
        .zip(&q.weights)
        .zip(&initial.modes)
        .map(|((&x, &wt), w0)| {
            let p = ModePropagator::new(coeffs, x);
            let mut out = vec![0.0; times.len() * ells.len()];
            for (i, &t) in times.iter().enumerate() {
                let w = p.propagate(w0, t);
                for (k, &ell) in ells.iter().enumerate() {
                    out[k * times.len() + i] = wt * modal_energy(x, &w, ell);
                }
            }
            out
        })
        .collect();
    let mut acc = vec![0.0; times.len() * ells.len()];
    for node in &per_node {
        for (a, v) in acc.iter_mut().zip(node) {
            *a += v;
        }
    }
    if acc.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "weighted norm".into(),
        });
    }
    Ok(acc
        .chunks(times.len())
        .map(|c| c.iter().map(|v| v.sqrt()).collect())
        .collect())
}

/// Norm history and the fitted decay.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearDecay {
    pub ell: u32,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub fit: DecayFit,
    /// Residual at or below [`FIT_RESIDUAL_THRESHOLD`].
    pub well_conditioned: bool,
}

/// Default fit window `[t_max / 100, t_max]`.
pub fn default_window(times: &[f64]) -> (f64, f64) {
    let t_max = times.last().copied().unwrap_or(0.0);
    (t_max / 100.0, t_max)
}

/// Evolves `initial`, evaluates the order-`ell` norm at `times` and fits the
/// decay exponent on `window` (default `[t_max/100, t_max]`).
pub fn evolve_and_fit(
    coeffs: &EquilibriumCoefficients,
    initial: &SpectralProfile,
    times: &[f64],
    ell: u32,
    window: Option<(f64, f64)>,
) -> Result<LinearDecay> {
    Ok(evolve_and_fit_many(coeffs, initial, times, &[ell], window)?.remove(0))
}

/// [`evolve_and_fit`] for several orders with a single evolution.
pub fn evolve_and_fit_many(
    coeffs: &EquilibriumCoefficients,
    initial: &SpectralProfile,
    times: &[f64],
    ells: &[u32],
    window: Option<(f64, f64)>,
) -> Result<Vec<LinearDecay>> {
    check_times(times)?;
    let positive: Vec<f64> = times.iter().copied().filter(|t| *t > 0.0).collect();
    if positive.is_empty() || positive[positive.len() - 1] < 100.0 * positive[0] {
        return Err(invalid(
            "times",
            "positive times must span at least two decades",
        ));
    }
    let window = window.unwrap_or_else(|| default_window(times));
    let norms = evolve_norms(coeffs, initial, times, ells)?;
    ells.iter()
        .zip(norms)
        .map(|(&ell, norms)| {
            let fit = fit_decay(times, &norms, window)?;
            Ok(LinearDecay {
                ell,
                times: times.to_vec(),
                well_conditioned: fit.well_conditioned(FIT_RESIDUAL_THRESHOLD),
                norms,
                fit,
            })
        })
        .collect()
}

/// Outcome of the pointwise modal-energy bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointwiseReport {
    /// Rate in `E(t) <= C exp(-c0 xi^2 t) E(0)` for the modal energy.
    pub c0: f64,
    /// Constant `C`.
    pub constant: f64,
    /// Largest `E(t) / (exp(-c0 xi^2 t) E(0))`.
    pub worst_ratio: f64,
    pub worst_at: (f64, f64),
    pub samples: usize,
    pub passed: bool,
}

/// Bounds `m |W|_E^2 <= |T W|^2 <= M |W|_E^2` between the symmetrized energy
/// and the modal energy, uniform in `xi`.
pub fn energy_equivalence(coeffs: &EquilibriumCoefficients) -> (f64, f64) {
    let (rho, theta) = (coeffs.state.rho, coeffs.state.theta);
    let k = coeffs.k * rho;
    let first = [coeffs.p_rho.min(k), coeffs.p_rho.max(k)].map(|v| v / (rho * theta));
    let others = [rho / theta, coeffs.e_theta * rho / (theta * theta)];
    let lo = others.iter().copied().fold(first[0], f64::min);
    let hi = others.iter().copied().fold(first[1], f64::max);
    (lo, hi)
}

/// Checks `E(t) <= C exp(-c0 xi^2 t) E(0)` for `n_modes` random modes at each
/// `(xi, t)`, with the rate and constant from the Lyapunov functional with
/// parameter `delta`.
pub fn verify_pointwise(
    coeffs: &EquilibriumCoefficients,
    xi_grid: &[f64],
    t_grid: &[f64],
    n_modes: usize,
    delta: f64,
    seed: u64,
) -> Result<PointwiseReport> {
    if t_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(invalid("t_grid", "must be finite and >= 0"));
    }
    let ly = lyapunov_check(coeffs, None, delta, xi_grid, 1, seed, 1e-10)?;
    if ly.inconclusive {
        return Err(Error::Numerical(format!(
            "no positive rate from the Lyapunov functional (c0 = {})",
            ly.c0
        )));
    }
    let (lo, hi) = energy_equivalence(coeffs);
    let constant = ly.equivalence_constant() * hi / lo;
    let c0 = ly.c0;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes: Vec<CVector3> = (0..n_modes)
        .map(|_| {
            CVector3::from_fn(|_, _| {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            })
        })
        .collect();
    let per_xi: Vec<(f64, (f64, f64))> = xi_grid
        .par_iter()
        .map(|&xi| {
            let p = ModePropagator::new(coeffs, xi);
            let mut worst = (0.0, (xi, 0.0));
            for w0 in &modes {
                let e0 = modal_energy(xi, w0, 0);
                for &t in t_grid {
                    let e = modal_energy(xi, &p.propagate(w0, t), 0);
                    let r = if e == 0.0 {
                        0.0
                    } else {
                        (e.ln() - e0.ln() + c0 * xi * xi * t).exp()
                    };
                    if r > worst.0 || r.is_nan() {
                        worst = (r, (xi, t));
                    }
                }
            }
            worst
        })
        .collect();
    let (worst_ratio, worst_at) = per_xi
        .into_iter()
        .fold((0.0, (f64::NAN, f64::NAN)), |a, b| {
            if b.0 > a.0 || b.0.is_nan() {
                b
            } else {
                a
            }
        });
    Ok(PointwiseReport {
        c0,
        constant,
        worst_ratio,
        worst_at,
        samples: n_modes * xi_grid.len() * t_grid.len(),
        passed: worst_ratio <= constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermo::{IdealGas, State};

    fn coeffs() -> EquilibriumCoefficients {
        EquilibriumCoefficients::new(
            &IdealGas::REFERENCE.build().unwrap(),
            &State::new(1.0, 0.0, 1.0),
        )
    }

    fn unit() -> CVector3 {
        CVector3::new(
            Complex64::new(1.0, 0.5),
            Complex64::new(-0.3, 0.2),
            Complex64::new(0.7, -1.0),
        )
    }

    #[test]
    fn quadrature_shape() {
        let q = Quadrature::default_grid();
        assert_eq!(q.len(), DEFAULT_NODES);
        assert!(q.nodes.windows(2).all(|w| w[1] > w[0]));
        assert!((q.nodes[DEFAULT_NODES - 1] - DEFAULT_XI_MAX).abs() < 1e-9);
        let mid = DEFAULT_NODES / 2;
        let gap = q.nodes[mid] - q.nodes[mid - 1];
        assert!((gap - DEFAULT_MIN_SPACING).abs() < 1e-2 * DEFAULT_MIN_SPACING);
        for j in 0..DEFAULT_NODES {
            assert_eq!(q.nodes[j], -q.nodes[DEFAULT_NODES - 1 - j]);
        }
    }

    #[test]
    fn gaussian_moment() {
        let q = Quadrature::default_grid();
        let p = SpectralProfile::gaussian(q);
        let exact = (std::f64::consts::PI / 2.0).sqrt() * (3.0 + 0.25);
        let got = weighted_norm(&p, 0).powi(2);
        assert!((got - exact).abs() < 1e-10 * exact, "{got} vs {exact}");
        let p1 = SpectralProfile::from_fn(p.quadrature.clone(), |x| {
            CVector3::new(
                Complex64::new((-x * x).exp(), 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            )
        });
        let plain = p1.quadrature.integrate(|x| (-2.0 * x * x).exp());
        assert!(weighted_norm(&p1, 0).powi(2) > plain);
    }

    #[test]
    fn zero_profile_and_identity() {
        let q = Quadrature::sinh_graded(64, 10.0, 1e-2).unwrap();
        let p = SpectralProfile::from_fn(q, |_| CVector3::zeros());
        assert_eq!(weighted_norm(&p, 0), 0.0);
        let c = coeffs();
        assert_eq!(propagate_mode(&c, &unit(), 0.7, 0.0).unwrap(), unit());
        assert_eq!(propagate_mode(&c, &unit(), 0.0, 1e3).unwrap(), unit());
        assert!(propagate_mode(&c, &unit(), 0.7, -1.0).is_err());
    }

    #[test]
    fn semigroup() {
        let c = coeffs();
        for xi in [1e-3, 0.2, 1.0, 7.0, 60.0] {
            let p = ModePropagator::new(&c, xi);
            let a = p.propagate(&p.propagate(&unit(), 0.3), 0.45);
            let b = p.propagate(&unit(), 0.75);
            assert!((a - b).norm() <= 1e-10 * unit().norm(), "xi = {xi}");
        }
    }

    #[test]
    fn eigen_path_matches_exponential() {
        let c = coeffs();
        for xi in [0.01, 0.5, 3.0] {
            let p = ModePropagator::new(&c, xi);
            assert!(!p.uses_fallback());
            let m = crate::symbols::evolution_symbol(&c, xi);
            let t = 2.0;
            let e = (m * Complex64::new(-t, 0.0)).exp() * unit();
            assert!((p.propagate(&unit(), t) - e).norm() < 1e-10);
        }
    }

    #[test]
    fn realness_preserved() {
        let c = coeffs();
        let q = Quadrature::sinh_graded(256, 50.0, 1e-3).unwrap();
        let p = SpectralProfile::zero_mass(q);
        assert_eq!(p.hermitian_defect(), 0.0);
        let e = evolve_profile(&c, &p, 3.0).unwrap();
        assert!(e.hermitian_defect() <= 1e-12);
    }

    #[test]
    fn mirrored_samples() {
        let q = Quadrature::sinh_graded(64, 4.0, 1e-2).unwrap();
        let s: Vec<(f64, CVector3)> = (0..200)
            .map(|i| {
                let x = i as f64 * 0.05;
                let g = Complex64::new((-x * x).exp(), x);
                (x, CVector3::new(g, g, g))
            })
            .collect();
        let p = SpectralProfile::from_samples(q, &s).unwrap();
        assert!(p.hermitian_defect() < 1e-15);
        assert!(SpectralProfile::from_samples(p.quadrature.clone(), &s[..1]).is_err());
    }

    #[test]
    fn pointwise_bound_reference() {
        let c = coeffs();
        let xi = crate::grid::symmetric_log_grid(1e-2, 20.0, 30);
        let t = [0.0, 0.1, 1.0, 10.0, 100.0];
        let r = verify_pointwise(&c, &xi, &t, 10, 0.05, 3).unwrap();
        assert!(r.passed, "{r:?}");
        let r0 = verify_pointwise(&c, &xi, &[0.0], 4, 0.05, 3).unwrap();
        assert!((r0.worst_ratio - 1.0).abs() < 1e-15);
    }

    #[test]
    fn stronger_transport_decays_faster() {
        let c = coeffs();
        let strong = c.with_transport(10.0 * c.mu, 10.0 * c.alpha);
        let xi = crate::grid::symmetric_log_grid(1e-2, 20.0, 30);
        let t = [0.0, 1.0, 10.0];
        let a = verify_pointwise(&c, &xi, &t, 5, 0.05, 1).unwrap();
        let b = verify_pointwise(&strong, &xi, &t, 5, 0.05, 1).unwrap();
        assert!(b.passed);
        assert!(b.c0 > a.c0);
    }

    #[test]
    fn times_validated() {
        let c = coeffs();
        let q = Quadrature::sinh_graded(64, 10.0, 1e-2).unwrap();
        let p = SpectralProfile::gaussian(q);
        assert!(evolve_and_fit(&c, &p, &[1.0, 2.0, 3.0], 0, None).is_err());
        assert!(evolve_and_fit(&c, &p, &[1.0, 0.5, 300.0], 0, None).is_err());
    }
}
