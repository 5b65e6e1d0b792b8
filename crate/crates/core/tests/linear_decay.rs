use nsfk_core::grid::log_grid;
use nsfk_core::linear_evolution::{evolve_and_fit_many, Quadrature, SpectralProfile};
use nsfk_core::symbols::EquilibriumCoefficients;
use nsfk_core::{IdealGas, State};

fn coeffs() -> EquilibriumCoefficients {
    EquilibriumCoefficients::new(
        &IdealGas::REFERENCE.build().unwrap(),
        &State::new(1.0, 0.0, 1.0),
    )
}

fn times() -> Vec<f64> {
    let mut t = vec![0.0];
    t.extend(log_grid(1.0, 1e4, 81));
    t
}

#[test]
fn gaussian_data_rates() {
    let p = SpectralProfile::gaussian(Quadrature::default_grid());
    let fits = evolve_and_fit_many(&coeffs(), &p, &times(), &[0, 1], None).unwrap();
    assert!(
        (fits[0].fit.exponent + 0.25).abs() <= 0.05,
        "{:?}",
        fits[0].fit
    );
    assert!(
        (fits[1].fit.exponent + 0.75).abs() <= 0.05,
        "{:?}",
        fits[1].fit
    );
    assert!(fits.iter().all(|f| f.well_conditioned));
    let w = fits[0].fit.t_window;
    assert!((w.0 / 1e2 - 1.0).abs() < 1e-12 && (w.1 / 1e4 - 1.0).abs() < 1e-12);
}

#[test]
fn zero_mass_decays_faster() {
    let p = SpectralProfile::zero_mass(Quadrature::default_grid());
    let fits = evolve_and_fit_many(&coeffs(), &p, &times(), &[0], None).unwrap();
    assert!(fits[0].fit.exponent <= -0.7, "{:?}", fits[0].fit);
}

#[test]
fn norms_decrease() {
    let p = SpectralProfile::gaussian(Quadrature::default_grid());
    let fits = evolve_and_fit_many(&coeffs(), &p, &times(), &[0], None).unwrap();
    let n = &fits[0].norms;
    assert!(n.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
}
