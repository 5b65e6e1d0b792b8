//! `linear-decay`: exact modal evolution of a spectral profile and the fitted
//! decay exponents of its weighted norms.

use std::path::Path;

use anyhow::{bail, Context, Result};
use nsfk_core::linalg::CVector3;
use nsfk_core::linear_evolution::{evolve_and_fit_many, Quadrature, SpectralProfile};
use nsfk_core::symbols::EquilibriumCoefficients;
use num_complex::Complex64;

use crate::config::{ProfileConfig, RunConfig};
use crate::report::{fmt, write_csv, Check, Report};
use crate::UsageError;

/// Reads `xi, w1_re, w1_im, w2_re, w2_im, w3_re, w3_im` rows.
pub fn read_profile(path: &Path) -> Result<Vec<(f64, CVector3)>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| UsageError(format!("cannot read profile {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.with_context(|| format!("{}: row {}", path.display(), i + 1))?;
        if rec.len() != 7 {
            bail!(UsageError(format!(
                "{}: row {} has {} columns, expected 7",
                path.display(),
                i + 1,
                rec.len()
            )));
        }
        let v: Vec<f64> = rec
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| UsageError(format!("{}: row {}: {e}", path.display(), i + 1)))?;
        out.push((
            v[0],
            CVector3::new(
                Complex64::new(v[1], v[2]),
                Complex64::new(v[3], v[4]),
                Complex64::new(v[5], v[6]),
            ),
        ));
    }
    Ok(out)
}

pub fn run(cfg: &RunConfig, out: &Path) -> Result<Report> {
    let eos = cfg.eos()?;
    let coeffs = EquilibriumCoefficients::new(&eos, &cfg.equilibrium.state());
    let l = &cfg.linear;
    let mut report = Report::new("linear-decay", cfg.hash(), cfg.seed);

    let quad = Quadrature::sinh_graded(l.nodes, l.xi_max, l.min_spacing)
        .map_err(|e| UsageError(e.to_string()))?;
    let profile = match &l.profile {
        ProfileConfig::Gaussian => SpectralProfile::gaussian(quad),
        ProfileConfig::ZeroMass => SpectralProfile::zero_mass(quad),
        ProfileConfig::Samples { path } => {
            let samples = read_profile(path)?;
            SpectralProfile::from_samples(quad, &samples).map_err(|e| UsageError(e.to_string()))?
        }
    };
    let times = l.time_grid();
    let fits = evolve_and_fit_many(&coeffs, &profile, &times, &l.ells, l.window)
        .context("linear evolution")?;
    let expected = l.expected_exponents();
    for (k, f) in fits.iter().enumerate() {
        let name = format!("decay exponent l={}", f.ell);
        let check = match &expected {
            Some(e) => Check::within(&name, f.fit.exponent, e[k], l.tolerance),
            None => Check::at_most(&name, f.fit.exponent, 0.0),
        };
        report.check(check);
        report.check(Check::flag(
            &format!("fit well conditioned l={}", f.ell),
            f.well_conditioned,
            format!("log residual {}", f.fit.residual),
        ));
    }
    report.detail(
        "fits",
        fits.iter()
            .map(|f| serde_json::json!({ "ell": f.ell, "fit": f.fit }))
            .collect::<Vec<_>>(),
    );
    let mut header = vec!["t".to_string()];
    header.extend(fits.iter().map(|f| format!("norm_l{}", f.ell)));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(
        &mut report,
        out,
        "linear_norms.csv",
        &header,
        times.iter().enumerate().map(|(i, t)| {
            let mut row = vec![fmt(*t)];
            row.extend(fits.iter().map(|f| fmt(f.norms[i])));
            row
        }),
    )?;
    Ok(report)
}
