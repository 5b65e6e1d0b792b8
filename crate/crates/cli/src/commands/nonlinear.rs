//! `nonlinear-run`: pseudo-spectral integration with the conservation,
//! entropy and decay checks.

use std::path::Path;

use anyhow::Result;
use nsfk_core::nonlinear::run as integrate;

use crate::config::RunConfig;
use crate::report::{fmt, write_csv, Check, Report};
use crate::UsageError;

/// Relative drift allowed for mass, momentum and energy.
const DRIFT_TOL: f64 = 1e-8;
/// Largest allowed decrease of total entropy over one step.
const ENTROPY_TOL: f64 = 1e-9;
/// Bound on `max |N_1|` relative to the field scale.
const N1_TOL: f64 = 1e-12;
/// Accepted band for the fitted decay exponent.
const EXPONENT_BAND: (f64, f64) = (-0.5, -0.15);

pub fn run(cfg: &RunConfig, out: &Path) -> Result<Report> {
    let eos = cfg.eos()?;
    let spec = &cfg.nonlinear;
    let mut report = Report::new("nonlinear-run", cfg.hash(), cfg.seed);
    let result = integrate(&eos, &cfg.equilibrium.state(), spec).map_err(|e| match e {
        nsfk_core::Error::StepRejected { .. } | nsfk_core::Error::InvalidParameter { .. } => {
            anyhow::Error::new(UsageError(format!("nonlinear run: {e}")))
        }
        other => anyhow::Error::new(other).context("nonlinear run"),
    })?;
    let s = &result.summary;

    report.check(Check::flag(
        "run completed",
        result.termination.is_none(),
        result
            .termination
            .clone()
            .unwrap_or_else(|| format!("{} steps of {}", result.ledger.steps, result.ledger.dt)),
    ));
    report.check(Check::at_most("mass drift", s.mass_drift, DRIFT_TOL));
    report.check(Check::at_most(
        "momentum drift",
        s.momentum_drift,
        DRIFT_TOL,
    ));
    report.check(Check::at_most("energy drift", s.energy_drift, DRIFT_TOL));
    report.check(Check::at_most(
        "entropy decrease per step",
        s.max_entropy_decrease,
        ENTROPY_TOL,
    ));
    report.check(Check::at_most("max |N1| / scale", s.n1_relative, N1_TOL));
    if spec.perturbation.amplitude == 0.0 {
        report.check(Check::flag(
            "decay",
            true,
            "zero amplitude: perturbation norms vanish identically",
        ));
    } else {
        match s.fit {
            Some(f) => {
                report.check(Check::in_range(
                    "decay exponent",
                    f.exponent,
                    EXPONENT_BAND.0,
                    EXPONENT_BAND.1,
                ));
            }
            None => report.check(Check::flag(
                "decay exponent",
                false,
                s.fit_error.clone().unwrap_or_default(),
            )),
        }
        report.check(Check::flag(
            "norm trend decreasing",
            s.trend_decreasing,
            format!("{} increases inside the fit window", s.norm_increases),
        ));
    }
    report.detail("summary", s);
    report.detail("steps", result.ledger.steps);
    report.detail("dt", result.ledger.dt);
    report.detail(
        "min_stability_bound",
        result
            .ledger
            .stability_bounds
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min),
    );

    write_csv(
        &mut report,
        out,
        "ledger.csv",
        &[
            "t",
            "mass",
            "momentum",
            "energy",
            "entropy",
            "norm_u",
            "norm_w",
            "ratio",
            "n1_max",
            "n_max",
            "field_scale",
        ],
        result.ledger.rows.iter().map(|r| {
            vec![
                fmt(r.t),
                fmt(r.mass),
                fmt(r.momentum),
                fmt(r.energy),
                fmt(r.entropy),
                fmt(r.norm_u),
                fmt(r.norm_w),
                r.ratio.map(fmt).unwrap_or_default(),
                fmt(r.n1_max),
                fmt(r.n_max),
                fmt(r.field_scale),
            ]
        }),
    )?;
    Ok(report)
}
