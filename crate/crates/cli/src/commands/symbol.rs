//! `analyze-symbol`: genuine coupling, Friedrichs search, compensating
//! certificate, Lyapunov functional and the spectral bound.

use std::path::Path;

use anyhow::Result;
use nsfk_core::dissipativity::{
    check_friedrichs, check_genuine_coupling, lyapunov_check, spectral_bound, verify_certificate,
    CompensatingMatrix,
};
use nsfk_core::grid::linear_grid;
use nsfk_core::symbols::{symbol_triplet, EquilibriumCoefficients};

use crate::config::RunConfig;
use crate::report::{fmt, write_csv, Check, Report};

pub fn run(cfg: &RunConfig, out: &Path) -> Result<Report> {
    let eos = cfg.eos()?;
    let coeffs = EquilibriumCoefficients::new(&eos, &cfg.equilibrium.state());
    let s = &cfg.symbol;
    let mut report = Report::new("analyze-symbol", cfg.hash(), cfg.seed);

    let grid = s.grid.grid();
    let nonzero: Vec<f64> = grid.iter().copied().filter(|x| *x != 0.0).collect();

    let coupling = check_genuine_coupling(&symbol_triplet(&coeffs), &nonzero)?;
    report.check(Check {
        passed: coupling.passed,
        ..Check::at_least("genuine coupling", coupling.min_margin, 0.0).with_note(format!(
            "{} failing wavenumbers",
            coupling.failures().count()
        ))
    });
    write_csv(
        &mut report,
        out,
        "coupling.csv",
        &["xi", "kernel_dim", "margin", "passed"],
        coupling.samples.iter().map(|c| {
            vec![
                fmt(c.xi),
                c.kernel_dim.to_string(),
                fmt(c.margin),
                c.passed.to_string(),
            ]
        }),
    )?;

    let friedrichs = check_friedrichs(&coeffs);
    report.detail("friedrichs", &friedrichs);

    let bound = spectral_bound(&coeffs, &grid);
    report.check(Check::flag(
        "strict dissipativity",
        bound.strictly_dissipative(),
        format!(
            "sigma >= 0 at {} nonzero wavenumbers",
            bound.violations.len()
        ),
    ));
    match &bound.dtype {
        Some(d) => {
            report.detail("dissipativity_type", d);
            report.detail("classification", d.classify());
        }
        None => report.detail("dissipativity_type_error", &bound.fit_error),
    }
    write_csv(
        &mut report,
        out,
        "sigma.csv",
        &["xi", "sigma"],
        bound.samples.iter().map(|(x, v)| vec![fmt(*x), fmt(*v)]),
    )?;

    match CompensatingMatrix::new(&coeffs, s.eps) {
        Ok(k) => {
            let cgrid = linear_grid(
                -s.certificate_xi_max,
                s.certificate_xi_max,
                s.certificate_points,
            );
            let cert = verify_certificate(&coeffs, k.eps, &cgrid, s.certificate_tol);
            report.check(Check {
                passed: cert.passed,
                ..Check::at_least(
                    "compensating certificate",
                    cert.min_eig,
                    cert.gamma_bar - cert.tol,
                )
                .with_note(format!(
                    "eps {}, window ({}, {}), sup|K| {}, sup|xi K| {}",
                    cert.eps_k, cert.window.0, cert.window.1, cert.sup_k, cert.sup_xi_k
                ))
            });
            report.detail("compensating_certificate", &cert);
            let lgrid = s.lyapunov_grid.grid();
            match lyapunov_check(
                &coeffs,
                Some(k.eps),
                s.lyapunov_delta,
                &lgrid,
                s.lyapunov_modes,
                cfg.seed,
                s.lyapunov_tol,
            ) {
                Ok(l) => {
                    report.check(Check {
                        passed: l.passed,
                        ..Check::at_most("lyapunov functional", l.max_residual, l.tol)
                            .with_note(format!("c0 {}, {} samples", l.c0, l.samples))
                    });
                    report.detail("lyapunov", &l);
                }
                Err(e) => report.check(Check::flag("lyapunov functional", false, e.to_string())),
            }
        }
        Err(e) => {
            report.check(Check::flag(
                "compensating certificate",
                false,
                e.to_string(),
            ));
            report.check(Check::flag(
                "lyapunov functional",
                false,
                "no compensating matrix",
            ));
        }
    }
    Ok(report)
}
