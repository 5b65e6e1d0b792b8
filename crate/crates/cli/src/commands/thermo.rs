//! `verify-thermo`: closure hypotheses and the entropy-pair certificate.

use std::path::Path;

use anyhow::Result;
use nsfk_core::convex_extension::verify_entropy_pair;
use nsfk_core::thermo::{verify_hypotheses, ConditionCheck};

use crate::config::RunConfig;
use crate::report::{fmt, write_csv, Check, Report};

fn to_check(c: &ConditionCheck) -> Check {
    // Sign conditions report a margin, residual conditions a residual.
    let is_sign = c.tolerance == 0.0;
    let check = if is_sign {
        Check::at_least(&c.name, c.worst, 0.0)
    } else {
        Check::at_most(&c.name, c.worst, c.tolerance)
    };
    Check {
        passed: c.passed,
        ..check
    }
}

pub fn run(cfg: &RunConfig, out: &Path) -> Result<Report> {
    let eos = cfg.eos()?;
    let mut report = Report::new("verify-thermo", cfg.hash(), cfg.seed);
    let hyp = verify_hypotheses(&eos, &cfg.domain, cfg.thermo.samples)?;
    let pair = verify_entropy_pair(
        &eos,
        &cfg.domain,
        cfg.thermo.entropy_samples,
        cfg.thermo.fd_step,
        cfg.seed,
    )?;
    let mut rows = Vec::new();
    for (group, r) in [("hypotheses", &hyp), ("entropy-pair", &pair)] {
        for c in &r.conditions {
            report.check(to_check(c));
            let (rho, theta) = c
                .worst_state
                .map(|(a, b)| (fmt(a), fmt(b)))
                .unwrap_or_default();
            rows.push(vec![
                group.to_string(),
                c.name.clone(),
                c.passed.to_string(),
                fmt(c.worst),
                fmt(c.tolerance),
                rho,
                theta,
            ]);
        }
    }
    write_csv(
        &mut report,
        out,
        "thermo_conditions.csv",
        &[
            "group",
            "condition",
            "passed",
            "worst",
            "tolerance",
            "rho",
            "theta",
        ],
        rows,
    )?;
    report.detail("hypothesis_samples", hyp.samples);
    report.detail("entropy_pair_samples", pair.samples);
    Ok(report)
}
