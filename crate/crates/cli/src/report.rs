//! Machine-readable reports and CSV output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

/// One asserted criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub observed: f64,
    pub tolerance: f64,
    /// Distance from failing; negative when failed.
    pub margin: f64,
    pub note: Option<String>,
}

impl Check {
    /// Passes when `observed <= tolerance`.
    pub fn at_most(name: &str, observed: f64, tolerance: f64) -> Self {
        let margin = tolerance - observed;
        Check {
            name: name.into(),
            passed: margin >= 0.0,
            observed,
            tolerance,
            margin: nan_to_fail(margin),
            note: None,
        }
    }

    /// Passes when `observed >= tolerance`.
    pub fn at_least(name: &str, observed: f64, tolerance: f64) -> Self {
        let margin = observed - tolerance;
        Check {
            name: name.into(),
            passed: margin >= 0.0,
            observed,
            tolerance,
            margin: nan_to_fail(margin),
            note: None,
        }
    }

    /// Passes when `|observed - target| <= tolerance`; `tolerance` is the half width.
    pub fn within(name: &str, observed: f64, target: f64, tolerance: f64) -> Self {
        let margin = tolerance - (observed - target).abs();
        Check {
            name: name.into(),
            passed: margin >= 0.0,
            observed,
            tolerance,
            margin: nan_to_fail(margin),
            note: Some(format!("target {target}")),
        }
    }

    /// Passes when `observed` lies in `[lo, hi]`.
    pub fn in_range(name: &str, observed: f64, lo: f64, hi: f64) -> Self {
        let margin = (observed - lo).min(hi - observed);
        Check {
            name: name.into(),
            passed: margin >= 0.0,
            observed,
            tolerance: 0.5 * (hi - lo),
            margin: nan_to_fail(margin),
            note: Some(format!("band [{lo}, {hi}]")),
        }
    }

    /// A boolean outcome with no numeric margin.
    pub fn flag(name: &str, passed: bool, note: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            observed: if passed { 1.0 } else { 0.0 },
            tolerance: 1.0,
            margin: if passed { 0.0 } else { -1.0 },
            note: Some(note.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

fn nan_to_fail(m: f64) -> f64 {
    if m.is_nan() {
        f64::NEG_INFINITY
    } else {
        m
    }
}

/// Summary of one subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Observed constants and fit results.
    pub details: serde_json::Value,
    pub files: Vec<String>,
}

impl Report {
    pub fn new(command: &str, config_hash: String, seed: u64) -> Self {
        Report {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_hash,
            seed,
            passed: true,
            checks: Vec::new(),
            details: serde_json::Value::Object(Default::default()),
            files: Vec::new(),
        }
    }

    pub fn check(&mut self, c: Check) {
        self.passed &= c.passed;
        self.checks.push(c);
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("detail serializes");
        self.details
            .as_object_mut()
            .expect("details is an object")
            .insert(key.into(), v);
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn text(&self) -> String {
        let mut s = format!(
            "{} {} (nsfk {}, config {}, seed {})\n",
            self.command,
            if self.passed { "PASS" } else { "FAIL" },
            self.version,
            self.config_hash,
            self.seed
        );
        for c in &self.checks {
            s += &format!(
                "  [{}] {}: observed {:e}, tolerance {:e}, margin {:e}{}\n",
                if c.passed { "pass" } else { "FAIL" },
                c.name,
                c.observed,
                c.tolerance,
                c.margin,
                c.note
                    .as_ref()
                    .map(|n| format!(" ({n})"))
                    .unwrap_or_default()
            );
        }
        s
    }

    /// Writes `<command>-report.json` and `<command>-report.txt` into `dir`.
    pub fn write(&mut self, dir: &Path) -> Result<()> {
        let json = dir.join(format!("{}-report.json", self.command));
        let txt = dir.join(format!("{}-report.txt", self.command));
        self.files.push(file_name(&json));
        self.files.push(file_name(&txt));
        let body = serde_json::to_string_pretty(self)?;
        fs::write(&json, body + "\n").with_context(|| format!("writing {}", json.display()))?;
        fs::write(&txt, self.text()).with_context(|| format!("writing {}", txt.display()))?;
        Ok(())
    }
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Fixed-format float with 17 significant digits.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a CSV table and records its name in `report`.
pub fn write_csv(
    report: &mut Report,
    dir: &Path,
    name: &str,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut w =
        csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    report.files.push(name.into());
    Ok(path)
}

/// Prints the text report unless `quiet`.
pub fn emit(report: &Report, quiet: bool) -> Result<()> {
    if !quiet {
        std::io::stdout().write_all(report.text().as_bytes())?;
    }
    Ok(())
}
