//! Closed form vs simulation gate for one configured scenario.

use std::fmt::Write as _;

use ftr_noma::ftr::{build_series, FtrSeries};
use ftr_noma::montecarlo::{simulate_ec, simulate_op, simulate_sum_rate};
use ftr_noma::noma::Scheme;
use ftr_noma::opa::{op_p_opa, op_p_opa_integral, OpaScenario};
use ftr_noma::Error;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::run::{budget_at, capacity_curves, outage_curve};

/// Width of the simulation band, in standard deviations.
pub const BAND_Z: f64 = 3.0;
/// Closed-form OPA user-p outage vs quadrature, relative, where OP ≥ 1e-3.
pub const ORACLE_REL: f64 = 1e-4;
pub const EC_GPA_REL: f64 = 0.01;
pub const EC_OPA_REL: f64 = 0.02;
pub const SLOPE_TOL: f64 = 0.05;
pub const FLAT_SLOPE_TOL: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn passed(&self) -> bool {
        self.failed() == 0
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(s, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        let _ = writeln!(s, "{} checks, {} failed", self.checks.len(), self.failed());
        s
    }
}

/// Least-squares slope of log₁₀ y against log₁₀ γ̄ (γ̄ in dB on `db`).
pub fn loglog_slope(db: &[f64], y: &[f64]) -> f64 {
    let xs: Vec<f64> = db.iter().map(|d| d / 10.0).collect();
    let ys: Vec<f64> = y.iter().map(|v| v.log10()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn series_checks(cfg: &RunConfig, report: &mut Report) -> Option<(FtrSeries, FtrSeries)> {
    let mut out = Vec::new();
    for (user, params) in [("p", cfg.scenario.user_p), ("q", cfg.scenario.user_q)] {
        match build_series(params, cfg.n_terms) {
            Ok(s) => {
                let v = s.violations();
                let detail = format!(
                    "{} terms, sum H - 1 = {:.3e}, first-moment error {:.3e}",
                    cfg.n_terms,
                    s.normalization() - 1.0,
                    s.first_moment_error()
                );
                report.push(format!("series user {user}"), v.is_empty(), detail);
                out.push(s);
            }
            Err(Error::TruncationInadequate { n_terms, deviation }) => {
                report.push(
                    format!("series user {user}"),
                    false,
                    format!("truncation inadequate: {n_terms} terms leave normalization off by {deviation:.3e}; raise --terms"),
                );
            }
            Err(e) => {
                report.push(format!("series user {user}"), false, e.to_string());
            }
        }
    }
    let q = out.pop()?;
    let p = out.pop()?;
    Some((p, q))
}

fn outage_checks(cfg: &RunConfig, series: &(FtrSeries, FtrSeries), report: &mut Report) -> Result<(), CliError> {
    let sc = &cfg.scenario;
    let mc = simulate_op(sc)?;
    for (ti, th) in sc.gamma_th_list.iter().enumerate() {
        for (ui, user) in ["p", "q"].iter().enumerate() {
            let closed = outage_curve(cfg, series, ui == 0, *th, false)?;
            let sweep = &mc[2 * ti + ui];
            let flat = match sc.scheme {
                Scheme::Gpa(a) => ui == 1 && a.a_th(*th) <= 0.0,
                _ => false,
            };
            for (i, db) in sc.gamma_bar_grid_db.iter().enumerate() {
                let name = format!("op_{user} th={th} at {db} dB");
                if flat {
                    let ok = closed[i] == 1.0 && sweep.estimate[i] == 1.0;
                    report.push(name, ok, format!("a_th <= 0: closed {} simulated {} (exactly 1 expected)", closed[i], sweep.estimate[i]));
                    continue;
                }
                let (lo, hi) = sweep.band(i, BAND_Z);
                let margin = (closed[i] - lo).min(hi - closed[i]);
                report.push(
                    name,
                    margin >= 0.0,
                    format!("closed {:.6e}, simulated {:.6e}, 3-sigma band [{lo:.6e}, {hi:.6e}], margin {margin:.3e}", closed[i], sweep.estimate[i]),
                );
            }
            if sc.scheme == Scheme::Opa && ui == 0 {
                for db in &sc.gamma_bar_grid_db {
                    let s = OpaScenario::new(series.0.clone(), series.1.clone(), budget_at(cfg, *db)?);
                    let v = op_p_opa(*th, &s)?;
                    if v < 1e-3 {
                        continue;
                    }
                    let oracle = op_p_opa_integral(*th, &s)?;
                    let rel = (v - oracle).abs() / oracle;
                    report.push(
                        format!("op_p th={th} at {db} dB vs quadrature"),
                        rel <= ORACLE_REL,
                        format!("series {v:.10e}, quadrature {oracle:.10e}, relative {rel:.2e} (limit {ORACLE_REL:.0e})"),
                    );
                }
            }
        }
    }
    Ok(())
}

fn slope_checks(cfg: &RunConfig, series: &(FtrSeries, FtrSeries), report: &mut Report) -> Result<(), CliError> {
    let mut sub = cfg.clone();
    sub.scenario.gamma_bar_grid_db = (55..=75).map(f64::from).collect();
    let th = sub.scenario.gamma_th_list[0];
    let expect = |user_p: bool| match (cfg.scenario.scheme, user_p) {
        (Scheme::Gpa(a), false) if a.a_th(th) <= 0.0 => (0.0, FLAT_SLOPE_TOL),
        (Scheme::Opa, true) => (-0.5, SLOPE_TOL),
        _ => (-1.0, SLOPE_TOL),
    };
    for (user_p, user) in [(true, "p"), (false, "q")] {
        let y = outage_curve(&sub, series, user_p, th, false)?;
        let (target, tol) = expect(user_p);
        let slope = if y.iter().all(|v| *v == 1.0) { 0.0 } else { loglog_slope(&sub.scenario.gamma_bar_grid_db, &y) };
        report.push(
            format!("diversity order user {user} th={th}"),
            (slope - target).abs() <= tol,
            format!("slope over 55-75 dB {slope:.4}, expected {target} +/- {tol}"),
        );
    }
    Ok(())
}

fn capacity_checks(cfg: &RunConfig, series: &(FtrSeries, FtrSeries), report: &mut Report) -> Result<(), CliError> {
    let sc = &cfg.scenario;
    let mc = simulate_ec(sc)?;
    let (main, bounds) = capacity_curves(cfg, series, sc.scheme)?;
    let limit = if sc.scheme == Scheme::Opa { EC_OPA_REL } else { EC_GPA_REL };
    for (i, db) in sc.gamma_bar_grid_db.iter().enumerate() {
        let m = mc.estimate[i];
        let rel = (main[i] - m).abs() / m.abs().max(1e-12);
        report.push(
            format!("ec {} at {db} dB", sc.scheme.name()),
            rel <= limit,
            format!("closed {:.6}, simulated {m:.6}, relative {rel:.2e} (limit {limit})", main[i]),
        );
        if let Some((lo, hi)) = &bounds {
            let (band_lo, band_hi) = mc.band(i, BAND_Z);
            report.push(
                format!("ec bounds at {db} dB"),
                lo[i] <= band_hi && band_lo <= hi[i],
                format!("lower {:.6} <= simulated {m:.6} <= upper {:.6}", lo[i], hi[i]),
            );
        }
    }
    Ok(())
}

fn ordering_checks(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let r = simulate_sum_rate(&cfg.scenario)?;
    let (gpa, opa, tdma) = (&r[0], &r[1], &r[2]);
    // OPA is optimal only inside the admissible range; a fixed a above a_opt can
    // beat it at high SNR, so that comparison is reported but not enforced
    for (i, db) in cfg.scenario.gamma_bar_grid_db.iter().enumerate() {
        let note = if gpa.estimate[i] > opa.estimate[i] { " (gpa above opa: fixed a outside the admissible range)" } else { "" };
        report.push(
            format!("sum-rate ordering at {db} dB"),
            opa.estimate[i] >= tdma.estimate[i],
            format!("opa {:.6} >= tdma {:.6}; gpa {:.6}{note}", opa.estimate[i], tdma.estimate[i], gpa.estimate[i]),
        );
    }
    Ok(())
}

/// Runs every check that applies to the configured scheme. A failed check is a
/// report line, not an error; errors mean a computation could not be carried out.
pub fn validate(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut report = Report::default();
    let series = series_checks(cfg, &mut report);
    if let Some(series) = &series {
        if cfg.scenario.scheme != Scheme::Tdma {
            outage_checks(cfg, series, &mut report)?;
            slope_checks(cfg, series, &mut report)?;
        }
        capacity_checks(cfg, series, &mut report)?;
    }
    ordering_checks(cfg, &mut report)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let db: Vec<f64> = (0..=20).map(f64::from).collect();
        let y: Vec<f64> = db.iter().map(|d| 3.0 * 10f64.powf(-d / 20.0)).collect();
        assert!((loglog_slope(&db, &y) + 0.5).abs() < 1e-12);
    }
}
