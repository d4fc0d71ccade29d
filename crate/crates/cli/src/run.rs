//! Sweep commands: closed forms and simulation on the configured γ̄ grid.

use ftr_noma::ftr::{build_series, FtrSeries};
use ftr_noma::gpa::{ec_gpa, ec_tdma, op_p_gpa, op_p_gpa_asymptotic, op_q_gpa, op_q_gpa_asymptotic, GpaScenario};
use ftr_noma::montecarlo::{draw_effective_gain, simulate_ec, simulate_op, simulate_sum_rate};
use ftr_noma::noma::{db_to_linear, LinkBudget, Scheme};
use ftr_noma::opa::{ec_opa_terms, op_p_opa, op_p_opa_asymptotic, op_q_opa, op_q_opa_asymptotic, OpaScenario};

use crate::config::{AnalysisKind, RunConfig};
use crate::error::CliError;
use crate::output::OutputDir;
use crate::plot::overlay;
use crate::table::Table;

/// Both users' truncated series at the configured term count.
pub fn series_pair(cfg: &RunConfig) -> Result<(FtrSeries, FtrSeries), CliError> {
    let p = build_series(cfg.scenario.user_p, cfg.n_terms)?;
    let q = build_series(cfg.scenario.user_q, cfg.n_terms)?;
    Ok((p, q))
}

pub(crate) fn budget_at(cfg: &RunConfig, db: f64) -> Result<LinkBudget, CliError> {
    Ok(cfg.scenario.budget.with_gamma_bar(db_to_linear(db))?)
}

fn grid(cfg: &RunConfig) -> &[f64] {
    &cfg.scenario.gamma_bar_grid_db
}

fn th_tag(th: f64) -> String {
    format!("th{th}")
}

/// Closed-form and asymptotic outage for one user on the grid.
pub(crate) fn outage_curve(
    cfg: &RunConfig,
    series: &(FtrSeries, FtrSeries),
    user_p: bool,
    th: f64,
    asymptotic: bool,
) -> Result<Vec<f64>, CliError> {
    grid(cfg)
        .iter()
        .map(|db| {
            let budget = budget_at(cfg, *db)?;
            let (p, q) = (series.0.clone(), series.1.clone());
            Ok(match (cfg.scenario.scheme, user_p, asymptotic) {
                (Scheme::Gpa(a), true, false) => op_p_gpa(th, &GpaScenario::new(p, q, budget, a)),
                (Scheme::Gpa(a), true, true) => op_p_gpa_asymptotic(th, &GpaScenario::new(p, q, budget, a)),
                (Scheme::Gpa(a), false, false) => op_q_gpa(th, &GpaScenario::new(p, q, budget, a)),
                (Scheme::Gpa(a), false, true) => op_q_gpa_asymptotic(th, &GpaScenario::new(p, q, budget, a)),
                (_, true, false) => op_p_opa(th, &OpaScenario::new(p, q, budget))?,
                (_, true, true) => op_p_opa_asymptotic(th, &OpaScenario::new(p, q, budget)),
                (_, false, false) => op_q_opa(th, &OpaScenario::new(p, q, budget)),
                (_, false, true) => op_q_opa_asymptotic(th, &OpaScenario::new(p, q, budget)),
            })
        })
        .collect()
}

fn scheme_meta(t: Table, cfg: &RunConfig) -> Table {
    let t = t.with_meta("scheme", cfg.scenario.scheme.name());
    match cfg.scenario.scheme {
        Scheme::Gpa(a) => t.with_meta("a", a.a()),
        _ => t,
    }
}

/// Outage curves for both users at every threshold.
pub fn run_op(cfg: &RunConfig, out: &mut OutputDir) -> Result<Vec<Table>, CliError> {
    if cfg.scenario.scheme == Scheme::Tdma {
        return Err(crate::config::ConfigError::Invalid {
            key: "scheme.kind".into(),
            line: None,
            reason: "outage is computed for gpa or opa".into(),
        }
        .into());
    }
    let series = if cfg.needs_series() { Some(series_pair(cfg)?) } else { None };
    let mc = if cfg.wants(AnalysisKind::MonteCarlo) {
        Some(simulate_op(&cfg.scenario)?)
    } else {
        None
    };
    let mut tables = Vec::new();
    for (ti, th) in cfg.scenario.gamma_th_list.iter().enumerate() {
        for (ui, user) in ["p", "q"].iter().enumerate() {
            let metric = format!("op_{user}");
            let mut group = Vec::new();
            if let Some(series) = &series {
                for (kind, asym) in [(AnalysisKind::ClosedForm, false), (AnalysisKind::Asymptotic, true)] {
                    if cfg.wants(kind) {
                        let v = outage_curve(cfg, series, ui == 0, *th, asym)?;
                        group.push(
                            scheme_meta(Table::analytic(kind.name(), user, &metric, grid(cfg), &v), cfg)
                                .with_meta("gamma_th", th)
                                .with_meta("terms", cfg.n_terms),
                        );
                    }
                }
            }
            if let Some(mc) = &mc {
                group.push(Table::from_sweep(&mc[2 * ti + ui], user));
            }
            for t in &group {
                out.table(&format!("{metric}_{}_{}.csv", th_tag(*th), t.kind), t)?;
            }
            if cfg.emit_plots {
                let path = out.claim(&format!("{metric}_{}.svg", th_tag(*th)));
                let refs: Vec<&Table> = group.iter().collect();
                overlay(&path, &format!("user {user} outage, threshold {th}"), "outage probability", true, &refs)?;
            }
            tables.extend(group);
        }
    }
    Ok(tables)
}

/// Closed-form ergodic sum capacity of `scheme` plus, for OPA, its two bounds.
pub(crate) fn capacity_curves(
    cfg: &RunConfig,
    series: &(FtrSeries, FtrSeries),
    scheme: Scheme,
) -> Result<(Vec<f64>, Option<(Vec<f64>, Vec<f64>)>), CliError> {
    let mut main = Vec::new();
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for db in grid(cfg) {
        let budget = budget_at(cfg, *db)?;
        let (p, q) = (series.0.clone(), series.1.clone());
        match scheme {
            Scheme::Gpa(a) => main.push(ec_gpa(&GpaScenario::new(p, q, budget, a))?),
            Scheme::Tdma => main.push(ec_tdma(&p, &q, &budget)?),
            Scheme::Opa => {
                let t = ec_opa_terms(&OpaScenario::new(p, q, budget))?;
                main.push(t.approx());
                lower.push(t.lower());
                upper.push(t.upper());
            }
        }
    }
    let bounds = (scheme == Scheme::Opa).then_some((lower, upper));
    Ok((main, bounds))
}

/// Ergodic sum capacity of the configured scheme.
pub fn run_ec(cfg: &RunConfig, out: &mut OutputDir) -> Result<Vec<Table>, CliError> {
    let scheme = cfg.scenario.scheme;
    let mut group = Vec::new();
    if cfg.wants(AnalysisKind::ClosedForm) || cfg.wants(AnalysisKind::Bounds) {
        let series = series_pair(cfg)?;
        let (main, bounds) = capacity_curves(cfg, &series, scheme)?;
        let tag = |t: Table| scheme_meta(t, cfg).with_meta("terms", cfg.n_terms);
        if cfg.wants(AnalysisKind::ClosedForm) {
            group.push(tag(Table::analytic("closed_form", "sum", "ec", grid(cfg), &main)));
        }
        if let (true, Some((lo, hi))) = (cfg.wants(AnalysisKind::Bounds), bounds) {
            group.push(tag(Table::analytic("lower_bound", "sum", "ec", grid(cfg), &lo)));
            group.push(tag(Table::analytic("upper_bound", "sum", "ec", grid(cfg), &hi)));
        }
    }
    if cfg.wants(AnalysisKind::MonteCarlo) {
        group.push(Table::from_sweep(&simulate_ec(&cfg.scenario)?, "sum"));
    }
    for t in &group {
        out.table(&format!("ec_{}.csv", t.kind), t)?;
    }
    if cfg.emit_plots {
        let path = out.claim("ec.svg");
        let refs: Vec<&Table> = group.iter().collect();
        overlay(&path, &format!("ergodic sum capacity ({})", scheme.name()), "bits/s/Hz", false, &refs)?;
    }
    Ok(group)
}

/// Mean sum rate of GPA, OPA and TDMA on common channel draws.
pub fn run_sumrate(cfg: &RunConfig, out: &mut OutputDir) -> Result<Vec<Table>, CliError> {
    let schemes = [ftr_noma::noma::Scheme::Gpa(cfg.scenario.gpa_config()), Scheme::Opa, Scheme::Tdma];
    let mut group = Vec::new();
    if cfg.wants(AnalysisKind::ClosedForm) {
        let series = series_pair(cfg)?;
        for s in schemes {
            let (v, _) = capacity_curves(cfg, &series, s)?;
            group.push(
                Table::analytic("closed_form", "sum", "sum_rate", grid(cfg), &v)
                    .with_meta("scheme", s.name())
                    .with_meta("terms", cfg.n_terms),
            );
        }
    }
    if cfg.wants(AnalysisKind::MonteCarlo) {
        for sweep in simulate_sum_rate(&cfg.scenario)? {
            group.push(Table::from_sweep(&sweep, "sum"));
        }
    }
    for t in &group {
        let scheme = t.meta("scheme").unwrap_or("none").to_string();
        out.table(&format!("sum_rate_{scheme}_{}.csv", t.kind), t)?;
    }
    if cfg.emit_plots {
        let path = out.claim("sum_rate.svg");
        let refs: Vec<&Table> = group.iter().collect();
        overlay(&path, "sum rate by scheme", "bits/s/Hz", false, &refs)?;
    }
    Ok(group)
}

/// Raw selection-combined channel gains of both users, one row per draw.
pub fn run_sample(cfg: &RunConfig, count: usize, out: &mut OutputDir) -> Result<(), CliError> {
    let s = &cfg.scenario;
    let seeds = (ftr_noma::rng::derive_seed(s.seed, 1), ftr_noma::rng::derive_seed(s.seed, 2));
    let hp = draw_effective_gain(&s.user_p, s.antennas, count, seeds.0)?;
    let hq = draw_effective_gain(&s.user_q, s.antennas, count, seeds.1)?;
    let path = out.claim("samples.csv");
    let file = std::fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    w.write_record(["h_p", "h_q"]).map_err(CliError::csv)?;
    for (p, q) in hp.iter().zip(&hq) {
        w.write_record([format!("{p:.16e}"), format!("{q:.16e}")]).map_err(CliError::csv)?;
    }
    w.flush().map_err(CliError::write)?;
    Ok(())
}
