//! TOML run configuration.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use ftr_noma::ftr::FtrParams;
use ftr_noma::montecarlo::{Antennas, Scenario, DEFAULT_SAMPLES, MIN_SAMPLES};
use ftr_noma::noma::{GpaConfig, LinkBudget, Scheme};
use ftr_noma::ftr::DEFAULT_TERMS;
use serde::Deserialize;
use thiserror::Error;

/// Largest γ̄ grid accepted from a range specification.
const MAX_GRID: usize = 10_000;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("{}`{key}`: {reason}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Invalid {
        key: String,
        line: Option<usize>,
        reason: String,
    },

    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Which families of curves a run produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalysisKind {
    ClosedForm,
    Asymptotic,
    Bounds,
    MonteCarlo,
}

impl AnalysisKind {
    pub fn name(&self) -> &'static str {
        match self {
            AnalysisKind::ClosedForm => "closed_form",
            AnalysisKind::Asymptotic => "asymptotic",
            AnalysisKind::Bounds => "bounds",
            AnalysisKind::MonteCarlo => "monte_carlo",
        }
    }
}

/// A validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub outputs: PathBuf,
    pub emit_plots: bool,
    pub analysis: BTreeSet<AnalysisKind>,
    pub n_terms: usize,
}

impl RunConfig {
    pub fn wants(&self, kind: AnalysisKind) -> bool {
        self.analysis.contains(&kind)
    }

    /// True when any series-based (non-simulated) curve is requested.
    pub fn needs_series(&self) -> bool {
        self.analysis.iter().any(|k| *k != AnalysisKind::MonteCarlo)
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub terms: Option<usize>,
    pub plots: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    user_p: RawUser,
    user_q: RawUser,
    link: RawLink,
    #[serde(default)]
    scheme: RawScheme,
    #[serde(default)]
    gpa: RawGpa,
    sweep: RawSweep,
    #[serde(default)]
    mc: RawMc,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawUser {
    m: f64,
    k: f64,
    delta: f64,
    sigma: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLink {
    q_p: f64,
    q_q: f64,
}

#[derive(Debug, Deserialize, Clone, Copy, Default)]
#[serde(rename_all = "lowercase")]
enum SchemeKind {
    Gpa,
    #[default]
    Opa,
    Tdma,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawScheme {
    #[serde(default)]
    kind: SchemeKind,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGpa {
    #[serde(default = "default_a")]
    a: f64,
}

impl Default for RawGpa {
    fn default() -> Self {
        Self { a: default_a() }
    }
}

fn default_a() -> f64 {
    0.2
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum GridSpec {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    gamma_bar_db: GridSpec,
    #[serde(default = "default_thresholds")]
    gamma_th: Vec<f64>,
}

fn default_thresholds() -> Vec<f64> {
    vec![1.0]
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMc {
    #[serde(default = "default_samples")]
    samples: usize,
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default = "one")]
    tx_antennas: u32,
    #[serde(default = "one")]
    rx_antennas: u32,
}

impl Default for RawMc {
    fn default() -> Self {
        Self {
            samples: default_samples(),
            seed: default_seed(),
            tx_antennas: 1,
            rx_antennas: 1,
        }
    }
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

fn default_seed() -> u64 {
    1
}

fn one() -> u32 {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    #[serde(default = "default_dir")]
    dir: PathBuf,
    #[serde(default)]
    plots: bool,
    #[serde(default = "default_analysis")]
    analysis: Vec<AnalysisKind>,
    #[serde(default = "default_terms")]
    terms: usize,
}

impl Default for RawOutput {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            plots: false,
            analysis: default_analysis(),
            terms: default_terms(),
        }
    }
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_analysis() -> Vec<AnalysisKind> {
    vec![AnalysisKind::ClosedForm, AnalysisKind::Asymptotic, AnalysisKind::Bounds, AnalysisKind::MonteCarlo]
}

fn default_terms() -> usize {
    DEFAULT_TERMS
}

/// 1-based line of `key` inside `[section]`, if the document spells it out.
fn locate(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
            if current == section && key.is_empty() {
                return Some(i + 1);
            }
            continue;
        }
        if current == section {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn invalid(&self, section: &str, key: &str, reason: impl Into<String>) -> ConfigError {
        let line = locate(self.text, section, key).or_else(|| locate(self.text, section, ""));
        ConfigError::Invalid {
            key: format!("{section}.{key}"),
            line,
            reason: reason.into(),
        }
    }

    /// Maps a library validation error onto the config key it came from.
    fn lib_error(&self, section: &str, err: ftr_noma::Error) -> ConfigError {
        match err {
            ftr_noma::Error::InvalidParameter { name, reason } => self.invalid(section, &name.to_lowercase(), reason),
            other => self.invalid(section, "", other.to_string()),
        }
    }

    fn user(&self, section: &str, raw: &RawUser) -> Result<FtrParams, ConfigError> {
        FtrParams::new(raw.m, raw.k, raw.delta, raw.sigma).map_err(|e| self.lib_error(section, e))
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax {
        line: e.span().map(|s| line_of(text, s.start)).unwrap_or(1),
        message: e.message().to_string(),
    })?;
    let ctx = Ctx { text };
    let user_p = ctx.user("user_p", &raw.user_p)?;
    let user_q = ctx.user("user_q", &raw.user_q)?;

    for (key, v) in [("q_p", raw.link.q_p), ("q_q", raw.link.q_q)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(ctx.invalid("link", key, format!("{v}; gains must be positive and finite")));
        }
    }
    let budget = LinkBudget::near_far(raw.link.q_p, raw.link.q_q, 1.0)
        .map_err(|_| ctx.invalid("link", "q_q", format!("q_q = {} must be smaller than q_p = {}", raw.link.q_q, raw.link.q_p)))?;

    let gpa = GpaConfig::new(raw.gpa.a).map_err(|_| ctx.invalid("gpa", "a", format!("{}; must satisfy 0 < a < 0.5", raw.gpa.a)))?;
    let scheme = match raw.scheme.kind {
        SchemeKind::Gpa => Scheme::Gpa(gpa),
        SchemeKind::Opa => Scheme::Opa,
        SchemeKind::Tdma => Scheme::Tdma,
    };

    let grid = match raw.sweep.gamma_bar_db {
        GridSpec::List(v) => v,
        GridSpec::Range { start, stop, step } => {
            if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
                return Err(ctx.invalid("sweep", "gamma_bar_db", "range needs finite start <= stop and step > 0"));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
            if n > MAX_GRID {
                return Err(ctx.invalid("sweep", "gamma_bar_db", format!("{n} points; at most {MAX_GRID}")));
            }
            (0..n).map(|i| start + i as f64 * step).collect()
        }
    };
    if grid.is_empty() {
        return Err(ctx.invalid("sweep", "gamma_bar_db", "grid is empty"));
    }
    if let Some(g) = grid.iter().find(|g| !g.is_finite()) {
        return Err(ctx.invalid("sweep", "gamma_bar_db", format!("{g} is not finite")));
    }
    if raw.sweep.gamma_th.is_empty() {
        return Err(ctx.invalid("sweep", "gamma_th", "threshold list is empty"));
    }
    if let Some(t) = raw.sweep.gamma_th.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(ctx.invalid("sweep", "gamma_th", format!("{t}; thresholds are linear and must be positive")));
    }

    if raw.mc.samples < MIN_SAMPLES {
        return Err(ctx.invalid("mc", "samples", format!("{}; at least {MIN_SAMPLES}", raw.mc.samples)));
    }
    let antennas = Antennas::new(raw.mc.tx_antennas, raw.mc.rx_antennas)
        .map_err(|_| ctx.invalid("mc", if raw.mc.tx_antennas == 0 { "tx_antennas" } else { "rx_antennas" }, "must be at least 1"))?;

    if raw.output.analysis.is_empty() {
        return Err(ctx.invalid("output", "analysis", "select at least one of closed_form, asymptotic, bounds, monte_carlo"));
    }
    if raw.output.terms == 0 {
        return Err(ctx.invalid("output", "terms", "must be at least 1"));
    }
    let analysis: BTreeSet<_> = raw.output.analysis.into_iter().collect();
    if antennas != Antennas::SISO && analysis.iter().any(|k| *k != AnalysisKind::MonteCarlo) {
        return Err(ctx.invalid(
            "output",
            "analysis",
            "closed forms describe a single-antenna link; use analysis = [\"monte_carlo\"] with multiple antennas",
        ));
    }

    Ok(RunConfig {
        scenario: Scenario {
            user_p,
            user_q,
            budget,
            scheme,
            antennas,
            n_samples: raw.mc.samples,
            seed: raw.mc.seed,
            gamma_th_list: raw.sweep.gamma_th,
            gamma_bar_grid_db: grid,
        },
        outputs: raw.output.dir,
        emit_plots: raw.output.plots,
        analysis,
        n_terms: raw.output.terms,
    })
}

/// Reads, parses and applies command-line overrides.
pub fn load_config(path: &Path, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let mut cfg = parse_config(&text)?;
    apply_overrides(&mut cfg, overrides)?;
    Ok(cfg)
}

pub fn apply_overrides(cfg: &mut RunConfig, o: &Overrides) -> Result<(), ConfigError> {
    let flag = |key: &str, reason: String| ConfigError::Invalid {
        key: format!("--{key}"),
        line: None,
        reason,
    };
    if let Some(out) = &o.out {
        cfg.outputs = out.clone();
    }
    if let Some(seed) = o.seed {
        cfg.scenario.seed = seed;
    }
    if let Some(n) = o.samples {
        if n < MIN_SAMPLES {
            return Err(flag("samples", format!("{n}; at least {MIN_SAMPLES}")));
        }
        cfg.scenario.n_samples = n;
    }
    if let Some(t) = o.terms {
        if t == 0 {
            return Err(flag("terms", "must be at least 1".into()));
        }
        cfg.n_terms = t;
    }
    cfg.emit_plots |= o.plots;
    Ok(())
}
