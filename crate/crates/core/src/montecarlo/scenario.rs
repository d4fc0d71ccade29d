use crate::error::{invalid, Result};
use crate::ftr::FtrParams;
use crate::noma::{GpaConfig, LinkBudget, Scheme};

/// Default realizations per grid point.
pub const DEFAULT_SAMPLES: usize = 10_000_000;
/// Smallest sample count accepted by the simulators.
pub const MIN_SAMPLES: usize = 10_000;

/// Transmit and receive antenna counts; selection combining picks the best of t·r links.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Antennas {
    pub tx: u32,
    pub rx: u32,
}

impl Antennas {
    pub const SISO: Antennas = Antennas { tx: 1, rx: 1 };

    pub fn new(tx: u32, rx: u32) -> Result<Self> {
        if tx == 0 || rx == 0 {
            return Err(invalid("antennas", format!("{tx}x{rx}; both counts must be at least 1")));
        }
        Ok(Self { tx, rx })
    }

    pub fn links(&self) -> u32 {
        self.tx * self.rx
    }
}

impl Default for Antennas {
    fn default() -> Self {
        Self::SISO
    }
}

/// One simulation experiment. The budget's γ̄ is ignored; the grid supplies it.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub user_p: FtrParams,
    pub user_q: FtrParams,
    pub budget: LinkBudget,
    pub scheme: Scheme,
    pub antennas: Antennas,
    pub n_samples: usize,
    pub seed: u64,
    pub gamma_th_list: Vec<f64>,
    pub gamma_bar_grid_db: Vec<f64>,
}

impl Scenario {
    /// SISO scenario with the default sample count, seed 0 and threshold list {1}.
    pub fn new(user_p: FtrParams, user_q: FtrParams, budget: LinkBudget, scheme: Scheme, gamma_bar_grid_db: Vec<f64>) -> Self {
        Self {
            user_p,
            user_q,
            budget,
            scheme,
            antennas: Antennas::SISO,
            n_samples: DEFAULT_SAMPLES,
            seed: 0,
            gamma_th_list: vec![1.0],
            gamma_bar_grid_db,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < MIN_SAMPLES {
            return Err(invalid("n_samples", format!("{}; at least {MIN_SAMPLES} required", self.n_samples)));
        }
        if self.gamma_bar_grid_db.is_empty() {
            return Err(invalid("gamma_bar_grid_db", "grid is empty"));
        }
        if let Some(g) = self.gamma_bar_grid_db.iter().find(|g| !g.is_finite()) {
            return Err(invalid("gamma_bar_grid_db", format!("{g} is not finite")));
        }
        if self.gamma_th_list.is_empty() {
            return Err(invalid("gamma_th_list", "threshold list is empty"));
        }
        if let Some(t) = self.gamma_th_list.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(invalid("gamma_th_list", format!("{t}; thresholds must be positive")));
        }
        Antennas::new(self.antennas.tx, self.antennas.rx)?;
        Ok(())
    }

    /// Stable 64-bit FNV-1a digest of the scenario's debug form.
    pub fn fingerprint(&self) -> u64 {
        format!("{self:?}")
            .bytes()
            .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
    }

    /// Power fraction used for the fixed-allocation curve of sum-rate comparisons.
    pub fn gpa_config(&self) -> GpaConfig {
        match self.scheme {
            Scheme::Gpa(cfg) => cfg,
            _ => GpaConfig::new(0.2).expect("0.2 is admissible"),
        }
    }
}

/// Simulated quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    OpP,
    OpQ,
    Ec,
    SumRate,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::OpP => "op_p",
            Metric::OpQ => "op_q",
            Metric::Ec => "ec",
            Metric::SumRate => "sum_rate",
        }
    }

    pub fn is_outage(&self) -> bool {
        matches!(self, Metric::OpP | Metric::OpQ)
    }
}

/// Provenance of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepMeta {
    pub fingerprint: u64,
    pub seed: u64,
    pub n_samples: usize,
    pub scheme: Scheme,
    pub antennas: Antennas,
    /// Threshold of an outage sweep.
    pub gamma_th: Option<f64>,
}

/// Estimates with 95% intervals on a γ̄ grid (dB).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: Vec<f64>,
    pub metric: Metric,
    pub estimate: Vec<f64>,
    pub ci_lo: Vec<f64>,
    pub ci_hi: Vec<f64>,
    /// Success counts behind outage estimates; empty for mean metrics.
    pub counts: Vec<u64>,
    /// Standard errors behind mean estimates; empty for outage metrics.
    pub std_error: Vec<f64>,
    pub meta: SweepMeta,
}

impl SweepResult {
    pub fn ci_half_width(&self) -> Vec<f64> {
        self.ci_lo.iter().zip(&self.ci_hi).map(|(lo, hi)| 0.5 * (hi - lo)).collect()
    }

    pub fn len(&self) -> usize {
        self.axis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axis.is_empty()
    }

    /// Interval at grid point `i` widened to `z` standard deviations.
    pub fn band(&self, i: usize, z: f64) -> (f64, f64) {
        if self.metric.is_outage() {
            let w = super::stats::wilson_interval(self.counts[i], self.meta.n_samples as u64, z);
            (w.lo, w.hi)
        } else {
            (self.estimate[i] - z * self.std_error[i], self.estimate[i] + z * self.std_error[i])
        }
    }
}
