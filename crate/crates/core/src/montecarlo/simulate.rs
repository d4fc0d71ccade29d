use crate::error::{invalid, Result};
use crate::ftr::{FtrParams, FtrSampler};
use crate::noma::{db_to_linear, sinr_gpa, sinr_opa, sum_rate, Scheme};
use crate::par::{map_indices, Execution};
use crate::rng::{chunk_count, chunk_len, derive_seed, substream};

use super::scenario::{Antennas, Metric, Scenario, SweepMeta, SweepResult};
use super::stats::{wilson_interval, MeanAccumulator, Z95};

fn draw_chunk(sampler: &FtrSampler, seed: u64, links: u32, chunk: usize, len: usize) -> Vec<f64> {
    let mut best = vec![0.0f64; len];
    for link in 0..links {
        let mut rng = substream(seed, link, chunk as u64);
        for b in best.iter_mut() {
            *b = b.max(sampler.draw(&mut rng));
        }
    }
    best
}

/// `n` selection-combined gains, each the largest of t·r independent FTR draws.
///
/// Link 0 reproduces [`crate::ftr::sample`] under the same seed, so adding antennas
/// never lowers any individual draw.
pub fn draw_effective_gain(params: &FtrParams, antennas: Antennas, n: usize, seed: u64) -> Result<Vec<f64>> {
    draw_effective_gain_with(params, antennas, n, seed, Execution::Auto)
}

pub fn draw_effective_gain_with(
    params: &FtrParams,
    antennas: Antennas,
    n: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<f64>> {
    let antennas = Antennas::new(antennas.tx, antennas.rx)?;
    let sampler = FtrSampler::new(params);
    Ok(map_indices(chunk_count(n), exec, |c| draw_chunk(&sampler, seed, antennas.links(), c, chunk_len(n, c))).concat())
}

/// Runs `body` on every chunk of paired (h_p, h_q) draws; results in chunk order.
fn for_each_chunk<T, F>(sc: &Scenario, exec: Execution, body: F) -> Vec<T>
where
    T: Send,
    F: Fn(&[f64], &[f64]) -> T + Sync + Send,
{
    let sp = FtrSampler::new(&sc.user_p);
    let sq = FtrSampler::new(&sc.user_q);
    let (seed_p, seed_q) = (derive_seed(sc.seed, 1), derive_seed(sc.seed, 2));
    let links = sc.antennas.links();
    map_indices(chunk_count(sc.n_samples), exec, |c| {
        let len = chunk_len(sc.n_samples, c);
        let hp = draw_chunk(&sp, seed_p, links, c, len);
        let hq = draw_chunk(&sq, seed_q, links, c, len);
        body(&hp, &hq)
    })
}

fn meta(sc: &Scenario, scheme: Scheme, gamma_th: Option<f64>) -> SweepMeta {
    SweepMeta {
        fingerprint: sc.fingerprint(),
        seed: sc.seed,
        n_samples: sc.n_samples,
        scheme,
        antennas: sc.antennas,
        gamma_th,
    }
}

fn budgets(sc: &Scenario) -> Result<Vec<crate::noma::LinkBudget>> {
    sc.gamma_bar_grid_db
        .iter()
        .map(|db| sc.budget.with_gamma_bar(db_to_linear(*db)))
        .collect()
}

/// Empirical outage of both users for every threshold, with Wilson 95% intervals.
///
/// Returns, per threshold in list order, the user-p sweep followed by the user-q sweep.
pub fn simulate_op(sc: &Scenario) -> Result<Vec<SweepResult>> {
    simulate_op_with(sc, Execution::Auto)
}

pub fn simulate_op_with(sc: &Scenario, exec: Execution) -> Result<Vec<SweepResult>> {
    sc.validate()?;
    let scheme = sc.scheme;
    if scheme == Scheme::Tdma {
        return Err(invalid("scheme", "outage is defined for the NOMA schemes only (gpa, opa)"));
    }
    let budgets = budgets(sc)?;
    let ths = &sc.gamma_th_list;
    let cells = budgets.len() * ths.len();
    // counts[(g * ths + t) * 2 + user]
    let parts = for_each_chunk(sc, exec, |hp, hq| {
        let mut counts = vec![0u64; 2 * cells];
        for (&p, &q) in hp.iter().zip(hq) {
            for (g, b) in budgets.iter().enumerate() {
                let (gp, gq) = match scheme {
                    Scheme::Gpa(cfg) => sinr_gpa(cfg.a(), b, p, q),
                    _ => sinr_opa(b, p, q),
                };
                for (t, th) in ths.iter().enumerate() {
                    let k = (g * ths.len() + t) * 2;
                    counts[k] += u64::from(gp <= *th);
                    counts[k + 1] += u64::from(gq <= *th);
                }
            }
        }
        counts
    });
    let mut counts = vec![0u64; 2 * cells];
    for part in &parts {
        for (acc, c) in counts.iter_mut().zip(part) {
            *acc += c;
        }
    }
    let n = sc.n_samples as u64;
    let mut out = Vec::with_capacity(2 * ths.len());
    for (t, th) in ths.iter().enumerate() {
        for (user, metric) in [(0, Metric::OpP), (1, Metric::OpQ)] {
            let hits: Vec<u64> = (0..budgets.len()).map(|g| counts[(g * ths.len() + t) * 2 + user]).collect();
            let ests: Vec<_> = hits.iter().map(|k| wilson_interval(*k, n, Z95)).collect();
            out.push(SweepResult {
                axis: sc.gamma_bar_grid_db.clone(),
                metric,
                estimate: ests.iter().map(|e| e.estimate).collect(),
                ci_lo: ests.iter().map(|e| e.lo).collect(),
                ci_hi: ests.iter().map(|e| e.hi).collect(),
                counts: hits,
                std_error: Vec::new(),
                meta: meta(sc, scheme, Some(*th)),
            });
        }
    }
    Ok(out)
}

fn mean_sweeps(sc: &Scenario, schemes: &[Scheme], metric: Metric, exec: Execution) -> Result<Vec<SweepResult>> {
    sc.validate()?;
    let budgets = budgets(sc)?;
    let cells = budgets.len() * schemes.len();
    let parts = for_each_chunk(sc, exec, |hp, hq| {
        let mut acc = vec![MeanAccumulator::default(); cells];
        for (&p, &q) in hp.iter().zip(hq) {
            for (g, b) in budgets.iter().enumerate() {
                for (s, scheme) in schemes.iter().enumerate() {
                    acc[g * schemes.len() + s].push(sum_rate(*scheme, b, p, q));
                }
            }
        }
        acc
    });
    let mut acc = vec![MeanAccumulator::default(); cells];
    for part in &parts {
        for (a, p) in acc.iter_mut().zip(part) {
            a.merge(p);
        }
    }
    Ok(schemes
        .iter()
        .enumerate()
        .map(|(s, scheme)| {
            let cols: Vec<&MeanAccumulator> = (0..budgets.len()).map(|g| &acc[g * schemes.len() + s]).collect();
            let estimate: Vec<f64> = cols.iter().map(|a| a.mean()).collect();
            let std_error: Vec<f64> = cols.iter().map(|a| a.std_error()).collect();
            SweepResult {
                axis: sc.gamma_bar_grid_db.clone(),
                metric,
                ci_lo: estimate.iter().zip(&std_error).map(|(m, e)| m - Z95 * e).collect(),
                ci_hi: estimate.iter().zip(&std_error).map(|(m, e)| m + Z95 * e).collect(),
                estimate,
                counts: Vec::new(),
                std_error,
                meta: meta(sc, *scheme, None),
            }
        })
        .collect())
}

/// Ergodic sum capacity of the scenario's scheme: mean of log₂(1+γ_p) + log₂(1+γ_q).
pub fn simulate_ec(sc: &Scenario) -> Result<SweepResult> {
    simulate_ec_with(sc, Execution::Auto)
}

pub fn simulate_ec_with(sc: &Scenario, exec: Execution) -> Result<SweepResult> {
    Ok(mean_sweeps(sc, &[sc.scheme], Metric::Ec, exec)?.remove(0))
}

/// Mean sum rate of GPA, OPA and TDMA on common channel draws, in that order.
///
/// The GPA fraction is the scenario's when its scheme is GPA, otherwise 0.2.
pub fn simulate_sum_rate(sc: &Scenario) -> Result<Vec<SweepResult>> {
    simulate_sum_rate_with(sc, Execution::Auto)
}

pub fn simulate_sum_rate_with(sc: &Scenario, exec: Execution) -> Result<Vec<SweepResult>> {
    mean_sweeps(sc, &[Scheme::Gpa(sc.gpa_config()), Scheme::Opa, Scheme::Tdma], Metric::SumRate, exec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ftr::sample;
    use crate::montecarlo::stats::{ks_critical, ks_distance};
    use crate::noma::{GpaConfig, LinkBudget};

    fn case1() -> (FtrParams, FtrParams) {
        (FtrParams::new(10.8, 5.0, 0.5, 0.2887).unwrap(), FtrParams::new(5.5, 10.0, 0.35, 0.2132).unwrap())
    }

    fn scenario(scheme: Scheme) -> Scenario {
        let (p, q) = case1();
        let mut sc = Scenario::new(p, q, LinkBudget::near_far(1.5, 0.15, 1.0).unwrap(), scheme, vec![0.0, 10.0, 20.0]);
        sc.n_samples = 100_000;
        sc.seed = 11;
        sc.gamma_th_list = vec![1e-12, 2.0, 5.0];
        sc
    }

    #[test]
    fn siso_gain_is_plain_sample() {
        let (p, _) = case1();
        let a = draw_effective_gain(&p, Antennas::SISO, 70_000, 5).unwrap();
        assert_eq!(a, sample(&p, 70_000, 5));
        assert!(draw_effective_gain(&p, Antennas { tx: 0, rx: 2 }, 10, 5).is_err());
    }

    #[test]
    fn selection_dominates_pointwise() {
        let (p, _) = case1();
        let siso = draw_effective_gain(&p, Antennas::SISO, 50_000, 5).unwrap();
        let mimo = draw_effective_gain(&p, Antennas::new(2, 1).unwrap(), 50_000, 5).unwrap();
        assert!(siso.iter().zip(&mimo).all(|(s, m)| m >= s));
    }

    #[test]
    fn rayleigh_max_of_four() {
        let p = FtrParams::new(2.0, 0.0, 0.0, 0.5).unwrap();
        let n = 200_000;
        let mut h = draw_effective_gain(&p, Antennas::new(2, 2).unwrap(), n, 8).unwrap();
        let d = ks_distance(&mut h, |x| (1.0 - (-2.0 * x).exp()).powi(4));
        assert!(d < ks_critical(n, 0.01), "{d}");
    }

    #[test]
    fn outage_basics() {
        let sc = scenario(Scheme::Gpa(GpaConfig::new(0.2).unwrap()));
        let res = simulate_op(&sc).unwrap();
        assert_eq!(res.len(), 6);
        assert!(res[0].estimate.iter().all(|v| *v == 0.0));
        assert!(res[0].ci_half_width().iter().all(|w| *w < 1e-4));
        // a = 0.2, γ_th = 5: γ_q < (1−a)/a = 4 always
        assert!(res[5].estimate.iter().all(|v| *v == 1.0));
        for g in 0..3 {
            assert!(res[2].estimate[g] <= res[4].estimate[g]);
        }
        assert_eq!(res[2].meta.gamma_th, Some(2.0));
        let tdma = Scenario { scheme: Scheme::Tdma, ..sc };
        assert!(simulate_op(&tdma).is_err());
    }

    #[test]
    fn deterministic_across_execution() {
        let sc = scenario(Scheme::Opa);
        assert_eq!(simulate_op_with(&sc, Execution::Auto).unwrap(), simulate_op_with(&sc, Execution::Sequential).unwrap());
        assert_eq!(simulate_ec_with(&sc, Execution::Auto).unwrap(), simulate_ec_with(&sc, Execution::Sequential).unwrap());
    }

    #[test]
    fn scheme_ordering_on_common_draws() {
        let sc = scenario(Scheme::Opa);
        let r = simulate_sum_rate(&sc).unwrap();
        for g in 0..3 {
            assert!(r[1].estimate[g] >= r[0].estimate[g]);
            assert!(r[1].estimate[g] >= r[2].estimate[g]);
        }
        let ec = simulate_ec(&sc).unwrap();
        assert_eq!(ec.estimate, r[1].estimate);
        let (lo, hi) = ec.band(1, 3.0);
        assert!(lo < ec.estimate[1] && ec.estimate[1] < hi);
    }

    #[test]
    fn rejects_bad_scenarios() {
        let mut sc = scenario(Scheme::Opa);
        sc.n_samples = 10;
        assert!(simulate_ec(&sc).is_err());
        let mut sc = scenario(Scheme::Opa);
        sc.gamma_bar_grid_db.clear();
        assert!(simulate_ec(&sc).is_err());
        let mut sc = scenario(Scheme::Opa);
        sc.gamma_th_list = vec![-1.0];
        assert!(simulate_op(&sc).is_err());
    }
}
