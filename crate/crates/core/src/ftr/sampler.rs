use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use super::FtrParams;
use crate::par::{map_indices, Execution};
use crate::rng::{chunk_count, chunk_len, substream};

/// Generative FTR model h = |√ζ(V₁e^{iφ₁} + V₂e^{iφ₂}) + X + iY|².
///
/// Only the phase difference φ₂ − φ₁ matters because the diffuse part is circularly
/// symmetric, so one uniform phase is drawn per sample.
#[derive(Debug, Clone)]
pub struct FtrSampler {
    fluctuation: Gamma<f64>,
    v1: f64,
    v2: f64,
    sigma: f64,
}

impl FtrSampler {
    pub fn new(params: &FtrParams) -> Self {
        let (v1, v2) = params.specular_amplitudes();
        let m = params.m();
        Self {
            // shape m, unit mean
            fluctuation: Gamma::new(m, 1.0 / m).expect("m > 0 is a FtrParams invariant"),
            v1,
            v2,
            sigma: params.sigma(),
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let zeta: f64 = self.fluctuation.sample(rng);
        let phase = std::f64::consts::TAU * rng.random::<f64>();
        let amp = zeta.sqrt();
        let (s, c) = phase.sin_cos();
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        let re = amp * (self.v1 + self.v2 * c) + self.sigma * x;
        let im = amp * self.v2 * s + self.sigma * y;
        re * re + im * im
    }
}

/// `count` independent draws of h, deterministic in `seed`.
pub fn sample(params: &FtrParams, count: usize, seed: u64) -> Vec<f64> {
    sample_link(params, count, seed, 0, Execution::Auto)
}

/// Draws of link `link` of a multi-antenna channel; link 0 equals [`sample`].
pub(crate) fn sample_link(params: &FtrParams, count: usize, seed: u64, link: u32, exec: Execution) -> Vec<f64> {
    let sampler = FtrSampler::new(params);
    map_indices(chunk_count(count), exec, |c| {
        let mut rng = substream(seed, link, c as u64);
        (0..chunk_len(count, c)).map(|_| sampler.draw(&mut rng)).collect::<Vec<_>>()
    })
    .concat()
}
