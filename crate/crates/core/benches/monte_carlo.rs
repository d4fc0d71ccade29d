use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ftr_noma::ftr::FtrParams;
use ftr_noma::montecarlo::{draw_effective_gain_with, simulate_op_with, Antennas, Scenario};
use ftr_noma::noma::{LinkBudget, Scheme};
use ftr_noma::par::Execution;
use std::hint::black_box;

const SAMPLES: usize = 1 << 20;

fn modes() -> [(&'static str, Execution); 2] {
    [("parallel", Execution::Auto), ("sequential", Execution::Sequential)]
}

fn gains(c: &mut Criterion) {
    let p = FtrParams::new(10.8, 5.0, 0.5, 0.2887).unwrap();
    let mut group = c.benchmark_group("effective_gain");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::new(name, SAMPLES), &exec, |b, &exec| {
            b.iter(|| draw_effective_gain_with(black_box(&p), Antennas::SISO, SAMPLES, 1, exec).unwrap())
        });
    }
    group.finish();
}

fn outage_sweep(c: &mut Criterion) {
    let p = FtrParams::new(10.8, 5.0, 0.5, 0.2887).unwrap();
    let q = FtrParams::new(5.5, 10.0, 0.35, 0.2132).unwrap();
    let budget = LinkBudget::new(1.5, 0.15, 1.0).unwrap();
    let mut sc = Scenario::new(p, q, budget, Scheme::Opa, (0..=8).map(|i| 5.0 * i as f64).collect());
    sc.n_samples = SAMPLES;
    sc.gamma_th_list = vec![2.0, 5.0, 10.0];
    let mut group = c.benchmark_group("outage_sweep");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::new(name, SAMPLES), &exec, |b, &exec| {
            b.iter(|| simulate_op_with(black_box(&sc), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, gains, outage_sweep);
criterion_main!(benches);
