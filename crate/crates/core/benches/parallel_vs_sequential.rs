use std::f64::consts::{FRAC_PI_4, PI};
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use exchange_phase::measurement::{estimate_phase_with, std_dev, Bootstrap};
use exchange_phase::rng::derive_seed;
use exchange_phase::*;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn probs(beta: f64, phi: f64) -> OutcomeProbs {
    let ket = prepare_lr(&PreparationSettings::new(beta, phi).unwrap());
    let rho = noisy_state(&ket_to_density(&ket).unwrap(), &NoiseModel::default()).unwrap();
    outcome_probs(&rotate_density(&rho)).unwrap()
}

fn bootstrap(c: &mut Criterion) {
    let counts = sample_counts(&probs(FRAC_PI_4, 1.0), 5000, 7).unwrap();
    let mut group = c.benchmark_group("bootstrap");
    for resamples in [1_000usize, 10_000] {
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, resamples), &resamples, |b, &n| {
                let boot = Bootstrap::new(n, 11).with_execution(exec);
                b.iter(|| {
                    let values = boot.replicate(black_box(&counts), estimate_o).unwrap();
                    std_dev(&values)
                })
            });
        }
    }
    group.finish();
}

fn phase_grid(c: &mut Criterion) {
    let grid: Vec<_> = (0..=24).map(|k| probs(FRAC_PI_4, k as f64 * PI / 24.0)).collect();
    let mut group = c.benchmark_group("phase_grid");
    group.sample_size(20);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                exec.try_map(grid.len(), |i| {
                    let counts = sample_counts(&grid[i], 5000, derive_seed(3, 2 * i as u64))?;
                    let o = estimate_o(&counts)?;
                    let boot = Bootstrap::new(1000, derive_seed(3, 2 * i as u64 + 1))
                        .with_execution(Execution::Sequential);
                    estimate_phase_with(o, FRAC_PI_4, 0.977, &counts, &boot)
                })
                .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bootstrap, phase_grid);
criterion_main!(benches);
