use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use factorscreen::design::full_factorial_with;
use factorscreen::exec::Strategy;
use factorscreen::screening::rank_effects_with;
use factorscreen::simulate::replicate;
use factorscreen::{full_factorial, main_effect, pb12_named, simulate_response};
use factorscreen::{FactorSpec, SimModel};

const STRATEGIES: [(&str, Strategy); 2] = [("sequential", Strategy::Sequential), ("parallel", Strategy::Parallel)];

fn two_level(k: usize) -> Vec<FactorSpec> {
    (0..k).map(|i| FactorSpec::two_level(format!("F{i}"))).collect()
}

fn seed_sweep(c: &mut Criterion) {
    let design = pb12_named(&["X", "A", "B", "C", "D", "E"]).unwrap();
    let model = SimModel::screening_example(0);
    let mut group = c.benchmark_group("seed_sweep");
    for n in [1_000u64, 10_000] {
        let seeds: Vec<u64> = (0..n).collect();
        for (name, strategy) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, n), &seeds, |b, seeds| {
                b.iter(|| {
                    replicate(&design, &model, black_box(seeds), strategy, |d| {
                        main_effect(d, "X").map(|e| e.mean_difference)
                    })
                    .unwrap()
                })
            });
        }
    }
    group.finish();
}

fn ranking(c: &mut Criterion) {
    let design = full_factorial(&two_level(14)).unwrap();
    let model = (0..14).fold(SimModel::new(50.0).with_noise(1.0, 7), |m, i| {
        m.with_main(format!("F{i}"), i as f64)
    });
    let data = simulate_response(&design, &model).unwrap();
    let mut group = c.benchmark_group("rank_effects");
    for (name, strategy) in STRATEGIES {
        group.bench_function(BenchmarkId::new(name, design.n_runs()), |b| {
            b.iter(|| rank_effects_with(black_box(&data), strategy).unwrap())
        });
    }
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("full_factorial");
    for k in [10, 14, 16] {
        let factors = two_level(k);
        for (name, strategy) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, k), &factors, |b, f| {
                b.iter(|| full_factorial_with(black_box(f), strategy).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = seed_sweep, ranking, enumeration
}
criterion_main!(benches);
