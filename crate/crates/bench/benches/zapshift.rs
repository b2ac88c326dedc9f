use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zapshift_core::analytics::expected_switches;
use zapshift_core::{ChannelGrid, PopularityModel, Scenario, ScenarioConfig, SwitchingModel};

fn bench_expected_switches(c: &mut Criterion) {
    let mut group = c.benchmark_group("expected_switches");
    for n in [100, 300, 500] {
        let pop = PopularityModel::zipf(n, 1.0).unwrap();
        let sw = SwitchingModel::destination_proportional(&pop);
        let grid = ChannelGrid::one_step(n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| expected_switches(black_box(&grid), &sw).unwrap())
        });
    }
    group.finish();
}

fn bench_episode(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_episode");
    for max_wait in [1, 4, 10] {
        let scenario = Scenario::new(ScenarioConfig { max_wait, ..Default::default() }).unwrap();
        let mut ep = 0u64;
        group.bench_with_input(BenchmarkId::new("max_wait", max_wait), &max_wait, |b, _| {
            b.iter(|| {
                ep += 1;
                black_box(scenario.run_episode(ep))
            })
        });
    }
    group.finish();
}

fn bench_randomized_grid(c: &mut Criterion) {
    let pop = PopularityModel::zipf(100, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    c.bench_function("randomized_grid/100", |b| {
        b.iter(|| {
            let u: Vec<f64> = (0..100).map(|_| rng.random()).collect();
            ChannelGrid::randomized(&pop, &u).unwrap()
        })
    });
}

criterion_group!(benches, bench_expected_switches, bench_episode, bench_randomized_grid);
criterion_main!(benches);
