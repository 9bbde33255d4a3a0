use antx_core::evolution::{evaluate_population, init_population, EvolutionConfig, ExcavationFitness};
use antx_core::sim::ScenarioConfig;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn population_evaluation(c: &mut Criterion) {
    let cfg = EvolutionConfig { population_size: 16, scenarios_per_eval: 4, ..Default::default() };
    let population = init_population(&cfg, &mut ChaCha8Rng::seed_from_u64(1));
    let fitness = ExcavationFitness::new(ScenarioConfig::default());
    let seeds: Vec<u64> = (0..4).collect();
    let mut group = c.benchmark_group("evaluate_population");
    group.sample_size(10);
    for (name, parallel) in [("sequential", false), ("parallel", true)] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &parallel, |b, &parallel| {
            b.iter(|| evaluate_population(black_box(&population), &fitness, &seeds, parallel).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, population_evaluation);
criterion_main!(benches);
