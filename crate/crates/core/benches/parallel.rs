//! Sequential against parallel execution of the data-parallel paths.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ncfa::ecc::{EccConfig, SolveMode};
use ncfa::indep::{distance_covariance_with, estimate_udg, TestMethod};
use ncfa::pipeline::{run_synthetic_experiment, RunConfig, SweepConfig};
use ncfa::synth::{make_ground_truth, sample_dataset, sample_er_udg};
use ncfa::vae::TrainConfig;
use ncfa::Execution;
use rand_distr::{Distribution, StandardNormal};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn udg(c: &mut Criterion) {
    let truth = make_ground_truth(
        &sample_er_udg(16, 0.3, 1).unwrap(),
        1,
        SolveMode::Auto,
        &EccConfig::default(),
    )
    .unwrap();
    let sample = sample_dataset(&truth, 500, 2).unwrap();
    let mut group = c.benchmark_group("estimate_udg");
    group.sample_size(10);
    for method in [TestMethod::Dcov, TestMethod::Xi] {
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(format!("{method:?}"), name), &exec, |b, &exec| {
                b.iter(|| estimate_udg(black_box(&sample), 0.05, method, 0, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn dcov(c: &mut Criterion) {
    let mut r = ncfa::rng::rng(3);
    let x: Vec<f64> = (0..5000).map(|_| StandardNormal.sample(&mut r)).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|v| {
            let e: f64 = StandardNormal.sample(&mut r);
            v * v + e
        })
        .collect();
    let mut group = c.benchmark_group("distance_covariance_5000");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| distance_covariance_with(black_box(&x), black_box(&y), exec).unwrap())
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let cfg = SweepConfig {
        n: 8,
        densities: vec![0.2, 0.6],
        graphs_per_density: 2,
        datasets_per_graph: 2,
        samples: 300,
        run: RunConfig {
            train: TrainConfig {
                epochs: 5,
                ..TrainConfig::default()
            },
            ..RunConfig::default()
        },
        truth_model: true,
        seed: 0,
    };
    let mut group = c.benchmark_group("synthetic_sweep");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| run_synthetic_experiment(black_box(&cfg), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, udg, dcov, sweep);
criterion_main!(benches);
