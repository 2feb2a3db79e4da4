//! Each workload runs inside a one-thread pool (the sequential baseline) and
//! inside the default pool.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sweeping::convex::{ConvexSet, DykstraConfig, ExcessMethod};
use sweeping::moving::{MovingSet, PolyPath, SetFamily};
use sweeping::solver::convergence_table;
use sweeping::verify::check_projection_estimates;

fn v(xs: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(xs)
}

fn pools() -> Vec<(String, rayon::ThreadPool)> {
    let default = rayon::ThreadPoolBuilder::new().build().unwrap();
    let n = default.current_num_threads();
    vec![
        ("sequential".to_string(), rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        (format!("default pool ({n} threads)"), default),
    ]
}

fn monte_carlo_excess(c: &mut Criterion) {
    let cap = ConvexSet::new_intersection(
        vec![
            ConvexSet::new_ball(v(&[0.0, 0.0, 0.0]), 1.0).unwrap(),
            ConvexSet::new_halfspace(v(&[0.0, 0.0, 1.0]), 0.0).unwrap(),
        ],
        v(&[0.0, 0.0, 0.5]),
        DykstraConfig::default(),
    )
    .unwrap();
    let target = ConvexSet::new_ball(v(&[0.5, 0.0, 0.0]), 0.8).unwrap();
    let method = ExcessMethod::MonteCarlo { samples: 1 << 14, seed: 1 };
    let mut g = c.benchmark_group("monte_carlo_excess");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| cap.excess(&target, method).unwrap()))
        });
    }
    g.finish();
}

fn level_table(c: &mut Criterion) {
    let m = MovingSet::continuous(
        2.0,
        SetFamily::Ball {
            center: PolyPath::linear(v(&[0.0, 0.0]), v(&[1.0, 0.0])),
            radius: PolyPath::scalar(1.0),
        },
        1.0,
    )
    .unwrap();
    let y0 = v(&[0.0, 0.5]);
    let mut g = c.benchmark_group("convergence_table_6_14");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| convergence_table(&m, &y0, 6, 14).unwrap()))
        });
    }
    g.finish();
}

fn projection_batch(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut point = |s: f64| DVector::from_fn(3, |_, _| rng.random_range(-s..s));
    let cases: Vec<_> = (0..20_000)
        .map(|_| {
            let a = ConvexSet::new_ball(point(2.0), 1.0).unwrap();
            let b = ConvexSet::new_ball(point(2.0), 1.5).unwrap();
            (a, b, point(4.0), point(4.0))
        })
        .collect();
    let mut g = c.benchmark_group("projection_estimates_20k");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| check_projection_estimates(&cases, 1e-9).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, monte_carlo_excess, level_table, projection_batch);
criterion_main!(benches);
