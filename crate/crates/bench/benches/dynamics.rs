use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use erratic::experiments::uniform_placement;
use erratic::rng::{derived_rng, Coin};
use erratic::sim1d::{first_passage, Mode, SwarmState1D, WALK_STEP_CAP};
use erratic::sim2d::{convex_hull, uniform_square, SwarmState2D};

fn step_1d(c: &mut Criterion) {
    let mut group = c.benchmark_group("sim1d_step");
    for n in [100usize, 1000] {
        let xs = uniform_placement(&mut derived_rng(7, "bench", n as u64), n, n as f64);
        group.bench_with_input(BenchmarkId::from_parameter(n), &xs, |b, xs| {
            let mut s = SwarmState1D::new(xs, 0.1, 7, Mode::Bilateral).unwrap();
            b.iter(|| black_box(s.step()));
        });
    }
    group.finish();
}

fn gather_1d(c: &mut Criterion) {
    let xs = uniform_placement(&mut derived_rng(7, "bench", 0), 100, 100.0);
    c.bench_function("sim1d_gather_n100", |b| {
        b.iter(|| {
            let mut s = SwarmState1D::new(&xs, 0.1, 7, Mode::Bilateral).unwrap();
            black_box(s.run_until_gathered(10_000_000).t)
        });
    });
}

fn hull(c: &mut Criterion) {
    let mut group = c.benchmark_group("convex_hull");
    for n in [100usize, 1000] {
        let pts = uniform_square(&mut derived_rng(7, "bench-hull", n as u64), n, 30.0);
        group.bench_with_input(BenchmarkId::from_parameter(n), &pts, |b, pts| {
            b.iter(|| black_box(convex_hull(pts).unwrap()));
        });
    }
    group.finish();
}

fn step_2d(c: &mut Criterion) {
    let pts = uniform_square(&mut derived_rng(7, "bench-2d", 0), 100, 30.0);
    c.bench_function("sim2d_step_n100", |b| {
        let mut s = SwarmState2D::new(&pts, 0.1, 7).unwrap();
        b.iter(|| black_box(s.step().unwrap()));
    });
}

fn walk(c: &mut Criterion) {
    let coin = Coin::new(0.3);
    let mut rng = derived_rng(7, "bench-walk", 0);
    c.bench_function("first_passage_eps0.3", |b| {
        b.iter(|| black_box(first_passage(&coin, &mut rng, WALK_STEP_CAP)));
    });
}

criterion_group!(benches, step_1d, gather_1d, hull, step_2d, walk);
criterion_main!(benches);
