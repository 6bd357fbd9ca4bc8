use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dampwave::attract::hausdorff_semidistance;
use dampwave::geometry::{laplacian_apply, DomainKind, Grid, GridConfig};
use dampwave::model::{ModelConfig, NonlinearitySpec, Variant};
use dampwave::random::{bump, normalized, rng, smooth_state};
use dampwave::{Ensemble, Stepper};

fn line(n: usize) -> Arc<Grid> {
    Grid::new(&GridConfig::line(DomainKind::TruncatedWholeSpace, -40.0, 40.0, n)).unwrap()
}

fn plane(n: usize) -> Arc<Grid> {
    Grid::new(&GridConfig::plane(
        DomainKind::TruncatedWholeSpace,
        (-20.0, 20.0),
        (-20.0, 20.0),
        (n, n),
    ))
    .unwrap()
}

fn laplacian(c: &mut Criterion) {
    let mut group = c.benchmark_group("laplacian");
    for (label, grid) in [("1d-1599", line(1599)), ("2d-127", plane(127))] {
        let u = bump(&grid, [0.0, 0.0], 5.0);
        group.bench_with_input(BenchmarkId::from_parameter(label), &u, |b, u| {
            b.iter(|| laplacian_apply(black_box(u)))
        });
    }
    group.finish();
}

fn step(c: &mut Criterion) {
    let mut group = c.benchmark_group("step");
    for (label, grid) in [("1d-1599", line(1599)), ("2d-127", plane(127))] {
        let g = normalized(&bump(&grid, [0.0, 0.0], 5.0)).unwrap();
        let model = ModelConfig::new(
            Variant::MassTermWholeSpace,
            1.0,
            2.0,
            0.5,
            NonlinearitySpec::SaturatingCubic,
            g,
        )
        .unwrap();
        let stepper = Stepper::new(&model, 0.5 * grid.min_spacing()).unwrap();
        let w0 = smooth_state(&grid, model.variant, model.constants().delta, 5.0, &mut rng(1, 0)).unwrap();
        // warm the history so the benchmark times the steady-state step
        let w = stepper.advance(&w0, 2).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(label), &w, |b, w| {
            b.iter(|| stepper.step(black_box(w)).unwrap())
        });
    }
    group.finish();
}

fn hausdorff(c: &mut Criterion) {
    let grid = line(799);
    let delta = 0.2;
    let members = |seed: u64| {
        let states = (0..64)
            .map(|i| smooth_state(&grid, Variant::MassTermWholeSpace, delta, 1.0, &mut rng(seed + i, 0)).unwrap())
            .collect();
        Ensemble::from_states(states).unwrap()
    };
    let (a, b) = (members(0), members(1000));
    c.bench_function("hausdorff/64x64-799", |bench| {
        bench.iter(|| hausdorff_semidistance(black_box(&a), black_box(&b), Variant::MassTermWholeSpace).unwrap())
    });
}

criterion_group!(benches, laplacian, step, hausdorff);
criterion_main!(benches);
