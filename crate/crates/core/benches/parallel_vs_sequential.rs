use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use systolic::exec;
use systolic::generators::{genus_g_polygon, torus_grid};
use systolic::geometry::z2_systole;
use systolic::verify::{verify_ball_growth, verify_main_inequality};
use systolic::z2::cohomology_basis;

fn modes() -> [(&'static str, bool); 2] {
    [("sequential", false), ("parallel", true)]
}

fn systole(c: &mut Criterion) {
    let mc = torus_grid(8, 8, 1.0, 1.3).unwrap();
    let basis = cohomology_basis(mc.complex(), 1).unwrap();
    let mut g = c.benchmark_group("z2_systole_torus_8x8_level2");
    for (name, parallel) in modes() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            exec::set_parallel(parallel);
            b.iter(|| z2_systole(&mc, &basis, 2).unwrap())
        });
    }
    g.finish();
}

fn main_inequality(c: &mut Criterion) {
    let mc = genus_g_polygon(2, 1.0).unwrap();
    let mut g = c.benchmark_group("verify_main_genus2_level2");
    g.sample_size(20);
    for (name, parallel) in modes() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            exec::set_parallel(parallel);
            b.iter(|| verify_main_inequality(&mc, 2).unwrap())
        });
    }
    g.finish();
}

fn ball_growth(c: &mut Criterion) {
    let mc = torus_grid(8, 8, 1.0, 1.0).unwrap();
    let radii = [0.1, 0.2, 0.3, 0.4];
    let mut g = c.benchmark_group("ball_growth_torus_8x8_level2");
    g.sample_size(20);
    for (name, parallel) in modes() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            exec::set_parallel(parallel);
            b.iter(|| verify_ball_growth(&mc, &radii, 2).unwrap())
        });
    }
    g.finish();
    exec::set_parallel(true);
}

criterion_group!(benches, systole, main_inequality, ball_growth);
criterion_main!(benches);
