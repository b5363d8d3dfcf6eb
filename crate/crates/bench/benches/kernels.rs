use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use heatlab::convlab::{l1_deviation, Profile};
use heatlab::spherical::rank1::phi_rank1;
use heatlab::{HeatEngine, SpaceSpec};
use num_complex::Complex64;

fn engine(tag: &str) -> HeatEngine {
    HeatEngine::new(&SpaceSpec::from_tag(tag).unwrap()).unwrap()
}

fn spherical(c: &mut Criterion) {
    let jac = SpaceSpec::from_tag("Hr:2").unwrap().jacobi().unwrap();
    let mut g = c.benchmark_group("phi_rank1");
    for r in [0.5, 5.0, 40.0] {
        g.bench_with_input(BenchmarkId::from_parameter(r), &r, |b, &r| {
            b.iter(|| phi_rank1(&jac, Complex64::new(1.3, 0.0), black_box(r)).unwrap())
        });
    }
    g.finish();
}

fn heat_kernel(c: &mut Criterion) {
    let mut g = c.benchmark_group("heat_kernel");
    for tag in ["Hr:3", "Hr:2", "A2c"] {
        let e = engine(tag);
        let h: Vec<f64> = e.space.rho.iter().map(|x| 20.0 * x).collect();
        g.bench_function(tag, |b| b.iter(|| e.ln_heat_kernel(black_box(10.0), &h).unwrap()));
    }
    g.finish();

    let e = engine("Hr:2");
    c.bench_function("kernel_table_t40", |b| b.iter(|| e.kernel_table(black_box(40.0), 120.0).unwrap()));
}

fn deviations(c: &mut Criterion) {
    let e = engine("Hr:3");
    let mut g = c.benchmark_group("l1_deviation");
    g.sample_size(10);
    for t in [10.0, 80.0] {
        g.bench_with_input(BenchmarkId::from_parameter(t), &t, |b, &t| {
            b.iter(|| l1_deviation(&e, Profile::bump(1.0), t).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, spherical, heat_kernel, deviations);
criterion_main!(benches);
