use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use orbital_heat::graph::{build_star, poincare_random};
use orbital_heat::orbits::{enumerate_ball, Builtin, EnumerationConfig};
use orbital_heat::PointH3;

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    let full = std::thread::available_parallelism().map_or(4, |n| n.get());
    [("sequential", 1), ("parallel", full)]
        .into_iter()
        .map(|(name, n)| (name, rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap()))
        .collect()
}

fn enumeration(c: &mut Criterion) {
    let g = Builtin::Schottky { length: 3.0 }.presentation().unwrap();
    let j = PointH3::basepoint();
    let cfg = EnumerationConfig::default();
    let mut group = c.benchmark_group("enumerate_schottky_r20");
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| enumerate_ball(&g, &j, &j, 20.0, &cfg).unwrap().len()))
        });
    }
    group.finish();
}

fn random_poincare(c: &mut Criterion) {
    let g = build_star(3, 80).unwrap();
    let mut group = c.benchmark_group("poincare_random_star3_r32");
    group.sample_size(20);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| poincare_random(&g, 0, 32, 2000, 7)))
        });
    }
    group.finish();
}

criterion_group!(benches, enumeration, random_poincare);
criterion_main!(benches);
