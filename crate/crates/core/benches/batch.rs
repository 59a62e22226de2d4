//! Sequential against rayon-parallel replica batches.
//!
//! With one core available both rows should match; the gap grows with the
//! pool size.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kpzlab_core::dyson::gue_spectra;
use kpzlab_core::png::{height_observables, GrowthGeometry, Probe, SimConfig};
use kpzlab_core::Execution;

fn modes() -> [(&'static str, Execution); 2] {
    [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)]
}

fn png_droplet(c: &mut Criterion) {
    let cfg = SimConfig { tau: 100.0, intensity: 2.0, geometry: GrowthGeometry::Droplet, seed: 1, keep_lines: false };
    let probes = [Probe::new(0.0, 100.0)];
    let mut g = c.benchmark_group("png_droplet_tau100_x64");
    g.sample_size(10);
    for (name, exec) in modes() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| height_observables(&cfg, 64, &probes, exec).unwrap())
        });
    }
    g.finish();
}

fn gue(c: &mut Criterion) {
    let mut g = c.benchmark_group("gue_n100_x32");
    g.sample_size(10);
    for (name, exec) in modes() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| gue_spectra(100, 32, 7, exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, png_droplet, gue);
criterion_main!(benches);
