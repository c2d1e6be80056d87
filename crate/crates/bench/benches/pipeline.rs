use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use stratify_bench::planar_annulus;
use stratify_core::datasets::GeneratorSpec;
use stratify_core::{build_rips_filtration, compute_barcode_with, detect, generate, DetectorConfig, Reduction, Shape};

fn annulus_barcode(c: &mut Criterion) {
    let mut group = c.benchmark_group("annulus");
    for n in [30, 60, 90] {
        let pts = planar_annulus(n, 0.12, 0.14, 1);
        group.bench_with_input(BenchmarkId::new("filtration", n), &pts, |b, pts| {
            b.iter(|| build_rips_filtration(black_box(pts), 2, 0.28).unwrap())
        });
        let f = build_rips_filtration(&pts, 2, 0.28).unwrap();
        for reduction in [Reduction::Cohomology, Reduction::Homology] {
            let name = format!("barcode_{reduction:?}").to_lowercase();
            group.bench_with_input(BenchmarkId::new(name, n), &f, |b, f| {
                b.iter(|| compute_barcode_with(black_box(f), 1, reduction).unwrap())
            });
        }
    }
    group.finish();
}

fn detect_planes(c: &mut Criterion) {
    let cloud = generate(&GeneratorSpec {
        count: 1000,
        seed: 7,
        ..GeneratorSpec::new(Shape::Planes)
    })
    .unwrap();
    let cfg = DetectorConfig::new(0.15, 0.18, 2);
    let mut group = c.benchmark_group("detect");
    group.sample_size(10);
    group.bench_function("planes_1000", |b| b.iter(|| detect(black_box(&cloud), &cfg).unwrap()));
    group.finish();
}

criterion_group!(benches, annulus_barcode, detect_planes);
criterion_main!(benches);
