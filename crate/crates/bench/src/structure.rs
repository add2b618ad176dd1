use std::hint::black_box;

use criterion::{BenchmarkId, Criterion, Throughput};
use wigstat::wfl::{line_structure, DEFAULT_OVERSAMPLE};
use wigstat::{random_wfl, structure_statistics, Geometry, RngStream, Spin, WFLine};

fn lines(geometry: Geometry, count: usize) -> Vec<WFLine> {
    let mut rng = RngStream::new(3, 0);
    (0..count)
        .map(|_| random_wfl(geometry, &mut rng).expect("random line"))
        .collect()
}

pub fn bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("structure");
    let geometries = [
        ("torus_101", Geometry::Torus(101)),
        (
            "sphere_25",
            Geometry::Sphere(Spin::integer(25).expect("positive spin")),
        ),
    ];
    for (name, geometry) in geometries {
        let sample = lines(geometry, 1);
        group.bench_with_input(
            BenchmarkId::new("line_structure", name),
            &sample[0],
            |b, line| {
                b.iter(|| line_structure(black_box(line), DEFAULT_OVERSAMPLE).expect("zeros"))
            },
        );

        let batch = lines(geometry, 256);
        group.throughput(Throughput::Elements(batch.len() as u64));
        group.bench_with_input(
            BenchmarkId::new("statistics_256", name),
            &batch,
            |b, batch| {
                b.iter(|| {
                    structure_statistics(black_box(batch), DEFAULT_OVERSAMPLE).expect("stats")
                })
            },
        );
    }
    group.finish();
}
