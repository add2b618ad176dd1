use std::hint::black_box;

use criterion::{BenchmarkId, Criterion};
use wigstat::spectral::{goe_matrix, symmetric_eigenstates};
use wigstat::{propagator_matrix, unitary_eigensystem, MapConfig, RngStream, Spin, TopParams};

pub fn bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectral");
    group.sample_size(20);
    for j in [25u32, 50] {
        let spin = Spin::integer(j).expect("positive spin");
        let top = MapConfig::KickedTop(
            TopParams::new(10.0, std::f64::consts::FRAC_PI_2, spin).expect("valid top"),
        );
        let u = propagator_matrix(&top).expect("propagator");
        group.bench_with_input(
            BenchmarkId::new("unitary_eigensystem", spin.dim()),
            &u,
            |b, u| b.iter(|| unitary_eigensystem(black_box(u)).expect("eigensystem")),
        );

        let h = goe_matrix(spin.dim(), &mut RngStream::new(4, 0));
        group.bench_with_input(
            BenchmarkId::new("goe_eigenstates", spin.dim()),
            &h,
            |b, h| b.iter(|| symmetric_eigenstates(black_box(h.clone())).expect("eigenstates")),
        );
    }
    group.finish();
}
