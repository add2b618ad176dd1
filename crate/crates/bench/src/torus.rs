use std::f64::consts::FRAC_PI_3;
use std::hint::black_box;

use criterion::{BenchmarkId, Criterion, Throughput};
use wigstat::torus::{coherent_state_torus, SawtoothMap, TorusTransform};
use wigstat::{random_state, RngStream, TorusMapParams};

pub fn bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("torus");
    for n in [101usize, 729, 2187] {
        let psi = random_state(n, &mut RngStream::new(1, 0)).expect("valid dimension");
        let transform = TorusTransform::new(n).expect("odd dimension");
        group.throughput(Throughput::Elements((n * n) as u64));
        group.bench_with_input(BenchmarkId::new("wigner", n), &psi, |b, psi| {
            b.iter(|| transform.wigner(black_box(psi)).expect("transform"))
        });

        let map = SawtoothMap::new(TorusMapParams::new(0.5, 1, n).expect("valid map"))
            .expect("valid map");
        let packet = coherent_state_torus(2.0 * FRAC_PI_3, FRAC_PI_3, n).expect("valid packet");
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new("sawtooth_step", n), &packet, |b, psi| {
            b.iter(|| map.step(black_box(psi)).expect("step"))
        });
    }
    group.finish();
}
