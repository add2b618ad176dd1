use std::hint::black_box;

use criterion::{BenchmarkId, Criterion};
use wigstat::sphere::KickedTop;
use wigstat::{random_state, RngStream, SphereTransform, Spin, TopParams};

pub fn bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("sphere");
    for j in [10u32, 25, 50] {
        let spin = Spin::integer(j).expect("positive spin");
        let psi = random_state(spin.dim(), &mut RngStream::new(2, 0)).expect("valid dimension");
        let transform = SphereTransform::shared(spin);
        group.bench_with_input(BenchmarkId::new("coefficients", j), &psi, |b, psi| {
            b.iter(|| {
                transform
                    .coefficients(black_box(psi))
                    .expect("coefficients")
            })
        });

        let w = transform.coefficients(&psi).expect("coefficients");
        group.bench_with_input(BenchmarkId::new("grid_values", j), &w, |b, w| {
            b.iter(|| transform.grid_values(black_box(w)).expect("grid"))
        });

        let top = KickedTop::new(
            TopParams::new(10.0, std::f64::consts::FRAC_PI_2, spin).expect("valid top"),
        );
        group.bench_with_input(BenchmarkId::new("kicked_top_step", j), &psi, |b, psi| {
            b.iter(|| top.step(black_box(psi)).expect("step"))
        });
    }
    group.finish();
}
