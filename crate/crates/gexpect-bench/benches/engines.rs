use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use gexpect_core::*;

fn bench_lattice_dp(c: &mut Criterion) {
    let seq = SequenceSpec::from_builder(Builder::ScaledInterval { a: 1.0, b: 2.0 }).unwrap();
    let phi = TestFunction::cosine();
    c.bench_function("lattice_dp_two_scale_n64", |b| {
        b.iter(|| {
            evaluate_sum_expectation(
                black_box(&seq),
                64,
                Scaling::InvSqrtN,
                black_box(&phi),
                DpMode::Lattice,
            )
            .unwrap()
        })
    });
}

fn bench_interp_dp(c: &mut Criterion) {
    let seq = SequenceSpec::from_builder(Builder::HausdorffDecay {
        sigma_lo2: 1.0,
        sigma_hi2: 4.0,
        c: 1.0,
    })
    .unwrap();
    let phi = TestFunction::cosine();
    c.bench_function("interp_dp_hausdorff_decay_n32", |b| {
        b.iter(|| {
            evaluate_sum_expectation(
                black_box(&seq),
                32,
                Scaling::InvSqrtN,
                black_box(&phi),
                DpMode::Interpolated { spacing: 2e-3 },
            )
            .unwrap()
        })
    });
}

fn bench_gheat_1d(c: &mut Criterion) {
    let theta = CovariancePolytope::interval(1.0, 4.0).unwrap();
    let phi = TestFunction::cosine();
    let res = GridResolution::with_dx(0.05);
    c.bench_function("gheat_1d_dx_0_05", |b| {
        b.iter(|| gnormal_expectation(black_box(&theta), black_box(&phi), &res).unwrap())
    });
}

fn bench_hausdorff(c: &mut Criterion) {
    let probes = random_unit_matrices(3, 8, 17);
    let t1 = CovariancePolytope::new(
        3,
        probes[..4]
            .iter()
            .map(|m| {
                // Shift random symmetric probes into the PSD cone.
                let bump = SymMatrix::identity(3).scale(2.0);
                m.add(&bump)
            })
            .collect(),
    )
    .unwrap();
    let t2 = CovariancePolytope::new(
        3,
        probes[4..]
            .iter()
            .map(|m| m.add(&SymMatrix::identity(3).scale(2.5)))
            .collect(),
    )
    .unwrap();
    c.bench_function("hausdorff_3d_4x4_vertices", |b| {
        b.iter(|| hausdorff(black_box(&t1), black_box(&t2)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_lattice_dp,
    bench_interp_dp,
    bench_gheat_1d,
    bench_hausdorff
);
criterion_main!(benches);
