use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use g2calib::lab::{
    cartan_linearization, deformation_map, sample_immersion, FieldSpec, FlatModel, ImmersionSpec,
    Profile,
};
use g2calib::{G2Constants, Rational, SigmaSource, Vector7};

fn algebra(c: &mut Criterion) {
    let g = G2Constants::shared();
    let u = Vector7([0.3, -0.1, 0.7, 0.2, 0.0, 0.5, -0.4]);
    let v = Vector7([0.1, 0.9, -0.2, 0.0, 0.3, -0.1, 0.2]);
    let w = Vector7([-0.5, 0.2, 0.1, 0.6, -0.3, 0.0, 0.4]);
    let z = Vector7([0.2, 0.2, 0.2, -0.2, 0.2, -0.2, 0.8]);
    c.bench_function("hodge_star phi0", |b| {
        b.iter(|| black_box(&g.phi).hodge_star())
    });
    c.bench_function("cross f64", |b| {
        b.iter(|| g.cross(black_box(&u), black_box(&v)))
    });
    c.bench_function("chi f64", |b| b.iter(|| g.chi(black_box(&u), &v, &w)));
    c.bench_function("sigma table f64", |b| {
        b.iter(|| g.sigma_table(black_box(&u), &v, &w, &z))
    });
    c.bench_function("coassociator residual f64", |b| {
        b.iter(|| g.coassociator_residual([black_box(&u), &v, &w, &z], &1.0, SigmaSource::Table))
    });
    let gq: G2Constants<Rational> = G2Constants::new();
    let ui = Vector7::<Rational>::from_i64([1, -2, 0, 3, 1, 0, -1]);
    let vi = Vector7::<Rational>::from_i64([0, 1, 2, -1, 0, 3, 1]);
    let wi = Vector7::<Rational>::from_i64([2, 0, -1, 0, 1, 1, 0]);
    let one = Rational::from_integer(1.into());
    c.bench_function("associator residual exact", |b| {
        b.iter(|| gq.associator_residual(black_box(&ui), &vi, &wi, &one))
    });
}

fn lab(c: &mut Criterion) {
    let s = sample_immersion(&FlatModel::default(), &ImmersionSpec::HlCoordinate, 16).unwrap();
    let field = FieldSpec::single(
        "e1",
        Profile::Sin {
            axis: 6,
            amplitude: 1.0,
            mode: 1,
            phase: 0.0,
        },
    );
    let v = field.normal_field(&s, false).unwrap();
    let mut group = c.benchmark_group("lab 16^3");
    group.sample_size(20);
    group.bench_function("deformation map", |b| {
        b.iter(|| deformation_map(&s, &v, black_box(1e-2)).unwrap())
    });
    group.bench_function("cartan + hodge routes", |b| {
        b.iter(|| cartan_linearization(&s, black_box(&v)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, algebra, lab);
criterion_main!(benches);
