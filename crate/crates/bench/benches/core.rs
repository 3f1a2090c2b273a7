use std::f64::consts::PI;

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use kolocal_core::clifford::{Multivector, Signature};
use kolocal_core::ko::ko_class;
use kolocal_core::ledger::{catalog_structure, t_ind};
use kolocal_core::module::regular_module;
use kolocal_core::witten::experiments::fiber_report;
use kolocal_core::witten::{deformed_operator, spectrum, DeformedModel, EigenOptions, Profile, SectionProfile};

fn clifford(c: &mut Criterion) {
    let sig = Signature::new(4, 5);
    let x = Multivector::parse_text(sig, "1 * eps{1,2} + 2 * e{3} + 3 * eps{4} e{1,5}").unwrap();
    let y = Multivector::parse_text(sig, "1 * e{1,2,3} + -1 * eps{3} e{4} + 5 * 1").unwrap();
    c.bench_function("multivector product Cl(4,5)", |b| b.iter(|| black_box(&x) * black_box(&y)));
}

fn ko(c: &mut Criterion) {
    let m = regular_module(Signature::new(0, 3));
    c.bench_function("ko_class regular Cl(0,3)", |b| b.iter(|| ko_class(black_box(&m)).unwrap()));
}

fn spectra(c: &mut Criterion) {
    let opts = EigenOptions::default();
    let mut g = c.benchmark_group("spectra");
    g.sample_size(10);
    g.bench_function("fiber n=1 N=401 dense", |b| b.iter(|| fiber_report(1, 1.0, 10.0, 401, &opts).unwrap()));
    g.bench_function("fiber n=1 N=2001 chebyshev", |b| b.iter(|| fiber_report(1, 1.0, 10.0, 2001, &opts).unwrap()));
    let s = SectionProfile::on_circle(Profile::Sin { omega: 1.0 }, 2.0 * PI);
    let op = deformed_operator(&DeformedModel::CircleBundle { points: 400 }, &s, 10.0, None).unwrap();
    g.bench_function("trivial circle N=400 m=10", |b| b.iter(|| spectrum(&op, 6, &opts).unwrap()));
    g.finish();
}

fn ledger(c: &mut Criterion) {
    let x = catalog_structure("rp3crp3xs1").unwrap();
    c.bench_function("t-ind standard gauge", |b| b.iter(|| t_ind(black_box(&x), "standard", "one-zero").unwrap()));
}

criterion_group!(benches, clifford, ko, spectra, ledger);
criterion_main!(benches);
