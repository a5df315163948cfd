use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use liyorke_bench::{disk_point, sqrt2_family};
use liyorke_core::dynamics::{liyorke_verdict, orbit_distance_series, State, SystemHandle, VerdictOptions};
use liyorke_core::plane::{f_power, IterateRequest};

fn closed_form_iterate(c: &mut Criterion) {
    let z = disk_point(0.5, 0.1);
    c.bench_function("f_power n=10^6", |b| {
        b.iter(|| f_power(black_box(&z), IterateRequest::steps(1_000_000)).unwrap())
    });
}

fn distance_series(c: &mut Criterion) {
    let fam = sqrt2_family();
    let x = State::Plane(fam.disk_point(0).unwrap());
    let y = State::Plane(fam.disk_point(1).unwrap());
    c.bench_function("disk-f series horizon 10^4", |b| {
        b.iter(|| orbit_distance_series(&SystemHandle::DiskF, black_box(&x), &y, 10_000, 1).unwrap())
    });
    c.bench_function("disk-f verdict horizon 10^4", |b| {
        b.iter(|| {
            liyorke_verdict(
                &SystemHandle::DiskF,
                black_box(&x),
                &y,
                None,
                &VerdictOptions::default(),
            )
            .unwrap()
        })
    });
}

criterion_group!(benches, closed_form_iterate, distance_series);
criterion_main!(benches);
