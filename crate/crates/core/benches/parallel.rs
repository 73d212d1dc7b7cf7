//! Sequential against parallel execution of the batch loops: quotient
//! enumeration over the catalog and tower construction.

use std::hint::black_box;

use bass_serre::fixtures;
use bass_serre::group::catalog;
use bass_serre::par::Exec;
use bass_serre::quotient::{enumerate_quotients, QuotientOptions, Tower};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn quotient_enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_quotients");
    group.sample_size(10);
    for name in ["psl2z", "amalgam2"] {
        let g = fixtures::by_name(name).unwrap();
        for (mode, exec) in MODES {
            let opts = QuotientOptions { max_order: 24, exec, ..Default::default() };
            group.bench_with_input(BenchmarkId::new(mode, name), &g, |b, g| {
                b.iter(|| enumerate_quotients(black_box(g), catalog::standard(), &opts).unwrap())
            });
        }
    }
    group.finish();
}

fn tower_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("tower");
    group.sample_size(10);
    for (name, max_order) in [("dinf", 24), ("hnn", 16), ("f2", 8)] {
        let g = fixtures::by_name(name).unwrap();
        for (mode, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(mode, name), &g, |b, g| {
                b.iter(|| {
                    let t = Tower::vertex_faithful(black_box(g), max_order, exec).unwrap();
                    t.check_all_squares(exec).len()
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, quotient_enumeration, tower_build);
criterion_main!(benches);
