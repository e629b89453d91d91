use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use epoint_bench::epoint_core::{jost, Jost, Layer, PotentialSpec};
use epoint_bench::{demo, k_samples};

fn bench_eval(c: &mut Criterion) {
    let (spec, p) = demo();
    let j = Jost::new(&spec, p).unwrap();
    let ks = k_samples(64);
    c.bench_function("jost/value", |b| {
        b.iter(|| {
            for &k in &ks {
                black_box(j.value(black_box(k)).unwrap());
            }
        })
    });
    c.bench_function("jost/full_jet", |b| {
        b.iter(|| {
            for &k in &ks {
                black_box(j.eval(black_box(k)).unwrap());
            }
        })
    });
}

fn bench_layers(c: &mut Criterion) {
    let mut group = c.benchmark_group("jost/layers");
    let ks = k_samples(16);
    for n in [2usize, 8, 32] {
        let layers: Vec<Layer> = (0..n)
            .map(|i| Layer::new(0.5, if i % 2 == 0 { 6.0 } else { 0.0 }).unwrap())
            .collect();
        let spec = PotentialSpec::new("stack", layers, [None, None]).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &spec, |b, spec| {
            b.iter(|| {
                for &k in &ks {
                    black_box(jost::eval(spec, spec.base_point(), k).unwrap());
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_eval, bench_layers);
criterion_main!(benches);
