//! Parallel against sequential execution of the data-parallel kernels.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_bigint::BigInt;

use otkit::analysis::{maximal_order, min_volume_scan};
use otkit::exec::Exec;
use otkit::geometry::{mc_volume, FundamentalDomainData};
use otkit::units::{unit_group, UnitConfig};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn monte_carlo(c: &mut Criterion) {
    let o = maximal_order(&"T^3 + T^2 - 1".parse().unwrap()).unwrap();
    let u = unit_group(&o, &UnitConfig::default()).unwrap();
    let d = FundamentalDomainData::new(&o, &u.totally_positive_generators, 128).unwrap();
    let mut g = c.benchmark_group("mc_volume_100k");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| mc_volume(black_box(&d), 100_000, 42, exec).unwrap())
        });
    }
    g.finish();
}

fn unit_search(c: &mut Criterion) {
    let o = maximal_order(&"T^4 - 2*T^3 + T - 1".parse().unwrap()).unwrap();
    let mut g = c.benchmark_group("unit_group_quartic");
    g.sample_size(10);
    for (name, exec) in MODES {
        let cfg = UnitConfig { exec, ..UnitConfig::default() };
        g.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| unit_group(black_box(&o), cfg).unwrap())
        });
    }
    g.finish();
}

fn scan(c: &mut Criterion) {
    let bound = BigInt::from(200);
    let mut g = c.benchmark_group("scan_s1");
    g.sample_size(10);
    for (name, exec) in MODES {
        let cfg = UnitConfig { exec, ..UnitConfig::default() };
        g.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| min_volume_scan(1, 4, &bound, cfg).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, monte_carlo, unit_search, scan);
criterion_main!(benches);
