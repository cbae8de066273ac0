use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_bigint::BigInt;
use spiral_core::step::{classify, classify_by_residue, next};
use spiral_core::trajectory::{spiral_trajectory, sweep, DEFAULT_BUDGET};
use spiral_core::SpiralValue;

fn classify_routes(c: &mut Criterion) {
    let xs: Vec<SpiralValue> = (-5_000i64..5_000).map(SpiralValue::from).collect();
    c.bench_function("classify/valuation", |b| {
        b.iter(|| xs.iter().map(|x| classify(black_box(x)).get()).sum::<i64>())
    });
    c.bench_function("classify/residue-scan", |b| {
        b.iter(|| xs.iter().map(|x| classify_by_residue(black_box(x)).get()).sum::<i64>())
    });
}

fn trajectories(c: &mut Criterion) {
    c.bench_function("next/large-value", |b| {
        let x = SpiralValue(BigInt::from(3u8).pow(200));
        b.iter(|| next(black_box(&x)))
    });
    c.bench_function("spiral_trajectory/31", |b| {
        // spiral value -5 encodes 31
        let x = SpiralValue::from(-5);
        b.iter(|| spiral_trajectory(black_box(&x), DEFAULT_BUDGET).unwrap())
    });
    c.bench_function("sweep/10^4", |b| b.iter(|| sweep(black_box(10_000), DEFAULT_BUDGET, 1)));
}

criterion_group!(benches, classify_routes, trajectories);
criterion_main!(benches);
