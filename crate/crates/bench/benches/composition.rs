use criterion::{black_box, criterion_group, criterion_main, Criterion};
use spiral_core::composition::{chain_i, search_category2, SearchConfig};

fn composition(c: &mut Criterion) {
    c.bench_function("chain/eleven-steps", |b| {
        b.iter(|| chain_i(black_box(&[2, -1, 1, 1, 1, 1, 1, 1, 1, 1, 2])).unwrap())
    });
    for prune in [true, false] {
        let name = if prune { "search/depth8/pruned" } else { "search/depth8/full" };
        let config = SearchConfig {
            prune,
            ..SearchConfig::new(8)
        };
        c.bench_function(name, |b| b.iter(|| search_category2(black_box(&config)).unwrap()));
    }
}

criterion_group!(benches, composition);
criterion_main!(benches);
