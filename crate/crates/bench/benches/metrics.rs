use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use readcompat_core::compat::{label_histogram, ndcg, pearson, rjsd, rrnss, to_ranks};
use std::hint::black_box;

// Cheap deterministic pseudo-random values, so the bench needs no RNG crate.
fn values(n: usize, salt: u64) -> Vec<f64> {
    (0..n as u64)
        .map(|i| {
            let x = (i.wrapping_mul(6364136223846793005).wrapping_add(salt)) >> 11;
            x as f64 / (1u64 << 53) as f64
        })
        .collect()
}

fn metrics(c: &mut Criterion) {
    let mut group = c.benchmark_group("metrics");
    for n in [100, 1_000, 10_000] {
        let (a, b) = (values(n, 1), values(n, 7));
        let (ra, rb) = (to_ranks(&a), to_ranks(&b));
        let (p, q) = (label_histogram(&a, 10).unwrap(), label_histogram(&b, 10).unwrap());
        group.bench_with_input(BenchmarkId::new("rjsd", n), &n, |bench, _| {
            bench.iter(|| rjsd(black_box(&p), black_box(&q)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("histogram", n), &n, |bench, _| {
            bench.iter(|| label_histogram(black_box(&a), 10).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("rrnss", n), &n, |bench, _| {
            bench.iter(|| rrnss(black_box(&ra), black_box(&rb)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("ndcg", n), &n, |bench, _| {
            bench.iter(|| ndcg(black_box(&a)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("pearson", n), &n, |bench, _| {
            bench.iter(|| pearson(black_box(&a), black_box(&b)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, metrics);
criterion_main!(benches);
