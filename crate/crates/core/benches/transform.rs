use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

use vilenkin::lab::suites::random_signal;
use vilenkin::par::Execution;
use vilenkin::transform::{transform_batch_with, transform_fast_with};
use vilenkin::GroupSpec;

fn modes() -> Vec<(&'static str, Execution)> {
    let mut v = vec![("seq", Execution::Sequential)];
    #[cfg(feature = "parallel")]
    v.push(("par", Execution::Parallel));
    v
}

fn single(c: &mut Criterion) {
    let mut g = c.benchmark_group("transform_fast");
    for levels in [10usize, 14, 18] {
        let spec = GroupSpec::walsh(levels).unwrap();
        let f = random_signal(&spec, 7, 0);
        g.throughput(Throughput::Elements(spec.order() as u64));
        for (name, exec) in modes() {
            g.bench_with_input(BenchmarkId::new(name, spec.order()), &f, |b, f| {
                b.iter(|| transform_fast_with(exec, black_box(f)))
            });
        }
    }
    g.finish();
}

fn batch(c: &mut Criterion) {
    let mut g = c.benchmark_group("transform_batch");
    let spec = GroupSpec::new(vec![3, 4, 5, 6, 2]).unwrap();
    let signals: Vec<_> = (0..64).map(|i| random_signal(&spec, 7, i)).collect();
    g.throughput(Throughput::Elements((signals.len() * spec.order()) as u64));
    for (name, exec) in modes() {
        g.bench_function(name, |b| b.iter(|| transform_batch_with(exec, black_box(&signals))));
    }
    g.finish();
}

criterion_group!(benches, single, batch);
criterion_main!(benches);
