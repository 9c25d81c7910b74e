use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use exshift::exec::Execution;
use exshift::genericity::sample_rectangle_genericity;

fn genericity(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_rectangle_genericity");
    group.sample_size(10);
    for (name, exec) in [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)] {
        group.bench_with_input(BenchmarkId::new(name, 32), &exec, |b, &exec| {
            b.iter(|| sample_rectangle_genericity(7, 32, 6, &[4, 8], exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, genericity);
criterion_main!(benches);
