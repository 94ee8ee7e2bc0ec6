use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lcca_bench::{matched_lineup, pair, K_CCA};
use lcca_core::Algorithm;

fn matched_budget(c: &mut Criterion) {
    for (label, decay) in [("steep", 1.0), ("flat", 0.0)] {
        let data = pair(5000, 300, decay);
        let (x, y) = (&data.x, &data.y);
        let mut group = c.benchmark_group(format!("matched_budget/{label}"));
        group.sample_size(10);
        for algorithm in matched_lineup(x, y) {
            let id = BenchmarkId::new(algorithm.name(), algorithm.budget_knob().unwrap_or(0));
            group.bench_function(id, |bench| {
                bench.iter(|| algorithm.run(x, y, K_CCA, 0, None).unwrap())
            });
        }
        group.finish();
    }
}

fn exact(c: &mut Criterion) {
    let data = pair(5000, 300, 1.0);
    let algorithm = Algorithm::Exact { ridge: false };
    let mut group = c.benchmark_group("exact");
    group.sample_size(10);
    group.bench_function("p=300", |bench| {
        bench.iter(|| algorithm.run(&data.x, &data.y, K_CCA, 0, None).unwrap())
    });
    group.finish();
}

criterion_group!(benches, matched_budget, exact);
criterion_main!(benches);
