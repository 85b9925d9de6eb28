use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use majortom::sampler::{run_campaign, select_scene};
use majortom::SamplerConfig;
use majortom_bench::{availability, provider};

fn selection(c: &mut Criterion) {
    let (cells, provider) = provider(200, 300, 7);
    let config = SamplerConfig::new(availability(), 42);
    c.bench_function("select_scene", |b| {
        let mut i = 0;
        b.iter(|| {
            i = (i + 1) % cells.len();
            select_scene(cells[i], &provider, &config).unwrap()
        })
    });

    let mut group = c.benchmark_group("run_campaign");
    group.sample_size(20);
    for workers in [1, 4] {
        group.bench_with_input(BenchmarkId::from_parameter(workers), &workers, |b, &workers| {
            b.iter(|| run_campaign(&cells, &provider, &config, workers).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, selection);
criterion_main!(benches);
