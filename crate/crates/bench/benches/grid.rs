use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use majortom::geogrid::{BBox, LatLon};
use majortom::GridSpec;
use majortom_bench::coordinates;

fn encode_decode(c: &mut Criterion) {
    let spec = GridSpec::default();
    let points = coordinates(10_000, 1);
    c.bench_function("coords_to_cell x10k", |b| {
        b.iter(|| {
            for &(lat, lon) in &points {
                black_box(spec.coords_to_cell(lat, lon).unwrap());
            }
        })
    });
    let cells: Vec<_> = points
        .iter()
        .map(|&(lat, lon)| spec.coords_to_cell(lat, lon).unwrap())
        .collect();
    c.bench_function("cell_to_coords x10k", |b| {
        b.iter(|| {
            for &cell in &cells {
                black_box(spec.cell_to_coords(cell).unwrap());
            }
        })
    });
}

fn queries(c: &mut Criterion) {
    let spec = GridSpec::default();
    let mut group = c.benchmark_group("cells_in_bbox");
    for deg in [1.0, 5.0, 20.0] {
        let bbox = BBox::new(40.0, 40.0 + deg, 10.0, 10.0 + deg).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(deg), &bbox, |b, bbox| {
            b.iter(|| spec.cells_in_bbox(*bbox).count())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("cells_in_radius");
    for km in [50.0, 500.0, 2000.0] {
        group.bench_with_input(BenchmarkId::from_parameter(km), &km, |b, &km| {
            b.iter(|| spec.cells_in_radius(LatLon::new(48.0, 2.0), km).unwrap().len())
        });
    }
    group.finish();
}

criterion_group!(benches, encode_decode, queries);
criterion_main!(benches);
