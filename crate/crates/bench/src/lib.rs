//! Shared fixtures for the benchmarks.

use majortom::sampler::{ProviderScene, SyntheticProvider};
use majortom::{CellId, GridSpec, TimeWindow, Timestamp};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const AVAILABILITY_START: i64 = 1_514_764_800; // 2018-01-01
pub const AVAILABILITY_END: i64 = 1_577_836_800; // 2020-01-01

pub fn availability() -> TimeWindow {
    TimeWindow::new(
        Timestamp::from_unix(AVAILABILITY_START),
        Timestamp::from_unix(AVAILABILITY_END),
    )
    .unwrap()
}

/// Random (lat, lon) pairs over the whole sphere.
pub fn coordinates(n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n)
        .map(|_| (rng.gen_range(-90.0..90.0), rng.gen_range(-180.0..180.0)))
        .collect()
}

/// `n_cells` cells, each with `per_cell` scenes spread over the availability
/// period and cloud fractions drawn uniformly.
pub fn provider(n_cells: usize, per_cell: usize, seed: u64) -> (Vec<CellId>, SyntheticProvider) {
    let spec = GridSpec::default();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut cells = Vec::with_capacity(n_cells);
    let mut scenes = Vec::with_capacity(n_cells * per_cell);
    for i in 0..n_cells {
        let row = (i as i32 % 1600) - 800;
        let (lo, hi) = spec.col_range(row).unwrap();
        let cell = CellId::new(row, rng.gen_range(lo..=hi));
        if cells.contains(&cell) {
            continue;
        }
        cells.push(cell);
        for j in 0..per_cell {
            let refined: f64 = rng.gen_range(0.0..1.0);
            scenes.push(ProviderScene {
                cell,
                scene_id: format!("S2_{j:04}"),
                acquired: Timestamp::from_unix(rng.gen_range(AVAILABILITY_START..AVAILABILITY_END)),
                rough_cloud: (refined + rng.gen_range(-0.2..0.2)).clamp(0.0, 1.0),
                refined_cloud: Some(refined),
                nodata_fraction: Some(0.0),
            });
        }
    }
    (cells, SyntheticProvider::new(scenes).unwrap())
}
