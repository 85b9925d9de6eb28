mod common;

use common::brute::check_selection;
use common::gen;
use majortom::sampler::{campaign_stats, run_campaign, select_scene, Outcome, ProviderScene, SyntheticProvider};
use majortom::{CellId, SamplerConfig, SelectionResult, TimeWindow, Timestamp};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn availability() -> TimeWindow {
    TimeWindow::new("2018-01-01".parse().unwrap(), "2020-01-01".parse().unwrap()).unwrap()
}

fn to_jsonl(results: &[SelectionResult]) -> Vec<u8> {
    let mut out = Vec::new();
    for r in results {
        serde_json::to_writer(&mut out, r).unwrap();
        out.push(b'\n');
    }
    out
}

#[test]
fn soundness_on_random_pools() {
    let mut rng = StdRng::seed_from_u64(20);
    let (cells, scenes) = gen::scene_pools(&mut rng, 500);
    let provider = SyntheticProvider::new(scenes).unwrap();
    let config = SamplerConfig::new(availability(), 2024);
    let (results, records) = run_campaign(&cells, &provider, &config, 1).unwrap();
    assert_eq!(results.len(), 500);
    for r in &results {
        check_selection(r, &config);
    }
    let stats = campaign_stats(&results);
    assert_eq!(records.len(), stats.selected_count);
    // the generator is built so that every branch is exercised
    assert!(results.iter().any(|r| r.fallback_used));
    assert!(results.iter().any(|r| r.is_selected() && !r.fallback_used));
    assert!(results.iter().any(|r| !r.is_selected()));
    assert!(results.iter().any(|r| r.log.iter().any(|l| l.error.is_some())));
}

#[test]
fn deterministic_across_workers_and_runs() {
    let mut rng = StdRng::seed_from_u64(21);
    let (cells, scenes) = gen::scene_pools(&mut rng, 200);
    let provider = SyntheticProvider::new(scenes).unwrap();
    let config = SamplerConfig::new(availability(), 99);
    let (serial, _) = run_campaign(&cells, &provider, &config, 1).unwrap();
    let (parallel, _) = run_campaign(&cells, &provider, &config, 8).unwrap();
    let (again, _) = run_campaign(&cells, &provider, &config, 8).unwrap();
    assert_eq!(to_jsonl(&serial), to_jsonl(&parallel));
    assert_eq!(to_jsonl(&parallel), to_jsonl(&again));
    assert_eq!(serial.iter().map(|r| r.cell).collect::<Vec<_>>(), cells);
}

#[test]
fn seeds_change_windows() {
    let mut rng = StdRng::seed_from_u64(22);
    let (cells, scenes) = gen::scene_pools(&mut rng, 100);
    let provider = SyntheticProvider::new(scenes).unwrap();
    let (a, _) = run_campaign(&cells, &provider, &SamplerConfig::new(availability(), 1), 4).unwrap();
    let (b, _) = run_campaign(&cells, &provider, &SamplerConfig::new(availability(), 2), 4).unwrap();
    assert!(a.iter().zip(&b).any(|(x, y)| x.window != y.window));
}

#[test]
fn windows_spread_over_feasible_range() {
    let config = SamplerConfig::new(availability(), 5);
    let provider = SyntheticProvider::default();
    let (first, last) = config.availability.feasible_starts(4).unwrap();
    let mut starts = Vec::new();
    for row in 0..400 {
        let r = select_scene(CellId::new(row, 0), &provider, &config).unwrap();
        assert_eq!(r.outcome, Outcome::Unsampled);
        let d = r.window.start.date();
        assert!(first <= d && d <= last);
        starts.push((d - first).num_days());
    }
    let span = (last - first).num_days() as f64;
    let mean = starts.iter().sum::<i64>() as f64 / starts.len() as f64;
    // uniform mean is span/2 with sd span/sqrt(12*400) ≈ 0.0144 span
    assert!((mean / span - 0.5).abs() < 0.06, "{mean} of {span}");
}

#[test]
fn empty_campaign() {
    let provider = SyntheticProvider::default();
    let (results, records) = run_campaign(&[], &provider, &SamplerConfig::new(availability(), 0), 8).unwrap();
    assert!(results.is_empty() && records.is_empty());
}

#[test]
fn zero_cloud_majority_gives_zero_median() {
    let spec = majortom::GridSpec::default();
    let start: Timestamp = "2018-01-01".parse().unwrap();
    let mut scenes = Vec::new();
    let mut cells = Vec::new();
    for i in 0..101 {
        let cell = CellId::new(i, 0);
        assert!(spec.contains(cell));
        cells.push(cell);
        // every day for two years, so any window has candidates
        for day in 0..730 {
            let clear = i < 60 && day % 7 == 0;
            scenes.push(ProviderScene {
                cell,
                scene_id: format!("d{day}"),
                acquired: Timestamp::from_unix(start.unix() + day * 86_400 + 3600),
                rough_cloud: if clear { 0.05 } else { 0.3 },
                refined_cloud: Some(if clear { 0.0 } else { 0.2 + (day % 5) as f64 * 0.1 }),
                nodata_fraction: Some(0.0),
            });
        }
    }
    let provider = SyntheticProvider::new(scenes).unwrap();
    let (results, _) = run_campaign(&cells, &provider, &SamplerConfig::new(availability(), 3), 4).unwrap();
    let stats = campaign_stats(&results);
    assert_eq!(stats.selected_count, 101);
    assert_eq!(stats.median_cloud, Some(0.0));
    assert!(stats.mean_cloud.unwrap() > 0.0);
}

struct SerialProvider(SyntheticProvider, std::sync::atomic::AtomicBool);

impl majortom::SceneProvider for SerialProvider {
    fn list(
        &self,
        cell: CellId,
        window: &TimeWindow,
    ) -> Result<Vec<majortom::SceneCandidate>, majortom::sampler::ProviderError> {
        self.0.list(cell, window)
    }

    fn inspect(
        &self,
        cell: CellId,
        scene_id: &str,
    ) -> Result<majortom::sampler::Inspection, majortom::sampler::ProviderError> {
        use std::sync::atomic::Ordering;
        assert!(
            !self.1.swap(true, Ordering::SeqCst),
            "concurrent inspect on a serial provider"
        );
        std::thread::yield_now();
        let out = self.0.inspect(cell, scene_id);
        self.1.store(false, Ordering::SeqCst);
        out
    }

    fn supports_concurrency(&self) -> bool {
        false
    }
}

#[test]
fn serial_provider_is_respected() {
    let mut rng = StdRng::seed_from_u64(23);
    let (cells, scenes) = gen::scene_pools(&mut rng, 60);
    let inner = SyntheticProvider::new(scenes).unwrap();
    let config = SamplerConfig::new(availability(), 8);
    let (expected, _) = run_campaign(&cells, &inner, &config, 1).unwrap();
    let serial = SerialProvider(inner, Default::default());
    let (got, _) = run_campaign(&cells, &serial, &config, 8).unwrap();
    assert_eq!(to_jsonl(&got), to_jsonl(&expected));
}

#[test]
fn results_round_trip_through_jsonl() {
    let mut rng = StdRng::seed_from_u64(24);
    let (cells, scenes) = gen::scene_pools(&mut rng, 50);
    let provider = SyntheticProvider::new(scenes).unwrap();
    let (results, _) = run_campaign(&cells, &provider, &SamplerConfig::new(availability(), 1), 2).unwrap();
    let bytes = to_jsonl(&results);
    let back: Vec<SelectionResult> = std::str::from_utf8(&bytes)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(campaign_stats(&back), campaign_stats(&results));
    assert_eq!(to_jsonl(&back), bytes);
}
