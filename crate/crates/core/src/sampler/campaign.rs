use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::provider::SceneProvider;
use super::select::{select_scene, SelectionResult};
use super::SamplerConfig;
use crate::catalog::MetadataRecord;
use crate::error::{Error, Result};
use crate::geogrid::CellId;

/// Selects a scene for every cell, in input order. `workers > 1` runs cells
/// in parallel unless the provider declares itself serial; results do not
/// depend on the worker count.
pub fn run_campaign(
    cells: &[CellId],
    provider: &dyn SceneProvider,
    config: &SamplerConfig,
    workers: usize,
) -> Result<(Vec<SelectionResult>, Vec<MetadataRecord>)> {
    config.validate()?;
    let results: Vec<SelectionResult> = if workers <= 1 || !provider.supports_concurrency() {
        cells
            .iter()
            .map(|c| select_scene(*c, provider, config))
            .collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::invalid(format!("cannot start {workers} workers: {e}")))?;
        pool.install(|| {
            cells
                .par_iter()
                .map(|c| select_scene(*c, provider, config))
                .collect::<Result<_>>()
        })?
    };
    let records = results.iter().filter_map(|r| r.to_record(&config.source)).collect();
    Ok((results, records))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignStats {
    pub selected_count: usize,
    pub unsampled_count: usize,
    /// Statistics over selected results; absent when nothing was selected.
    pub mean_cloud: Option<f64>,
    /// Lower median for even counts.
    pub median_cloud: Option<f64>,
    pub fallback_rate: Option<f64>,
}

pub fn campaign_stats(results: &[SelectionResult]) -> CampaignStats {
    let mut clouds: Vec<f64> = results
        .iter()
        .filter(|r| r.is_selected())
        .map(|r| r.refined_cloud.unwrap_or(f64::NAN))
        .collect();
    let selected = clouds.len();
    let fallbacks = results.iter().filter(|r| r.is_selected() && r.fallback_used).count();
    clouds.sort_by(f64::total_cmp);
    let (mean_cloud, median_cloud, fallback_rate) = if selected == 0 {
        (None, None, None)
    } else {
        (
            Some(clouds.iter().sum::<f64>() / selected as f64),
            Some(clouds[(selected - 1) / 2]),
            Some(fallbacks as f64 / selected as f64),
        )
    };
    CampaignStats {
        selected_count: selected,
        unsampled_count: results.len() - selected,
        mean_cloud,
        median_cloud,
        fallback_rate,
    }
}
