//! Per-cell scene selection.
//!
//! For each grid cell a time window of `window_months` calendar months is
//! drawn at random; candidate scenes in that window are ordered by their
//! rough (product-supplied) cloud estimate and inspected one by one, which
//! reveals a refined cloud fraction and a no-data fraction. The first scene
//! under `accept_cloud` is kept. Once `fallback_after` scenes have been
//! inspected without success, the least cloudy inspected scene is accepted
//! if it is under `fallback_cloud`.
//!
//! Randomness comes from ChaCha20 seeded with
//! `SHA-256("majortom-sampler/v1" ‖ seed as u64 LE ‖ canonical cell id)`,
//! so every cell has an independent, platform-stable substream and a
//! campaign gives identical results regardless of thread count.

mod campaign;
mod provider;
mod rng;
mod select;
mod window;

pub use campaign::{campaign_stats, run_campaign, CampaignStats};
pub use provider::{Inspection, ProviderError, ProviderScene, SceneCandidate, SceneProvider, SyntheticProvider};
pub use rng::CellRng;
pub use select::{select_scene, InspectionRecord, Outcome, SelectionResult};
pub use window::TimeWindow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub window_months: u32,
    /// Refined cloud fraction must be strictly below this to accept outright.
    pub accept_cloud: f64,
    /// Relaxed ceiling (strict) once `fallback_after` scenes were inspected.
    pub fallback_cloud: f64,
    pub fallback_after: usize,
    /// Largest admissible no-data fraction (inclusive).
    pub max_nodata: f64,
    pub availability: TimeWindow,
    pub seed: u64,
    /// Collection name stamped on emitted catalog records.
    pub source: String,
}

impl SamplerConfig {
    pub fn new(availability: TimeWindow, seed: u64) -> Self {
        SamplerConfig {
            window_months: 4,
            accept_cloud: 0.25,
            fallback_cloud: 0.50,
            fallback_after: 50,
            max_nodata: 0.05,
            availability,
            seed,
            source: "S2-L1C".to_string(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.accept_cloud && self.accept_cloud <= self.fallback_cloud && self.fallback_cloud <= 1.0) {
            return Err(Error::invalid(format!(
                "need 0 <= accept ({}) <= fallback ({}) <= 1",
                self.accept_cloud, self.fallback_cloud
            )));
        }
        if self.fallback_after < 1 {
            return Err(Error::invalid("fallback_after must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.max_nodata) {
            return Err(Error::invalid(format!("max_nodata {} outside [0, 1]", self.max_nodata)));
        }
        if self.window_months < 1 {
            return Err(Error::invalid("window_months must be at least 1"));
        }
        if self.availability.feasible_starts(self.window_months).is_none() {
            return Err(Error::invalid(format!(
                "a {}-month window does not fit in {}",
                self.window_months, self.availability
            )));
        }
        Ok(())
    }
}
