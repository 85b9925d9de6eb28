use serde::{Deserialize, Serialize};

use super::provider::{SceneCandidate, SceneProvider};
use super::rng::CellRng;
use super::window::TimeWindow;
use super::SamplerConfig;
use crate::catalog::MetadataRecord;
use crate::error::Result;
use crate::geogrid::CellId;
use crate::time::Timestamp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Selected,
    Unsampled,
}

/// One inspection attempt, in inspection order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InspectionRecord {
    pub scene_id: String,
    pub rough_cloud: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refined_cloud: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodata_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub cell: CellId,
    pub outcome: Outcome,
    pub scene_id: Option<String>,
    pub acquired: Option<Timestamp>,
    pub refined_cloud: Option<f64>,
    pub nodata_fraction: Option<f64>,
    pub scenes_inspected: usize,
    pub window: TimeWindow,
    pub fallback_used: bool,
    pub log: Vec<InspectionRecord>,
}

impl SelectionResult {
    pub fn is_selected(&self) -> bool {
        self.outcome == Outcome::Selected
    }

    /// Catalog record for a selected scene.
    pub fn to_record(&self, source: &str) -> Option<MetadataRecord> {
        if !self.is_selected() {
            return None;
        }
        let mut record = MetadataRecord::new(self.cell, source, self.scene_id.clone()?, self.acquired?);
        record.cloud_fraction = self.refined_cloud;
        record.nodata_fraction = self.nodata_fraction;
        Some(record)
    }
}

/// Draw the time window for a cell.
pub(crate) fn draw_window(cell: CellId, config: &SamplerConfig) -> Result<TimeWindow> {
    config.validate()?;
    let (first, last) = config
        .availability
        .feasible_starts(config.window_months)
        .expect("validated config has a feasible window");
    let span = (last - first).num_days() as u64 + 1;
    let mut rng = CellRng::new(config.seed, cell);
    let offset = rng.below(span);
    let start = first + chrono::Days::new(offset);
    Ok(TimeWindow::months_from(start, config.window_months).expect("window inside availability"))
}

/// Run the selection procedure for one cell.
pub fn select_scene(cell: CellId, provider: &dyn SceneProvider, config: &SamplerConfig) -> Result<SelectionResult> {
    let window = draw_window(cell, config)?;
    let mut result = SelectionResult {
        cell,
        outcome: Outcome::Unsampled,
        scene_id: None,
        acquired: None,
        refined_cloud: None,
        nodata_fraction: None,
        scenes_inspected: 0,
        window,
        fallback_used: false,
        log: Vec::new(),
    };

    let mut candidates = match provider.list(cell, &window) {
        Ok(c) => c,
        Err(e) => {
            result.log.push(InspectionRecord {
                scene_id: String::new(),
                rough_cloud: f64::NAN,
                refined_cloud: None,
                nodata_fraction: None,
                error: Some(e.to_string()),
            });
            return Ok(result);
        }
    };
    candidates.retain(|c| window.contains(c.acquired));
    candidates.sort_by(|a, b| {
        a.rough_cloud
            .total_cmp(&b.rough_cloud)
            .then(a.acquired.cmp(&b.acquired))
            .then_with(|| a.scene_id.cmp(&b.scene_id))
    });

    // index into `candidates` and refined cloud of the least cloudy
    // admissible scene inspected so far
    let mut best: Option<(usize, f64, Option<f64>)> = None;
    for (i, cand) in candidates.iter().enumerate() {
        result.scenes_inspected += 1;
        match provider.inspect(cell, &cand.scene_id) {
            Ok(inspection) => {
                result.log.push(InspectionRecord {
                    scene_id: cand.scene_id.clone(),
                    rough_cloud: cand.rough_cloud,
                    refined_cloud: Some(inspection.refined_cloud),
                    nodata_fraction: inspection.nodata_fraction,
                    error: None,
                });
                let admissible = inspection.nodata_fraction.is_none_or(|n| n <= config.max_nodata);
                if admissible {
                    if inspection.refined_cloud < config.accept_cloud {
                        accept(
                            &mut result,
                            cand,
                            inspection.refined_cloud,
                            inspection.nodata_fraction,
                            false,
                        );
                        return Ok(result);
                    }
                    if best.is_none_or(|(_, c, _)| inspection.refined_cloud < c) {
                        best = Some((i, inspection.refined_cloud, inspection.nodata_fraction));
                    }
                }
            }
            Err(e) => result.log.push(InspectionRecord {
                scene_id: cand.scene_id.clone(),
                rough_cloud: cand.rough_cloud,
                refined_cloud: None,
                nodata_fraction: None,
                error: Some(e.to_string()),
            }),
        }
        if result.scenes_inspected >= config.fallback_after {
            if let Some((j, cloud, nodata)) = best.filter(|(_, c, _)| *c < config.fallback_cloud) {
                accept(&mut result, &candidates[j], cloud, nodata, true);
                return Ok(result);
            }
        }
    }
    Ok(result)
}

fn accept(result: &mut SelectionResult, cand: &SceneCandidate, cloud: f64, nodata: Option<f64>, fallback: bool) {
    result.outcome = Outcome::Selected;
    result.scene_id = Some(cand.scene_id.clone());
    result.acquired = Some(cand.acquired);
    result.refined_cloud = Some(cloud);
    result.nodata_fraction = nodata;
    result.fallback_used = fallback;
}
