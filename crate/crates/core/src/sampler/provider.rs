use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::window::TimeWindow;
use crate::error::{Error, Result};
use crate::geogrid::CellId;
use crate::time::Timestamp;

/// What a listing reveals about a scene: only the rough cloud estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneCandidate {
    pub scene_id: String,
    pub acquired: Timestamp,
    pub rough_cloud: f64,
}

/// What inspecting a scene over a cell reveals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Inspection {
    pub refined_cloud: f64,
    pub nodata_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("provider error: {0}")]
pub struct ProviderError(pub String);

/// Source of candidate scenes.
pub trait SceneProvider: Sync {
    /// Scenes covering `cell` acquired inside `window`.
    fn list(&self, cell: CellId, window: &TimeWindow) -> std::result::Result<Vec<SceneCandidate>, ProviderError>;

    /// Fetch a scene over `cell` and measure it.
    fn inspect(&self, cell: CellId, scene_id: &str) -> std::result::Result<Inspection, ProviderError>;

    /// Whether `inspect` may be called from several threads at once.
    fn supports_concurrency(&self) -> bool {
        true
    }
}

/// One line of a synthetic provider file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderScene {
    pub cell: CellId,
    pub scene_id: String,
    pub acquired: Timestamp,
    pub rough_cloud: f64,
    /// `None` makes inspection fail.
    #[serde(default)]
    pub refined_cloud: Option<f64>,
    #[serde(default)]
    pub nodata_fraction: Option<f64>,
}

/// In-memory provider backed by a list of scenes, typically read from JSONL.
#[derive(Debug, Clone, Default)]
pub struct SyntheticProvider {
    by_cell: HashMap<CellId, Vec<ProviderScene>>,
    index: HashMap<(CellId, String), usize>,
}

impl SyntheticProvider {
    pub fn new(scenes: impl IntoIterator<Item = ProviderScene>) -> Result<Self> {
        let mut provider = SyntheticProvider::default();
        for (n, scene) in scenes.into_iter().enumerate() {
            provider
                .add(scene)
                .map_err(|e| Error::invalid(format!("scene #{}: {e}", n + 1)))?;
        }
        for scenes in provider.by_cell.values_mut() {
            scenes.sort_by(|a, b| a.acquired.cmp(&b.acquired).then_with(|| a.scene_id.cmp(&b.scene_id)));
        }
        provider.index = provider
            .by_cell
            .iter()
            .flat_map(|(cell, scenes)| scenes.iter().enumerate().map(|(i, s)| ((*cell, s.scene_id.clone()), i)))
            .collect();
        Ok(provider)
    }

    fn add(&mut self, scene: ProviderScene) -> std::result::Result<(), String> {
        let fractions = [Some(scene.rough_cloud), scene.refined_cloud, scene.nodata_fraction];
        if fractions.iter().flatten().any(|f| !(0.0..=1.0).contains(f)) {
            return Err(format!("fraction outside [0, 1] in {}", scene.scene_id));
        }
        let key = (scene.cell, scene.scene_id.clone());
        if self.index.insert(key, 0).is_some() {
            return Err(format!("duplicate scene {} for cell {}", scene.scene_id, scene.cell));
        }
        self.by_cell.entry(scene.cell).or_default().push(scene);
        Ok(())
    }

    /// Reads one [`ProviderScene`] per non-blank line.
    pub fn read_jsonl<R: Read>(reader: R) -> Result<Self> {
        let mut scenes = Vec::new();
        for (i, line) in BufReader::new(reader).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let scene: ProviderScene =
                serde_json::from_str(&line).map_err(|e| Error::invalid(format!("provider line {}: {e}", i + 1)))?;
            scenes.push(scene);
        }
        SyntheticProvider::new(scenes)
    }

    /// Cells that have at least one scene, sorted.
    pub fn cells(&self) -> Vec<CellId> {
        let mut cells: Vec<CellId> = self.by_cell.keys().copied().collect();
        cells.sort_unstable();
        cells
    }

    /// Smallest window holding every acquisition (end exclusive).
    pub fn time_span(&self) -> Option<TimeWindow> {
        let all = self.by_cell.values().flatten().map(|s| s.acquired);
        let (lo, hi) = all.fold(None, |acc: Option<(Timestamp, Timestamp)>, t| match acc {
            None => Some((t, t)),
            Some((lo, hi)) => Some((lo.min(t), hi.max(t))),
        })?;
        Some(TimeWindow {
            start: lo,
            end: Timestamp::from_unix(hi.unix() + 1),
        })
    }
}

impl SceneProvider for SyntheticProvider {
    fn list(&self, cell: CellId, window: &TimeWindow) -> std::result::Result<Vec<SceneCandidate>, ProviderError> {
        Ok(self
            .by_cell
            .get(&cell)
            .map(|scenes| {
                scenes
                    .iter()
                    .filter(|s| window.contains(s.acquired))
                    .map(|s| SceneCandidate {
                        scene_id: s.scene_id.clone(),
                        acquired: s.acquired,
                        rough_cloud: s.rough_cloud,
                    })
                    .collect()
            })
            .unwrap_or_default())
    }

    fn inspect(&self, cell: CellId, scene_id: &str) -> std::result::Result<Inspection, ProviderError> {
        let idx = self
            .index
            .get(&(cell, scene_id.to_string()))
            .ok_or_else(|| ProviderError(format!("unknown scene {scene_id} for {cell}")))?;
        let scene = &self.by_cell[&cell][*idx];
        let refined_cloud = scene
            .refined_cloud
            .ok_or_else(|| ProviderError(format!("no cloud mask for {scene_id}")))?;
        Ok(Inspection {
            refined_cloud,
            nodata_fraction: scene.nodata_fraction,
        })
    }
}
