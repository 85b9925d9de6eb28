//! A single-parameter, approximately equidistant global sampling
//! grid, a cell-keyed metadata catalog for combining EO datasets, and a
//! deterministic cloud-aware scene selector.
//!
//! The three subsystems live in [`geogrid`], [`catalog`] and [`sampler`];
//! the most used types are re-exported at the crate root.

pub mod catalog;
mod error;
pub mod geogrid;
pub mod sampler;
mod time;

pub use catalog::{
    Catalog, CoverageStats, IngestReport, MetadataRecord, Predicate, RecordFormat, SplitEntry, SplitManifest,
};
pub use error::{Error, Result};
pub use geogrid::{BBox, CellFootprint, CellId, GridPoint, GridSpec, LatLon};
pub use sampler::{CampaignStats, SamplerConfig, SceneCandidate, SceneProvider, SelectionResult, TimeWindow};
pub use time::Timestamp;
