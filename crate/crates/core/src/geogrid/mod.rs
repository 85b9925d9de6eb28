//! Grid mathematics: the row/column layout derived from a nominal spacing,
//! cell naming, coordinate mapping, footprints and spatial queries.
//!
//! Rows are indexed from 0 at the equator (positive north, `U`; negative
//! south, `D`). Each row carries its own column count so that the spacing
//! along a parallel stays close to the nominal spacing; columns are indexed
//! from 0 at the prime meridian (positive east, `R`; negative west, `L`).

mod cell;
mod distance;
mod footprint;
mod query;
mod spec;

pub use cell::CellId;
pub use distance::{great_circle_km, normalize_lon, LatLon};
pub use footprint::{check_patch_alignment, AlignmentReport, BandAlignment, Bounds, CellFootprint, PatchBounds};
pub use query::{BBox, BboxIter};
pub use spec::{GridPoint, GridSpec, DEFAULT_EARTH_RADIUS_KM, DEFAULT_SPACING_KM};
