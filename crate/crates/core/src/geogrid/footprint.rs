use std::f64::consts::PI;

use serde::Serialize;

use super::cell::CellId;
use super::spec::{col_lon, GridSpec};
use crate::error::{Error, Result};

/// An axis-aligned box in degree space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bounds {
    pub lat_min: f64,
    pub lat_max: f64,
    pub lon_min: f64,
    pub lon_max: f64,
}

impl Bounds {
    pub fn intersection(&self, other: &Bounds) -> Option<Bounds> {
        let b = Bounds {
            lat_min: self.lat_min.max(other.lat_min),
            lat_max: self.lat_max.min(other.lat_max),
            lon_min: self.lon_min.max(other.lon_min),
            lon_max: self.lon_max.min(other.lon_max),
        };
        (b.lat_min < b.lat_max && b.lon_min < b.lon_max).then_some(b)
    }

    /// Closed ring of `[lon, lat]` corners, counter-clockwise from south-west.
    pub fn ring(&self) -> [[f64; 2]; 5] {
        [
            [self.lon_min, self.lat_min],
            [self.lon_max, self.lat_min],
            [self.lon_max, self.lat_max],
            [self.lon_min, self.lat_max],
            [self.lon_min, self.lat_min],
        ]
    }
}

/// Square sample extent centred on an anchor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PatchBounds {
    pub side_km: f64,
    pub bounds: Bounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellFootprint {
    pub cell: CellId,
    /// `[lat, lat + δlat) × [lon, lon + δlon)` with the anchor at the south-west corner.
    pub nominal_bounds: Bounds,
    pub patch_bounds: Option<PatchBounds>,
}

impl GridSpec {
    /// Nominal bounds of a cell, plus the extent of a `patch_px × patch_px`
    /// sample at `gsd_m` metres per pixel when both are given.
    pub fn cell_footprint(&self, cell: CellId, patch_px: Option<u32>, gsd_m: Option<f64>) -> Result<CellFootprint> {
        let anchor = self.cell_to_coords(cell)?;
        let n_cols = self.num_cols(cell.row)?;
        let nominal_bounds = Bounds {
            lat_min: anchor.lat,
            lat_max: self.row_lat(cell.row + 1),
            lon_min: anchor.lon,
            lon_max: col_lon(cell.col + 1, n_cols),
        };
        let patch_bounds = match (patch_px, gsd_m) {
            (None, None) => None,
            (Some(px), Some(gsd)) => {
                if px == 0 || !(gsd.is_finite() && gsd > 0.0) {
                    return Err(Error::invalid("patch size and gsd must be positive"));
                }
                let side_km = px as f64 * gsd / 1000.0;
                let km_per_deg_lat = PI * self.earth_radius_km() / 180.0;
                let km_per_deg_lon = km_per_deg_lat * (anchor.lat.to_radians()).cos();
                if km_per_deg_lon < 1e-9 {
                    return Err(Error::DegenerateFootprint(format!(
                        "parallel scale vanishes at {cell} (lat {})",
                        anchor.lat
                    )));
                }
                let half_lat = side_km / 2.0 / km_per_deg_lat;
                let half_lon = side_km / 2.0 / km_per_deg_lon;
                Some(PatchBounds {
                    side_km,
                    bounds: Bounds {
                        lat_min: anchor.lat - half_lat,
                        lat_max: anchor.lat + half_lat,
                        lon_min: anchor.lon - half_lon,
                        lon_max: anchor.lon + half_lon,
                    },
                })
            }
            _ => return Err(Error::invalid("patch_px and gsd_m must be given together")),
        };
        Ok(CellFootprint {
            cell,
            nominal_bounds,
            patch_bounds,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandAlignment {
    pub gsd_m: f64,
    /// Patch width in pixels at this band's resolution.
    pub pixels: f64,
    pub aligned: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlignmentReport {
    pub patch_px: u32,
    pub bands: Vec<BandAlignment>,
    pub aligned: bool,
}

/// Whether a patch of `patch_px` pixels at the finest resolution covers a
/// whole number of pixels in every coarser band.
pub fn check_patch_alignment(patch_px: u32, gsd_list_m: &[f64]) -> AlignmentReport {
    let finest = gsd_list_m.iter().copied().fold(f64::INFINITY, f64::min);
    let bands: Vec<BandAlignment> = gsd_list_m
        .iter()
        .map(|&gsd| {
            let pixels = patch_px as f64 * finest / gsd;
            BandAlignment {
                gsd_m: gsd,
                pixels,
                aligned: pixels.is_finite() && (pixels - pixels.round()).abs() < 1e-9,
            }
        })
        .collect();
    let aligned = !bands.is_empty() && bands.iter().all(|b| b.aligned);
    AlignmentReport {
        patch_px,
        bands,
        aligned,
    }
}
