use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::cell::CellId;
use super::distance::normalize_lon;
use crate::error::{Error, Result};

/// Equatorial radius of the WGS84 ellipsoid.
pub const DEFAULT_EARTH_RADIUS_KM: f64 = 6378.137;
pub const DEFAULT_SPACING_KM: f64 = 10.0;

/// Distance (degrees) under which a coordinate is treated as sitting on an
/// anchor when flooring to a row or column index.
const ANCHOR_SNAP_DEG: f64 = 1e-12;

/// A grid fully determined by its nominal spacing and the sphere radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct GridSpec {
    spacing_km: f64,
    earth_radius_km: f64,
    n_rows: u32,
    lat_spacing_deg: f64,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    spacing_km: f64,
    earth_radius_km: f64,
}

impl TryFrom<RawSpec> for GridSpec {
    type Error = Error;
    fn try_from(raw: RawSpec) -> Result<Self> {
        GridSpec::new(raw.spacing_km, raw.earth_radius_km)
    }
}

impl From<GridSpec> for RawSpec {
    fn from(spec: GridSpec) -> Self {
        RawSpec {
            spacing_km: spec.spacing_km,
            earth_radius_km: spec.earth_radius_km,
        }
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::new(DEFAULT_SPACING_KM, DEFAULT_EARTH_RADIUS_KM).unwrap()
    }
}

/// A grid anchor: the point a cell id names.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub cell: CellId,
    pub lat: f64,
    pub lon: f64,
}

impl GridSpec {
    pub fn new(spacing_km: f64, earth_radius_km: f64) -> Result<Self> {
        if !(spacing_km.is_finite() && spacing_km > 0.0) {
            return Err(Error::invalid(format!("spacing_km must be positive, got {spacing_km}")));
        }
        if !(earth_radius_km.is_finite() && earth_radius_km > 0.0) {
            return Err(Error::invalid(format!(
                "earth_radius_km must be positive, got {earth_radius_km}"
            )));
        }
        let half_circumference = PI * earth_radius_km;
        if spacing_km > half_circumference {
            return Err(Error::invalid(format!(
                "spacing_km {spacing_km} exceeds half the circumference ({half_circumference})"
            )));
        }
        let n_rows = (half_circumference / spacing_km).ceil();
        if n_rows > i32::MAX as f64 {
            return Err(Error::invalid(format!("spacing_km {spacing_km} yields too many rows")));
        }
        let n_rows = n_rows as u32;
        Ok(GridSpec {
            spacing_km,
            earth_radius_km,
            n_rows,
            lat_spacing_deg: 180.0 / n_rows as f64,
        })
    }

    pub fn spacing_km(&self) -> f64 {
        self.spacing_km
    }

    pub fn earth_radius_km(&self) -> f64 {
        self.earth_radius_km
    }

    pub fn n_rows(&self) -> u32 {
        self.n_rows
    }

    pub fn lat_spacing_deg(&self) -> f64 {
        self.lat_spacing_deg
    }

    /// Southernmost row index. Includes the south pole when `n_rows` is even.
    pub fn row_min(&self) -> i32 {
        -((self.n_rows / 2) as i32)
    }

    /// Northernmost row index. The north pole never carries a row.
    pub fn row_max(&self) -> i32 {
        (self.n_rows.div_ceil(2)) as i32 - 1
    }

    /// Latitude of a row, `row · δlat`, evaluated as `row · 180 / N_r` so
    /// that edge rows land exactly on ±90.
    pub fn row_lat(&self, row: i32) -> f64 {
        row as f64 * 180.0 / self.n_rows as f64
    }

    fn check_row(&self, row: i32) -> Result<()> {
        if row < self.row_min() || row > self.row_max() {
            return Err(Error::OutOfRange {
                what: "row",
                value: row as i64,
                min: self.row_min() as i64,
                max: self.row_max() as i64,
            });
        }
        Ok(())
    }

    /// Column count of a row; the pole row is clamped to a single column.
    pub fn num_cols(&self, row: i32) -> Result<u32> {
        self.check_row(row)?;
        Ok(self.num_cols_unchecked(row))
    }

    pub(crate) fn num_cols_unchecked(&self, row: i32) -> u32 {
        let lat = self.row_lat(row);
        let circumference = 2.0 * PI * self.earth_radius_km * (PI * lat / 180.0).cos();
        ((circumference / self.spacing_km).ceil()).max(1.0) as u32
    }

    pub fn lon_spacing_deg(&self, row: i32) -> Result<f64> {
        Ok(360.0 / self.num_cols(row)? as f64)
    }

    /// Inclusive column index range of a row.
    pub fn col_range(&self, row: i32) -> Result<(i32, i32)> {
        Ok(col_bounds(self.num_cols(row)?))
    }

    pub fn validate(&self, cell: CellId) -> Result<()> {
        let (lo, hi) = self.col_range(cell.row)?;
        if cell.col < lo || cell.col > hi {
            return Err(Error::OutOfRange {
                what: "column",
                value: cell.col as i64,
                min: lo as i64,
                max: hi as i64,
            });
        }
        Ok(())
    }

    pub fn contains(&self, cell: CellId) -> bool {
        self.validate(cell).is_ok()
    }

    pub fn cell_to_coords(&self, cell: CellId) -> Result<GridPoint> {
        self.validate(cell)?;
        Ok(self.point_unchecked(cell))
    }

    pub(crate) fn point_unchecked(&self, cell: CellId) -> GridPoint {
        let n_cols = self.num_cols_unchecked(cell.row);
        GridPoint {
            cell,
            lat: self.row_lat(cell.row),
            lon: col_lon(cell.col, n_cols),
        }
    }

    /// The cell whose anchor is the south-west corner of the box holding
    /// the coordinate. Latitudes beyond the outermost rows clamp to them;
    /// longitudes wrap around the antimeridian.
    pub fn coords_to_cell(&self, lat: f64, lon: f64) -> Result<CellId> {
        if !lat.is_finite() || !lon.is_finite() {
            return Err(Error::invalid(format!("non-finite coordinate ({lat}, {lon})")));
        }
        if !(-90.0..=90.0).contains(&lat) {
            return Err(Error::invalid(format!("latitude {lat} outside [-90, 90]")));
        }
        let row = snap_floor(lat, self.lat_spacing_deg).clamp(self.row_min() as i64, self.row_max() as i64) as i32;
        let n_cols = self.num_cols_unchecked(row);
        let (lo, _) = col_bounds(n_cols);
        let col = snap_floor(normalize_lon(lon), 360.0 / n_cols as f64);
        // Odd column counts leave a sliver west of the westernmost anchor
        // that belongs to the easternmost cell.
        let col = (col - lo as i64).rem_euclid(n_cols as i64) + lo as i64;
        Ok(CellId::new(row, col as i32))
    }

    /// Stable short hash of the defining parameters.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.spacing_km.to_bits().to_le_bytes());
        hasher.update(self.earth_radius_km.to_bits().to_le_bytes());
        hasher.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Total number of anchors in the grid.
    pub fn total_points(&self) -> u64 {
        (self.row_min()..=self.row_max())
            .map(|r| self.num_cols_unchecked(r) as u64)
            .sum()
    }
}

/// Longitude of a column, `col · δlon`, with a single rounding.
pub(crate) fn col_lon(col: i32, n_cols: u32) -> f64 {
    col as f64 * 360.0 / n_cols as f64
}

pub(crate) fn col_bounds(n_cols: u32) -> (i32, i32) {
    (-((n_cols / 2) as i32), n_cols.div_ceil(2) as i32 - 1)
}

fn snap_floor(value: f64, step: f64) -> i64 {
    let q = value / step;
    let nearest = q.round();
    if ((q - nearest) * step).abs() < ANCHOR_SNAP_DEG {
        nearest as i64
    } else {
        q.floor() as i64
    }
}
