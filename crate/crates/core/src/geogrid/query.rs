use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::cell::CellId;
use super::distance::{great_circle_km, LatLon};
use super::spec::{col_bounds, col_lon, GridPoint, GridSpec};
use crate::error::{Error, Result};

/// A latitude/longitude box: closed in latitude, half-open `[lon_min,
/// lon_max)` in longitude. `lon_min > lon_max` wraps across the antimeridian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub lat_min: f64,
    pub lat_max: f64,
    pub lon_min: f64,
    pub lon_max: f64,
}

impl BBox {
    pub fn new(lat_min: f64, lat_max: f64, lon_min: f64, lon_max: f64) -> Result<Self> {
        let all = [lat_min, lat_max, lon_min, lon_max];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite bbox coordinate"));
        }
        if lat_min > lat_max {
            return Err(Error::invalid(format!(
                "inverted latitude interval [{lat_min}, {lat_max}]"
            )));
        }
        if lat_min < -90.0 || lat_max > 90.0 {
            return Err(Error::invalid("bbox latitude outside [-90, 90]"));
        }
        if !(-180.0..=180.0).contains(&lon_min) || !(-180.0..=180.0).contains(&lon_max) {
            return Err(Error::invalid("bbox longitude outside [-180, 180]"));
        }
        Ok(BBox {
            lat_min,
            lat_max,
            lon_min,
            lon_max,
        })
    }

    /// Parses `lat_min,lat_max,lon_min,lon_max`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<f64> = text
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::invalid(format!("bbox {text:?} is not four numbers")))?;
        match parts[..] {
            [a, b, c, d] => BBox::new(a, b, c, d),
            _ => Err(Error::invalid(format!("bbox {text:?} is not four numbers"))),
        }
    }

    pub fn wraps(&self) -> bool {
        self.lon_min > self.lon_max
    }

    pub fn contains_lat(&self, lat: f64) -> bool {
        self.lat_min <= lat && lat <= self.lat_max
    }

    pub fn contains_lon(&self, lon: f64) -> bool {
        if self.wraps() {
            lon >= self.lon_min || lon < self.lon_max
        } else {
            self.lon_min <= lon && lon < self.lon_max
        }
    }

    pub fn contains(&self, lat: f64, lon: f64) -> bool {
        self.contains_lat(lat) && self.contains_lon(lon)
    }

    /// Sub-intervals of the longitude range, each `[lo, hi)`.
    fn lon_intervals(&self) -> Vec<(f64, f64)> {
        if self.wraps() {
            vec![(-180.0, self.lon_max), (self.lon_min, 180.0)]
        } else {
            vec![(self.lon_min, self.lon_max)]
        }
    }
}

/// Streams the anchors inside a [`BBox`] in (row, col) order without
/// materializing the grid.
pub struct BboxIter {
    spec: GridSpec,
    bbox: BBox,
    row: i32,
    row_end: i32,
    cols: std::vec::IntoIter<i32>,
}

impl BboxIter {
    fn load_row(&mut self) {
        let n_cols = self.spec.num_cols_unchecked(self.row);
        let step = 360.0 / n_cols as f64;
        let (lo, hi) = col_bounds(n_cols);
        let mut cols = Vec::new();
        for (a, b) in self.bbox.lon_intervals() {
            if a >= b {
                continue;
            }
            let first = ((a / step).floor() as i64 - 1).max(lo as i64) as i32;
            let last = ((b / step).ceil() as i64 + 1).min(hi as i64) as i32;
            cols.extend((first..=last).filter(|&c| self.bbox.contains_lon(col_lon(c, n_cols))));
        }
        cols.sort_unstable();
        cols.dedup();
        self.cols = cols.into_iter();
    }
}

impl Iterator for BboxIter {
    type Item = GridPoint;

    fn next(&mut self) -> Option<GridPoint> {
        loop {
            if let Some(col) = self.cols.next() {
                return Some(self.spec.point_unchecked(CellId::new(self.row - 1, col)));
            }
            if self.row > self.row_end {
                return None;
            }
            if self.bbox.contains_lat(self.spec.row_lat(self.row)) {
                self.load_row();
            }
            self.row += 1;
        }
    }
}

impl GridSpec {
    /// Anchors inside a latitude/longitude box, ordered by (row, col).
    pub fn cells_in_bbox(&self, bbox: BBox) -> BboxIter {
        let step = self.lat_spacing_deg();
        let row_start = ((bbox.lat_min / step).floor() as i64 - 1).max(self.row_min() as i64) as i32;
        let row_end = ((bbox.lat_max / step).ceil() as i64 + 1).min(self.row_max() as i64) as i32;
        BboxIter {
            spec: *self,
            bbox,
            row: row_start,
            row_end,
            cols: Vec::new().into_iter(),
        }
    }

    /// Anchors within `radius_km` (great-circle) of `center`, ordered by
    /// (row, col). Only rows and columns that can intersect the circle are
    /// visited.
    pub fn cells_in_radius(&self, center: LatLon, radius_km: f64) -> Result<Vec<GridPoint>> {
        if !radius_km.is_finite() || radius_km < 0.0 {
            return Err(Error::invalid(format!("radius must be non-negative, got {radius_km}")));
        }
        if !center.lat.is_finite() || !center.lon.is_finite() || center.lat.abs() > 90.0 {
            return Err(Error::invalid(format!(
                "invalid centre ({}, {})",
                center.lat, center.lon
            )));
        }
        let radius = self.earth_radius_km();
        let angle = radius_km / radius;
        let angle_deg = angle.to_degrees();
        let step = self.lat_spacing_deg();
        let row_start = (((center.lat - angle_deg) / step).floor() as i64 - 1).max(self.row_min() as i64) as i32;
        let row_end = (((center.lat + angle_deg) / step).ceil() as i64 + 1).min(self.row_max() as i64) as i32;

        let half_angle_sin2 = (angle / 2.0).min(std::f64::consts::FRAC_PI_2).sin().powi(2);
        let center_cos = center.lat.to_radians().cos();
        let mut out = Vec::new();
        for row in row_start..=row_end {
            let lat = self.row_lat(row);
            let n_cols = self.spec_cols(row);
            let col_step = 360.0 / n_cols as f64;
            let (lo, hi) = col_bounds(n_cols);

            // Largest longitude offset at this latitude still inside the circle.
            let half_dlat_sin2 = ((lat - center.lat).to_radians() / 2.0).sin().powi(2);
            let denom = center_cos * lat.to_radians().cos();
            let candidates: Vec<i32> = if angle >= std::f64::consts::PI || denom <= 1e-12 {
                (lo..=hi).collect()
            } else {
                let s = (half_angle_sin2 - half_dlat_sin2) / denom;
                if s < -1e-9 {
                    continue;
                }
                if s >= 1.0 {
                    (lo..=hi).collect()
                } else {
                    let dlon = (2.0 * s.max(0.0).sqrt().asin()).to_degrees();
                    let cols_span = (dlon / col_step).ceil() as i64 + 1;
                    if 2 * cols_span + 1 >= n_cols as i64 {
                        (lo..=hi).collect()
                    } else {
                        let centre_col = (center.lon / col_step).floor() as i64;
                        let set: BTreeSet<i32> = (centre_col - cols_span..=centre_col + cols_span + 1)
                            .map(|c| ((c - lo as i64).rem_euclid(n_cols as i64) + lo as i64) as i32)
                            .collect();
                        set.into_iter().collect()
                    }
                }
            };
            for col in candidates {
                let p = self.point_unchecked(CellId::new(row, col));
                if great_circle_km(center, LatLon::new(p.lat, p.lon), radius) <= radius_km {
                    out.push(p);
                }
            }
        }
        Ok(out)
    }

    fn spec_cols(&self, row: i32) -> u32 {
        self.num_cols_unchecked(row)
    }
}
