use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::record::MetadataRecord;
use super::Catalog;
use crate::error::{Error, Result};
use crate::geogrid::{BBox, CellId};
use crate::time::Timestamp;

/// Conjunction of optional record filters.
///
/// Cloud fractions must be strictly below `max_cloud`; no-data fractions
/// must be at most `max_nodata`. Records lacking a fraction only pass the
/// corresponding threshold when `include_unknown` is set. `time_range` is
/// inclusive on both ends and tests `time_start`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Predicate {
    pub sources: Option<BTreeSet<String>>,
    pub time_range: Option<(Timestamp, Timestamp)>,
    pub max_cloud: Option<f64>,
    pub max_nodata: Option<f64>,
    pub bbox: Option<BBox>,
    pub cells: Option<BTreeSet<CellId>>,
    pub include_unknown: bool,
}

impl Predicate {
    pub fn validate(&self) -> Result<()> {
        if let Some((start, end)) = self.time_range {
            if end < start {
                return Err(Error::invalid(format!(
                    "time range ends ({end}) before it starts ({start})"
                )));
            }
        }
        for (name, v) in [("max_cloud", self.max_cloud), ("max_nodata", self.max_nodata)] {
            if matches!(v, Some(x) if !x.is_finite()) {
                return Err(Error::invalid(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    fn threshold(value: Option<f64>, limit: Option<f64>, unknown: bool, strict: bool) -> bool {
        match (limit, value) {
            (None, _) => true,
            (Some(_), None) => unknown,
            (Some(l), Some(v)) => {
                if strict {
                    v < l
                } else {
                    v <= l
                }
            }
        }
    }

    /// Per-record test. `anchor` is the record's grid point.
    pub(crate) fn matches(&self, r: &MetadataRecord, anchor: (f64, f64)) -> bool {
        if let Some(sources) = &self.sources {
            if !sources.contains(&r.source) {
                return false;
            }
        }
        if let Some((start, end)) = self.time_range {
            if r.time_start < start || r.time_start > end {
                return false;
            }
        }
        if !Self::threshold(r.cloud_fraction, self.max_cloud, self.include_unknown, true)
            || !Self::threshold(r.nodata_fraction, self.max_nodata, self.include_unknown, false)
        {
            return false;
        }
        if let Some(cells) = &self.cells {
            if !cells.contains(&r.cell) {
                return false;
            }
        }
        if let Some(bbox) = &self.bbox {
            if !bbox.contains(anchor.0, anchor.1) {
                return false;
            }
        }
        true
    }
}

/// Records of one cell present in both catalogs of a join.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellJoin<'a> {
    pub cell: CellId,
    pub left: &'a [MetadataRecord],
    pub right: &'a [MetadataRecord],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimePair<'a> {
    pub cell: CellId,
    pub reference: &'a MetadataRecord,
    pub matched: &'a MetadataRecord,
    /// `matched.time_start - reference.time_start`.
    pub delta_seconds: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageStats {
    pub cell_count: u64,
    pub area_with_overlap_km2: f64,
    pub area_without_overlap_km2: f64,
    /// Distinct covered cells per row.
    pub per_row_histogram: BTreeMap<i32, u64>,
}

impl CoverageStats {
    /// Area arithmetic for `cell_count` samples of `patch_px × patch_px`
    /// pixels at `gsd_m`, on a grid of spacing `spacing_km`.
    pub fn from_count(cell_count: u64, patch_px: u32, gsd_m: f64, spacing_km: f64) -> Self {
        let side_km = patch_px as f64 * gsd_m / 1000.0;
        CoverageStats {
            cell_count,
            area_with_overlap_km2: cell_count as f64 * side_km * side_km,
            area_without_overlap_km2: cell_count as f64 * spacing_km * spacing_km,
            per_row_histogram: BTreeMap::new(),
        }
    }
}

/// Total pixels per band at the highest resolution.
pub fn volume_pixels(sample_count: u64, patch_px: u64) -> u128 {
    sample_count as u128 * patch_px as u128 * patch_px as u128
}

/// Dataset volume in gigapixels, rounded to one decimal (ties to even,
/// computed on the exact pixel count).
pub fn volume_gigapixels(sample_count: u64, patch_px: u64) -> f64 {
    const PER_TENTH: u128 = 100_000_000;
    let pixels = volume_pixels(sample_count, patch_px);
    let (q, r) = (pixels / PER_TENTH, pixels % PER_TENTH);
    let tenths = match (2 * r).cmp(&PER_TENTH) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal => q + (q & 1),
    };
    tenths as f64 / 10.0
}

impl Catalog {
    pub fn filter(&self, predicate: &Predicate) -> Result<Catalog> {
        predicate.validate()?;
        let spec = *self.spec();
        Ok(self.select(|r| {
            let p = spec.point_unchecked(r.cell);
            predicate.matches(r, (p.lat, p.lon))
        }))
    }

    /// Inner join on cell.
    pub fn join_by_cell<'a>(&'a self, other: &'a Catalog) -> Result<Vec<CellJoin<'a>>> {
        self.ensure_same_grid(other)?;
        let (small, large, swapped) = if self.cells.len() <= other.cells.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        Ok(small
            .cells
            .iter()
            .filter_map(|(cell, a)| {
                large.cells.get(cell).map(|b| {
                    let (left, right) = if swapped { (b, a) } else { (a, b) };
                    CellJoin {
                        cell: *cell,
                        left,
                        right,
                    }
                })
            })
            .collect())
    }

    /// For every record of `self` on a cell shared with `other`, the record
    /// of `other` closest in start time. Ties prefer the earlier time, then
    /// the lexicographically smaller product id (then source).
    pub fn closest_time_pairing<'a>(&'a self, other: &'a Catalog) -> Result<Vec<TimePair<'a>>> {
        let joined = self.join_by_cell(other)?;
        let mut out = Vec::new();
        for CellJoin { cell, left, right } in joined {
            // `right` is sorted by (time_start, product_id, source)
            for reference in left {
                let t = reference.time_start;
                let split = right.partition_point(|r| r.time_start < t);
                let mut best: Option<&MetadataRecord> = None;
                let mut consider = |cand: &'a MetadataRecord| {
                    best = Some(match best {
                        None => cand,
                        Some(b) => {
                            let kb = (
                                b.time_start.seconds_since(t).unsigned_abs(),
                                b.time_start,
                                &b.product_id,
                                &b.source,
                            );
                            let kc = (
                                cand.time_start.seconds_since(t).unsigned_abs(),
                                cand.time_start,
                                &cand.product_id,
                                &cand.source,
                            );
                            if kc < kb {
                                cand
                            } else {
                                b
                            }
                        }
                    });
                };
                // nearest earlier group and the nearest at-or-after group
                if split > 0 {
                    let prev_t = right[split - 1].time_start;
                    right[..split]
                        .iter()
                        .rev()
                        .take_while(|r| r.time_start == prev_t)
                        .for_each(&mut consider);
                }
                if split < right.len() {
                    let next_t = right[split].time_start;
                    right[split..]
                        .iter()
                        .take_while(|r| r.time_start == next_t)
                        .for_each(&mut consider);
                }
                if let Some(matched) = best {
                    out.push(TimePair {
                        cell,
                        reference,
                        matched,
                        delta_seconds: matched.time_start.seconds_since(t),
                    });
                }
            }
        }
        Ok(out)
    }

    pub fn coverage_stats(&self, patch_px: u32, gsd_m: f64) -> Result<CoverageStats> {
        if patch_px == 0 || !(gsd_m.is_finite() && gsd_m > 0.0) {
            return Err(Error::invalid("patch size and gsd must be positive"));
        }
        let mut stats = CoverageStats::from_count(self.cell_count() as u64, patch_px, gsd_m, self.spec().spacing_km());
        for cell in self.cells.keys() {
            *stats.per_row_histogram.entry(cell.row).or_default() += 1;
        }
        Ok(stats)
    }
}
