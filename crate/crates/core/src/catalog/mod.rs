//! Cell-keyed metadata index over heterogeneous datasets.
//!
//! A [`Catalog`] holds [`MetadataRecord`]s grouped by grid cell. Records are
//! kept in a fixed order (cell row, cell column, start time, product id,
//! source) so every export is byte-deterministic for a given record set.
//! Filtering produces a new, independent catalog snapshot.

mod io;
mod ops;
mod record;
mod split;
mod stac;

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::geogrid::{CellId, GridSpec};

pub use io::{IngestReport, RecordFormat, RejectedRow};
pub use ops::{volume_gigapixels, volume_pixels, CellJoin, CoverageStats, Predicate, TimePair};
pub use record::{MetadataRecord, RejectReason, RECORD_FIELDS};
pub use split::{SplitEntry, SplitManifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Insert {
    Inserted,
    Duplicate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    spec: GridSpec,
    cells: BTreeMap<CellId, Vec<MetadataRecord>>,
    sources: BTreeSet<String>,
    len: usize,
}

impl Catalog {
    pub fn new(spec: GridSpec) -> Self {
        Catalog {
            spec,
            cells: BTreeMap::new(),
            sources: BTreeSet::new(),
            len: 0,
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn sources(&self) -> &BTreeSet<String> {
        &self.sources
    }

    /// Validates and inserts a record. A record with the same cell, source,
    /// product id and start time as an existing one is reported as a
    /// duplicate and left out.
    pub fn insert(&mut self, record: MetadataRecord) -> std::result::Result<Insert, RejectReason> {
        record.validate(&self.spec)?;
        let group = self.cells.entry(record.cell).or_default();
        match group.binary_search_by(|r| r.sort_key().cmp(&record.sort_key())) {
            Ok(_) => Ok(Insert::Duplicate),
            Err(pos) => {
                if !self.sources.contains(&record.source) {
                    self.sources.insert(record.source.clone());
                }
                group.insert(pos, record);
                self.len += 1;
                Ok(Insert::Inserted)
            }
        }
    }

    /// Records of one cell, ordered by start time.
    pub fn records_in(&self, cell: CellId) -> &[MetadataRecord] {
        self.cells.get(&cell).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn cells(&self) -> impl Iterator<Item = (CellId, &[MetadataRecord])> + '_ {
        self.cells.iter().map(|(c, rs)| (*c, rs.as_slice()))
    }

    /// All records in catalog order.
    pub fn records(&self) -> impl Iterator<Item = &MetadataRecord> + '_ {
        self.cells.values().flatten()
    }

    /// A new catalog on the same grid holding the records that pass `keep`.
    pub(crate) fn select(&self, mut keep: impl FnMut(&MetadataRecord) -> bool) -> Catalog {
        let mut out = Catalog::new(self.spec);
        for (cell, group) in &self.cells {
            let kept: Vec<MetadataRecord> = group.iter().filter(|r| keep(r)).cloned().collect();
            if kept.is_empty() {
                continue;
            }
            for r in &kept {
                if !out.sources.contains(&r.source) {
                    out.sources.insert(r.source.clone());
                }
            }
            out.len += kept.len();
            out.cells.insert(*cell, kept);
        }
        out
    }

    pub(crate) fn ensure_same_grid(&self, other: &Catalog) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::IncompatibleGrid(format!(
                "D={} km, R={} km vs D={} km, R={} km",
                self.spec.spacing_km(),
                self.spec.earth_radius_km(),
                other.spec.spacing_km(),
                other.spec.earth_radius_km()
            )));
        }
        Ok(())
    }
}
