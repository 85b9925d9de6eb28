use std::collections::BTreeSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::ops::Predicate;
use super::Catalog;
use crate::error::{Error, Result};
use crate::geogrid::{CellId, GridSpec};
use crate::time::Timestamp;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SplitEntry {
    pub cell: CellId,
    pub source: String,
}

/// A portable list of (cell, source) pairs that reproduces a subset of a
/// catalog, e.g. a training or validation split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub name: String,
    pub spec: GridSpec,
    pub entries: Vec<SplitEntry>,
    pub created: Timestamp,
}

impl SplitManifest {
    pub fn spec_fingerprint(&self) -> String {
        self.spec.fingerprint()
    }

    pub fn read<R: Read>(reader: R) -> Result<Self> {
        let manifest: SplitManifest = serde_json::from_reader(reader)?;
        let unique: BTreeSet<&SplitEntry> = manifest.entries.iter().collect();
        if unique.len() != manifest.entries.len() {
            return Err(Error::invalid(format!(
                "manifest {:?} has duplicate entries",
                manifest.name
            )));
        }
        Ok(manifest)
    }

    pub fn write<W: Write>(&self, mut writer: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut writer, self)?;
        writer.write_all(b"\n")?;
        Ok(())
    }
}

impl Catalog {
    /// The sorted, unique (cell, source) pairs of the records selected by
    /// `selector`.
    pub fn export_split(&self, name: &str, selector: &Predicate, created: Timestamp) -> Result<SplitManifest> {
        let view = self.filter(selector)?;
        let entries: BTreeSet<SplitEntry> = view
            .records()
            .map(|r| SplitEntry {
                cell: r.cell,
                source: r.source.clone(),
            })
            .collect();
        Ok(SplitManifest {
            name: name.to_string(),
            spec: *self.spec(),
            entries: entries.into_iter().collect(),
            created,
        })
    }

    /// Records whose (cell, source) pair is listed in the manifest, plus one
    /// warning per entry that matches nothing in this catalog.
    pub fn apply_split(&self, manifest: &SplitManifest) -> Result<(Catalog, Vec<String>)> {
        if manifest.spec_fingerprint() != self.spec().fingerprint() {
            return Err(Error::IncompatibleGrid(format!(
                "manifest {:?} was built for D={} km, R={} km",
                manifest.name,
                manifest.spec.spacing_km(),
                manifest.spec.earth_radius_km()
            )));
        }
        let wanted: BTreeSet<(CellId, &str)> = manifest.entries.iter().map(|e| (e.cell, e.source.as_str())).collect();
        let view = self.select(|r| wanted.contains(&(r.cell, r.source.as_str())));
        let warnings = manifest
            .entries
            .iter()
            .filter_map(|e| {
                if !self.spec().contains(e.cell) {
                    Some(format!("cell {} is not on this grid", e.cell))
                } else if self.records_in(e.cell).is_empty() {
                    Some(format!("cell {} is not in the catalog", e.cell))
                } else if !self.records_in(e.cell).iter().any(|r| r.source == e.source) {
                    Some(format!("cell {} has no records from source {:?}", e.cell, e.source))
                } else {
                    None
                }
            })
            .collect();
        Ok((view, warnings))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::MetadataRecord;

    fn cat() -> Catalog {
        let mut c = Catalog::new(GridSpec::default());
        for (row, col, source, id) in [
            (0, 0, "S2", "a"),
            (0, 0, "S2", "b"),
            (0, 0, "S1", "c"),
            (3, 4, "S2", "d"),
        ] {
            c.insert(MetadataRecord::new(
                CellId::new(row, col),
                source,
                id,
                Timestamp::from_unix(0),
            ))
            .unwrap();
        }
        c
    }

    #[test]
    fn empty_view_gives_empty_manifest() {
        let c = Catalog::new(GridSpec::default());
        let m = c
            .export_split("val", &Predicate::default(), Timestamp::from_unix(0))
            .unwrap();
        assert!(m.entries.is_empty());
    }

    #[test]
    fn export_then_apply() {
        let c = cat();
        let selector = Predicate {
            sources: Some(["S2".to_string()].into()),
            ..Default::default()
        };
        let m = c.export_split("train", &selector, Timestamp::from_unix(0)).unwrap();
        assert_eq!(m.entries.len(), 2);
        let (view, warnings) = c.apply_split(&m).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(view, c.filter(&selector).unwrap());
    }

    #[test]
    fn unknown_cell_warns() {
        let c = cat();
        let mut m = c
            .export_split("x", &Predicate::default(), Timestamp::from_unix(0))
            .unwrap();
        m.entries.push(SplitEntry {
            cell: CellId::new(7, 7),
            source: "S2".into(),
        });
        let (view, warnings) = c.apply_split(&m).unwrap();
        assert_eq!(view.len(), 4);
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("7U_7R"));
    }

    #[test]
    fn fingerprint_mismatch() {
        let c = cat();
        let mut m = c
            .export_split("x", &Predicate::default(), Timestamp::from_unix(0))
            .unwrap();
        m.spec = GridSpec::new(20.0, 6378.137).unwrap();
        assert!(matches!(c.apply_split(&m), Err(Error::IncompatibleGrid(_))));
    }

    #[test]
    fn file_schema() {
        let c = cat();
        let m = c
            .export_split("val", &Predicate::default(), "2024-05-01T00:00:00Z".parse().unwrap())
            .unwrap();
        let mut buf = Vec::new();
        m.write(&mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["name"], "val");
        assert_eq!(v["spec"]["spacing_km"], 10.0);
        assert_eq!(v["spec"]["earth_radius_km"], 6378.137);
        assert_eq!(v["entries"][0]["cell"], "0U_0R");
        assert_eq!(v["entries"][0]["source"], "S1");
        assert_eq!(v["created"], "2024-05-01T00:00:00Z");
        assert_eq!(SplitManifest::read(buf.as_slice()).unwrap(), m);

        let dup = r#"{"name":"d","spec":{"spacing_km":10,"earth_radius_km":6378.137},"entries":[{"cell":"0U_0R","source":"S2"},{"cell":"0U_0R","source":"S2"}],"created":"2024-01-01T00:00:00Z"}"#;
        assert!(SplitManifest::read(dup.as_bytes()).is_err());
    }
}
