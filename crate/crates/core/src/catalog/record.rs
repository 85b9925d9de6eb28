use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::geogrid::{CellId, GridSpec};
use crate::time::Timestamp;

/// Column names of the record schema, in file order.
pub const RECORD_FIELDS: [&str; 10] = [
    "cell",
    "source",
    "product_id",
    "time_start",
    "time_end",
    "cloud_fraction",
    "nodata_fraction",
    "crs_label",
    "centre_lat",
    "centre_lon",
];

/// One indexed sample: which product, from which collection, when, and on
/// which grid cell. Columns outside the schema are kept in `extra`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetadataRecord {
    pub cell: CellId,
    pub source: String,
    pub product_id: String,
    pub time_start: Timestamp,
    pub time_end: Option<Timestamp>,
    pub cloud_fraction: Option<f64>,
    pub nodata_fraction: Option<f64>,
    pub crs_label: Option<String>,
    pub centre_lat: Option<f64>,
    pub centre_lon: Option<f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, String>,
}

/// Why a row was not accepted into a catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectReason {
    MissingField(&'static str),
    InvalidCell(String),
    InvalidTimestamp(&'static str, String),
    InvalidNumber(&'static str, String),
    FractionOutOfRange(&'static str),
    EndBeforeStart,
    CentreMismatch,
    Malformed(String),
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::MissingField(name) => write!(f, "missing field {name}"),
            RejectReason::InvalidCell(msg) => write!(f, "invalid cell: {msg}"),
            RejectReason::InvalidTimestamp(name, v) => write!(f, "invalid timestamp in {name}: {v:?}"),
            RejectReason::InvalidNumber(name, v) => write!(f, "invalid number in {name}: {v:?}"),
            RejectReason::FractionOutOfRange(name) => write!(f, "fraction out of range ({name})"),
            RejectReason::EndBeforeStart => write!(f, "time_end before time_start"),
            RejectReason::CentreMismatch => write!(f, "centre coordinates fall in a different cell"),
            RejectReason::Malformed(msg) => write!(f, "malformed row: {msg}"),
        }
    }
}

impl MetadataRecord {
    pub fn new(cell: CellId, source: impl Into<String>, product_id: impl Into<String>, time_start: Timestamp) -> Self {
        MetadataRecord {
            cell,
            source: source.into(),
            product_id: product_id.into(),
            time_start,
            time_end: None,
            cloud_fraction: None,
            nodata_fraction: None,
            crs_label: None,
            centre_lat: None,
            centre_lon: None,
            extra: BTreeMap::new(),
        }
    }

    /// Identity used for duplicate detection.
    pub fn key(&self) -> (CellId, &str, &str, Timestamp) {
        (self.cell, &self.source, &self.product_id, self.time_start)
    }

    pub(crate) fn sort_key(&self) -> (Timestamp, &str, &str) {
        (self.time_start, &self.product_id, &self.source)
    }

    pub fn validate(&self, spec: &GridSpec) -> Result<(), RejectReason> {
        spec.validate(self.cell)
            .map_err(|e| RejectReason::InvalidCell(e.to_string()))?;
        if self.source.is_empty() {
            return Err(RejectReason::MissingField("source"));
        }
        if self.product_id.is_empty() {
            return Err(RejectReason::MissingField("product_id"));
        }
        if matches!(self.time_end, Some(end) if end < self.time_start) {
            return Err(RejectReason::EndBeforeStart);
        }
        for (name, value) in [
            ("cloud_fraction", self.cloud_fraction),
            ("nodata_fraction", self.nodata_fraction),
        ] {
            if let Some(v) = value {
                if !(0.0..=1.0).contains(&v) {
                    return Err(RejectReason::FractionOutOfRange(name));
                }
            }
        }
        match (self.centre_lat, self.centre_lon) {
            (None, None) => {}
            (Some(lat), Some(lon)) => match spec.coords_to_cell(lat, lon) {
                Ok(cell) if cell == self.cell => {}
                _ => return Err(RejectReason::CentreMismatch),
            },
            (Some(_), None) => return Err(RejectReason::MissingField("centre_lon")),
            (None, Some(_)) => return Err(RejectReason::MissingField("centre_lat")),
        }
        Ok(())
    }

    /// Builds a record from textual fields. Empty strings count as absent.
    pub(crate) fn from_fields(mut fields: BTreeMap<String, String>) -> Result<Self, RejectReason> {
        let mut take = |name: &'static str| fields.remove(name).filter(|v| !v.is_empty());

        let cell_text = take("cell").ok_or(RejectReason::MissingField("cell"))?;
        let cell = CellId::from_str(&cell_text).map_err(|e| RejectReason::InvalidCell(e.to_string()))?;
        let source = take("source").ok_or(RejectReason::MissingField("source"))?;
        let product_id = take("product_id").ok_or(RejectReason::MissingField("product_id"))?;
        let time_start =
            parse_time("time_start", take("time_start"))?.ok_or(RejectReason::MissingField("time_start"))?;
        let time_end = parse_time("time_end", take("time_end"))?;
        let cloud_fraction = parse_f64("cloud_fraction", take("cloud_fraction"))?;
        let nodata_fraction = parse_f64("nodata_fraction", take("nodata_fraction"))?;
        let crs_label = take("crs_label");
        let centre_lat = parse_f64("centre_lat", take("centre_lat"))?;
        let centre_lon = parse_f64("centre_lon", take("centre_lon"))?;
        fields.retain(|_, v| !v.is_empty());
        Ok(MetadataRecord {
            cell,
            source,
            product_id,
            time_start,
            time_end,
            cloud_fraction,
            nodata_fraction,
            crs_label,
            centre_lat,
            centre_lon,
            extra: fields,
        })
    }

    /// Schema columns rendered as text, absent values as empty strings.
    pub(crate) fn schema_values(&self) -> [String; 10] {
        let opt_f = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        [
            self.cell.to_string(),
            self.source.clone(),
            self.product_id.clone(),
            self.time_start.to_string(),
            self.time_end.map(|t| t.to_string()).unwrap_or_default(),
            opt_f(self.cloud_fraction),
            opt_f(self.nodata_fraction),
            self.crs_label.clone().unwrap_or_default(),
            opt_f(self.centre_lat),
            opt_f(self.centre_lon),
        ]
    }
}

fn parse_time(name: &'static str, value: Option<String>) -> Result<Option<Timestamp>, RejectReason> {
    value
        .map(|v| Timestamp::from_str(&v).map_err(|_| RejectReason::InvalidTimestamp(name, v)))
        .transpose()
}

fn parse_f64(name: &'static str, value: Option<String>) -> Result<Option<f64>, RejectReason> {
    value
        .map(|v| match v.trim().parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(RejectReason::InvalidNumber(name, v)),
        })
        .transpose()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fields(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    fn base() -> Vec<(&'static str, &'static str)> {
        vec![
            ("cell", "201U_54L"),
            ("source", "S2-L1C"),
            ("product_id", "P1"),
            ("time_start", "2020-01-01T00:00:00Z"),
        ]
    }

    #[test]
    fn minimal_record() {
        let r = MetadataRecord::from_fields(fields(&base())).unwrap();
        assert_eq!(r.cell, CellId::new(201, -54));
        assert!(r.validate(&GridSpec::default()).is_ok());
    }

    #[test]
    fn extras_kept_and_empty_dropped() {
        let mut f = base();
        f.push(("tile", "31TCJ"));
        f.push(("note", ""));
        f.push(("crs_label", ""));
        let r = MetadataRecord::from_fields(fields(&f)).unwrap();
        assert_eq!(r.extra.len(), 1);
        assert_eq!(r.extra["tile"], "31TCJ");
        assert_eq!(r.crs_label, None);
    }

    #[test]
    fn fraction_out_of_range() {
        let mut f = base();
        f.push(("cloud_fraction", "1.2"));
        let r = MetadataRecord::from_fields(fields(&f)).unwrap();
        let reason = r.validate(&GridSpec::default()).unwrap_err();
        assert_eq!(reason, RejectReason::FractionOutOfRange("cloud_fraction"));
        assert!(reason.to_string().starts_with("fraction out of range"));
    }

    #[test]
    fn bad_values() {
        let spec = GridSpec::default();
        let mut f = base();
        f.push(("time_end", "2019-01-01T00:00:00Z"));
        let r = MetadataRecord::from_fields(fields(&f)).unwrap();
        assert_eq!(r.validate(&spec), Err(RejectReason::EndBeforeStart));

        let mut f = base();
        f[0] = ("cell", "0U_9999R");
        let r = MetadataRecord::from_fields(fields(&f)).unwrap();
        assert!(matches!(r.validate(&spec), Err(RejectReason::InvalidCell(_))));

        let mut f = base();
        f[0] = ("cell", "nonsense");
        assert!(matches!(
            MetadataRecord::from_fields(fields(&f)),
            Err(RejectReason::InvalidCell(_))
        ));

        let mut f = base();
        f.push(("cloud_fraction", "lots"));
        assert!(matches!(
            MetadataRecord::from_fields(fields(&f)),
            Err(RejectReason::InvalidNumber(..))
        ));

        let f = &base()[..3];
        assert_eq!(
            MetadataRecord::from_fields(fields(f)),
            Err(RejectReason::MissingField("time_start"))
        );
    }

    #[test]
    fn centre_must_match_cell() {
        let spec = GridSpec::default();
        let mut r = MetadataRecord::new(CellId::new(0, 0), "S2", "P", Timestamp::from_unix(0));
        r.centre_lat = Some(0.04);
        r.centre_lon = Some(0.04);
        assert!(r.validate(&spec).is_ok());
        r.centre_lat = Some(-0.04);
        assert_eq!(r.validate(&spec), Err(RejectReason::CentreMismatch));
        r.centre_lon = None;
        assert_eq!(r.validate(&spec), Err(RejectReason::MissingField("centre_lon")));
    }
}
