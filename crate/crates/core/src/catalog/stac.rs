use std::io::Write;

use serde_json::{json, Map, Value};

use super::record::MetadataRecord;
use super::Catalog;
use crate::error::Result;

impl Catalog {
    /// A STAC-Item-shaped JSON object for one record. Geometry is the
    /// record's nominal cell box; cloud cover is given in percent.
    pub fn stac_item(&self, r: &MetadataRecord) -> Result<Value> {
        let fp = self.spec().cell_footprint(r.cell, None, None)?;
        let b = fp.nominal_bounds;
        let mut props = Map::new();
        match r.time_end {
            None => {
                props.insert("datetime".into(), r.time_start.to_string().into());
            }
            Some(end) => {
                props.insert("datetime".into(), Value::Null);
                props.insert("start_datetime".into(), r.time_start.to_string().into());
                props.insert("end_datetime".into(), end.to_string().into());
            }
        }
        props.insert("grid:cell".into(), r.cell.to_string().into());
        props.insert("source".into(), r.source.clone().into());
        props.insert("product_id".into(), r.product_id.clone().into());
        if let Some(cloud) = r.cloud_fraction {
            props.insert("eo:cloud_cover".into(), percent(cloud).into());
        }
        if let Some(nodata) = r.nodata_fraction {
            props.insert("nodata_fraction".into(), nodata.into());
        }
        if let Some(crs) = &r.crs_label {
            props.insert("crs_label".into(), crs.clone().into());
        }
        for (k, v) in &r.extra {
            props.entry(k.clone()).or_insert_with(|| v.clone().into());
        }
        Ok(json!({
            "type": "Feature",
            "stac_version": "1.0.0",
            "id": format!("{}_{}_{}", r.source, r.cell, r.product_id),
            "collection": r.source,
            "geometry": { "type": "Polygon", "coordinates": [b.ring()] },
            "bbox": [b.lon_min, b.lat_min, b.lon_max, b.lat_max],
            "properties": props,
            "links": [],
            "assets": {},
        }))
    }

    /// One STAC item per line, in catalog order.
    pub fn write_stac_items<W: Write>(&self, mut writer: W) -> Result<()> {
        for r in self.records() {
            serde_json::to_writer(&mut writer, &self.stac_item(r)?)?;
            writer.write_all(b"\n")?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Fraction to percent, rounded to 1e-9 to strip binary noise (0.047 → 4.7).
fn percent(fraction: f64) -> f64 {
    (fraction * 100.0 * 1e9).round() / 1e9
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geogrid::{CellId, GridSpec};
    use crate::time::Timestamp;

    fn record() -> MetadataRecord {
        let mut r = MetadataRecord::new(
            CellId::new(201, -54),
            "S2-L2A",
            "P9",
            "2021-06-01T10:00:00Z".parse().unwrap(),
        );
        r.cloud_fraction = Some(0.047);
        r
    }

    #[test]
    fn cloud_cover_in_percent() {
        let c = Catalog::new(GridSpec::default());
        let item = c.stac_item(&record()).unwrap();
        assert_eq!(item["properties"]["eo:cloud_cover"], 4.7);
        assert_eq!(item["id"], "S2-L2A_201U_54L_P9");
        assert_eq!(item["properties"]["grid:cell"], "201U_54L");
    }

    #[test]
    fn single_time_has_datetime_only() {
        let c = Catalog::new(GridSpec::default());
        let item = c.stac_item(&record()).unwrap();
        let props = item["properties"].as_object().unwrap();
        assert_eq!(props["datetime"], "2021-06-01T10:00:00Z");
        assert!(!props.contains_key("start_datetime"));
        assert!(!props.contains_key("end_datetime"));

        let mut r = record();
        r.time_end = Some(Timestamp::from_unix(r.time_start.unix() + 60));
        let item = c.stac_item(&r).unwrap();
        assert!(item["properties"]["datetime"].is_null());
        assert_eq!(item["properties"]["end_datetime"], "2021-06-01T10:01:00Z");
    }

    #[test]
    fn geometry_matches_nominal_bounds() {
        let spec = GridSpec::default();
        let c = Catalog::new(spec);
        let item = c.stac_item(&record()).unwrap();
        let fp = spec
            .cell_footprint(CellId::new(201, -54), None, None)
            .unwrap()
            .nominal_bounds;
        let ring = item["geometry"]["coordinates"][0].as_array().unwrap();
        assert_eq!(ring.len(), 5);
        assert_eq!(ring[0][0].as_f64().unwrap(), fp.lon_min);
        assert_eq!(ring[0][1].as_f64().unwrap(), fp.lat_min);
        assert_eq!(ring[2][0].as_f64().unwrap(), fp.lon_max);
        assert_eq!(ring[2][1].as_f64().unwrap(), fp.lat_max);
        assert_eq!(item["bbox"][3].as_f64().unwrap(), fp.lat_max);
    }
}
