use std::io::Write;

use anyhow::{bail, Context};
use clap::{Subcommand, ValueEnum};
use majortom::geogrid::{check_patch_alignment, great_circle_km, BBox, LatLon};
use majortom::CellId;

use crate::io::{sink, write_json_line, write_points, PointFormat};
use crate::Ctx;

#[derive(Subcommand)]
pub enum GridCommand {
    /// Grid constants, or the layout of one row.
    Info {
        #[arg(long, allow_negative_numbers = true)]
        row: Option<i32>,
        #[arg(long, value_enum, default_value_t = InfoFormat::Text)]
        format: InfoFormat,
    },
    /// Great-circle distance in km between two cells or lat,lon pairs.
    Distance {
        #[arg(allow_hyphen_values = true)]
        from: String,
        #[arg(allow_hyphen_values = true)]
        to: String,
    },
    /// Grid points inside a box, lat_min,lat_max,lon_min,lon_max.
    /// Latitude is closed, longitude half-open; lon_min > lon_max crosses 180°.
    Points {
        #[arg(long, allow_hyphen_values = true)]
        bbox: String,
        #[arg(long, value_enum, default_value_t = PointFormat::Csv)]
        format: PointFormat,
    },
    /// Grid points within a great-circle radius of a centre.
    Radius {
        /// Centre as lat,lon.
        #[arg(long, allow_hyphen_values = true)]
        center: String,
        #[arg(long)]
        km: f64,
        #[arg(long, value_enum, default_value_t = PointFormat::Csv)]
        format: PointFormat,
    },
    /// Whether a patch size gives whole pixel counts for every band. Exits 1 if not.
    CheckPatch {
        /// Patch side in pixels at the finest resolution.
        #[arg(long)]
        px: u32,
        /// Band resolutions in metres.
        #[arg(long, value_delimiter = ',', default_value = "10,20,60")]
        gsd: Vec<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InfoFormat {
    Text,
    Jsonl,
}

pub fn parse_lat_lon(text: &str) -> anyhow::Result<LatLon> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [lat, lon] = parts[..] else {
        bail!("expected lat,lon, got {text:?}");
    };
    let lat: f64 = lat.parse().with_context(|| format!("bad latitude {lat:?}"))?;
    let lon: f64 = lon.parse().with_context(|| format!("bad longitude {lon:?}"))?;
    if !(-90.0..=90.0).contains(&lat) || !lon.is_finite() {
        bail!("coordinate ({lat}, {lon}) out of range");
    }
    Ok(LatLon::new(lat, lon))
}

pub fn run(ctx: &Ctx, cmd: GridCommand) -> anyhow::Result<()> {
    let spec = &ctx.spec;
    let mut out = sink(None)?;
    match cmd {
        GridCommand::Info { row, format } => {
            let mut fields: Vec<(&str, serde_json::Value)> = vec![
                ("spacing_km", spec.spacing_km().into()),
                ("earth_radius_km", spec.earth_radius_km().into()),
                ("fingerprint", spec.fingerprint().into()),
            ];
            match row {
                None => {
                    fields.extend([
                        ("rows", spec.n_rows().into()),
                        ("row_min", spec.row_min().into()),
                        ("row_max", spec.row_max().into()),
                        ("lat_spacing_deg", spec.lat_spacing_deg().into()),
                        ("equator_cols", spec.num_cols(0)?.into()),
                        ("points", spec.total_points().into()),
                    ]);
                }
                Some(row) => {
                    let (lo, hi) = spec.col_range(row)?;
                    fields.extend([
                        ("row", row.into()),
                        ("lat", spec.row_lat(row).into()),
                        ("cols", spec.num_cols(row)?.into()),
                        ("col_min", lo.into()),
                        ("col_max", hi.into()),
                        ("lon_spacing_deg", spec.lon_spacing_deg(row)?.into()),
                    ]);
                }
            }
            match format {
                InfoFormat::Text => {
                    for (k, v) in fields {
                        match v {
                            serde_json::Value::String(s) => writeln!(out, "{k}: {s}")?,
                            v => writeln!(out, "{k}: {v}")?,
                        }
                    }
                }
                InfoFormat::Jsonl => {
                    let map: serde_json::Map<String, serde_json::Value> =
                        fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
                    write_json_line(&mut out, &map)?;
                }
            }
        }
        GridCommand::Distance { from, to } => {
            let a = locate(ctx, &from)?;
            let b = locate(ctx, &to)?;
            writeln!(out, "{:.6}", great_circle_km(a, b, spec.earth_radius_km()))?;
        }
        GridCommand::Points { bbox, format } => {
            let bbox = BBox::parse(&bbox)?;
            write_points(&mut out, format, spec.cells_in_bbox(bbox))?;
        }
        GridCommand::Radius { center, km, format } => {
            let points = spec.cells_in_radius(parse_lat_lon(&center)?, km)?;
            write_points(&mut out, format, points.into_iter())?;
        }
        GridCommand::CheckPatch { px, gsd } => {
            let report = check_patch_alignment(px, &gsd);
            for band in &report.bands {
                let verdict = if band.aligned { "ok" } else { "misaligned" };
                writeln!(out, "{} m: {} px {verdict}", band.gsd_m, band.pixels)?;
            }
            writeln!(out, "{}", if report.aligned { "aligned" } else { "not aligned" })?;
            out.flush()?;
            if !report.aligned {
                bail!("patch of {px} px does not align with every band");
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// A cell id (its anchor) or an explicit lat,lon.
fn locate(ctx: &Ctx, text: &str) -> anyhow::Result<LatLon> {
    match text.parse::<CellId>() {
        Ok(cell) => {
            let p = ctx.spec.cell_to_coords(cell)?;
            Ok(LatLon::new(p.lat, p.lon))
        }
        Err(_) => parse_lat_lon(text),
    }
}
