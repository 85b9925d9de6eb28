use std::io::Write;

use clap::{Subcommand, ValueEnum};
use majortom::CellId;

use crate::io::{self, polygon_feature, sink, write_json_line};
use crate::Ctx;

#[derive(Subcommand)]
pub enum CellCommand {
    /// Cell owning a coordinate (the nearest anchor to the south-west).
    Encode {
        #[arg(long, allow_negative_numbers = true)]
        lat: f64,
        #[arg(long, allow_negative_numbers = true)]
        lon: f64,
    },
    /// Anchor coordinates of cells, e.g. 201U_54L.
    Decode {
        #[arg(required = true)]
        ids: Vec<CellId>,
        #[arg(long, value_enum, default_value_t = DecodeFormat::Csv)]
        format: DecodeFormat,
    },
    /// Cell bounds as GeoJSON, plus the sample extent when --patch-px is given.
    Footprint {
        id: CellId,
        /// Patch side in pixels.
        #[arg(long)]
        patch_px: Option<u32>,
        /// Ground sampling distance in metres per pixel.
        #[arg(long, default_value_t = 10.0, requires = "patch_px")]
        gsd: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DecodeFormat {
    Csv,
    Jsonl,
}

pub fn run(ctx: &Ctx, cmd: CellCommand) -> anyhow::Result<()> {
    let spec = &ctx.spec;
    let mut out = sink(None)?;
    match cmd {
        CellCommand::Encode { lat, lon } => {
            writeln!(out, "{}", spec.coords_to_cell(lat, lon)?)?;
        }
        CellCommand::Decode { ids, format } => {
            let points = ids
                .iter()
                .map(|c| spec.cell_to_coords(*c))
                .collect::<Result<Vec<_>, _>>()?;
            let format = match format {
                DecodeFormat::Csv => io::PointFormat::Csv,
                DecodeFormat::Jsonl => io::PointFormat::Jsonl,
            };
            io::write_points(&mut out, format, points.into_iter())?;
        }
        CellCommand::Footprint { id, patch_px, gsd } => {
            let fp = spec.cell_footprint(id, patch_px, patch_px.map(|_| gsd))?;
            let mut features = vec![polygon_feature(
                &fp.nominal_bounds,
                serde_json::json!({
                    "cell": id.to_string(), "kind": "nominal",
                }),
            )];
            if let Some(patch) = fp.patch_bounds {
                features.push(polygon_feature(
                    &patch.bounds,
                    serde_json::json!({
                        "cell": id.to_string(), "kind": "patch", "side_km": patch.side_km,
                    }),
                ));
            }
            write_json_line(
                &mut out,
                &serde_json::json!({ "type": "FeatureCollection", "features": features }),
            )?;
        }
    }
    out.flush()?;
    Ok(())
}
