//! Output sinks and the row and feature writers shared by subcommands.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use majortom::catalog::RecordFormat;
use majortom::geogrid::Bounds;
use majortom::{Catalog, GridPoint, GridSpec};
use serde_json::{json, Value};

/// Buffered writer to `path`, or stdout when absent or `-`.
pub fn sink(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    match path {
        Some(p) if p != Path::new("-") => {
            let f = File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        _ => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

pub fn open(path: &Path) -> anyhow::Result<Box<dyn io::Read>> {
    if path == Path::new("-") {
        return Ok(Box::new(io::stdin().lock()));
    }
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(Box::new(io::BufReader::new(f)))
}

pub fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<io::Error>().is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
            || matches!(c.downcast_ref::<majortom::Error>(), Some(majortom::Error::Io(io)) if io.kind() == io::ErrorKind::BrokenPipe)
    })
}

pub fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

pub fn write_json_line<W: Write + ?Sized, T: serde::Serialize + ?Sized>(w: &mut W, value: &T) -> anyhow::Result<()> {
    serde_json::to_writer(&mut *w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

pub const POINT_HEADER: [&str; 5] = ["cell", "row", "col", "lat", "lon"];

pub fn point_row(p: &GridPoint) -> [String; 5] {
    [
        p.cell.to_string(),
        p.cell.row.to_string(),
        p.cell.col.to_string(),
        format!("{:.9}", p.lat),
        format!("{:.9}", p.lon),
    ]
}

pub fn point_json(p: &GridPoint) -> Value {
    json!({ "cell": p.cell.to_string(), "row": p.cell.row, "col": p.cell.col, "lat": p.lat, "lon": p.lon })
}

pub fn point_feature(p: &GridPoint) -> Value {
    json!({
        "type": "Feature",
        "geometry": { "type": "Point", "coordinates": [p.lon, p.lat] },
        "properties": { "cell": p.cell.to_string(), "row": p.cell.row, "col": p.cell.col },
    })
}

pub fn polygon_feature(b: &Bounds, properties: Value) -> Value {
    json!({
        "type": "Feature",
        "geometry": { "type": "Polygon", "coordinates": [b.ring()] },
        "bbox": [b.lon_min, b.lat_min, b.lon_max, b.lat_max],
        "properties": properties,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum PointFormat {
    Csv,
    Jsonl,
    Geojson,
}

/// Streams grid points; GeoJSON is written as one FeatureCollection.
pub fn write_points(
    out: &mut dyn Write,
    format: PointFormat,
    points: impl Iterator<Item = GridPoint>,
) -> anyhow::Result<()> {
    match format {
        PointFormat::Csv => {
            let mut w = csv_writer(&mut *out);
            w.write_record(POINT_HEADER)?;
            for p in points {
                w.write_record(point_row(&p))?;
            }
            w.flush()?;
        }
        PointFormat::Jsonl => {
            for p in points {
                write_json_line(out, &point_json(&p))?;
            }
        }
        PointFormat::Geojson => {
            out.write_all(br#"{"type":"FeatureCollection","features":["#)?;
            for (i, p) in points.enumerate() {
                if i > 0 {
                    out.write_all(b",")?;
                }
                serde_json::to_writer(&mut *out, &point_feature(&p))?;
            }
            out.write_all(b"]}\n")?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Where a catalog goes and in which format.
#[derive(clap::Args, Debug)]
pub struct CatalogOut {
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Output format [default: from the --out extension, else jsonl].
    #[arg(long, value_name = "csv|jsonl")]
    pub format: Option<RecordFormat>,
}

impl CatalogOut {
    pub fn write(&self, catalog: &Catalog) -> anyhow::Result<()> {
        let format = match (self.format, &self.out) {
            (Some(f), _) => f,
            (None, Some(p)) if p != Path::new("-") => RecordFormat::from_path(p),
            _ => RecordFormat::Jsonl,
        };
        catalog.write(sink(self.out.as_deref())?, format)?;
        Ok(())
    }
}

/// Reads catalog files (format from extension; `-` is CSV on stdin) into
/// one catalog, reporting rejected rows.
pub fn load_catalog(ctx: &crate::Ctx, spec: GridSpec, paths: &[PathBuf]) -> anyhow::Result<Catalog> {
    let mut catalog = Catalog::new(spec);
    for path in paths {
        let report = catalog
            .ingest(open(path)?, RecordFormat::from_path(path))
            .with_context(|| format!("reading {}", path.display()))?;
        for r in &report.rejects {
            ctx.note(format_args!("{}:{}: rejected: {}", path.display(), r.line, r.reason));
        }
    }
    Ok(catalog)
}
