use std::collections::BTreeSet;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Subcommand, ValueEnum};
use majortom::catalog::{volume_gigapixels, volume_pixels, CoverageStats, Predicate, RecordFormat};
use majortom::geogrid::BBox;
use majortom::{Catalog, CellId, SplitManifest, Timestamp};
use serde_json::json;

use crate::io::{csv_writer, load_catalog, open, sink, write_json_line, CatalogOut};
use crate::Ctx;

#[derive(Subcommand)]
pub enum CatalogCommand {
    /// Merge record files (CSV or JSONL by extension) into one catalog.
    Ingest {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        out: CatalogOut,
        /// Exit 1 if any row was rejected.
        #[arg(long)]
        strict: bool,
    },
    /// Records matching every given condition.
    Filter {
        input: PathBuf,
        #[command(flatten)]
        predicate: PredicateArgs,
        #[command(flatten)]
        out: CatalogOut,
    },
    /// Cells present in both catalogs with their records from each side.
    Join {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
    },
    /// For each reference record, the candidate in the same cell closest in time.
    Pair {
        reference: PathBuf,
        candidates: PathBuf,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
    },
    /// Dataset volume and surface coverage, from a catalog or a sample count.
    Stats {
        #[arg(required_unless_present = "count", conflicts_with = "count")]
        input: Option<PathBuf>,
        /// Number of samples, instead of reading a catalog.
        #[arg(long)]
        count: Option<u64>,
        /// Patch side in pixels.
        #[arg(long, default_value_t = 1068)]
        patch_px: u32,
        /// Ground sampling distance in metres per pixel.
        #[arg(long, default_value_t = 10.0)]
        gsd: f64,
        #[arg(long, value_enum, default_value_t = StatsFormat::Text)]
        format: StatsFormat,
    },
    /// Split manifests listing (cell, source) pairs.
    #[command(subcommand)]
    Split(SplitCommand),
    /// STAC-style items.
    #[command(subcommand)]
    Stac(StacCommand),
}

#[derive(Subcommand)]
pub enum SplitCommand {
    /// Write a manifest of the (cell, source) pairs matching the conditions.
    Export {
        input: PathBuf,
        #[arg(long)]
        name: String,
        /// Manifest file; stdout when omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Creation time [default: latest record time in the input].
        #[arg(long)]
        created: Option<Timestamp>,
        #[command(flatten)]
        predicate: PredicateArgs,
    },
    /// Records of a catalog covered by a manifest.
    Apply {
        input: PathBuf,
        manifest: PathBuf,
        #[command(flatten)]
        out: CatalogOut,
    },
}

#[derive(Subcommand)]
pub enum StacCommand {
    /// One STAC item per record as JSONL.
    Export {
        input: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StatsFormat {
    Text,
    Jsonl,
}

#[derive(Args, Debug, Default)]
pub struct PredicateArgs {
    /// Keep these sources (repeatable or comma separated).
    #[arg(long = "source", value_delimiter = ',')]
    sources: Vec<String>,
    /// Earliest time_start, inclusive.
    #[arg(long)]
    from: Option<Timestamp>,
    /// Latest time_start, inclusive.
    #[arg(long)]
    to: Option<Timestamp>,
    /// Keep records with cloud fraction strictly below this.
    #[arg(long)]
    max_cloud: Option<f64>,
    /// Keep records with no-data fraction at most this.
    #[arg(long)]
    max_nodata: Option<f64>,
    /// lat_min,lat_max,lon_min,lon_max tested against each record's cell anchor.
    #[arg(long, allow_hyphen_values = true)]
    bbox: Option<String>,
    /// File of cell ids, one per line.
    #[arg(long)]
    cells: Option<PathBuf>,
    /// Let records without a cloud or no-data value pass those thresholds.
    #[arg(long)]
    include_unknown: bool,
}

impl PredicateArgs {
    fn build(&self) -> anyhow::Result<Predicate> {
        let time_range = match (self.from, self.to) {
            (None, None) => None,
            (from, to) => Some((
                from.unwrap_or(Timestamp::from_unix(i64::MIN / 2)),
                to.unwrap_or(Timestamp::from_unix(i64::MAX / 2)),
            )),
        };
        let predicate = Predicate {
            sources: (!self.sources.is_empty()).then(|| self.sources.iter().cloned().collect()),
            time_range,
            max_cloud: self.max_cloud,
            max_nodata: self.max_nodata,
            bbox: self.bbox.as_deref().map(BBox::parse).transpose()?,
            cells: self
                .cells
                .as_deref()
                .map(read_cell_list)
                .transpose()?
                .map(|v| v.into_iter().collect()),
            include_unknown: self.include_unknown,
        };
        predicate.validate()?;
        Ok(predicate)
    }
}

/// Cell ids one per line. Blank lines, `#` comments and a `cell` header are
/// skipped; in CSV-like lines only the first field is read.
pub fn read_cell_list(path: &Path) -> anyhow::Result<Vec<CellId>> {
    let mut cells = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, line) in BufReader::new(open(path)?).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        // "201U, 54L" is a single id, "201U_54L,x,y" is a row
        let field = match line.parse::<CellId>() {
            Ok(cell) => Ok(cell),
            Err(_) => line.split(',').next().unwrap_or("").trim().parse::<CellId>(),
        };
        match field {
            Ok(cell) => {
                if seen.insert(cell) {
                    cells.push(cell);
                }
            }
            Err(_) if i == 0 && line.split(',').next() == Some("cell") => {}
            Err(e) => bail!("{}:{}: {e}", path.display(), i + 1),
        }
    }
    Ok(cells)
}

fn stats_fields(
    records: Option<usize>,
    coverage: &CoverageStats,
    samples: u64,
    patch_px: u32,
) -> Vec<(&'static str, serde_json::Value)> {
    let mut fields = Vec::new();
    if let Some(n) = records {
        fields.push(("records", json!(n)));
        fields.push(("cells", json!(coverage.cell_count)));
    } else {
        fields.push(("samples", json!(samples)));
    }
    fields.extend([
        ("pixels", json!(volume_pixels(samples, patch_px as u64).to_string())),
        ("gigapixels", json!(volume_gigapixels(samples, patch_px as u64))),
        ("area_with_overlap_km2", json!(coverage.area_with_overlap_km2)),
        ("area_without_overlap_km2", json!(coverage.area_without_overlap_km2)),
    ]);
    fields
}

pub fn run(ctx: &Ctx, cmd: CatalogCommand) -> anyhow::Result<()> {
    match cmd {
        CatalogCommand::Ingest { inputs, out, strict } => {
            let mut catalog = Catalog::new(ctx.spec);
            let mut rejected = 0;
            for path in &inputs {
                let report = catalog
                    .ingest(open(path)?, RecordFormat::from_path(path))
                    .with_context(|| format!("reading {}", path.display()))?;
                for r in &report.rejects {
                    eprintln!("{}:{}: rejected: {}", path.display(), r.line, r.reason);
                }
                ctx.note(format_args!(
                    "{}: inserted {}, rejected {}, duplicates {}",
                    path.display(),
                    report.inserted,
                    report.rejected,
                    report.duplicates
                ));
                rejected += report.rejected;
            }
            out.write(&catalog)?;
            if strict && rejected > 0 {
                bail!("{rejected} rows rejected");
            }
        }
        CatalogCommand::Filter { input, predicate, out } => {
            let catalog = load_catalog(ctx, ctx.spec, &[input])?;
            out.write(&catalog.filter(&predicate.build()?)?)?;
        }
        CatalogCommand::Join { left, right, format } => {
            let a = load_catalog(ctx, ctx.spec, &[left])?;
            let b = load_catalog(ctx, ctx.spec, &[right])?;
            let joined = a.join_by_cell(&b)?;
            let mut out = sink(None)?;
            match format {
                TableFormat::Csv => {
                    let mut w = csv_writer(&mut out);
                    w.write_record(["cell", "left_records", "right_records"])?;
                    for j in &joined {
                        w.write_record([j.cell.to_string(), j.left.len().to_string(), j.right.len().to_string()])?;
                    }
                    w.flush()?;
                }
                TableFormat::Jsonl => {
                    for j in &joined {
                        write_json_line(&mut out, j)?;
                    }
                }
            }
            out.flush()?;
        }
        CatalogCommand::Pair {
            reference,
            candidates,
            format,
        } => {
            let a = load_catalog(ctx, ctx.spec, &[reference])?;
            let b = load_catalog(ctx, ctx.spec, &[candidates])?;
            let pairs = a.closest_time_pairing(&b)?;
            let mut out = sink(None)?;
            match format {
                TableFormat::Csv => {
                    let mut w = csv_writer(&mut out);
                    w.write_record([
                        "cell",
                        "reference_source",
                        "reference_product_id",
                        "reference_time",
                        "matched_source",
                        "matched_product_id",
                        "matched_time",
                        "delta_seconds",
                    ])?;
                    for p in &pairs {
                        w.write_record([
                            p.cell.to_string(),
                            p.reference.source.clone(),
                            p.reference.product_id.clone(),
                            p.reference.time_start.to_string(),
                            p.matched.source.clone(),
                            p.matched.product_id.clone(),
                            p.matched.time_start.to_string(),
                            p.delta_seconds.to_string(),
                        ])?;
                    }
                    w.flush()?;
                }
                TableFormat::Jsonl => {
                    for p in &pairs {
                        write_json_line(&mut out, p)?;
                    }
                }
            }
            out.flush()?;
        }
        CatalogCommand::Stats {
            input,
            count,
            patch_px,
            gsd,
            format,
        } => {
            let mut out = sink(None)?;
            let (records, coverage, samples) = match (input, count) {
                (_, Some(n)) => (
                    None,
                    CoverageStats::from_count(n, patch_px, gsd, ctx.spec.spacing_km()),
                    n,
                ),
                (Some(path), None) => {
                    let catalog = load_catalog(ctx, ctx.spec, &[path])?;
                    let coverage = catalog.coverage_stats(patch_px, gsd)?;
                    (Some(catalog.len()), coverage, catalog.len() as u64)
                }
                (None, None) => unreachable!("clap requires one of input or --count"),
            };
            let fields = stats_fields(records, &coverage, samples, patch_px);
            match format {
                StatsFormat::Text if records.is_none() => {
                    writeln!(out, "{:.1}", volume_gigapixels(samples, patch_px as u64))?;
                }
                StatsFormat::Text => {
                    for (k, v) in &fields {
                        match v {
                            serde_json::Value::String(s) => writeln!(out, "{k}: {s}")?,
                            v => writeln!(out, "{k}: {v}")?,
                        }
                    }
                }
                StatsFormat::Jsonl => {
                    let mut map: serde_json::Map<String, serde_json::Value> =
                        fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
                    if records.is_some() {
                        let histogram: serde_json::Map<String, serde_json::Value> = coverage
                            .per_row_histogram
                            .iter()
                            .map(|(row, n)| (row.to_string(), json!(n)))
                            .collect();
                        map.insert("per_row_histogram".into(), histogram.into());
                    }
                    write_json_line(&mut out, &map)?;
                }
            }
            out.flush()?;
        }
        CatalogCommand::Split(SplitCommand::Export {
            input,
            name,
            out,
            created,
            predicate,
        }) => {
            let catalog = load_catalog(ctx, ctx.spec, &[input])?;
            let created = created.unwrap_or_else(|| {
                catalog
                    .records()
                    .map(|r| r.time_end.unwrap_or(r.time_start).max(r.time_start))
                    .max()
                    .unwrap_or(Timestamp::from_unix(0))
            });
            let manifest = catalog.export_split(&name, &predicate.build()?, created)?;
            ctx.note(format_args!("{}: {} entries", manifest.name, manifest.entries.len()));
            manifest.write(sink(out.as_deref())?)?;
        }
        CatalogCommand::Split(SplitCommand::Apply { input, manifest, out }) => {
            let manifest = SplitManifest::read(open(&manifest)?)
                .with_context(|| format!("reading manifest {}", manifest.display()))?;
            let catalog = load_catalog(ctx, ctx.spec, &[input])?;
            let (view, warnings) = catalog.apply_split(&manifest)?;
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            out.write(&view)?;
        }
        CatalogCommand::Stac(StacCommand::Export { input, out }) => {
            let catalog = load_catalog(ctx, ctx.spec, &[input])?;
            catalog.write_stac_items(sink(out.as_deref())?)?;
        }
    }
    Ok(())
}
