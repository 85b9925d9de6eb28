use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Subcommand, ValueEnum};
use majortom::catalog::RecordFormat;
use majortom::geogrid::BBox;
use majortom::sampler::{campaign_stats, run_campaign, SyntheticProvider};
use majortom::{Catalog, CellId, SamplerConfig, SelectionResult, TimeWindow, Timestamp};

use crate::catalog::read_cell_list;
use crate::io::{open, sink, write_json_line};
use crate::Ctx;

#[derive(Subcommand)]
pub enum SampleCommand {
    /// Select one scene per cell from a provider file.
    Run {
        /// File of cell ids, or a box lat_min,lat_max,lon_min,lon_max.
        #[arg(long, allow_hyphen_values = true)]
        cells: String,
        /// Scene JSONL: cell, scene_id, acquired, rough_cloud, refined_cloud, nodata_fraction.
        #[arg(long)]
        provider: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Accept outright when the refined cloud fraction is below this.
        #[arg(long, default_value_t = 0.25)]
        accept: f64,
        /// Relaxed cloud ceiling once --after scenes were inspected.
        #[arg(long, default_value_t = 0.50)]
        fallback: f64,
        /// Scenes to inspect before the relaxed ceiling applies.
        #[arg(long, default_value_t = 50)]
        after: usize,
        #[arg(long, default_value_t = 4)]
        window_months: u32,
        /// Largest admissible no-data fraction.
        #[arg(long, default_value_t = 0.05)]
        max_nodata: f64,
        /// Start of the availability period [default: earliest scene].
        #[arg(long)]
        from: Option<Timestamp>,
        /// End of the availability period, exclusive [default: just after the latest scene].
        #[arg(long)]
        to: Option<Timestamp>,
        /// Source name on emitted catalog records.
        #[arg(long, default_value = "S2-L1C")]
        source: String,
        /// Worker threads; results do not depend on this.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Selection results as JSONL; stdout when omitted.
        #[arg(long)]
        results: Option<PathBuf>,
        /// Catalog of selected scenes (CSV or JSONL by extension).
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Summary of a results file.
    Stats {
        results: PathBuf,
        #[arg(long, value_enum, default_value_t = SummaryFormat::Text)]
        format: SummaryFormat,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SummaryFormat {
    Text,
    Jsonl,
}

fn cells_arg(ctx: &Ctx, text: &str) -> anyhow::Result<Vec<CellId>> {
    let path = PathBuf::from(text);
    if !path.exists() {
        if let Ok(bbox) = BBox::parse(text) {
            return Ok(ctx.spec.cells_in_bbox(bbox).map(|p| p.cell).collect());
        }
    }
    let cells = read_cell_list(&path)?;
    for cell in &cells {
        ctx.spec.validate(*cell)?;
    }
    Ok(cells)
}

fn read_results(path: &Path) -> anyhow::Result<Vec<SelectionResult>> {
    let mut results = Vec::new();
    for (i, line) in BufReader::new(open(path)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r = serde_json::from_str(&line).with_context(|| format!("{}:{}", path.display(), i + 1))?;
        results.push(r);
    }
    Ok(results)
}

fn show(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.6}"))
}

pub fn run(ctx: &Ctx, cmd: SampleCommand) -> anyhow::Result<()> {
    match cmd {
        SampleCommand::Run {
            cells,
            provider,
            seed,
            accept,
            fallback,
            after,
            window_months,
            max_nodata,
            from,
            to,
            source,
            workers,
            results,
            catalog,
        } => {
            let cells = cells_arg(ctx, &cells)?;
            let provider = SyntheticProvider::read_jsonl(open(&provider)?)
                .with_context(|| format!("reading provider {}", provider.display()))?;
            let span = provider.time_span();
            let (Some(start), Some(end)) = (from.or(span.map(|s| s.start)), to.or(span.map(|s| s.end))) else {
                bail!("provider has no scenes; give --from and --to");
            };
            let mut config = SamplerConfig::new(TimeWindow::new(start, end)?, seed);
            config.accept_cloud = accept;
            config.fallback_cloud = fallback;
            config.fallback_after = after;
            config.window_months = window_months;
            config.max_nodata = max_nodata;
            config.source = source;

            let (selections, records) = run_campaign(&cells, &provider, &config, workers)?;
            let mut out = sink(results.as_deref())?;
            for r in &selections {
                write_json_line(&mut out, r)?;
            }
            out.flush()?;
            if let Some(path) = catalog {
                let mut cat = Catalog::new(ctx.spec);
                for r in records {
                    cat.insert(r).map_err(|e| anyhow::anyhow!("{e}"))?;
                }
                cat.write(sink(Some(&path))?, RecordFormat::from_path(&path))?;
            }
            let stats = campaign_stats(&selections);
            ctx.note(format_args!(
                "{} cells: {} selected, {} unsampled",
                selections.len(),
                stats.selected_count,
                stats.unsampled_count
            ));
        }
        SampleCommand::Stats { results, format } => {
            let stats = campaign_stats(&read_results(&results)?);
            let mut out = sink(None)?;
            match format {
                SummaryFormat::Text => {
                    writeln!(out, "selected: {}", stats.selected_count)?;
                    writeln!(out, "unsampled: {}", stats.unsampled_count)?;
                    writeln!(out, "mean_cloud: {}", show(stats.mean_cloud))?;
                    writeln!(out, "median_cloud: {}", show(stats.median_cloud))?;
                    writeln!(out, "fallback_rate: {}", show(stats.fallback_rate))?;
                }
                SummaryFormat::Jsonl => write_json_line(&mut out, &stats)?,
            }
            out.flush()?;
        }
    }
    Ok(())
}
