//! Result files. CSV files open with a `# schema: <name>/<version>` comment,
//! JSON-lines files with a `{"schema": ...}` object and JSON documents with a
//! leading `schema` member.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use wflo_core::optimizer::GenerationTrace;
use wflo_core::study::ShrinkSweepPoint;
use wflo_core::{Grid, Layout, Point};

pub const LAYOUT_SCHEMA: &str = "wflo-layout/1";
pub const TRACE_SCHEMA: &str = "wflo-trace/1";
pub const SWEEP_SCHEMA: &str = "wflo-sweep/1";
pub const COST_SCHEMA: &str = "wflo-cost-curve/1";

/// Environment variable naming the output directory when neither the command
/// line nor the config does.
pub const OUT_ENV: &str = "WFLO_OUT";
pub const DEFAULT_OUT: &str = "wflo-out";

/// `--out`, then the config's `out_dir`, then `$WFLO_OUT`, then `wflo-out`.
pub fn resolve_out_dir(cli: Option<&Path>, config: Option<&Path>) -> PathBuf {
    cli.or(config)
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

/// Creates `dir` and checks that files can be written into it.
pub fn prepare_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    if !dir.is_dir() {
        bail!("output path {} is not a directory", dir.display());
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn csv_writer(path: &Path, schema: &str) -> Result<csv::Writer<BufWriter<File>>> {
    let mut out = create(path)?;
    writeln!(out, "# schema: {schema}")?;
    Ok(csv::Writer::from_writer(out))
}

fn finish_csv(w: csv::Writer<BufWriter<File>>, path: &Path) -> Result<()> {
    let mut inner = w
        .into_inner()
        .map_err(|e| anyhow::anyhow!("{}", e.error()))?;
    inner
        .flush()
        .with_context(|| format!("cannot write {}", path.display()))
}

#[derive(Serialize, serde::Deserialize)]
struct LayoutRow {
    index: usize,
    x: f64,
    y: f64,
}

/// One row per turbine: grid index and coordinates in meters.
pub fn write_layout(path: &Path, grid: &Grid, layout: &Layout) -> Result<()> {
    let mut w = csv_writer(path, LAYOUT_SCHEMA)?;
    for &index in layout.indices() {
        let p = grid.point(index);
        w.serialize(LayoutRow {
            index,
            x: p.x,
            y: p.y,
        })?;
    }
    finish_csv(w, path)
}

/// Turbine coordinates from a layout file written by [`write_layout`].
pub fn read_layout(path: &Path) -> Result<Vec<Point>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read layout {}", path.display()))?;
    match text.lines().next() {
        Some(line) if line.trim() == format!("# schema: {LAYOUT_SCHEMA}") => {}
        _ => bail!(
            "{}: missing `# schema: {LAYOUT_SCHEMA}` header",
            path.display()
        ),
    }
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut points = Vec::new();
    for (k, row) in reader.deserialize::<LayoutRow>().enumerate() {
        let row = row.with_context(|| format!("{}: bad row {}", path.display(), k + 1))?;
        points.push(Point::new(row.x, row.y));
    }
    if points.is_empty() {
        bail!("{}: layout has no turbines", path.display());
    }
    Ok(points)
}

#[derive(Serialize)]
struct TraceLine<'a> {
    generation: usize,
    best_eta: f64,
    mean_eta: f64,
    best_layout: &'a [usize],
}

/// One JSON object per generation after the schema line.
pub fn write_trace(path: &Path, trace: &[GenerationTrace]) -> Result<()> {
    let mut out = create(path)?;
    writeln!(out, "{}", serde_json::json!({ "schema": TRACE_SCHEMA }))?;
    for t in trace {
        let line = TraceLine {
            generation: t.generation,
            best_eta: t.best_efficiency,
            mean_eta: t.mean_efficiency,
            best_layout: &t.best_layout,
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    out.flush()
        .with_context(|| format!("cannot write {}", path.display()))
}

/// JSON-lines file from already serializable records.
pub fn write_jsonl<T: Serialize>(path: &Path, schema: &str, rows: &[T]) -> Result<()> {
    let mut out = create(path)?;
    writeln!(out, "{}", serde_json::json!({ "schema": schema }))?;
    for row in rows {
        serde_json::to_writer(&mut out, row)?;
        out.write_all(b"\n")?;
    }
    out.flush()
        .with_context(|| format!("cannot write {}", path.display()))
}

/// Pretty JSON document; `body` must serialize to an object.
pub fn write_json<T: Serialize>(path: &Path, schema: &str, body: &T) -> Result<()> {
    let mut doc = serde_json::Map::new();
    doc.insert("schema".into(), schema.into());
    match serde_json::to_value(body)? {
        serde_json::Value::Object(fields) => doc.extend(fields),
        _ => bail!("summary body must be an object"),
    }
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, &doc)?;
    out.write_all(b"\n")?;
    out.flush()
        .with_context(|| format!("cannot write {}", path.display()))
}

#[derive(Serialize)]
struct SweepRow {
    edge: f64,
    area_fraction: f64,
    power_fraction: f64,
    n_runs: usize,
    stderr: f64,
    mean_power_kw: f64,
}

pub fn write_sweep(path: &Path, sweep: &[ShrinkSweepPoint]) -> Result<()> {
    let mut w = csv_writer(path, SWEEP_SCHEMA)?;
    for p in sweep {
        w.serialize(SweepRow {
            edge: p.edge,
            area_fraction: p.area_fraction,
            power_fraction: p.power_fraction,
            n_runs: p.n_runs,
            stderr: p.std_error,
            mean_power_kw: p.mean_power,
        })?;
    }
    finish_csv(w, path)
}

#[derive(Serialize)]
struct CostRow {
    n: u32,
    cost: f64,
    cost_per_turbine: f64,
}

pub fn write_cost_curve(path: &Path, rows: &[(u32, f64)]) -> Result<()> {
    let mut w = csv_writer(path, COST_SCHEMA)?;
    for &(n, cost) in rows {
        w.serialize(CostRow {
            n,
            cost,
            cost_per_turbine: cost / f64::from(n),
        })?;
    }
    finish_csv(w, path)
}
