//! Command-line front end: synthesize datasets, compare them, and write
//! result files and optional SVG plots.
//!
//! All diagnostics go to stderr; results are written only to files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analysis::{
    compare_grid, compare_trajectory, spatial_consistency, summarize_region, GridMap, RegionSummary,
    TrajectorySeries,
};
use crate::ingest::{
    format_sig9, load_dataset_dir, pair_datasets, read_results, summarize_results, write_csv,
    write_dataset_dir, write_json, write_results, ChannelStats, Dataset, LoadOptions, ResultRow,
    ResultSummary,
};
use crate::metrics::compare_path_sets;
use crate::model::{
    AssignmentMode, Channel, ComparisonResult, ComparisonStatus, GridSpec, HrtComponentMode, MetricConfig, Receiver,
    ReceiverLayout, StandardizationScope, Vec3, Weights,
};
use crate::plot::{render_heatmap, render_series};
use crate::synthrt::{trace, SceneSpec};

pub const GRID_MAP_FILE: &str = "grid_map.csv";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const REGION_FILE: &str = "region.json";
pub const CONSISTENCY_FILE: &str = "consistency.csv";
pub const PROVENANCE_FILE: &str = "provenance.csv";

#[derive(Debug, Parser)]
#[command(name = "rtcompare", version, about = "Compare ray-tracing channel simulations path by path")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trace a synthetic scene over a receiver layout and write a dataset directory.
    Synth(SynthArgs),
    /// Compare two dataset directories receiver by receiver.
    Compare(CompareArgs),
    /// Compare two trajectory datasets step by step.
    Trajectory(CompareArgs),
    /// Mean CRT between neighboring receivers of one dataset.
    Consistency(ConsistencyArgs),
    /// Recompute summary statistics from a results file.
    Summarize(SummarizeArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Scene description (JSON).
    #[arg(long)]
    pub scene: PathBuf,
    /// Receiver grid: x0,y0,nx,ny,dx,dy,height.
    #[arg(long, value_parser = parse_grid, group = "layout", allow_hyphen_values = true)]
    pub grid: Option<GridSpec>,
    /// Trajectory CSV with columns t_s,x_m,y_m,z_m.
    #[arg(long, group = "layout")]
    pub trajectory: Option<PathBuf>,
    /// Receiver CSV with columns rx_id,x_m,y_m,z_m.
    #[arg(long, group = "layout")]
    pub receivers: Option<PathBuf>,
    /// Override a material's reflection loss: name=loss_db. Repeatable.
    #[arg(long = "material-loss", value_parser = parse_material_loss)]
    pub material_loss: Vec<(String, f64)>,
    /// Dataset label stored in the metadata.
    #[arg(long)]
    pub label: Option<String>,
    /// Output dataset directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Default)]
pub struct MetricArgs {
    /// TOML file with metric settings; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// joint, delay-only, power-only, dod-only or doa-only.
    #[arg(long)]
    pub assignment_mode: Option<AssignmentMode>,
    /// Feature weights w_tau,w_p,w_dod,w_doa.
    #[arg(long, allow_hyphen_values = true)]
    pub weights: Option<Weights>,
    /// pooled or per-set.
    #[arg(long = "std-scope")]
    pub std_scope: Option<StandardizationScope>,
    /// Drop paths weaker than this before comparing.
    #[arg(long, allow_hyphen_values = true)]
    pub power_threshold_dbm: Option<f64>,
    /// per-feature-max or joint-argmax.
    #[arg(long = "hrt-components")]
    pub hrt_components: Option<HrtComponentMode>,
}

impl MetricArgs {
    /// Defaults, then the config file, then explicit flags.
    pub fn resolve(&self) -> Result<MetricConfig> {
        let mut cfg = match &self.config {
            Some(p) => {
                let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                toml::from_str::<MetricConfig>(&text).with_context(|| format!("parsing {}", p.display()))?
            }
            None => MetricConfig::default(),
        };
        if let Some(m) = self.assignment_mode {
            cfg.assignment_mode = m;
        }
        if let Some(w) = self.weights {
            cfg.weights = w;
        }
        if let Some(s) = self.std_scope {
            cfg.standardization_scope = s;
        }
        if let Some(t) = self.power_threshold_dbm {
            cfg.power_threshold_dbm = Some(t);
        }
        if let Some(h) = self.hrt_components {
            cfg.hrt_component_mode = h;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args, Default)]
pub struct RegionArgs {
    /// Region center x,y in meters.
    #[arg(long, value_parser = parse_xy, allow_hyphen_values = true, requires = "region_radius")]
    pub region_center: Option<(f64, f64)>,
    /// Region radius in meters.
    #[arg(long, requires = "region_center")]
    pub region_radius: Option<f64>,
}

impl RegionArgs {
    fn get(&self) -> Option<((f64, f64), f64)> {
        self.region_center.zip(self.region_radius)
    }
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// First dataset directory.
    pub a: PathBuf,
    /// Second dataset directory.
    pub b: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub metric: MetricArgs,
    #[command(flatten)]
    pub region: RegionArgs,
    /// Write SVG plots for the selected channels.
    #[arg(long)]
    pub plot: bool,
    /// Channels to plot, comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "hrt,crt")]
    pub channels: Vec<Channel>,
    /// Reject input files with unexpected columns.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct ConsistencyArgs {
    /// Dataset directory.
    pub dataset: PathBuf,
    /// Neighborhood radius in meters (horizontal, exclusive).
    #[arg(long)]
    pub radius: f64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub metric: MetricArgs,
    /// Reject input files with unexpected columns.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    /// A results.csv file, or a directory containing one.
    pub results: PathBuf,
    /// Output JSON file.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub region: RegionArgs,
}

fn parse_floats(s: &str, n: usize, what: &str) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad number {p:?} in {what}")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("{what} needs {n} comma-separated values, got {}", v.len()));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(format!("{what} values must be finite"));
    }
    Ok(v)
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let v = parse_floats(s, 7, "grid")?;
    let count = |x: f64, name: &str| {
        if x >= 1.0 && x.fract() == 0.0 {
            Ok(x as usize)
        } else {
            Err(format!("grid {name} must be a positive integer"))
        }
    };
    let g = GridSpec {
        origin_x: v[0],
        origin_y: v[1],
        nx: count(v[2], "nx")?,
        ny: count(v[3], "ny")?,
        dx: v[4],
        dy: v[5],
        height: v[6],
    };
    ReceiverLayout::Grid(g).validate().map_err(|e| e.to_string())?;
    Ok(g)
}

fn parse_xy(s: &str) -> Result<(f64, f64), String> {
    let v = parse_floats(s, 2, "region center")?;
    Ok((v[0], v[1]))
}

fn parse_material_loss(s: &str) -> Result<(String, f64), String> {
    let (name, loss) = s.split_once('=').ok_or("expected name=loss_db")?;
    let loss: f64 = loss.trim().parse().map_err(|_| format!("bad loss {loss:?}"))?;
    Ok((name.trim().to_string(), loss))
}

#[derive(Debug, Deserialize)]
struct TrajectoryRow {
    t_s: f64,
    x_m: f64,
    y_m: f64,
    z_m: f64,
}

#[derive(Debug, Deserialize)]
struct ReceiverRow {
    rx_id: String,
    x_m: f64,
    y_m: f64,
    z_m: f64,
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    rdr.deserialize()
        .collect::<Result<Vec<T>, _>>()
        .with_context(|| format!("reading {}", path.display()))
}

fn synth_layout(args: &SynthArgs) -> Result<ReceiverLayout> {
    let layout = if let Some(g) = args.grid {
        ReceiverLayout::Grid(g)
    } else if let Some(p) = &args.trajectory {
        let samples: Vec<(f64, Vec3)> = read_rows::<TrajectoryRow>(p)?
            .into_iter()
            .map(|r| (r.t_s, Vec3::new(r.x_m, r.y_m, r.z_m)))
            .collect();
        ReceiverLayout::trajectory_from_samples(&samples)
    } else if let Some(p) = &args.receivers {
        ReceiverLayout::Explicit {
            receivers: read_rows::<ReceiverRow>(p)?
                .into_iter()
                .map(|r| Receiver {
                    rx_id: r.rx_id,
                    position: Vec3::new(r.x_m, r.y_m, r.z_m),
                    t: None,
                })
                .collect(),
        }
    } else {
        bail!("one of --grid, --trajectory or --receivers is required");
    };
    layout.validate()?;
    Ok(layout)
}

pub fn cmd_synth(args: &SynthArgs) -> Result<Vec<PathBuf>> {
    let text = fs::read_to_string(&args.scene).with_context(|| format!("reading {}", args.scene.display()))?;
    let mut scene = SceneSpec::from_json(&text).with_context(|| args.scene.display().to_string())?;
    for (name, loss) in &args.material_loss {
        if scene.material_loss(name).is_none() {
            bail!("unknown material {name:?}");
        }
        scene = scene.with_material_loss(name, *loss);
    }
    let layout = synth_layout(args)?;
    let label = args.label.clone().unwrap_or_else(|| {
        args.out
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    let traced = trace(&scene, &layout, &label)?;
    for id in &traced.dataset.metadata.flagged_receivers {
        log::warn!("receiver {id} is inside an obstacle or below ground; it has no paths");
    }
    let mut written = write_dataset_dir(&traced.dataset, &args.out)?;
    let rows: Vec<Vec<String>> = traced
        .provenance
        .iter()
        .flat_map(|(id, paths)| {
            paths.iter().enumerate().map(move |(k, p)| {
                let faces: Vec<String> = p.interactions.iter().map(|f| f.to_string()).collect();
                vec![id.clone(), k.to_string(), faces.join(";"), format_sig9(p.length_m)]
            })
        })
        .collect();
    let prov = args.out.join(PROVENANCE_FILE);
    write_csv(&prov, &["rx_id", "path_id", "interactions", "length_m"], &rows)?;
    written.push(prov);
    Ok(written)
}

fn load(path: &Path, strict: bool) -> Result<Dataset> {
    load_dataset_dir(path, LoadOptions { strict }).with_context(|| format!("loading dataset {}", path.display()))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn write_text(path: &Path, text: &str) -> Result<PathBuf> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path.to_path_buf())
}

/// Explicit layout listing the receivers of `a` in dataset order.
fn layout_of(a: &Dataset) -> ReceiverLayout {
    ReceiverLayout::Explicit {
        receivers: a
            .receivers
            .iter()
            .map(|(id, e)| Receiver {
                rx_id: id.clone(),
                position: e.position,
                t: e.t,
            })
            .collect(),
    }
}

fn log_summary(summary: &ResultSummary) {
    let hrt = summary.channel(Channel::Hrt);
    let crt = summary.channel(Channel::Crt);
    log::info!(
        "{} receivers ({} ok); mean HRT {:?}, mean CRT {:?}",
        summary.receivers,
        summary.status_counts.get("ok").copied().unwrap_or(0),
        hrt.mean,
        crt.mean
    );
}

fn write_grid_outputs(map: &GridMap, args: &CompareArgs, written: &mut Vec<PathBuf>) -> Result<()> {
    let p = args.out.join(GRID_MAP_FILE);
    map.write_csv(&p)?;
    written.push(p);
    if let Some((center, radius)) = args.region.get() {
        let region = summarize_region(map, center, radius)?;
        if region.empty {
            log::warn!("region around {center:?} with radius {radius} m has no ok cells");
        }
        let p = args.out.join(REGION_FILE);
        write_json(&p, &region)?;
        written.push(p);
    }
    if args.plot {
        let title = format!("{} vs {}", label_of(&args.a), label_of(&args.b));
        for &c in &args.channels {
            let svg = render_heatmap(map, c, &title);
            written.push(write_text(&args.out.join(format!("heatmap_{}.svg", c.name())), &svg)?);
        }
    }
    Ok(())
}

fn write_series_outputs(series: &TrajectorySeries, args: &CompareArgs, written: &mut Vec<PathBuf>) -> Result<()> {
    for id in &series.excluded {
        log::warn!("trajectory step {id} is missing from one dataset and was skipped");
    }
    let p = args.out.join(TRAJECTORY_FILE);
    series.write_csv(&p)?;
    written.push(p);
    if args.plot {
        let title = format!("{} vs {}", label_of(&args.a), label_of(&args.b));
        for &c in &args.channels {
            let svg = render_series(series, c, &title);
            written.push(write_text(&args.out.join(format!("series_{}.svg", c.name())), &svg)?);
        }
    }
    Ok(())
}

fn label_of(p: &Path) -> String {
    p.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| p.display().to_string())
}

fn is_grid(d: &Dataset) -> bool {
    matches!(d.metadata.layout, Some(ReceiverLayout::Grid(_)))
}

/// Full comparison pipeline. Grid datasets also get a grid map (and
/// heatmaps with `--plot`); timed datasets get a time series.
pub fn cmd_compare(args: &CompareArgs, force_trajectory: bool) -> Result<Vec<PathBuf>> {
    let cfg = args.metric.resolve()?;
    let a = load(&args.a, args.strict)?;
    let b = load(&args.b, args.strict)?;
    let pairing = pair_datasets(&a, &b)?;
    for id in &pairing.only_in_a {
        log::warn!("receiver {id} only in {}", args.a.display());
    }
    for id in &pairing.only_in_b {
        log::warn!("receiver {id} only in {}", args.b.display());
    }
    ensure_dir(&args.out)?;
    let mut written = Vec::new();

    let trajectory = force_trajectory || (a.is_trajectory() && b.is_trajectory());
    let results: Vec<ComparisonResult> = if trajectory {
        let series = compare_trajectory(&a, &b, &cfg)?;
        write_series_outputs(&series, args, &mut written)?;
        series.steps.into_iter().map(|s| s.result).collect()
    } else if is_grid(&a) && is_grid(&b) {
        let map = compare_grid(&a, &b, &cfg)?;
        write_grid_outputs(&map, args, &mut written)?;
        map.cells.into_iter().flatten().collect()
    } else {
        if args.plot {
            log::warn!("plots need grid or trajectory layouts; none written");
        }
        use rayon::prelude::*;
        pairing
            .pairs
            .par_iter()
            .map(|(_, x, y)| compare_path_sets(x, y, &cfg))
            .collect()
    };
    if !trajectory && !is_grid(&a) && args.region.get().is_some() {
        log::warn!("region summaries need grid layouts; ignored");
    }

    let mut summary = summarize_results(&results);
    summary.only_in_a = pairing.only_in_a;
    summary.only_in_b = pairing.only_in_b;
    log_summary(&summary);
    written.extend(write_results(&results, &layout_of(&a), &args.out, &summary)?);
    Ok(written)
}

pub fn cmd_consistency(args: &ConsistencyArgs) -> Result<Vec<PathBuf>> {
    if !(args.radius > 0.0 && args.radius.is_finite()) {
        bail!("radius must be positive and finite, got {}", args.radius);
    }
    let cfg = args.metric.resolve()?;
    let d = load(&args.dataset, args.strict)?;
    let report = spatial_consistency(&d, args.radius, &cfg)?;
    for id in report.isolated() {
        log::warn!("receiver {id} has no neighbor within {} m", args.radius);
    }
    ensure_dir(&args.out)?;
    let p = args.out.join(CONSISTENCY_FILE);
    report.write_csv(&p)?;
    Ok(vec![p])
}

/// Summary recomputed from a results file, optionally restricted to a disc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileSummary {
    pub receivers: usize,
    pub status_counts: std::collections::BTreeMap<String, usize>,
    pub channels: indexmap::IndexMap<String, ChannelStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionSummary>,
}

fn summarize_rows(rows: &[&ResultRow]) -> (usize, std::collections::BTreeMap<String, usize>, indexmap::IndexMap<String, ChannelStats>) {
    let mut counts: std::collections::BTreeMap<String, usize> =
        [ComparisonStatus::Ok, ComparisonStatus::BothEmpty, ComparisonStatus::CoverageMismatch]
            .iter()
            .map(|s| (s.as_str().to_string(), 0))
            .collect();
    for r in rows {
        *counts.entry(r.status.to_string()).or_default() += 1;
    }
    let channels = Channel::ALL
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let stats = ChannelStats::from_values(
                rows.iter()
                    .filter(|r| r.status == ComparisonStatus::Ok)
                    .filter_map(|r| r.channels[k]),
            );
            (c.name().to_string(), stats)
        })
        .collect();
    (rows.len(), counts, channels)
}

pub fn cmd_summarize(args: &SummarizeArgs) -> Result<PathBuf> {
    let path = if args.results.is_dir() {
        args.results.join(crate::ingest::RESULTS_FILE)
    } else {
        args.results.clone()
    };
    let rows = read_results(&path)?;
    let all: Vec<&ResultRow> = rows.iter().collect();
    let (receivers, status_counts, channels) = summarize_rows(&all);
    let region = match args.region.get() {
        Some((center, radius)) => {
            if !(radius > 0.0 && radius.is_finite()) {
                bail!("region radius must be positive and finite, got {radius}");
            }
            let inside: Vec<&ResultRow> = rows
                .iter()
                .filter(|r| {
                    r.position
                        .is_some_and(|p| (p.x - center.0).hypot(p.y - center.1) <= radius)
                })
                .collect();
            let (cells, counts, channels) = summarize_rows(&inside);
            let ok_cells = counts.get("ok").copied().unwrap_or(0);
            if ok_cells == 0 {
                log::warn!("region around {center:?} with radius {radius} m has no ok receivers");
            }
            Some(RegionSummary {
                center,
                radius_m: radius,
                cells,
                ok_cells,
                empty: ok_cells == 0,
                channels,
            })
        }
        None => None,
    };
    let summary = FileSummary {
        receivers,
        status_counts,
        channels,
        region,
    };
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    write_json(&args.out, &summary)?;
    Ok(args.out.clone())
}

pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    match &cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Compare(a) => cmd_compare(a, false),
        Command::Trajectory(a) => cmd_compare(a, true),
        Command::Consistency(a) => cmd_consistency(a),
        Command::Summarize(a) => cmd_summarize(a).map(|p| vec![p]),
    }
}

/// Binary entry point.
pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(files) => {
            for f in files {
                log::info!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_flag_parses() {
        let g = parse_grid("0,-10,3,2,2,2.5,1.5").unwrap();
        assert_eq!((g.nx, g.ny, g.origin_y, g.dy), (3, 2, -10.0, 2.5));
        assert!(parse_grid("0,0,0,2,1,1,1.5").is_err());
        assert!(parse_grid("0,0,2.5,2,1,1,1.5").is_err());
        assert!(parse_grid("0,0,2,2,1,1").is_err());
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.toml");
        fs::write(&p, "assignment_mode = \"delay-only\"\nweights = { tau = 2.0, p = 1.0, dod = 1.0, doa = 1.0 }\n").unwrap();
        let args = MetricArgs {
            config: Some(p),
            weights: Some("1,1,1,3".parse().unwrap()),
            ..Default::default()
        };
        let cfg = args.resolve().unwrap();
        assert_eq!(cfg.assignment_mode, AssignmentMode::DelayOnly);
        assert_eq!(cfg.weights.doa, 3.0);
        assert_eq!(cfg.weights.tau, 1.0);
    }

    #[test]
    fn assignment_mode_given_twice_is_rejected() {
        let r = Cli::try_parse_from([
            "rtcompare",
            "compare",
            "a",
            "b",
            "--out",
            "o",
            "--assignment-mode",
            "joint",
            "--assignment-mode",
            "delay-only",
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn region_flags_go_together() {
        let r = Cli::try_parse_from(["rtcompare", "compare", "a", "b", "--out", "o", "--region-radius", "5"]);
        assert!(r.is_err());
        let r = Cli::try_parse_from([
            "rtcompare",
            "compare",
            "a",
            "b",
            "--out",
            "o",
            "--region-center",
            "-3,4",
            "--region-radius",
            "5",
        ]);
        assert!(r.is_ok());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
