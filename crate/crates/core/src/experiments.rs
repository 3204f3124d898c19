//! Batch experiment drivers: single pair runs, the full pair sweep with its
//! summary table, and offline re-analysis of stored logs.
//!
//! Every output directory carries a `manifest.json` with the configuration,
//! seed, target and crate version; rerunning with the same manifest
//! reproduces every CSV, JSON and SVG byte for byte.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baseline::run_objective_baseline;
use crate::config::{ConfigError, EngineConfig};
use crate::dimensions::{DimensionKind, DimensionScores};
use crate::engine::{EliteBroadcast, Engine, EngineError};
use crate::era::{
    coverage, fitness_by_dimension, fitness_over_time, hexbin, over_time_svg, pair_coverage,
    write_over_time_csv, CoverageStats, EraDataset, EraError,
};
use crate::eval::EvalContext;
use crate::room::{ParseError, Room};
use crate::svg::Svg;
use crate::targets;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{0}")]
    Usage(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Era(#[from] EraError),
    #[error("bad room file {path}: {source}")]
    Room { path: PathBuf, source: ParseError },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), ExperimentError> {
    fs::write(path, contents).map_err(io_err(path))
}

fn create_dir(path: &Path) -> Result<(), ExperimentError> {
    fs::create_dir_all(path).map_err(io_err(path))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ExperimentError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(path, text)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, ExperimentError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(serde_json::from_str(&text)?)
}

/// Resolves `basic`, `complex`, or a room file in text or JSON form.
pub fn load_target(spec: &str) -> Result<Room, ExperimentError> {
    if let Some(room) = targets::by_name(spec) {
        return Ok(room);
    }
    let path = Path::new(spec);
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    if text.trim_start().starts_with('{') {
        return Ok(serde_json::from_str(&text)?);
    }
    Room::from_text(&text).map_err(|source| ExperimentError::Room {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses `a,b` into two distinct dimension kinds.
pub fn parse_pair(text: &str) -> Result<(DimensionKind, DimensionKind), ExperimentError> {
    let parts: Vec<&str> = text.split(',').collect();
    let [a, b] = parts.as_slice() else {
        return Err(ExperimentError::Usage(format!(
            "expected two comma-separated dimensions, got `{text}`"
        )));
    };
    let a: DimensionKind = a
        .parse()
        .map_err(|e| ExperimentError::Usage(format!("{e}")))?;
    let b: DimensionKind = b
        .parse()
        .map_err(|e| ExperimentError::Usage(format!("{e}")))?;
    if a == b {
        return Err(ExperimentError::Usage(format!("dimension {a} given twice")));
    }
    Ok((a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunKind {
    Pair,
    AllDims,
    Baseline,
}

/// Description of one run inside an output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub label: String,
    pub kind: RunKind,
    /// Archive axes; empty for the baseline.
    pub dims: Vec<DimensionKind>,
    pub granularity: usize,
    pub generations: u64,
    pub seed: u64,
    /// Archive cells, absent for the baseline.
    pub cells: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub target_source: String,
    pub target: Room,
    pub generations: u64,
    pub config: EngineConfig,
    pub runs: Vec<RunInfo>,
}

impl Manifest {
    pub fn new(
        command: &str,
        target_source: &str,
        target: &Room,
        generations: u64,
        config: &EngineConfig,
    ) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            target_source: target_source.to_string(),
            target: target.clone(),
            generations,
            config: config.clone(),
            runs: Vec::new(),
        }
    }
}

/// Result of one run before anything is written.
pub struct RunResult {
    pub info: RunInfo,
    pub dataset: EraDataset,
    pub elites: Option<EliteBroadcast>,
    pub seconds: f64,
}

/// Runs the engine for `generations` generations with expressive-range
/// logging and returns the log plus the final archive snapshot.
pub fn run_engine(
    config: &EngineConfig,
    target: &Room,
    generations: u64,
) -> Result<(EraDataset, EliteBroadcast), ExperimentError> {
    let mut engine = Engine::with_era_log(config.clone(), target.clone())?;
    while engine.generation() < generations {
        engine.advance();
    }
    let snapshot = engine.snapshot();
    let log = engine.take_era_log().expect("engine built with a log");
    Ok((log.into_dataset(), snapshot))
}

fn label_of(kind: RunKind, dims: &[DimensionKind]) -> String {
    match kind {
        RunKind::Pair => format!("{}-{}", dims[0], dims[1]),
        RunKind::AllDims => "all-dims".into(),
        RunKind::Baseline => "baseline".into(),
    }
}

/// Executes one run of the given kind. `dims` is ignored for all-dims and
/// baseline runs.
pub fn execute(
    kind: RunKind,
    dims: &[DimensionKind],
    base: &EngineConfig,
    target: &Room,
    generations: u64,
) -> Result<RunResult, ExperimentError> {
    let started = Instant::now();
    let mut config = base.clone();
    config.dims = match kind {
        RunKind::Pair => dims.to_vec(),
        RunKind::AllDims => DimensionKind::ALL.to_vec(),
        RunKind::Baseline => base.dims.clone(),
    };
    let (dataset, elites, cells) = match kind {
        RunKind::Baseline => {
            let run = run_objective_baseline(&config, target.clone(), generations)?;
            (run.era.into_dataset(), None, None)
        }
        _ => {
            let (dataset, elites) = run_engine(&config, target, generations)?;
            let cells = config.granularity.pow(config.dims.len() as u32);
            (dataset, Some(elites), Some(cells))
        }
    };
    let info = RunInfo {
        label: label_of(kind, &config.dims),
        kind,
        dims: if kind == RunKind::Baseline {
            Vec::new()
        } else {
            config.dims.clone()
        },
        granularity: config.granularity,
        generations,
        seed: config.rng_seed,
        cells,
    };
    Ok(RunResult {
        info,
        dataset,
        elites,
        seconds: started.elapsed().as_secs_f64(),
    })
}

/// Grid of elite rooms with fitness badges; only for two-axis archives.
pub fn elites_svg(b: &EliteBroadcast) -> Option<String> {
    let [dx, dy] = b.dims.as_slice() else {
        return None;
    };
    let tile = 8.0;
    let (rw, rh) = b
        .cells
        .iter()
        .find_map(|c| c.elite.as_ref())
        .map_or((13.0 * tile, 7.0 * tile), |r| {
            (r.cols() as f64 * tile, r.rows() as f64 * tile)
        });
    let (cw, ch, pad) = (rw + 12.0, rh + 24.0, 60.0);
    let (gx, gy) = (dx.granularity, dy.granularity);
    let mut svg = Svg::new(pad + gx as f64 * cw + 10.0, pad + gy as f64 * ch + 30.0);
    for y in 0..gy {
        let top = pad + (gy - 1 - y) as f64 * ch;
        svg.text(
            4.0,
            top + ch / 2.0,
            11.0,
            &format!(
                "{:.1}-{:.1}",
                y as f64 / gy as f64,
                (y + 1) as f64 / gy as f64
            ),
        );
        for x in 0..gx {
            let left = pad + x as f64 * cw;
            svg.outline(left, top, cw - 4.0, ch - 4.0, "#999999");
            match b.cells.iter().find(|c| c.coords == [x, y]) {
                Some(c) if c.elite.is_some() => {
                    let room = c.elite.as_ref().expect("checked");
                    svg.room(room, left + 4.0, top + 18.0, tile);
                    svg.text(
                        left + 4.0,
                        top + 13.0,
                        11.0,
                        &format!("{:.3}", c.elite_fitness.unwrap_or(0.0)),
                    );
                }
                _ => {
                    svg.text(left + 4.0, top + ch / 2.0, 10.0, "no feasible elite");
                }
            }
        }
    }
    for x in 0..gx {
        let left = pad + x as f64 * cw;
        svg.text(
            left + 4.0,
            pad + gy as f64 * ch + 12.0,
            11.0,
            &format!(
                "{:.1}-{:.1}",
                x as f64 / gx as f64,
                (x + 1) as f64 / gx as f64
            ),
        );
    }
    svg.text(pad, pad + gy as f64 * ch + 28.0, 13.0, dx.kind.name());
    svg.text(4.0, 20.0, 13.0, dy.kind.name());
    svg.text(pad, 20.0, 13.0, &format!("generation {}", b.generation));
    Some(svg.finish())
}

/// Axes used for the density plot of a run.
fn plot_axes(info: &RunInfo) -> (DimensionKind, DimensionKind) {
    match info.kind {
        RunKind::Pair => (info.dims[0], info.dims[1]),
        _ => (DimensionKind::Linearity, DimensionKind::Leniency),
    }
}

fn target_scores(target: &Room, config: &EngineConfig) -> Result<DimensionScores, ExperimentError> {
    let ctx = EvalContext::new(target.clone(), config.leniency_weights);
    Ok(ctx.evaluate(target).map_err(EngineError::from)?.scores)
}

/// Writes every analytics export of one dataset into `dir`: coverage, the
/// density plot, per-dimension fitness scatters and fitness over time.
pub fn analyze_dataset(
    dataset: &EraDataset,
    info: &RunInfo,
    target: &DimensionScores,
    dir: &Path,
) -> Result<CoverageStats, ExperimentError> {
    create_dir(dir)?;
    let pair = (info.kind == RunKind::Pair).then(|| (info.dims[0], info.dims[1]));
    let stats = coverage(dataset, pair, info.granularity);
    write_json(&dir.join("coverage.json"), &stats)?;

    let (x, y) = plot_axes(info);
    let grid = hexbin(dataset, x, y);
    let stem = format!("hexbin_{x}_{y}");
    let mut buf = Vec::new();
    grid.write_csv(&mut buf)?;
    write(&dir.join(format!("{stem}.csv")), buf)?;
    write(
        &dir.join(format!("{stem}.svg")),
        grid.to_svg(Some((target[x.index()], target[y.index()]))),
    )?;

    for d in fitness_by_dimension(dataset) {
        let mut buf = Vec::new();
        d.write_csv(&mut buf)?;
        write(&dir.join(format!("fitness_vs_{}.csv", d.kind)), buf)?;
        write(&dir.join(format!("fitness_vs_{}.svg", d.kind)), d.to_svg())?;
    }
    let correlations: Vec<(DimensionKind, f64)> = fitness_by_dimension(dataset)
        .iter()
        .map(|d| (d.kind, d.r))
        .collect();
    write_json(&dir.join("correlations.json"), &correlations)?;

    let over = fitness_over_time(dataset);
    let mut buf = Vec::new();
    write_over_time_csv(&over, &mut buf)?;
    write(&dir.join("fitness_over_time.csv"), buf)?;
    write(&dir.join("fitness_over_time.svg"), over_time_svg(&over))?;
    Ok(stats)
}

/// Writes a run's log, elites and analytics under `dir`.
fn store_run(
    run: &RunResult,
    target: &DimensionScores,
    dir: &Path,
) -> Result<CoverageStats, ExperimentError> {
    create_dir(dir)?;
    run.dataset.save(&dir.join("era.csv"))?;
    write_json(&dir.join("run.json"), &run.info)?;
    if let Some(b) = &run.elites {
        if b.dims.len() == 2 {
            write_json(&dir.join("elites.json"), b)?;
        }
        if let Some(svg) = elites_svg(b) {
            write(&dir.join("elites.svg"), svg)?;
        }
    }
    analyze_dataset(&run.dataset, &run.info, target, dir)
}

pub struct PairRunOptions {
    pub dims: (DimensionKind, DimensionKind),
    pub target_source: String,
    pub generations: u64,
    pub config: EngineConfig,
    pub out: PathBuf,
}

pub struct PairRunReport {
    pub elites: EliteBroadcast,
    pub coverage: CoverageStats,
    pub unique: usize,
}

pub fn pair_run(opts: &PairRunOptions) -> Result<PairRunReport, ExperimentError> {
    let target = load_target(&opts.target_source)?;
    opts.config.validate()?;
    let run = execute(
        RunKind::Pair,
        &[opts.dims.0, opts.dims.1],
        &opts.config,
        &target,
        opts.generations,
    )?;
    let mut manifest = Manifest::new(
        "pair-run",
        &opts.target_source,
        &target,
        opts.generations,
        &opts.config,
    );
    manifest.config.dims = run.info.dims.clone();
    manifest.runs.push(run.info.clone());
    create_dir(&opts.out)?;
    write_json(&opts.out.join("manifest.json"), &manifest)?;
    let coverage = store_run(&run, &target_scores(&target, &opts.config)?, &opts.out)?;
    Ok(PairRunReport {
        elites: run.elites.expect("engine run"),
        coverage,
        unique: run.dataset.len(),
    })
}

/// One row of the sweep summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub label: String,
    pub kind: RunKind,
    /// Mean fitness of feasible uniques.
    pub avg_fitness: Option<f64>,
    /// Mean coverage over the 21 pair projections, percent.
    pub all_dim_coverage: f64,
    /// Mean coverage over the 7 single axes, percent.
    pub single_dim_coverage: f64,
    /// Coverage of the run's own pair; for the baseline, the mean of its
    /// projections onto the swept pairs.
    pub pair_coverage: Option<f64>,
    pub feasible_uniques: usize,
    pub uniques: usize,
}

fn row_of(
    info: &RunInfo,
    dataset: &EraDataset,
    stats: &CoverageStats,
    pairs: &[(DimensionKind, DimensionKind)],
) -> TableRow {
    let pair_cov = match info.kind {
        RunKind::Pair => stats.pair_coverage,
        RunKind::AllDims => None,
        RunKind::Baseline => {
            let v: Vec<f64> = pairs
                .iter()
                .map(|&(a, b)| pair_coverage(dataset.feasible(), a, b, info.granularity))
                .collect();
            (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
        }
    };
    TableRow {
        label: info.label.clone(),
        kind: info.kind,
        avg_fitness: stats.avg_fitness,
        all_dim_coverage: stats.all_dim_coverage,
        single_dim_coverage: stats.single_dim_coverage,
        pair_coverage: pair_cov,
        feasible_uniques: stats.feasible_uniques,
        uniques: dataset.len(),
    }
}

pub fn write_table<W: std::io::Write>(rows: &[TableRow], writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_table(path: &Path) -> Result<Vec<TableRow>, ExperimentError> {
    let mut rd = csv::Reader::from_path(path)?;
    Ok(rd.deserialize().collect::<Result<_, _>>()?)
}

/// Per-pair projection of a baseline dataset, for the coverage comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub pair: String,
    pub coverage: f64,
}

pub struct SweepOptions {
    pub target_source: String,
    pub generations: u64,
    pub config: EngineConfig,
    /// Pairs to run; all 21 when `None`.
    pub pairs: Option<Vec<(DimensionKind, DimensionKind)>>,
    pub out: PathBuf,
}

pub struct SweepReport {
    pub rows: Vec<TableRow>,
    pub runs: Vec<RunInfo>,
}

/// Pair runs, the all-dimensions run and the objective baseline, run in
/// parallel and summarised in `table_i.csv`.
pub fn sweep(opts: &SweepOptions) -> Result<SweepReport, ExperimentError> {
    let target = load_target(&opts.target_source)?;
    opts.config.validate()?;
    let pairs = opts.pairs.clone().unwrap_or_else(DimensionKind::pairs);
    let mut jobs: Vec<(RunKind, Vec<DimensionKind>)> = pairs
        .iter()
        .map(|&(a, b)| (RunKind::Pair, vec![a, b]))
        .collect();
    jobs.push((RunKind::AllDims, Vec::new()));
    jobs.push((RunKind::Baseline, Vec::new()));

    let results: Vec<RunResult> = jobs
        .par_iter()
        .map(|(kind, dims)| execute(*kind, dims, &opts.config, &target, opts.generations))
        .collect::<Result<_, _>>()?;

    create_dir(&opts.out)?;
    let scores = target_scores(&target, &opts.config)?;
    let mut manifest = Manifest::new(
        "sweep",
        &opts.target_source,
        &target,
        opts.generations,
        &opts.config,
    );
    let mut rows = Vec::new();
    let mut timings = Vec::new();
    for run in &results {
        let stats = store_run(run, &scores, &opts.out.join(&run.info.label))?;
        rows.push(row_of(&run.info, &run.dataset, &stats, &pairs));
        manifest.runs.push(run.info.clone());
        timings.push((run.info.label.clone(), run.seconds));
    }
    finish_sweep(
        &opts.out,
        &results
            .iter()
            .map(|r| (&r.info, &r.dataset))
            .collect::<Vec<_>>(),
        &scores,
        &pairs,
    )?;
    let mut buf = Vec::new();
    write_table(&rows, &mut buf)?;
    write(&opts.out.join("table_i.csv"), buf)?;
    write_json(&opts.out.join("manifest.json"), &manifest)?;
    // wall-clock figures live apart from the reproducible outputs
    write_json(&opts.out.join("timings.json"), &timings)?;
    Ok(SweepReport {
        rows,
        runs: manifest.runs,
    })
}

/// Sweep-level exports: baseline projections and the pooled pair-run
/// analytics.
fn finish_sweep(
    out: &Path,
    runs: &[(&RunInfo, &EraDataset)],
    target: &DimensionScores,
    pairs: &[(DimensionKind, DimensionKind)],
) -> Result<(), ExperimentError> {
    if let Some((info, baseline)) = runs.iter().find(|(i, _)| i.kind == RunKind::Baseline) {
        let proj: Vec<Projection> = pairs
            .iter()
            .map(|&(a, b)| Projection {
                pair: format!("{a}-{b}"),
                coverage: pair_coverage(baseline.feasible(), a, b, info.granularity),
            })
            .collect();
        let mut w = csv::Writer::from_writer(Vec::new());
        for p in &proj {
            w.serialize(p)?;
        }
        let path = out.join("baseline_projections.csv");
        let bytes = w.into_inner().map_err(|e| ExperimentError::Io {
            path: path.clone(),
            source: e.into_error(),
        })?;
        write(&path, bytes)?;
    }
    let pooled: Vec<_> = runs
        .iter()
        .filter(|(i, _)| i.kind == RunKind::Pair)
        .flat_map(|(_, d)| d.records().iter().copied())
        .collect();
    if let Some((info, _)) = runs.iter().find(|(i, _)| i.kind == RunKind::Pair) {
        let dataset = EraDataset::ingest(pooled)?;
        let pooled_info = RunInfo {
            label: "pairs-pooled".into(),
            kind: RunKind::AllDims,
            dims: Vec::new(),
            cells: None,
            ..(*info).clone()
        };
        analyze_dataset(&dataset, &pooled_info, target, &out.join("pairs-pooled"))?;
    }
    Ok(())
}

/// Rebuilds every analytics export from stored `era.csv` logs. `input` is
/// either one run directory or a sweep directory of runs.
pub fn analyze(input: &Path, out: &Path) -> Result<Vec<TableRow>, ExperimentError> {
    let manifest: Manifest = read_json(&input.join("manifest.json"))?;
    let scores = target_scores(&manifest.target, &manifest.config)?;
    let single = input.join("era.csv").exists();
    let mut loaded = Vec::new();
    for info in &manifest.runs {
        let dir = if single {
            input.to_path_buf()
        } else {
            input.join(&info.label)
        };
        loaded.push((info.clone(), EraDataset::load(&dir.join("era.csv"))?));
    }
    let pairs: Vec<_> = loaded
        .iter()
        .filter(|(i, _)| i.kind == RunKind::Pair)
        .map(|(i, _)| (i.dims[0], i.dims[1]))
        .collect();
    create_dir(out)?;
    let mut rows = Vec::new();
    for (info, dataset) in &loaded {
        let dir = if single {
            out.to_path_buf()
        } else {
            out.join(&info.label)
        };
        let stats = analyze_dataset(dataset, info, &scores, &dir)?;
        rows.push(row_of(info, dataset, &stats, &pairs));
    }
    if !single {
        finish_sweep(
            out,
            &loaded.iter().map(|(i, d)| (i, d)).collect::<Vec<_>>(),
            &scores,
            &pairs,
        )?;
        let mut buf = Vec::new();
        write_table(&rows, &mut buf)?;
        write(&out.join("table_i.csv"), buf)?;
    }
    Ok(rows)
}
