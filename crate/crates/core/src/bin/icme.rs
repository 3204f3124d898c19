use std::net::TcpListener;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use room_elites::config::EngineConfig;
use room_elites::experiments::{self, PairRunOptions, SweepOptions};
use room_elites::session::{serve, SessionManager};

#[derive(Parser)]
#[command(
    name = "icme",
    version,
    about = "Constrained MAP-Elites for tile-grid dungeon rooms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// `basic`, `complex`, or a room file (text or JSON)
    #[arg(long, default_value = "basic")]
    target: String,
    #[arg(long)]
    generations: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Engine configuration (TOML); flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    granularity: Option<usize>,
    #[arg(long)]
    pop_size: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

impl Common {
    fn engine_config(&self) -> Result<EngineConfig> {
        let mut c = match &self.config {
            Some(p) => EngineConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
            None => EngineConfig::default(),
        };
        if let Some(s) = self.seed {
            c.rng_seed = s;
        }
        if let Some(g) = self.granularity {
            c.granularity = g;
        }
        if let Some(p) = self.pop_size {
            c.pop_size = p;
        }
        Ok(c)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one dimension pair and write its log, elites and analytics
    PairRun {
        /// Two comma-separated dimension names, e.g. `nsp,symmetry`
        #[arg(long)]
        dims: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run every pair, the all-dimensions archive and the objective baseline
    Sweep {
        /// Restrict to these pairs (`a,b` each); all 21 by default
        #[arg(long = "pair")]
        pairs: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Start the live session service on localhost
    Serve {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 7878)]
        port: u16,
    },
    /// Recompute analytics from stored logs without re-running evolution
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::PairRun { dims, common } => {
            let dims = experiments::parse_pair(&dims)?;
            let report = experiments::pair_run(&PairRunOptions {
                dims,
                target_source: common.target.clone(),
                generations: common.generations.unwrap_or(2100),
                config: common.engine_config()?,
                out: common.out.clone(),
            })?;
            let b = &report.elites;
            println!(
                "generation {}: {} occupied feasible cells, mean elite fitness {:.3}, max {:.3}, {} unique rooms, pair coverage {:.1}%",
                b.generation,
                b.occupied_feasible(),
                b.mean_elite_fitness().unwrap_or(0.0),
                b.max_elite_fitness().unwrap_or(0.0),
                report.unique,
                report.coverage.pair_coverage.unwrap_or(0.0),
            );
        }
        Command::Sweep { pairs, common } => {
            let pairs = if pairs.is_empty() {
                None
            } else {
                Some(
                    pairs
                        .iter()
                        .map(|p| experiments::parse_pair(p))
                        .collect::<Result<Vec<_>, _>>()?,
                )
            };
            let report = experiments::sweep(&SweepOptions {
                target_source: common.target.clone(),
                generations: common.generations.unwrap_or(5000),
                config: common.engine_config()?,
                pairs,
                out: common.out.clone(),
            })?;
            println!(
                "{:<28} {:>8} {:>8} {:>8}",
                "run", "fitness", "all-dim", "pair"
            );
            for r in &report.rows {
                println!(
                    "{:<28} {:>8.3} {:>7.1}% {:>7}",
                    r.label,
                    r.avg_fitness.unwrap_or(f64::NAN),
                    r.all_dim_coverage,
                    r.pair_coverage
                        .map_or("-".to_string(), |p| format!("{p:.1}%")),
                );
            }
            if let Some(all) = report.runs.iter().find(|r| r.label == "all-dims") {
                println!("all-dims archive: {} cells", all.cells.unwrap_or(0));
            }
        }
        Command::Serve { config, port } => {
            let defaults = match config {
                Some(p) => {
                    EngineConfig::load(&p).with_context(|| format!("loading {}", p.display()))?
                }
                None => EngineConfig::default(),
            };
            defaults.validate()?;
            let listener = TcpListener::bind(("127.0.0.1", port))
                .with_context(|| format!("binding port {port}"))?;
            eprintln!("listening on {}", listener.local_addr()?);
            serve(Arc::new(SessionManager::new()), listener, defaults)?;
        }
        Command::Analyze { input, out } => {
            let rows = experiments::analyze(&input, &out)?;
            println!("re-analysed {} run(s) into {}", rows.len(), out.display());
        }
    }
    Ok(())
}
