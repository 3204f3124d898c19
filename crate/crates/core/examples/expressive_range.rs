//! Runs a short pair experiment and prints its expressive-range summary;
//! the SVG plots are written to the directory given as first argument.

use std::path::PathBuf;

use room_elites::config::EngineConfig;
use room_elites::era::{coverage, fitness_by_dimension, hexbin};
use room_elites::experiments::run_engine;
use room_elites::{targets, DimensionKind::*};

fn main() {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "era-out".into()));
    std::fs::create_dir_all(&out).unwrap();
    let config = EngineConfig {
        dims: vec![Symmetry, Similarity],
        ..Default::default()
    };
    let (dataset, _) = run_engine(&config, &targets::basic_room(), 500).unwrap();

    let c = coverage(&dataset, Some((Symmetry, Similarity)), 5);
    println!("{} uniques, {} feasible", dataset.len(), c.feasible_uniques);
    println!(
        "pair coverage {:.1}%, all-pair mean {:.1}%, fitness {:.3}",
        c.pair_coverage.unwrap(),
        c.all_dim_coverage,
        c.avg_fitness.unwrap()
    );
    for d in fitness_by_dimension(&dataset) {
        println!("r({}, fitness) = {:+.3}", d.kind, d.r);
    }
    for (bucket, n) in dataset.novel_per_bucket() {
        println!("bucket {bucket:>4}: {n} new");
    }
    let grid = hexbin(&dataset, Symmetry, Similarity);
    std::fs::write(out.join("symmetry_similarity.svg"), grid.to_svg(None)).unwrap();
    println!("wrote {}", out.join("symmetry_similarity.svg").display());
}
