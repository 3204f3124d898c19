//! A short nsp × symmetry run, printing the elite grid every few broadcasts.
//!
//! `cargo run --release --example pair_run -- 1000`

use room_elites::config::EngineConfig;
use room_elites::{targets, DimensionKind, Engine};

fn main() {
    let generations: u64 = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(500);
    let config = EngineConfig {
        dims: vec![DimensionKind::Nsp, DimensionKind::Symmetry],
        rng_seed: 3,
        ..Default::default()
    };
    let mut engine = Engine::new(config, targets::basic_room()).unwrap();
    while engine.generation() < generations {
        if let Some(b) = engine.advance() {
            println!(
                "gen {:>5}: {:>2} feasible cells, mean {:.3}, max {:.3}, {} stored",
                b.generation,
                b.occupied_feasible(),
                b.mean_elite_fitness().unwrap_or(0.0),
                b.max_elite_fitness().unwrap_or(0.0),
                engine.archive().len(),
            );
        }
    }
    let b = engine.snapshot();
    let (coords, room, fitness) = b.elites().max_by(|x, y| x.2.total_cmp(&y.2)).unwrap();
    println!("\nbest elite at {coords:?}, fitness {fitness:.3}:\n{room}");
}
