use room_elites::baseline::run_objective_baseline;
use room_elites::config::EngineConfig;
use room_elites::targets;

fn main() {
    let run = run_objective_baseline(&EngineConfig::default(), targets::basic_room(), 300).unwrap();
    for g in run.log.iter().filter(|g| g.novel > 0) {
        println!(
            "gen {:>3}: {:>3} new survivors, best {:.3}",
            g.generation,
            g.novel,
            g.best_feasible.unwrap_or(0.0)
        );
    }
    let best = run.best().unwrap();
    println!(
        "{} unique rooms; best fitness {:.3}\n{}",
        run.era.len(),
        best.fitness(),
        best.room
    );
}
