//! Randomized engine runs driven through session commands.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use room_elites::config::EngineConfig;
use room_elites::dimensions::{DimensionDescriptor, DimensionKind};
use room_elites::engine::{Engine, Population};
use room_elites::room::{Coord, Tile};
use room_elites::session::{SessionCommand, SessionCore, SessionEvent};
use room_elites::{targets, EvalContext};

pub fn config(seed: u64) -> EngineConfig {
    EngineConfig {
        pop_size: 100,
        rng_seed: seed,
        ..Default::default()
    }
}

/// A random command every few hundred generations: edits, locks, axes.
pub fn script(seed: u64, generations: u64) -> Vec<(u64, SessionCommand)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = targets::basic_room();
    let mut target = base.clone();
    let mut out = Vec::new();
    let mut g = 0;
    loop {
        g += rng.random_range(150..900);
        if g >= generations {
            return out;
        }
        let cmd = match rng.random_range(0..4) {
            0 => {
                let i = loop {
                    let i = rng.random_range(0..target.len());
                    if target.tiles()[i] != Tile::Door {
                        break i;
                    }
                };
                target = target
                    .clone()
                    .with_tile(target.coord_of(i), Tile::EDITABLE[rng.random_range(0..4)]);
                SessionCommand::SetTarget(target.clone())
            }
            1 => {
                let n = rng.random_range(0..6);
                let locks: Vec<Coord> = (0..n)
                    .map(|_| Coord::new(rng.random_range(0..13), rng.random_range(0..7)))
                    .filter(|&c| target.get(c) != Tile::Door)
                    .collect();
                target = target
                    .clone()
                    .with_locked(locks.iter().copied().collect())
                    .unwrap();
                SessionCommand::LockTiles(locks)
            }
            2 => {
                let mut kinds = DimensionKind::ALL.to_vec();
                let k = rng.random_range(2..=3);
                let mut dims = Vec::new();
                for _ in 0..k {
                    let kind = kinds.remove(rng.random_range(0..kinds.len()));
                    dims.push(DimensionDescriptor {
                        kind,
                        granularity: rng.random_range(2..=6),
                    });
                }
                SessionCommand::SetDimensions(dims)
            }
            _ => SessionCommand::Restart,
        };
        out.push((g, cmd));
    }
}

pub fn check_archive(engine: &Engine) {
    let target = engine.target();
    let ctx = EvalContext::new(target.clone(), engine.config().leniency_weights);
    let archive = engine.archive();
    for (idx, cell) in archive.cells().iter().enumerate() {
        let coords = archive.coords_of(idx);
        for p in Population::BOTH {
            for ind in cell.population(p) {
                let room = &ind.room;
                assert_eq!(room.doors(), target.doors(), "door set changed");
                assert!(
                    room.tiles()
                        .iter()
                        .enumerate()
                        .all(|(i, &t)| (t == Tile::Door)
                            == target.doors().contains(&room.coord_of(i)))
                );
                for &c in target.locked() {
                    assert_eq!(room.get(c), target.get(c), "locked tile {c:?} differs");
                }
                let fresh = ctx.evaluate(room).unwrap();
                assert_eq!(room.is_feasible(), p == Population::Feasible, "partition");
                assert_eq!(fresh.feasible, ind.eval.feasible);
                let bins: Vec<usize> = archive
                    .dims()
                    .iter()
                    .map(|d| d.bin(fresh.score(d.kind)))
                    .collect();
                assert_eq!(bins, coords, "cell coordinates");
                assert!((fresh.fitness.total - ind.fitness()).abs() < 1e-12);
            }
        }
    }
}

/// Runs `generations` generations under a random command script, checking
/// the archive at every broadcast and per-cell elite monotonicity between
/// them. Returns the number of broadcasts checked.
pub fn fuzz(seed: u64, generations: u64) -> usize {
    let commands = script(seed, generations);
    assert!(commands.len() >= (generations / 1000) as usize);
    let mut core = SessionCore::new(config(seed), targets::basic_room()).unwrap();
    let mut events = Vec::new();
    let mut next = 0;
    let mut elites: Vec<Option<f64>> = Vec::new();
    let mut checked = 0;
    for g in 0..generations {
        let mut reset = elites.is_empty();
        while next < commands.len() && commands[next].0 <= g {
            core.apply(commands[next].1.clone(), &mut events);
            reset = true;
            next += 1;
        }
        if reset {
            elites = vec![None; core.engine().archive().cell_count()];
        }
        let broadcast = core.advance(&mut events);
        let archive = core.engine().archive();
        if !broadcast
            || !events
                .iter()
                .any(|e| matches!(e, SessionEvent::TargetEcho(_)))
        {
            for (i, cell) in archive.cells().iter().enumerate() {
                let now = cell.elite().map(|e| e.fitness());
                if let Some(before) = elites[i] {
                    // stale re-evaluation at a broadcast may move elites after a target edit
                    assert!(
                        now.is_some_and(|n| n >= before),
                        "cell {i} elite fell at gen {g}"
                    );
                }
                elites[i] = now;
            }
        }
        if broadcast {
            check_archive(core.engine());
            checked += 1;
            // elites are re-scored against the new context once, then monotone again
            elites = archive
                .cells()
                .iter()
                .map(|c| c.elite().map(|e| e.fitness()))
                .collect();
            events.clear();
        }
    }
    assert_eq!(next, commands.len());
    checked
}
