//! Long randomized engine runs with the invariants checked throughout.

mod common;

use std::collections::BTreeSet;

use common::fuzz::{config, fuzz, script};
use room_elites::config::EngineConfig;
use room_elites::dimensions::DimensionKind;
use room_elites::engine::Engine;
use room_elites::room::{Coord, Room};
use room_elites::session::{replay, SessionEvent};
use room_elites::targets;

#[test]
fn randomized_edits_keep_invariants() {
    assert!(fuzz(78, 3_000) >= 25);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let commands = script(5, 3_000);
    let a = replay(config(5), targets::basic_room(), &commands, 3_000).unwrap();
    let b = replay(config(5), targets::basic_room(), &commands, 3_000).unwrap();
    assert_eq!(
        serde_json::to_vec(&a).unwrap(),
        serde_json::to_vec(&b).unwrap()
    );
    assert!(
        a.iter()
            .filter(|e| matches!(e, SessionEvent::ElitesUpdated(_)))
            .count()
            >= 29
    );
    let c = replay(config(6), targets::basic_room(), &commands, 3_000).unwrap();
    assert_ne!(
        serde_json::to_vec(&a).unwrap(),
        serde_json::to_vec(&c).unwrap()
    );
}

#[test]
fn all_dimension_archive_has_78125_cells() {
    let cfg = EngineConfig {
        dims: DimensionKind::ALL.to_vec(),
        pop_size: 50,
        ..Default::default()
    };
    let e = Engine::new(cfg, targets::basic_room()).unwrap();
    assert_eq!(e.archive().cell_count(), 78_125);
}

#[test]
fn offspring_never_touch_doors_or_locks() {
    let locks: BTreeSet<Coord> = [
        Coord::new(1, 1),
        Coord::new(2, 1),
        Coord::new(6, 2),
        Coord::new(11, 5),
    ]
    .into();
    let target: Room = targets::complex_room().with_locked(locks.clone()).unwrap();
    let mut e = Engine::new(config(3), target.clone()).unwrap();
    for _ in 0..5 {
        e.run_cycle();
        for ind in e.archive().individuals() {
            assert_eq!(ind.room.doors(), target.doors());
            for &c in &locks {
                assert_eq!(ind.room.get(c), target.get(c));
            }
        }
    }
}
