#![allow(dead_code)]

pub mod fuzz;
pub mod oracle;

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use room_elites::room::{Coord, Room, Tile};

/// Random room with 1-4 border doors and the given wall share.
pub fn random_room(rng: &mut ChaCha8Rng, cols: usize, rows: usize, wall: f64) -> Room {
    let mut tiles: Vec<Tile> = (0..cols * rows)
        .map(|_| {
            let r: f64 = rng.random();
            if r < wall {
                Tile::Wall
            } else if r < wall + 0.1 {
                Tile::Enemy
            } else if r < wall + 0.18 {
                Tile::Treasure
            } else {
                Tile::Floor
            }
        })
        .collect();
    let border: Vec<Coord> = (0..rows)
        .flat_map(|y| (0..cols).map(move |x| Coord::new(x, y)))
        .filter(|c| c.x == 0 || c.y == 0 || c.x == cols - 1 || c.y == rows - 1)
        .collect();
    let n = rng.random_range(1..=4);
    let mut doors = BTreeSet::new();
    while doors.len() < n {
        doors.insert(border[rng.random_range(0..border.len())]);
    }
    for d in &doors {
        tiles[d.y * cols + d.x] = Tile::Door;
    }
    Room::new(
        cols,
        rows,
        tiles,
        doors.into_iter().collect(),
        BTreeSet::new(),
    )
    .unwrap()
}

pub fn rooms(seed: u64, n: usize) -> Vec<Room> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| random_room(&mut rng, 13, 7, [0.1, 0.3, 0.5][i % 3]))
        .collect()
}
