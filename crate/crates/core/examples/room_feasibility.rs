//! Parse a room, check feasibility, then break it with a wall ring.

use room_elites::room::{Coord, Room, Tile};
use room_elites::targets;

fn main() {
    let room = targets::basic_room();
    println!("{room}");
    println!("feasible: {}", room.is_feasible());

    // seal the treasure at (11, 1) behind walls
    let mut sealed = room.clone();
    for c in [
        Coord::new(10, 1),
        Coord::new(12, 1),
        Coord::new(11, 0),
        Coord::new(11, 2),
    ] {
        if sealed.get(c) != Tile::Door {
            sealed = sealed.with_tile(c, Tile::Wall);
        }
    }
    let sealed = sealed.with_tile(Coord::new(11, 1), Tile::Treasure);
    println!("{sealed}");
    println!("feasible after sealing: {}", sealed.is_feasible());

    let json = serde_json::to_string(&room).unwrap();
    let back: Room = serde_json::from_str(&json).unwrap();
    assert_eq!(back, room);
    println!("json: {json}");
}
