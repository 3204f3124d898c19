use room_elites::room::{dungeon_reachability, DoorLink, DungeonStub, Room};

fn main() {
    let a = Room::from_text("5 3\nfffff\ndfffd\nfffff\n").unwrap();
    let b = Room::from_text("5 3\nfffff\ndfwfd\nfffff\n").unwrap();
    // the middle room is split by a wall column, so its right door is cut off
    let c = Room::from_text("5 3\nffwff\ndfwfd\nffwff\n").unwrap();
    let d = Room::from_text("5 3\nfffff\ndfffd\nfffff\n").unwrap();
    let link = |room_a, door_a, room_b, door_b| DoorLink {
        room_a,
        door_a,
        room_b,
        door_b,
    };
    let dungeon = DungeonStub::new(
        vec![a, b, c, d],
        vec![link(0, 1, 1, 0), link(1, 1, 2, 0), link(2, 1, 3, 0)],
        0,
    )
    .unwrap();
    println!(
        "cut off from the entrance: {:?}",
        dungeon_reachability(&dungeon)
    );
    assert_eq!(dungeon_reachability(&dungeon), dungeon.unreachable_rooms());
}
