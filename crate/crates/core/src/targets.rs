//! Bundled 13x7 target rooms used as experiment defaults.

use crate::room::Room;

/// Open layout: four wall pillars, a guarded treasure in the middle.
pub const BASIC_ROOM: &str = "\
13 7
ffffffdffffff
fwwfffffffwwf
fwffffeffffwf
dffffftfffffd
fwffffeffffwf
fwwfffffffwwf
fffffffffffff
";

/// Two wall columns split the room into side pockets around a central hall.
pub const COMPLEX_ROOM: &str = "\
13 7
fffwffdffwfff
ftfwfffffwfef
fffwwwfwwwfff
dffeffffffefd
fffwwwfwwwfff
fefwfffffwftf
fffwfffffwfff
";

pub fn basic_room() -> Room {
    Room::from_text(BASIC_ROOM).expect("bundled basic room is valid")
}

pub fn complex_room() -> Room {
    Room::from_text(COMPLEX_ROOM).expect("bundled complex room is valid")
}

/// Looks up a bundled room by name (`basic` or `complex`).
pub fn by_name(name: &str) -> Option<Room> {
    match name {
        "basic" => Some(basic_room()),
        "complex" => Some(complex_room()),
        _ => None,
    }
}
