//! Tile-grid rooms, the minimal dungeon graph used for door placement, and
//! the text/JSON room formats.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MIN_SIDE: usize = 3;
pub const MAX_SIDE: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Tile {
    Floor,
    Wall,
    Treasure,
    Enemy,
    Door,
}

impl Tile {
    /// Kinds that mutation may write. Doors are never created or destroyed.
    pub const EDITABLE: [Tile; 4] = [Tile::Floor, Tile::Wall, Tile::Treasure, Tile::Enemy];

    pub fn is_passable(self) -> bool {
        self != Tile::Wall
    }

    pub fn to_char(self) -> char {
        match self {
            Tile::Floor => 'f',
            Tile::Wall => 'w',
            Tile::Treasure => 't',
            Tile::Enemy => 'e',
            Tile::Door => 'd',
        }
    }

    pub fn from_char(c: char) -> Option<Tile> {
        Some(match c {
            'f' => Tile::Floor,
            'w' => Tile::Wall,
            't' => Tile::Treasure,
            'e' => Tile::Enemy,
            'd' => Tile::Door,
            _ => return None,
        })
    }
}

/// Grid position, `x` is the column and `y` the row. Serialized as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct Coord {
    pub x: usize,
    pub y: usize,
}

impl Coord {
    pub const fn new(x: usize, y: usize) -> Self {
        Coord { x, y }
    }
}

impl From<[usize; 2]> for Coord {
    fn from([x, y]: [usize; 2]) -> Self {
        Coord { x, y }
    }
}

impl From<Coord> for [usize; 2] {
    fn from(c: Coord) -> Self {
        [c.x, c.y]
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RoomError {
    #[error("room size {cols}x{rows} outside {MIN_SIDE}..={MAX_SIDE}")]
    BadSize { cols: usize, rows: usize },
    #[error("expected {expected} tiles, got {actual}")]
    TileCount { expected: usize, actual: usize },
    #[error("room has no doors")]
    NoDoors,
    #[error("door at {0} is not on the border")]
    DoorOffBorder(Coord),
    #[error("door at {0} is not a door tile")]
    DoorTileMissing(Coord),
    #[error("door tile at {0} is not listed as a door")]
    StrayDoorTile(Coord),
    #[error("coordinate {0} is outside the room")]
    OutOfBounds(Coord),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("missing or malformed header, expected `cols rows`")]
    Header,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("illegal tile {ch:?} at line {line}, column {column}")]
    IllegalTile {
        ch: char,
        line: usize,
        column: usize,
    },
    #[error("door at {0} is off the border")]
    DoorOffBorder(Coord),
    #[error("malformed lock line {line}: {text:?}")]
    LockLine { line: usize, text: String },
    #[error(transparent)]
    Invalid(#[from] RoomError),
}

/// A rectangular room. Genotype and phenotype are the same grid.
///
/// Doors and locked tiles are shared between all copies of a room, so cloning
/// an individual only copies the tile array.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Room {
    cols: usize,
    rows: usize,
    tiles: Vec<Tile>,
    doors: Arc<[Coord]>,
    locked: Arc<BTreeSet<Coord>>,
}

impl Room {
    /// Doors are stored in row-major order whatever order they are given in.
    pub fn new(
        cols: usize,
        rows: usize,
        tiles: Vec<Tile>,
        doors: Vec<Coord>,
        locked: BTreeSet<Coord>,
    ) -> Result<Room, RoomError> {
        // row-major door order, the order a text grid lists them in
        let mut doors = doors;
        doors.sort_by_key(|d| (d.y, d.x));
        doors.dedup();
        let room = Room {
            cols,
            rows,
            tiles,
            doors: doors.into(),
            locked: Arc::new(locked),
        };
        room.validate()?;
        Ok(room)
    }

    /// A room filled with `fill`, with door tiles written at `doors`.
    pub fn filled(
        cols: usize,
        rows: usize,
        fill: Tile,
        doors: &[Coord],
    ) -> Result<Room, RoomError> {
        if !(MIN_SIDE..=MAX_SIDE).contains(&cols) || !(MIN_SIDE..=MAX_SIDE).contains(&rows) {
            return Err(RoomError::BadSize { cols, rows });
        }
        let mut tiles = vec![fill; cols * rows];
        for d in doors {
            if d.x >= cols || d.y >= rows {
                return Err(RoomError::OutOfBounds(*d));
            }
            tiles[d.y * cols + d.x] = Tile::Door;
        }
        Room::new(cols, rows, tiles, doors.to_vec(), BTreeSet::new())
    }

    fn validate(&self) -> Result<(), RoomError> {
        let (cols, rows) = (self.cols, self.rows);
        if !(MIN_SIDE..=MAX_SIDE).contains(&cols) || !(MIN_SIDE..=MAX_SIDE).contains(&rows) {
            return Err(RoomError::BadSize { cols, rows });
        }
        if self.tiles.len() != cols * rows {
            return Err(RoomError::TileCount {
                expected: cols * rows,
                actual: self.tiles.len(),
            });
        }
        if self.doors.is_empty() {
            return Err(RoomError::NoDoors);
        }
        for &d in self.doors.iter() {
            if !self.contains(d) {
                return Err(RoomError::OutOfBounds(d));
            }
            if !self.is_border(d) {
                return Err(RoomError::DoorOffBorder(d));
            }
            if self.get(d) != Tile::Door {
                return Err(RoomError::DoorTileMissing(d));
            }
        }
        for (i, &t) in self.tiles.iter().enumerate() {
            let c = self.coord_of(i);
            if t == Tile::Door && !self.doors.contains(&c) {
                return Err(RoomError::StrayDoorTile(c));
            }
        }
        if let Some(&c) = self.locked.iter().find(|&&c| !self.contains(c)) {
            return Err(RoomError::OutOfBounds(c));
        }
        Ok(())
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn doors(&self) -> &[Coord] {
        &self.doors
    }

    pub fn locked(&self) -> &BTreeSet<Coord> {
        &self.locked
    }

    pub fn contains(&self, c: Coord) -> bool {
        c.x < self.cols && c.y < self.rows
    }

    pub fn is_border(&self, c: Coord) -> bool {
        c.x == 0 || c.y == 0 || c.x + 1 == self.cols || c.y + 1 == self.rows
    }

    pub fn index(&self, c: Coord) -> usize {
        c.y * self.cols + c.x
    }

    pub fn coord_of(&self, index: usize) -> Coord {
        Coord::new(index % self.cols, index / self.cols)
    }

    pub fn get(&self, c: Coord) -> Tile {
        self.tiles[self.index(c)]
    }

    /// True when both rooms have the same size and door positions, i.e. share
    /// a genome layout.
    pub fn same_layout(&self, other: &Room) -> bool {
        self.cols == other.cols && self.rows == other.rows && self.doors == other.doors
    }

    /// Writes a non-door tile. Returns the room unchanged if `c` is a door or
    /// `tile` is a door.
    pub fn with_tile(mut self, c: Coord, tile: Tile) -> Room {
        let i = self.index(c);
        if tile != Tile::Door && self.tiles[i] != Tile::Door {
            self.tiles[i] = tile;
        }
        self
    }

    /// Replaces the locked set, keeping tiles as they are.
    pub fn with_locked(mut self, locked: BTreeSet<Coord>) -> Result<Room, RoomError> {
        if let Some(&c) = locked.iter().find(|&&c| !self.contains(c)) {
            return Err(RoomError::OutOfBounds(c));
        }
        self.locked = Arc::new(locked);
        Ok(self)
    }

    pub(crate) fn tiles_mut(&mut self) -> &mut [Tile] {
        &mut self.tiles
    }

    /// Shares door and lock storage with `template` (same layout expected).
    pub(crate) fn share_masks_with(&mut self, template: &Room) {
        debug_assert!(self.same_layout(template));
        self.doors = Arc::clone(&template.doors);
        self.locked = Arc::clone(&template.locked);
    }

    pub fn count(&self, tile: Tile) -> usize {
        self.tiles.iter().filter(|&&t| t == tile).count()
    }

    pub fn passable_count(&self) -> usize {
        self.tiles.iter().filter(|t| t.is_passable()).count()
    }

    /// Orthogonal neighbours of `index`, as tile indices.
    pub fn neighbors(&self, index: usize) -> impl Iterator<Item = usize> {
        let (cols, rows) = (self.cols, self.rows);
        let (x, y) = (index % cols, index / cols);
        let up = (y > 0).then(|| index - cols);
        let down = (y + 1 < rows).then(|| index + cols);
        let left = (x > 0).then(|| index - 1);
        let right = (x + 1 < cols).then(|| index + 1);
        [up, down, left, right].into_iter().flatten()
    }

    /// BFS distances over passable tiles from a set of source indices.
    /// Unreached tiles hold `usize::MAX`.
    pub fn passable_distances(&self, sources: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.tiles.len()];
        let mut queue = VecDeque::new();
        for s in sources {
            if self.tiles[s].is_passable() && dist[s] == usize::MAX {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(i) = queue.pop_front() {
            for n in self.neighbors(i) {
                if dist[n] == usize::MAX && self.tiles[n].is_passable() {
                    dist[n] = dist[i] + 1;
                    queue.push_back(n);
                }
            }
        }
        dist
    }

    /// Every door, enemy and treasure is reachable from every door through
    /// 4-connected passable tiles. Floor pockets may be isolated.
    pub fn is_feasible(&self) -> bool {
        let first = self.index(self.doors[0]);
        let dist = self.passable_distances([first]);
        self.tiles.iter().zip(&dist).all(|(t, &d)| {
            !matches!(t, Tile::Door | Tile::Enemy | Tile::Treasure) || d != usize::MAX
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.cols, self.rows);
        for row in self.tiles.chunks(self.cols) {
            out.extend(row.iter().map(|t| t.to_char()));
            out.push('\n');
        }
        for c in self.locked.iter() {
            out.push_str(&format!("lock {} {}\n", c.x, c.y));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Room, ParseError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(ParseError::Header)?;
        let mut parts = header.split_whitespace();
        let mut next_num = || -> Result<usize, ParseError> {
            parts
                .next()
                .and_then(|p| p.parse().ok())
                .ok_or(ParseError::Header)
        };
        let cols = next_num()?;
        let rows = next_num()?;
        if parts.next().is_some() {
            return Err(ParseError::Header);
        }
        if !(MIN_SIDE..=MAX_SIDE).contains(&cols) || !(MIN_SIDE..=MAX_SIDE).contains(&rows) {
            return Err(RoomError::BadSize { cols, rows }.into());
        }

        let mut tiles = Vec::with_capacity(cols * rows);
        let mut doors = Vec::new();
        let mut locked = BTreeSet::new();
        let mut grid_rows = 0;
        for (line_no, line) in lines {
            let line = line.trim_end();
            if let Some(rest) = line.strip_prefix("lock") {
                let nums: Vec<usize> = rest
                    .split_whitespace()
                    .map(|p| p.parse())
                    .collect::<Result<_, _>>()
                    .map_err(|_| ParseError::LockLine {
                        line: line_no + 1,
                        text: line.into(),
                    })?;
                match nums[..] {
                    [x, y] => locked.insert(Coord::new(x, y)),
                    _ => {
                        return Err(ParseError::LockLine {
                            line: line_no + 1,
                            text: line.into(),
                        })
                    }
                };
                continue;
            }
            if !locked.is_empty() {
                return Err(ParseError::DimensionMismatch(format!(
                    "grid row after lock lines at line {}",
                    line_no + 1
                )));
            }
            let width = line.chars().count();
            if width != cols {
                return Err(ParseError::DimensionMismatch(format!(
                    "line {} has {width} tiles, header says {cols}",
                    line_no + 1
                )));
            }
            if grid_rows == rows {
                return Err(ParseError::DimensionMismatch(format!(
                    "more than {rows} grid rows"
                )));
            }
            for (x, ch) in line.chars().enumerate() {
                let tile = Tile::from_char(ch).ok_or(ParseError::IllegalTile {
                    ch,
                    line: line_no + 1,
                    column: x + 1,
                })?;
                if tile == Tile::Door {
                    let c = Coord::new(x, grid_rows);
                    if !(x == 0 || grid_rows == 0 || x + 1 == cols || grid_rows + 1 == rows) {
                        return Err(ParseError::DoorOffBorder(c));
                    }
                    doors.push(c);
                }
                tiles.push(tile);
            }
            grid_rows += 1;
        }
        if grid_rows != rows {
            return Err(ParseError::DimensionMismatch(format!(
                "{grid_rows} grid rows, header says {rows}"
            )));
        }
        Ok(Room::new(cols, rows, tiles, doors, locked)?)
    }
}

impl FromStr for Room {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Room::from_text(s)
    }
}

impl fmt::Display for Room {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Wire form of a room: `{cols, rows, tiles: ["fwf..", ...], doors, locked}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoomJson {
    pub cols: usize,
    pub rows: usize,
    pub tiles: Vec<String>,
    pub doors: Vec<Coord>,
    #[serde(default)]
    pub locked: Vec<Coord>,
}

impl From<&Room> for RoomJson {
    fn from(r: &Room) -> Self {
        RoomJson {
            cols: r.cols,
            rows: r.rows,
            tiles: r
                .tiles
                .chunks(r.cols)
                .map(|row| row.iter().map(|t| t.to_char()).collect())
                .collect(),
            doors: r.doors.to_vec(),
            locked: r.locked.iter().copied().collect(),
        }
    }
}

impl TryFrom<RoomJson> for Room {
    type Error = ParseError;

    fn try_from(j: RoomJson) -> Result<Self, Self::Error> {
        if j.tiles.len() != j.rows {
            return Err(ParseError::DimensionMismatch(format!(
                "{} tile rows, rows = {}",
                j.tiles.len(),
                j.rows
            )));
        }
        let mut tiles = Vec::with_capacity(j.cols * j.rows);
        for (y, line) in j.tiles.iter().enumerate() {
            if line.chars().count() != j.cols {
                return Err(ParseError::DimensionMismatch(format!(
                    "tile row {y} width != cols {}",
                    j.cols
                )));
            }
            for (x, ch) in line.chars().enumerate() {
                tiles.push(Tile::from_char(ch).ok_or(ParseError::IllegalTile {
                    ch,
                    line: y + 1,
                    column: x + 1,
                })?);
            }
        }
        Ok(Room::new(
            j.cols,
            j.rows,
            tiles,
            j.doors,
            j.locked.into_iter().collect(),
        )?)
    }
}

impl Serialize for Room {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RoomJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Room {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = RoomJson::deserialize(d)?;
        Room::try_from(j).map_err(serde::de::Error::custom)
    }
}

/// One connection in a dungeon: `(room, door index) <-> (room, door index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoorLink {
    pub room_a: usize,
    pub door_a: usize,
    pub room_b: usize,
    pub door_b: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DungeonError {
    #[error("a dungeon needs at least two rooms, got {0}")]
    TooFewRooms(usize),
    #[error("a dungeon needs at least one connection")]
    NoConnections,
    #[error("initial room {0} does not exist")]
    BadInitialRoom(usize),
    #[error("connection references missing door {door} of room {room}")]
    BadEndpoint { room: usize, door: usize },
}

/// The smallest dungeon graph needed to place doors and test reachability.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DungeonStub {
    rooms: Vec<Room>,
    edges: Vec<DoorLink>,
    initial_room: usize,
}

impl DungeonStub {
    pub fn new(
        rooms: Vec<Room>,
        edges: Vec<DoorLink>,
        initial_room: usize,
    ) -> Result<Self, DungeonError> {
        if rooms.len() < 2 {
            return Err(DungeonError::TooFewRooms(rooms.len()));
        }
        if edges.is_empty() {
            return Err(DungeonError::NoConnections);
        }
        if initial_room >= rooms.len() {
            return Err(DungeonError::BadInitialRoom(initial_room));
        }
        for e in &edges {
            for (room, door) in [(e.room_a, e.door_a), (e.room_b, e.door_b)] {
                if rooms.get(room).is_none_or(|r| door >= r.doors().len()) {
                    return Err(DungeonError::BadEndpoint { room, door });
                }
            }
        }
        Ok(DungeonStub {
            rooms,
            edges,
            initial_room,
        })
    }

    pub fn rooms(&self) -> &[Room] {
        &self.rooms
    }

    pub fn edges(&self) -> &[DoorLink] {
        &self.edges
    }

    pub fn initial_room(&self) -> usize {
        self.initial_room
    }

    /// Rooms that cannot be entered from the initial room. Empty means the
    /// dungeon is feasible.
    ///
    /// The walk starts at the initial room's first door, moves between doors
    /// of the same room along passable tiles, and between rooms along edges.
    pub fn unreachable_rooms(&self) -> BTreeSet<usize> {
        // node id = (room, door) flattened
        let offsets: Vec<usize> = self
            .rooms
            .iter()
            .scan(0, |acc, r| {
                let start = *acc;
                *acc += r.doors().len();
                Some(start)
            })
            .collect();
        let total: usize = self.rooms.iter().map(|r| r.doors().len()).sum();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); total];
        for (ri, room) in self.rooms.iter().enumerate() {
            for (di, &door) in room.doors().iter().enumerate() {
                let dist = room.passable_distances([room.index(door)]);
                for (dj, &other) in room.doors().iter().enumerate() {
                    if dj != di && dist[room.index(other)] != usize::MAX {
                        adj[offsets[ri] + di].push(offsets[ri] + dj);
                    }
                }
            }
        }
        for e in &self.edges {
            let a = offsets[e.room_a] + e.door_a;
            let b = offsets[e.room_b] + e.door_b;
            adj[a].push(b);
            adj[b].push(a);
        }

        let mut seen = vec![false; total];
        let start = offsets[self.initial_room];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(n) = stack.pop() {
            for &m in &adj[n] {
                if !seen[m] {
                    seen[m] = true;
                    stack.push(m);
                }
            }
        }
        (0..self.rooms.len())
            .filter(|&ri| {
                ri != self.initial_room
                    && !(0..self.rooms[ri].doors().len()).any(|di| seen[offsets[ri] + di])
            })
            .collect()
    }
}

/// Free function form of [`DungeonStub::unreachable_rooms`].
pub fn dungeon_reachability(d: &DungeonStub) -> BTreeSet<usize> {
    d.unreachable_rooms()
}
