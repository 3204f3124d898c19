//! Client-side editor state, kept free of any UI toolkit: edits produce
//! protocol messages and broadcasts render into a plain view model.

use std::collections::{BTreeSet, VecDeque};
use std::time::{Duration, Instant};

use serde::Serialize;

use super::protocol::{ClientMessage, ServerMessage, Suggestion};
use crate::dimensions::DimensionDescriptor;
use crate::engine::EliteBroadcast;
use crate::room::{Coord, Room, Tile};

/// Paint inactivity after which the edited room is sent.
pub const DEBOUNCE: Duration = Duration::from_millis(150);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BrushSize {
    Single,
    /// The tile and its four orthogonal neighbours.
    Cross5,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Brush {
    pub tile: Tile,
    pub size: BrushSize,
    pub lock_mode: bool,
    pub bucket_mode: bool,
}

impl Default for Brush {
    fn default() -> Self {
        Brush {
            tile: Tile::Wall,
            size: BrushSize::Single,
            lock_mode: false,
            bucket_mode: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connection {
    Connected,
    /// Shown as a stale-data banner until the next broadcast arrives.
    Disconnected,
}

/// One rendered suggestion cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuggestionView {
    pub coords: Vec<usize>,
    /// Tile rows of the elite, or `None` for "no feasible elite".
    pub rows: Option<Vec<String>>,
    pub fitness_badge: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisView {
    pub name: String,
    /// `[lo, hi)` label per bin.
    pub bins: Vec<String>,
}

/// The elite grid as drawn: rows top to bottom are the second axis from its
/// highest bin down, columns are the first axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuggestionGridView {
    pub generation: u64,
    pub x_axis: AxisView,
    pub y_axis: AxisView,
    pub cells: Vec<Vec<SuggestionView>>,
}

fn axis(d: &DimensionDescriptor) -> AxisView {
    let g = d.granularity as f64;
    AxisView {
        name: d.kind.name().to_string(),
        bins: (0..d.granularity)
            .map(|i| {
                format!(
                    "[{:.2}, {:.2}{}",
                    i as f64 / g,
                    (i + 1) as f64 / g,
                    if i + 1 == d.granularity { "]" } else { ")" }
                )
            })
            .collect(),
    }
}

/// Pure view of a two-dimensional broadcast; `None` for other shapes.
pub fn render_suggestions(b: &EliteBroadcast) -> Option<SuggestionGridView> {
    let [dx, dy] = b.dims.as_slice() else {
        return None;
    };
    let cells = (0..dy.granularity)
        .rev()
        .map(|y| {
            (0..dx.granularity)
                .map(|x| {
                    let coords = vec![x, y];
                    let cell = b.cells.iter().find(|c| c.coords == coords);
                    let elite = cell.and_then(|c| c.elite.as_ref().zip(c.elite_fitness));
                    SuggestionView {
                        rows: elite.map(|(r, _)| {
                            r.to_text().lines().skip(1).map(str::to_string).collect()
                        }),
                        fitness_badge: elite.map(|(_, f)| format!("{f:.3}")),
                        coords,
                    }
                })
                .collect()
        })
        .collect();
    Some(SuggestionGridView {
        generation: b.generation,
        x_axis: axis(dx),
        y_axis: axis(dy),
        cells,
    })
}

#[derive(Debug, Clone)]
pub struct EditorState {
    pub current_room: Room,
    pub brush: Brush,
    pub active_dims: [DimensionDescriptor; 2],
    pub suggestion_grid: Option<EliteBroadcast>,
    pub connection: Connection,
    pub session: Option<u64>,
    dirty_since: Option<Instant>,
    outbox: VecDeque<ClientMessage>,
}

impl EditorState {
    pub fn new(room: Room, dims: [DimensionDescriptor; 2]) -> Self {
        EditorState {
            current_room: room,
            brush: Brush::default(),
            active_dims: dims,
            suggestion_grid: None,
            connection: Connection::Disconnected,
            session: None,
            dirty_since: None,
            outbox: VecDeque::new(),
        }
    }

    fn brush_targets(&self, at: Coord) -> Vec<Coord> {
        let room = &self.current_room;
        if !room.contains(at) {
            return Vec::new();
        }
        if self.brush.bucket_mode {
            let kind = room.get(at);
            let mut seen = vec![false; room.len()];
            let mut stack = vec![room.index(at)];
            let mut out = Vec::new();
            seen[room.index(at)] = true;
            while let Some(i) = stack.pop() {
                out.push(room.coord_of(i));
                for n in room.neighbors(i) {
                    if !seen[n] && room.tiles()[n] == kind {
                        seen[n] = true;
                        stack.push(n);
                    }
                }
            }
            return out;
        }
        let mut out = vec![at];
        if self.brush.size == BrushSize::Cross5 {
            let (x, y) = (at.x as isize, at.y as isize);
            for (dx, dy) in [(0, -1), (-1, 0), (1, 0), (0, 1)] {
                let (nx, ny) = (x + dx, y + dy);
                if nx >= 0 && ny >= 0 && room.contains(Coord::new(nx as usize, ny as usize)) {
                    out.push(Coord::new(nx as usize, ny as usize));
                }
            }
        }
        out
    }

    /// Applies the brush locally. Door tiles are never touched; in lock mode
    /// the brushed tiles toggle their lock instead of being painted.
    pub fn paint(&mut self, at: Coord, now: Instant) {
        let coords: Vec<Coord> = self
            .brush_targets(at)
            .into_iter()
            .filter(|&c| self.current_room.get(c) != Tile::Door)
            .collect();
        if coords.is_empty() {
            return;
        }
        if self.brush.lock_mode {
            self.toggle_lock(&coords);
            return;
        }
        if self.brush.tile == Tile::Door {
            return;
        }
        let mut room = self.current_room.clone();
        for c in coords {
            room = room.with_tile(c, self.brush.tile);
        }
        self.current_room = room;
        self.dirty_since = Some(now);
    }

    /// Flips the lock on each coordinate and sends the new lock set.
    pub fn toggle_lock(&mut self, coords: &[Coord]) {
        let mut locked: BTreeSet<Coord> = self.current_room.locked().clone();
        for &c in coords {
            if self.current_room.get(c) == Tile::Door {
                continue;
            }
            if !locked.remove(&c) {
                locked.insert(c);
            }
        }
        self.current_room = self
            .current_room
            .clone()
            .with_locked(locked)
            .expect("coords inside the room");
        self.outbox.push_back(ClientMessage::LockTiles(
            self.current_room.locked().iter().copied().collect(),
        ));
    }

    /// Queues the debounced `SetTarget` once painting has been idle long enough.
    pub fn tick(&mut self, now: Instant) {
        if let Some(t) = self.dirty_since {
            if now.duration_since(t) >= DEBOUNCE {
                self.dirty_since = None;
                self.outbox
                    .push_back(ClientMessage::SetTarget(self.current_room.clone()));
            }
        }
    }

    /// Asks for a cell of the grid on screen; false when none has arrived.
    pub fn apply_suggestion(&mut self, coords: Vec<usize>) -> bool {
        let Some(b) = &self.suggestion_grid else {
            return false;
        };
        self.outbox
            .push_back(ClientMessage::ApplySuggestion(Suggestion {
                generation: b.generation,
                coords,
            }));
        true
    }

    pub fn change_dims(&mut self, dims: [DimensionDescriptor; 2]) {
        self.active_dims = dims;
        self.outbox
            .push_back(ClientMessage::SetDimensions(dims.to_vec()));
    }

    pub fn restart(&mut self) {
        self.outbox.push_back(ClientMessage::Restart);
    }

    /// Messages waiting to be sent, oldest first.
    pub fn drain_outbox(&mut self) -> Vec<ClientMessage> {
        self.outbox.drain(..).collect()
    }

    pub fn disconnected(&mut self) {
        self.connection = Connection::Disconnected;
    }

    pub fn receive(&mut self, msg: ServerMessage) {
        match msg {
            ServerMessage::Opened => self.connection = Connection::Connected,
            ServerMessage::ElitesUpdated(b) => {
                self.connection = Connection::Connected;
                self.suggestion_grid = Some(b);
            }
            ServerMessage::TargetEcho(room) => {
                // a pending local edit would be overwritten by the echo
                self.dirty_since = None;
                self.current_room = room;
            }
            ServerMessage::Error { .. } | ServerMessage::Stats(_) => {}
        }
    }

    pub fn render(&self) -> Option<SuggestionGridView> {
        self.suggestion_grid.as_ref().and_then(render_suggestions)
    }
}
