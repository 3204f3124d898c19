//! Micro-, spatial- and meso-pattern detection.
//!
//! Segmentation rules:
//! * chambers are axis-aligned filled rectangles of passable tiles, at least
//!   3x3, extracted greedily (largest area first, then top-left scan order,
//!   then wider first);
//! * a remaining passable tile whose remaining neighbours all lie along one
//!   axis is corridor-shaped, and straight runs of such tiles form corridors;
//! * any other remaining tile touching two or more distinct chambers or
//!   corridors is a connector;
//! * everything else is "nothing".
//!
//! Connector and nothing patterns are single tiles.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::room::{Coord, Room, Tile};

pub const MIN_CHAMBER_SIDE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MicroKind {
    Enemy,
    Treasure,
    Wall,
}

impl MicroKind {
    pub const ALL: [MicroKind; 3] = [MicroKind::Enemy, MicroKind::Treasure, MicroKind::Wall];

    pub fn tile(self) -> Tile {
        match self {
            MicroKind::Enemy => Tile::Enemy,
            MicroKind::Treasure => Tile::Treasure,
            MicroKind::Wall => Tile::Wall,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MicroCluster {
    pub kind: MicroKind,
    /// Members in row-major order.
    pub members: Vec<Coord>,
}

impl MicroCluster {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn centroid(&self) -> (f64, f64) {
        let n = self.members.len() as f64;
        let (sx, sy) = self
            .members
            .iter()
            .fold((0.0, 0.0), |(sx, sy), c| (sx + c.x as f64, sy + c.y as f64));
        (sx / n, sy / n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpatialKind {
    Chamber,
    Corridor,
    Connector,
    Nothing,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpatialPattern {
    pub kind: SpatialKind,
    /// Cells in row-major order.
    pub cells: Vec<Coord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MesoKind {
    TreasureRoom,
    GuardRoom,
    Ambush,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MesoPattern {
    pub kind: MesoKind,
    /// Index of the chamber in [`PatternReport::spatial`].
    pub chamber: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternReport {
    pub micro: Vec<MicroCluster>,
    pub spatial: Vec<SpatialPattern>,
    pub meso: Vec<MesoPattern>,
    /// Sorted neighbour lists over `spatial`.
    pub adjacency: Vec<Vec<usize>>,
    /// Owning spatial pattern per tile, `None` for walls.
    #[serde(skip)]
    pub owner: Vec<Option<usize>>,
}

impl PatternReport {
    pub fn clusters(&self, kind: MicroKind) -> impl Iterator<Item = &MicroCluster> {
        self.micro.iter().filter(move |c| c.kind == kind)
    }

    pub fn count(&self, kind: SpatialKind) -> usize {
        self.spatial.iter().filter(|p| p.kind == kind).count()
    }

    pub fn cells_of(&self, kind: SpatialKind) -> usize {
        self.spatial
            .iter()
            .filter(|p| p.kind == kind)
            .map(|p| p.cells.len())
            .sum()
    }

    /// Distinct patterns that contain at least one door, ascending.
    pub fn door_patterns(&self, room: &Room) -> Vec<usize> {
        let set: BTreeSet<usize> = room
            .doors()
            .iter()
            .filter_map(|&d| self.owner[room.index(d)])
            .collect();
        set.into_iter().collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("pattern report is always serializable")
    }
}

/// Maximal 4-connected clusters of one tile kind, ordered by first member.
pub fn cluster_micro(room: &Room, kind: MicroKind) -> Vec<MicroCluster> {
    let tile = kind.tile();
    let tiles = room.tiles();
    let mut seen = vec![false; tiles.len()];
    let mut clusters = Vec::new();
    for start in 0..tiles.len() {
        if seen[start] || tiles[start] != tile {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut members = Vec::new();
        while let Some(i) = stack.pop() {
            members.push(i);
            for n in room.neighbors(i) {
                if !seen[n] && tiles[n] == tile {
                    seen[n] = true;
                    stack.push(n);
                }
            }
        }
        members.sort_unstable();
        clusters.push(MicroCluster {
            kind,
            members: members.into_iter().map(|i| room.coord_of(i)).collect(),
        });
    }
    clusters
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Rect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

/// Greedy chamber extraction over a free-tile mask.
pub(crate) fn extract_chambers(cols: usize, rows: usize, free: &mut [bool]) -> Vec<Rect> {
    let mut chambers = Vec::new();
    if cols < MIN_CHAMBER_SIDE || rows < MIN_CHAMBER_SIDE {
        return chambers;
    }
    let stride = cols + 1;
    let mut prefix = vec![0u32; stride * (rows + 1)];
    loop {
        for y in 0..rows {
            for x in 0..cols {
                prefix[(y + 1) * stride + x + 1] = prefix[y * stride + x + 1]
                    + prefix[(y + 1) * stride + x]
                    - prefix[y * stride + x]
                    + free[y * cols + x] as u32;
            }
        }
        let filled = |r: &Rect| {
            let (x0, y0, x1, y1) = (r.x, r.y, r.x + r.w, r.y + r.h);
            prefix[y1 * stride + x1] + prefix[y0 * stride + x0]
                - prefix[y0 * stride + x1]
                - prefix[y1 * stride + x0]
                == (r.w * r.h) as u32
        };
        let mut best: Option<Rect> = None;
        for y in 0..=rows - MIN_CHAMBER_SIDE {
            for x in 0..=cols - MIN_CHAMBER_SIDE {
                for h in MIN_CHAMBER_SIDE..=rows - y {
                    for w in (MIN_CHAMBER_SIDE..=cols - x).rev() {
                        let r = Rect { x, y, w, h };
                        if best.is_some_and(|b| b.w * b.h >= w * h) {
                            // scan order already favours earlier candidates on ties
                            continue;
                        }
                        if filled(&r) {
                            best = Some(r);
                        }
                    }
                }
            }
        }
        let Some(r) = best else { break };
        for yy in r.y..r.y + r.h {
            for xx in r.x..r.x + r.w {
                free[yy * cols + xx] = false;
            }
        }
        chambers.push(r);
    }
    chambers
}

pub fn detect(room: &Room) -> PatternReport {
    let (cols, rows) = (room.cols(), room.rows());
    let tiles = room.tiles();
    let n = tiles.len();

    let mut micro = Vec::new();
    for kind in MicroKind::ALL {
        micro.extend(cluster_micro(room, kind));
    }

    let mut free: Vec<bool> = tiles.iter().map(|t| t.is_passable()).collect();
    let rects = extract_chambers(cols, rows, &mut free);

    // Provisional owners: chambers, then corridor runs.
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut groups: Vec<(SpatialKind, Vec<usize>)> = Vec::new();
    for r in &rects {
        let id = groups.len();
        let mut cells = Vec::with_capacity(r.w * r.h);
        for y in r.y..r.y + r.h {
            for x in r.x..r.x + r.w {
                let i = y * cols + x;
                owner[i] = Some(id);
                cells.push(i);
            }
        }
        groups.push((SpatialKind::Chamber, cells));
    }

    let free_at = |x: isize, y: isize| -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < cols
            && (y as usize) < rows
            && free[y as usize * cols + x as usize]
    };
    let corridor_shaped = |i: usize| -> bool {
        let (x, y) = ((i % cols) as isize, (i / cols) as isize);
        let h = free_at(x - 1, y) || free_at(x + 1, y);
        let v = free_at(x, y - 1) || free_at(x, y + 1);
        h != v
    };
    let shaped: Vec<bool> = (0..n).map(|i| free[i] && corridor_shaped(i)).collect();
    for start in 0..n {
        if !shaped[start] || owner[start].is_some() {
            continue;
        }
        let id = groups.len();
        let mut cells = Vec::new();
        let mut stack = vec![start];
        owner[start] = Some(id);
        while let Some(i) = stack.pop() {
            cells.push(i);
            for nb in room.neighbors(i) {
                if shaped[nb] && owner[nb].is_none() {
                    owner[nb] = Some(id);
                    stack.push(nb);
                }
            }
        }
        cells.sort_unstable();
        groups.push((SpatialKind::Corridor, cells));
    }

    // Connectors and nothing, decided against chambers and corridors only.
    let structural = groups.len();
    let mut singles = Vec::new();
    for i in 0..n {
        if !free[i] || owner[i].is_some() {
            continue;
        }
        let touching: BTreeSet<usize> = room
            .neighbors(i)
            .filter_map(|nb| owner[nb])
            .filter(|&o| o < structural)
            .collect();
        let kind = if touching.len() >= 2 {
            SpatialKind::Connector
        } else {
            SpatialKind::Nothing
        };
        singles.push((kind, i));
    }
    for (kind, i) in singles {
        owner[i] = Some(groups.len());
        groups.push((kind, vec![i]));
    }

    // Stable order: chambers in extraction order, then the rest by first cell.
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order[rects.len()..].sort_by_key(|&g| groups[g].1[0]);
    let mut remap = vec![0; groups.len()];
    for (new, &old) in order.iter().enumerate() {
        remap[old] = new;
    }
    for o in owner.iter_mut().flatten() {
        *o = remap[*o];
    }
    let spatial: Vec<SpatialPattern> = order
        .iter()
        .map(|&g| SpatialPattern {
            kind: groups[g].0,
            cells: groups[g].1.iter().map(|&i| room.coord_of(i)).collect(),
        })
        .collect();

    let mut adj_sets = vec![BTreeSet::new(); spatial.len()];
    for i in 0..n {
        let Some(a) = owner[i] else { continue };
        for nb in room.neighbors(i) {
            if let Some(b) = owner[nb] {
                if a != b {
                    adj_sets[a].insert(b);
                }
            }
        }
    }
    let adjacency: Vec<Vec<usize>> = adj_sets
        .into_iter()
        .map(|s| s.into_iter().collect())
        .collect();

    let door_bearing: BTreeSet<usize> = room
        .doors()
        .iter()
        .filter_map(|&d| owner[room.index(d)])
        .collect();
    let mut meso = Vec::new();
    for (ci, pattern) in spatial
        .iter()
        .enumerate()
        .filter(|(_, p)| p.kind == SpatialKind::Chamber)
    {
        let mut enemies = 0;
        let mut treasures = 0;
        let mut enemy_at_entrance = false;
        for c in &pattern.cells {
            let i = room.index(*c);
            match tiles[i] {
                Tile::Enemy => {
                    enemies += 1;
                    enemy_at_entrance |= room.neighbors(i).any(|nb| {
                        tiles[nb] == Tile::Door
                            || owner[nb].is_some_and(|o| o != ci && door_bearing.contains(&o))
                    });
                }
                Tile::Treasure => treasures += 1,
                _ => {}
            }
        }
        let kind = if enemies >= 1 && treasures >= 1 && enemy_at_entrance {
            Some(MesoKind::Ambush)
        } else if treasures >= 1 && enemies == 0 {
            Some(MesoKind::TreasureRoom)
        } else if enemies >= 1 && enemies >= treasures {
            Some(MesoKind::GuardRoom)
        } else {
            None
        };
        if let Some(kind) = kind {
            meso.push(MesoPattern { kind, chamber: ci });
        }
    }

    PatternReport {
        micro,
        spatial,
        meso,
        adjacency,
        owner,
    }
}
