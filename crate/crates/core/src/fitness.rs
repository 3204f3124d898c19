//! Target-adaptive room fitness: an equal blend of an inventorial score
//! (enemies, treasures, doors) and a spatial score (chambers, corridors,
//! meso-patterns).

use serde::{Deserialize, Serialize};

use crate::patterns::{detect, PatternReport, SpatialKind};
use crate::room::{Room, Tile};

/// Ratios of a room that fitness tracks against the designer's target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoomRatios {
    /// enemies / passable tiles
    pub enemy: f64,
    /// treasures / passable tiles
    pub treasure: f64,
    /// passable tiles / all tiles
    pub passable: f64,
    /// chamber tiles / passable tiles
    pub chamber_coverage: f64,
}

impl RoomRatios {
    pub fn of(room: &Room, report: &PatternReport) -> Self {
        let passable = room.passable_count();
        let per_passable = |n: usize| {
            if passable == 0 {
                0.0
            } else {
                n as f64 / passable as f64
            }
        };
        RoomRatios {
            enemy: per_passable(room.count(Tile::Enemy)),
            treasure: per_passable(room.count(Tile::Treasure)),
            passable: passable as f64 / room.len() as f64,
            chamber_coverage: per_passable(report.cells_of(SpatialKind::Chamber)),
        }
    }
}

/// Snapshot of the current target room. Rebuilt whenever the target changes.
#[derive(Debug, Clone)]
pub struct FitnessContext {
    target: Room,
    target_report: PatternReport,
    ratios: RoomRatios,
    door_steps: Vec<Option<usize>>,
}

impl FitnessContext {
    pub fn new(target: Room) -> Self {
        let target_report = detect(&target);
        let ratios = RoomRatios::of(&target, &target_report);
        let door_steps = door_enemy_steps(&target);
        FitnessContext {
            target,
            target_report,
            ratios,
            door_steps,
        }
    }

    pub fn target(&self) -> &Room {
        &self.target
    }

    pub fn target_report(&self) -> &PatternReport {
        &self.target_report
    }

    pub fn ratios(&self) -> &RoomRatios {
        &self.ratios
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessValue {
    pub total: f64,
    pub inventorial: f64,
    pub spatial: f64,
}

impl FitnessValue {
    pub fn blend(inventorial: f64, spatial: f64) -> Self {
        FitnessValue {
            total: 0.5 * inventorial + 0.5 * spatial,
            inventorial,
            spatial,
        }
    }
}

/// Distance (in passable steps) at which a door counts as fully safe.
pub fn safe_distance(room: &Room) -> f64 {
    (room.cols() + room.rows()) as f64 / 2.0
}

/// Walking steps from each door to its nearest enemy, `None` when no enemy
/// is reachable from that door.
pub fn door_enemy_steps(room: &Room) -> Vec<Option<usize>> {
    let enemies = room
        .tiles()
        .iter()
        .enumerate()
        .filter(|(_, &t)| t == Tile::Enemy)
        .map(|(i, _)| i);
    let dist = room.passable_distances(enemies);
    room.doors()
        .iter()
        .map(|&d| match dist[room.index(d)] {
            usize::MAX => None,
            steps => Some(steps),
        })
        .collect()
}

/// Mean over doors of the walking distance to the nearest enemy, scaled by
/// [`safe_distance`] and capped at 1. No reachable enemy means 1.
pub fn door_safety(room: &Room) -> f64 {
    let scale = safe_distance(room);
    let steps = door_enemy_steps(room);
    let total: f64 = steps
        .iter()
        .map(|s| s.map_or(1.0, |s| (s as f64 / scale).min(1.0)))
        .sum();
    total / steps.len() as f64
}

/// Door safety measured against the target: each door's enemy distance is
/// scaled by the target's distance at the same door (or by
/// [`safe_distance`] where the target has no reachable enemy), capped at 1.
pub fn relative_door_safety(room: &Room, ctx: &FitnessContext) -> f64 {
    let steps = door_enemy_steps(room);
    let total: f64 = steps
        .iter()
        .zip(&ctx.door_steps)
        .map(|(s, t)| {
            let scale = t.map_or(safe_distance(room), |t| t.max(1) as f64);
            s.map_or(1.0, |s| (s as f64 / scale).min(1.0))
        })
        .sum();
    total / steps.len() as f64
}

/// Mean of enemy-ratio closeness, treasure-ratio closeness and door safety
/// relative to the target.
pub fn inventorial(room: &Room, report: &PatternReport, ctx: &FitnessContext) -> f64 {
    let own = RoomRatios::of(room, report);
    let enemy = 1.0 - (own.enemy - ctx.ratios.enemy).abs();
    let treasure = 1.0 - (own.treasure - ctx.ratios.treasure).abs();
    (enemy + treasure + relative_door_safety(room, ctx)) / 3.0
}

/// Mean of chamber-coverage closeness, meso density and corridor quality.
pub fn spatial(room: &Room, report: &PatternReport, ctx: &FitnessContext) -> f64 {
    let own = RoomRatios::of(room, report);
    let coverage = 1.0 - (own.chamber_coverage - ctx.ratios.chamber_coverage).abs();
    let chambers = report.count(SpatialKind::Chamber);
    let meso = (report.meso.len() as f64 / chambers.max(1) as f64).min(1.0);
    let passable = room.passable_count().max(1) as f64;
    let loose =
        (report.cells_of(SpatialKind::Connector) + report.cells_of(SpatialKind::Nothing)) as f64;
    let corridor = 1.0 - loose / passable;
    (coverage + meso + corridor) / 3.0
}

pub fn evaluate(room: &Room, report: &PatternReport, ctx: &FitnessContext) -> FitnessValue {
    FitnessValue::blend(inventorial(room, report, ctx), spatial(room, report, ctx))
}
