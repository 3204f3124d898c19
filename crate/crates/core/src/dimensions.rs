//! The seven behavioural dimensions and archive binning.
//!
//! Every dimension maps a room to a score in `[0, 1]`. Similarity and inner
//! similarity compare against the target room; leniency needs door safety
//! from [`crate::fitness::door_safety`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::patterns::{MicroCluster, MicroKind, PatternReport};
use crate::room::Room;

/// Normalisation constant for the spatial-pattern count.
pub const NSP_K: f64 = 4.0;
/// Simple paths counted per door-pattern pair before giving up.
pub const PATH_CAP: usize = 1_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimensionError {
    #[error("rooms differ in size: {0}x{1} vs {2}x{3}")]
    SizeMismatch(usize, usize, usize, usize),
    #[error("unknown dimension {0:?}")]
    UnknownKind(String),
    #[error("granularity must be at least 2, got {0}")]
    Granularity(usize),
    #[error("leniency weights must be non-negative and sum to 1")]
    Weights,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimensionKind {
    Symmetry,
    Similarity,
    Nmp,
    Nsp,
    Linearity,
    InnerSimilarity,
    Leniency,
}

impl DimensionKind {
    pub const ALL: [DimensionKind; 7] = [
        DimensionKind::Symmetry,
        DimensionKind::Similarity,
        DimensionKind::Nmp,
        DimensionKind::Nsp,
        DimensionKind::Linearity,
        DimensionKind::InnerSimilarity,
        DimensionKind::Leniency,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DimensionKind::Symmetry => "symmetry",
            DimensionKind::Similarity => "similarity",
            DimensionKind::Nmp => "nmp",
            DimensionKind::Nsp => "nsp",
            DimensionKind::Linearity => "linearity",
            DimensionKind::InnerSimilarity => "inner_similarity",
            DimensionKind::Leniency => "leniency",
        }
    }

    /// Position in [`DimensionScores`].
    pub fn index(self) -> usize {
        self as usize
    }

    /// All 21 unordered pairs, in lexicographic order of [`Self::ALL`].
    pub fn pairs() -> Vec<(DimensionKind, DimensionKind)> {
        let mut out = Vec::with_capacity(21);
        for (i, &a) in Self::ALL.iter().enumerate() {
            for &b in &Self::ALL[i + 1..] {
                out.push((a, b));
            }
        }
        out
    }
}

impl fmt::Display for DimensionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DimensionKind {
    type Err = DimensionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| DimensionError::UnknownKind(s.to_string()))
    }
}

/// Scores indexed by [`DimensionKind::index`].
pub type DimensionScores = [f64; 7];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DimensionDescriptor {
    pub kind: DimensionKind,
    pub granularity: usize,
}

impl DimensionDescriptor {
    pub fn new(kind: DimensionKind, granularity: usize) -> Result<Self, DimensionError> {
        if granularity < 2 {
            return Err(DimensionError::Granularity(granularity));
        }
        Ok(DimensionDescriptor { kind, granularity })
    }

    pub fn bin(&self, score: f64) -> usize {
        bin(score, self.granularity)
    }
}

/// `floor(score * g)`, with 1.0 folded into the last bin.
pub fn bin(score: f64, granularity: usize) -> usize {
    let b = (score.clamp(0.0, 1.0) * granularity as f64).floor() as usize;
    b.min(granularity - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeniencyWeights {
    pub w0: f64,
    pub w1: f64,
    pub w2: f64,
}

impl LeniencyWeights {
    pub fn new(w0: f64, w1: f64, w2: f64) -> Result<Self, DimensionError> {
        let ok = [w0, w1, w2].iter().all(|w| *w >= 0.0) && ((w0 + w1 + w2) - 1.0).abs() < 1e-9;
        if !ok {
            return Err(DimensionError::Weights);
        }
        Ok(LeniencyWeights { w0, w1, w2 })
    }
}

impl Default for LeniencyWeights {
    fn default() -> Self {
        LeniencyWeights {
            w0: 0.4,
            w1: 0.4,
            w2: 0.2,
        }
    }
}

/// Density threshold per micro-pattern kind.
pub fn theta(kind: MicroKind) -> f64 {
    match kind {
        MicroKind::Enemy | MicroKind::Treasure => 4.0,
        MicroKind::Wall => 6.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DensitySparsity {
    pub den: f64,
    pub spa: f64,
}

/// Density and sparsity for each micro-pattern kind, indexed like
/// [`MicroKind::ALL`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MicroDistribution(pub [DensitySparsity; 3]);

impl MicroDistribution {
    pub fn of(room: &Room, report: &PatternReport) -> Self {
        let mut out = [DensitySparsity::default(); 3];
        for (slot, kind) in out.iter_mut().zip(MicroKind::ALL) {
            let clusters: Vec<&MicroCluster> = report.clusters(kind).collect();
            *slot = DensitySparsity {
                den: density(&clusters, kind),
                spa: sparsity(&clusters, room),
            };
        }
        MicroDistribution(out)
    }

    pub fn get(&self, kind: MicroKind) -> DensitySparsity {
        self.0[kind as usize]
    }
}

/// Euclidean distance between cluster centroids.
pub fn cluster_distance(a: &MicroCluster, b: &MicroCluster) -> f64 {
    let (ax, ay) = a.centroid();
    let (bx, by) = b.centroid();
    (ax - bx).hypot(ay - by)
}

/// Mean over clusters of `min(1, |cluster| / theta)`; 0 without clusters.
pub fn density(clusters: &[&MicroCluster], kind: MicroKind) -> f64 {
    if clusters.is_empty() {
        return 0.0;
    }
    let t = theta(kind);
    clusters
        .iter()
        .map(|c| (c.len() as f64 / t).min(1.0))
        .sum::<f64>()
        / clusters.len() as f64
}

/// Mean pairwise cluster distance over ordered pairs, each scaled by the
/// room's tile count; 0 with fewer than two clusters.
pub fn sparsity(clusters: &[&MicroCluster], room: &Room) -> f64 {
    let n = clusters.len();
    if n < 2 {
        return 0.0;
    }
    let size = room.len() as f64;
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            // each unordered pair stands for (i, j) and (j, i)
            sum += 2.0 * cluster_distance(clusters[i], clusters[j]) / size;
        }
    }
    sum / (n * (n - 1)) as f64
}

pub fn symmetry(room: &Room) -> f64 {
    let (cols, rows) = (room.cols(), room.rows());
    let tiles = room.tiles();
    let is_wall = |x: usize, y: usize| tiles[y * cols + x] == crate::room::Tile::Wall;
    let walls: Vec<(usize, usize)> = (0..tiles.len())
        .filter(|&i| tiles[i] == crate::room::Tile::Wall)
        .map(|i| (i % cols, i / cols))
        .collect();
    if walls.is_empty() {
        return 1.0;
    }
    let s = cols.min(rows);
    let mut counts = [0usize; 2];
    for &(x, y) in &walls {
        counts[0] += is_wall(cols - 1 - x, y) as usize;
        counts[1] += is_wall(x, rows - 1 - y) as usize;
    }
    let mut best = counts[0].max(counts[1]);
    // with an odd size difference no square is exactly centred; both nearest
    // squares are scored so that mirroring the room keeps its score
    for ox in [(cols - s) / 2, (cols - s).div_ceil(2)] {
        for oy in [(rows - s) / 2, (rows - s).div_ceil(2)] {
            let mut diag = [0usize; 2];
            for &(x, y) in &walls {
                if x < ox || x >= ox + s || y < oy || y >= oy + s {
                    continue;
                }
                let (i, j) = (x - ox, y - oy);
                diag[0] += is_wall(ox + j, oy + i) as usize;
                diag[1] += is_wall(ox + (s - 1 - j), oy + (s - 1 - i)) as usize;
            }
            best = best.max(diag[0]).max(diag[1]);
        }
    }
    best as f64 / walls.len() as f64
}

pub fn similarity(room: &Room, target: &Room) -> Result<f64, DimensionError> {
    if room.cols() != target.cols() || room.rows() != target.rows() {
        return Err(DimensionError::SizeMismatch(
            room.cols(),
            room.rows(),
            target.cols(),
            target.rows(),
        ));
    }
    let total = room.len();
    let differing = room
        .tiles()
        .iter()
        .zip(target.tiles())
        .filter(|(a, b)| a != b)
        .count();
    Ok((total - differing) as f64 / total as f64)
}

pub fn max_chambers(room: &Room) -> usize {
    (room.cols() / 3) * (room.rows() / 3)
}

pub fn nmp(report: &PatternReport, room: &Room) -> f64 {
    (report.meso.len() as f64 / max_chambers(room) as f64).min(1.0)
}

pub fn nsp(report: &PatternReport, room: &Room) -> f64 {
    let denom = room.cols().max(room.rows()) as f64 * NSP_K;
    (report.spatial.len() as f64 / denom).min(1.0)
}

/// Number of simple paths from `from` to `to`, stopping at `cap`.
pub fn count_simple_paths(adjacency: &[Vec<usize>], from: usize, to: usize, cap: usize) -> usize {
    if from == to {
        return 1;
    }
    let mut on_path = vec![false; adjacency.len()];
    let mut count = 0;
    // explicit stack of (node, next neighbour position)
    let mut stack: Vec<(usize, usize)> = vec![(from, 0)];
    on_path[from] = true;
    while let Some(&mut (node, ref mut pos)) = stack.last_mut() {
        if count >= cap {
            break;
        }
        if let Some(&next) = adjacency[node].get(*pos) {
            *pos += 1;
            if next == to {
                count += 1;
            } else if !on_path[next] {
                on_path[next] = true;
                stack.push((next, 0));
            }
        } else {
            on_path[node] = false;
            stack.pop();
        }
    }
    count.min(cap)
}

/// Parts of the linearity ratio, exposed for inspection and testing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinearityTerms {
    pub all_paths: usize,
    pub spatial_patterns: usize,
    pub neighbors_per_door: usize,
}

pub fn linearity_terms(report: &PatternReport, room: &Room) -> LinearityTerms {
    let door_patterns = report.door_patterns(room);
    let mut all_paths = 0;
    for (i, &a) in door_patterns.iter().enumerate() {
        for &b in &door_patterns[i + 1..] {
            all_paths += count_simple_paths(&report.adjacency, a, b, PATH_CAP);
        }
    }
    let neighbors_per_door = room
        .doors()
        .iter()
        .filter_map(|&d| report.owner[room.index(d)])
        .map(|p| report.adjacency[p].len())
        .sum();
    LinearityTerms {
        all_paths,
        spatial_patterns: report.spatial.len(),
        neighbors_per_door,
    }
}

pub fn linearity(report: &PatternReport, room: &Room) -> f64 {
    let t = linearity_terms(report, room);
    let denom = (t.spatial_patterns + t.neighbors_per_door).max(1) as f64;
    (1.0 - t.all_paths as f64 / denom).clamp(0.0, 1.0)
}

/// Raw inner-similarity distance in `[0, 6]`.
pub fn inner_distance(room: &MicroDistribution, target: &MicroDistribution) -> f64 {
    room.0
        .iter()
        .zip(target.0.iter())
        .map(|(g, t)| (g.den - t.den).abs() + (g.spa - t.spa).abs())
        .sum()
}

/// `1 - D / 6`, so identical distributions score 1.
pub fn inner_similarity(room: &MicroDistribution, target: &MicroDistribution) -> f64 {
    (1.0 - inner_distance(room, target) / 6.0).max(0.0)
}

/// `log10` that reads 0 for arguments below 1.
fn safe_log10(v: f64) -> f64 {
    if v >= 1.0 {
        v.log10()
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeniencyTerms {
    pub non_lenient: f64,
    pub lenient: f64,
}

pub fn leniency_terms(
    room: &Room,
    dist: &MicroDistribution,
    door_safety: f64,
    w: &LeniencyWeights,
) -> LeniencyTerms {
    let enemies = room.count(crate::room::Tile::Enemy) as f64;
    let treasures = room.count(crate::room::Tile::Treasure) as f64;
    let en = dist.get(MicroKind::Enemy);
    let tre = dist.get(MicroKind::Treasure);
    let non_lenient = w.w0 * safe_log10(enemies * en.spa)
        + w.w1 * safe_log10(enemies * en.den)
        + w.w2 * (1.0 - door_safety);
    let lenient = 0.5 * safe_log10(treasures * tre.spa) + 0.5 * safe_log10(treasures * tre.den);
    LeniencyTerms {
        non_lenient,
        lenient,
    }
}

pub fn leniency(
    room: &Room,
    dist: &MicroDistribution,
    door_safety: f64,
    w: &LeniencyWeights,
) -> f64 {
    let t = leniency_terms(room, dist, door_safety, w);
    (1.0 - (t.non_lenient - 0.5 * t.lenient)).clamp(0.0, 1.0)
}
