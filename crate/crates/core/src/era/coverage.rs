use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{EraDataset, EraRecord};
use crate::dimensions::{bin, DimensionKind};

/// Coverage percentages (0..=100) over feasible unique rooms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageStats {
    /// Occupied share of the requested pair's g×g grid.
    pub pair_coverage: Option<f64>,
    /// Mean occupied share over all 21 pair projections.
    pub all_dim_coverage: f64,
    /// Mean occupied share over the 7 single axes.
    pub single_dim_coverage: f64,
    /// Mean fitness of feasible uniques.
    pub avg_fitness: Option<f64>,
    pub feasible_uniques: usize,
}

/// Percent of the g×g `(a, b)` grid holding at least one record.
pub fn pair_coverage<'a>(
    records: impl IntoIterator<Item = &'a EraRecord>,
    a: DimensionKind,
    b: DimensionKind,
    granularity: usize,
) -> f64 {
    let cells: HashSet<(usize, usize)> = records
        .into_iter()
        .map(|r| (bin(r.score(a), granularity), bin(r.score(b), granularity)))
        .collect();
    100.0 * cells.len() as f64 / (granularity * granularity) as f64
}

/// Percent of the `g` bins along one axis holding at least one record.
pub fn single_coverage<'a>(
    records: impl IntoIterator<Item = &'a EraRecord>,
    kind: DimensionKind,
    granularity: usize,
) -> f64 {
    let bins: HashSet<usize> = records
        .into_iter()
        .map(|r| bin(r.score(kind), granularity))
        .collect();
    100.0 * bins.len() as f64 / granularity as f64
}

pub fn coverage(
    dataset: &EraDataset,
    pair: Option<(DimensionKind, DimensionKind)>,
    granularity: usize,
) -> CoverageStats {
    let feasible: Vec<&EraRecord> = dataset.feasible().collect();
    let pairs = DimensionKind::pairs();
    let all_dim_coverage = pairs
        .iter()
        .map(|&(a, b)| pair_coverage(feasible.iter().copied(), a, b, granularity))
        .sum::<f64>()
        / pairs.len() as f64;
    let single_dim_coverage = DimensionKind::ALL
        .iter()
        .map(|&k| single_coverage(feasible.iter().copied(), k, granularity))
        .sum::<f64>()
        / DimensionKind::ALL.len() as f64;
    CoverageStats {
        pair_coverage: pair
            .map(|(a, b)| pair_coverage(feasible.iter().copied(), a, b, granularity)),
        all_dim_coverage,
        single_dim_coverage,
        avg_fitness: dataset.mean_feasible_fitness(),
        feasible_uniques: feasible.len(),
    }
}
