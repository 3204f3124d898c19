//! Expressive-range analysis: logging of unique generated rooms and the
//! analytics computed over those logs.

mod coverage;
mod fitness_stats;
mod hexbin;

use std::collections::HashSet;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dimensions::{DimensionKind, DimensionScores};
use crate::eval::Evaluation;
use crate::fitness::FitnessValue;
use crate::room::Room;

pub use coverage::{coverage, pair_coverage, single_coverage, CoverageStats};
pub use fitness_stats::{
    fitness_by_dimension, fitness_over_time, over_time_svg, pearson, write_over_time_csv,
    BucketStats, DimensionFitness,
};
pub use hexbin::{hexbin, HexBin, HexGrid, HEX_COLUMNS};

pub const BUCKET_WIDTH: u64 = 100;

#[derive(Debug, Error)]
pub enum EraError {
    #[error("malformed record at row {row}: {reason}")]
    Malformed { row: usize, reason: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// 64-bit identity of a room layout (size plus every tile, doors included).
pub fn room_hash(room: &Room) -> u64 {
    let mut h = Sha256::new();
    h.update((room.cols() as u32).to_le_bytes());
    h.update((room.rows() as u32).to_le_bytes());
    let tiles: Vec<u8> = room.tiles().iter().map(|&t| t as u8).collect();
    h.update(&tiles);
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("sha256 is 32 bytes"))
}

/// One unique generated room.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EraRecord {
    pub bucket: u64,
    pub room_hash: u64,
    pub scores: DimensionScores,
    pub fitness: FitnessValue,
    pub feasible: bool,
}

impl EraRecord {
    pub fn score(&self, kind: DimensionKind) -> f64 {
        self.scores[kind.index()]
    }
}

/// Flat CSV row form of [`EraRecord`].
#[derive(Debug, Serialize, Deserialize)]
struct EraRow {
    generation_bucket: u64,
    room_hash: String,
    symmetry: f64,
    similarity: f64,
    nmp: f64,
    nsp: f64,
    linearity: f64,
    inner_similarity: f64,
    leniency: f64,
    fitness: f64,
    inventorial: f64,
    spatial: f64,
    feasible: bool,
}

impl From<&EraRecord> for EraRow {
    fn from(r: &EraRecord) -> Self {
        let s = r.scores;
        EraRow {
            generation_bucket: r.bucket,
            room_hash: format!("{:016x}", r.room_hash),
            symmetry: s[0],
            similarity: s[1],
            nmp: s[2],
            nsp: s[3],
            linearity: s[4],
            inner_similarity: s[5],
            leniency: s[6],
            fitness: r.fitness.total,
            inventorial: r.fitness.inventorial,
            spatial: r.fitness.spatial,
            feasible: r.feasible,
        }
    }
}

impl EraRow {
    fn into_record(self, row: usize) -> Result<EraRecord, EraError> {
        let bad = |reason: String| EraError::Malformed { row, reason };
        let room_hash =
            u64::from_str_radix(&self.room_hash, 16).map_err(|e| bad(format!("room_hash: {e}")))?;
        let rec = EraRecord {
            bucket: self.generation_bucket,
            room_hash,
            scores: [
                self.symmetry,
                self.similarity,
                self.nmp,
                self.nsp,
                self.linearity,
                self.inner_similarity,
                self.leniency,
            ],
            fitness: FitnessValue {
                total: self.fitness,
                inventorial: self.inventorial,
                spatial: self.spatial,
            },
            feasible: self.feasible,
        };
        validate(&rec).map_err(bad)?;
        Ok(rec)
    }
}

fn validate(r: &EraRecord) -> Result<(), String> {
    if !r.bucket.is_multiple_of(BUCKET_WIDTH) {
        return Err(format!(
            "generation bucket {} is not a multiple of {BUCKET_WIDTH}",
            r.bucket
        ));
    }
    let unit = |v: f64| (0.0..=1.0).contains(&v);
    if let Some(k) = DimensionKind::ALL
        .iter()
        .find(|k| !unit(r.scores[k.index()]))
    {
        return Err(format!("{k} score {} outside [0, 1]", r.scores[k.index()]));
    }
    if !unit(r.fitness.total) || !unit(r.fitness.inventorial) || !unit(r.fitness.spatial) {
        return Err("fitness outside [0, 1]".into());
    }
    Ok(())
}

/// Generation bucket holding `generation`.
pub fn bucket_of(generation: u64) -> u64 {
    generation / BUCKET_WIDTH * BUCKET_WIDTH
}

/// Append-only log of first sightings, fed by a running engine.
#[derive(Debug, Clone, Default)]
pub struct EraLog {
    seen: HashSet<u64>,
    records: Vec<EraRecord>,
}

impl EraLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `room` if its layout has not been seen. Returns true when new.
    pub fn offer(&mut self, room: &Room, eval: &Evaluation, generation: u64) -> bool {
        let room_hash = room_hash(room);
        if !self.seen.insert(room_hash) {
            return false;
        }
        self.records.push(EraRecord {
            bucket: bucket_of(generation),
            room_hash,
            scores: eval.scores,
            fitness: eval.fitness,
            feasible: eval.feasible,
        });
        true
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[EraRecord] {
        &self.records
    }

    pub fn into_dataset(self) -> EraDataset {
        EraDataset {
            records: self.records,
        }
    }
}

/// Deduplicated records of one run, ordered by generation bucket.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EraDataset {
    records: Vec<EraRecord>,
}

impl EraDataset {
    /// Drops repeated room hashes (first sighting wins) and orders by bucket,
    /// keeping arrival order within a bucket.
    pub fn ingest(records: impl IntoIterator<Item = EraRecord>) -> Result<Self, EraError> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (row, r) in records.into_iter().enumerate() {
            validate(&r).map_err(|reason| EraError::Malformed { row, reason })?;
            if seen.insert(r.room_hash) {
                out.push(r);
            }
        }
        out.sort_by_key(|r| r.bucket);
        Ok(EraDataset { records: out })
    }

    pub fn records(&self) -> &[EraRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn feasible(&self) -> impl Iterator<Item = &EraRecord> {
        self.records.iter().filter(|r| r.feasible)
    }

    /// Mean fitness over feasible records, `None` when there are none.
    pub fn mean_feasible_fitness(&self) -> Option<f64> {
        let (sum, n) = self
            .feasible()
            .fold((0.0, 0usize), |(s, n), r| (s + r.fitness.total, n + 1));
        (n > 0).then(|| sum / n as f64)
    }

    /// Unique rooms first seen per bucket, ascending.
    pub fn novel_per_bucket(&self) -> Vec<(u64, usize)> {
        let mut out: Vec<(u64, usize)> = Vec::new();
        for r in &self.records {
            match out.last_mut() {
                Some((b, n)) if *b == r.bucket => *n += 1,
                _ => out.push((r.bucket, 1)),
            }
        }
        out
    }

    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<(), EraError> {
        let mut w = csv::Writer::from_writer(writer);
        for r in &self.records {
            w.serialize(EraRow::from(r))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: io::Read>(reader: R) -> Result<Self, EraError> {
        let mut rd = csv::Reader::from_reader(reader);
        let mut records = Vec::new();
        for (row, result) in rd.deserialize::<EraRow>().enumerate() {
            records.push(result?.into_record(row + 1)?);
        }
        Self::ingest(records)
    }

    pub fn save(&self, path: &Path) -> Result<(), EraError> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn load(path: &Path) -> Result<Self, EraError> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}


#[cfg(test)]
mod tests {
    use super::test_support::record;
    use super::*;

    #[test]
    fn duplicates_dropped_and_ordered() {
        let a = record(200, 1, [0.5; 7], 0.5, true);
        let b = record(0, 2, [0.5; 7], 0.5, true);
        let dup = record(0, 1, [0.1; 7], 0.1, true);
        let ds = EraDataset::ingest([a, b, dup]).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.records()[0].room_hash, 2);
        assert_eq!(ds.records()[1], a);
        assert!(EraDataset::ingest([]).unwrap().is_empty());
    }

    #[test]
    fn malformed_records_rejected() {
        assert!(EraDataset::ingest([record(150, 1, [0.5; 7], 0.5, true)]).is_err());
        assert!(EraDataset::ingest([record(100, 1, [1.5; 7], 0.5, true)]).is_err());
        let text = "generation_bucket,room_hash,symmetry\n0,zz,0.1\n";
        assert!(EraDataset::read_csv(text.as_bytes()).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let ds = EraDataset::ingest([
            record(0, u64::MAX, [0.25; 7], 0.75, true),
            record(100, 7, [0.0, 1.0, 0.5, 0.5, 0.5, 0.5, 0.5], 0.125, false),
        ])
        .unwrap();
        let mut buf = Vec::new();
        ds.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(
            text.starts_with("generation_bucket,room_hash,symmetry,similarity,nmp,nsp,linearity,")
        );
        assert_eq!(EraDataset::read_csv(&buf[..]).unwrap(), ds);
    }

    #[test]
    fn novel_counts_per_bucket() {
        let ds = EraDataset::ingest([
            record(0, 1, [0.5; 7], 0.5, true),
            record(0, 2, [0.5; 7], 0.5, false),
            record(300, 3, [0.5; 7], 0.5, true),
        ])
        .unwrap();
        assert_eq!(ds.novel_per_bucket(), vec![(0, 2), (300, 1)]);
        assert_eq!(bucket_of(199), 100);
    }
}
