//! One-stop evaluation of a room against the current target: fitness, all
//! seven dimension scores, and feasibility.

use serde::{Deserialize, Serialize};

use crate::dimensions::{
    self, DimensionError, DimensionKind, DimensionScores, LeniencyWeights, MicroDistribution,
};
use crate::fitness::{self, FitnessContext, FitnessValue};
use crate::patterns::detect;
use crate::room::Room;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub fitness: FitnessValue,
    pub scores: DimensionScores,
    pub feasible: bool,
}

impl Evaluation {
    pub fn score(&self, kind: DimensionKind) -> f64 {
        self.scores[kind.index()]
    }
}

/// Immutable snapshot of everything evaluation depends on.
#[derive(Debug, Clone)]
pub struct EvalContext {
    fitness: FitnessContext,
    target_micro: MicroDistribution,
    weights: LeniencyWeights,
}

impl EvalContext {
    pub fn new(target: Room, weights: LeniencyWeights) -> Self {
        let fitness = FitnessContext::new(target);
        let target_micro = MicroDistribution::of(fitness.target(), fitness.target_report());
        EvalContext {
            fitness,
            target_micro,
            weights,
        }
    }

    pub fn target(&self) -> &Room {
        self.fitness.target()
    }

    pub fn fitness_context(&self) -> &FitnessContext {
        &self.fitness
    }

    pub fn target_distribution(&self) -> &MicroDistribution {
        &self.target_micro
    }

    pub fn weights(&self) -> &LeniencyWeights {
        &self.weights
    }

    pub fn evaluate(&self, room: &Room) -> Result<Evaluation, DimensionError> {
        let report = detect(room);
        let micro = MicroDistribution::of(room, &report);
        let safety = fitness::door_safety(room);
        let mut scores = [0.0; 7];
        scores[DimensionKind::Symmetry.index()] = dimensions::symmetry(room);
        scores[DimensionKind::Similarity.index()] = dimensions::similarity(room, self.target())?;
        scores[DimensionKind::Nmp.index()] = dimensions::nmp(&report, room);
        scores[DimensionKind::Nsp.index()] = dimensions::nsp(&report, room);
        scores[DimensionKind::Linearity.index()] = dimensions::linearity(&report, room);
        scores[DimensionKind::InnerSimilarity.index()] =
            dimensions::inner_similarity(&micro, &self.target_micro);
        scores[DimensionKind::Leniency.index()] =
            dimensions::leniency(room, &micro, safety, &self.weights);
        Ok(Evaluation {
            fitness: fitness::evaluate(room, &report, &self.fitness),
            scores,
            feasible: room.is_feasible(),
        })
    }
}
