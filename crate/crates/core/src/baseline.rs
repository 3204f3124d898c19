//! Archive-free objective baseline: the same operators and constraint
//! handling as the engine, but a single feasible and a single infeasible
//! population under truncation survival.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::EngineConfig;
use crate::engine::{
    crossover, evaluate_batch, mutable_indices, mutate, EngineError, Individual, Population,
};
use crate::era::EraLog;
use crate::eval::EvalContext;
use crate::room::Room;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenerationLog {
    pub generation: u64,
    /// Survivors never seen among earlier survivors.
    pub novel: usize,
    pub best_feasible: Option<f64>,
}

pub struct BaselineRun {
    pub era: EraLog,
    pub log: Vec<GenerationLog>,
    pub feasible: Vec<Individual>,
    pub infeasible: Vec<Individual>,
}

impl BaselineRun {
    pub fn best(&self) -> Option<&Individual> {
        self.feasible.first()
    }
}

/// Offspring bred per population and generation.
pub fn offspring_per_generation(config: &EngineConfig) -> usize {
    (config.pop_size / 10).max(2)
}

fn tournament<'a>(pop: &'a [Individual], size: usize, rng: &mut ChaCha8Rng) -> &'a Individual {
    // populations are sorted best-first, so the lowest index wins
    (0..size)
        .map(|_| rng.random_range(0..pop.len()))
        .min()
        .map(|i| &pop[i])
        .expect("non-empty")
}

fn survive(pop: &mut Vec<Individual>, cap: usize) {
    // stable: incumbents stay ahead of equally fit newcomers
    pop.sort_by(|a, b| b.fitness().total_cmp(&a.fitness()));
    pop.truncate(cap);
}

/// Logs the survivors of one generation; returns how many were new.
fn record(era: &mut EraLog, pops: &[Vec<Individual>; 2], generation: u64) -> usize {
    pops.iter()
        .flatten()
        .filter(|ind| era.offer(&ind.room, &ind.eval, generation))
        .count()
}

pub fn run_objective_baseline(
    config: &EngineConfig,
    target: Room,
    generations: u64,
) -> Result<BaselineRun, EngineError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let ctx = EvalContext::new(target.clone(), config.leniency_weights);
    let mutable = mutable_indices(&target);
    let mut era = EraLog::new();
    let mut log = Vec::new();

    let init: Vec<Room> = (0..config.pop_size)
        .map(|_| {
            let mut r = target.clone();
            mutate(&mut r, &mutable, &mut rng);
            r
        })
        .collect();
    let mut pops: [Vec<Individual>; 2] = [Vec::new(), Vec::new()];
    for ind in evaluate_batch(&ctx, init, 0) {
        pops[(Population::of(&ind.eval) == Population::Infeasible) as usize].push(ind);
    }
    for p in &mut pops {
        survive(p, config.pop_size);
    }
    log.push(GenerationLog {
        generation: 0,
        novel: record(&mut era, &pops, 0),
        best_feasible: pops[0].first().map(Individual::fitness),
    });

    let brood = offspring_per_generation(config);
    for generation in 1..=generations {
        let mut children = Vec::new();
        for pop in &pops {
            if pop.is_empty() {
                continue;
            }
            for _ in 0..brood {
                let a = tournament(pop, config.tournament_size, &mut rng);
                let b = tournament(pop, config.tournament_size, &mut rng);
                let mut child = crossover(&a.room, &b.room, &target, &mut rng);
                if rng.random_bool(config.mutation_rate) {
                    mutate(&mut child, &mutable, &mut rng);
                }
                children.push(child);
            }
        }
        for ind in evaluate_batch(&ctx, children, 0) {
            pops[(Population::of(&ind.eval) == Population::Infeasible) as usize].push(ind);
        }
        for p in &mut pops {
            survive(p, config.pop_size);
        }
        let novel = record(&mut era, &pops, generation);
        log.push(GenerationLog {
            generation,
            novel,
            best_feasible: pops[0].first().map(Individual::fitness),
        });
    }
    let [feasible, infeasible] = pops;
    Ok(BaselineRun {
        era,
        log,
        feasible,
        infeasible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::targets::basic_room;

    #[test]
    fn partition_and_caps_hold() {
        let cfg = EngineConfig {
            pop_size: 100,
            rng_seed: 4,
            ..Default::default()
        };
        let run = run_objective_baseline(&cfg, basic_room(), 30).unwrap();
        assert!(run.feasible.len() <= 100 && run.infeasible.len() <= 100);
        assert!(run.feasible.iter().all(|i| i.room.is_feasible()));
        assert!(run.infeasible.iter().all(|i| !i.room.is_feasible()));
        assert_eq!(run.log.len(), 31);
        let novel: usize = run.log.iter().map(|g| g.novel).sum();
        assert_eq!(novel, run.era.len());
        // best feasible fitness never drops under truncation survival
        let best: Vec<f64> = run.log.iter().filter_map(|g| g.best_feasible).collect();
        assert!(best.windows(2).all(|w| w[1] >= w[0]));
    }
}
