//! Genetic algorithm over trader action sequences.
//!
//! Selection is pure elitism: the top `elites` genes survive unchanged,
//! every other slot is (with probability `crossover_prob`) replaced by a
//! one-segment crossover of two distinct elites, and every action of every
//! non-elite gene then mutates independently with probability
//! `mutation_prob` (a mutated action is redrawn uniformly over all three
//! actions, so it may keep its value).
//!
//! Fitness is deterministic per gene, which has two useful consequences:
//! per-generation best fitness never decreases, and fitness of unchanged
//! genes can be carried over instead of re-simulated.
//!
//! The optimizer's randomness lives in its own stream, fully separate from
//! the market streams, and evaluations are dispatched by member index, so
//! results do not depend on worker count.

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::agents::draw_profiles;
use crate::config::{GaConfig, MarketConfig};
use crate::error::{Error, Result};
use crate::market::{evaluate_gene_with, Action, Gene};
use crate::rng::{self, DOMAIN_GA};

/// A generation of genes with (possibly partial) cached fitness.
#[derive(Debug, Clone)]
pub struct Population {
    pub generation: u32,
    members: Vec<Gene>,
    fitness: Vec<Option<i64>>,
}

impl Population {
    pub fn members(&self) -> &[Gene] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Fitness vector, available once fully evaluated.
    pub fn fitness(&self) -> Option<Vec<i64>> {
        self.fitness.iter().copied().collect()
    }

    pub fn is_evaluated(&self) -> bool {
        self.fitness.iter().all(Option::is_some)
    }

    /// Member indices from best to worst, ties broken by lower index.
    pub fn ranked_indices(&self) -> Result<Vec<usize>> {
        let fitness = self.fitness().ok_or(Error::Unevaluated)?;
        let mut idx: Vec<usize> = (0..self.members.len()).collect();
        idx.sort_by(|&a, &b| fitness[b].cmp(&fitness[a]));
        Ok(idx)
    }

    /// Best member and its fitness (lowest index wins ties).
    pub fn best(&self) -> Result<(&Gene, i64)> {
        let fitness = self.fitness().ok_or(Error::Unevaluated)?;
        let mut best = 0usize;
        for i in 1..fitness.len() {
            if fitness[i] > fitness[best] {
                best = i;
            }
        }
        Ok((&self.members[best], fitness[best]))
    }
}

/// One uniformly random gene.
pub fn random_gene(stream: &mut ChaCha8Rng, n_t: usize) -> Gene {
    let actions = (0..n_t).map(|_| Action::ALL[stream.gen_range(0..3)]).collect();
    Gene::from_actions(actions)
}

/// Generation zero: every action of every gene i.i.d. uniform.
pub fn init_population(ga: &GaConfig, n_t: usize) -> Population {
    let mut stream = ga_stream(ga.ga_seed);
    init_population_from(&mut stream, ga.population, n_t)
}

fn ga_stream(ga_seed: u64) -> ChaCha8Rng {
    rng::stream(ga_seed, DOMAIN_GA, 0)
}

fn init_population_from(stream: &mut ChaCha8Rng, population: u32, n_t: usize) -> Population {
    let members: Vec<Gene> = (0..population).map(|_| random_gene(stream, n_t)).collect();
    let fitness = vec![None; members.len()];
    Population { generation: 0, members, fitness }
}

/// Segment crossover: the child is `g0` with positions `i0..=i1` taken
/// from `g1`.
pub fn crossover(g0: &Gene, g1: &Gene, i0: usize, i1: usize) -> Result<Gene> {
    let len = g0.len();
    if g1.len() != len || i0 > i1 || i1 >= len {
        return Err(Error::CrossoverRange { i0, i1, len });
    }
    let mut child = g0.clone();
    child.actions_mut()[i0..=i1].copy_from_slice(&g1.actions()[i0..=i1]);
    Ok(child)
}

/// Runs a closure on a dedicated pool of `workers` threads, or inline on
/// the global pool when unspecified.
pub fn run_with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        None => f(),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .expect("thread pool construction")
            .install(f),
    }
}

/// Fills in missing fitness values. Results are assembled by member index,
/// so the outcome is identical for any worker count.
pub fn evaluate_population<F>(pop: &mut Population, evaluator: &F, workers: Option<usize>) -> Result<()>
where
    F: Fn(&Gene) -> Result<i64> + Sync,
{
    let members = &pop.members;
    let pending: Vec<usize> =
        (0..members.len()).filter(|&i| pop.fitness[i].is_none()).collect();
    let results: Result<Vec<(usize, i64)>> = run_with_pool(workers, || {
        pending
            .par_iter()
            .map(|&i| evaluator(&members[i]).map(|f| (i, f)))
            .collect()
    });
    for (i, f) in results? {
        pop.fitness[i] = Some(f);
    }
    Ok(())
}

/// Market-impact fitness for a whole population: every gene is scored in
/// its own simulation against the same agent population and seed.
pub fn evaluate_population_market(
    pop: &mut Population,
    market: &MarketConfig,
    seed: u64,
    workers: Option<usize>,
) -> Result<()> {
    let template = draw_profiles(seed, market);
    evaluate_population(pop, &|g: &Gene| evaluate_gene_with(&template, market, g), workers)
}

/// Produces the next generation in place of `pop`.
///
/// The returned population is in ranked order: slots `0..elites` hold the
/// carried-over elites (fitness retained), every other slot holds the
/// ranked previous gene, its crossover replacement, and/or its mutation.
pub fn next_generation(pop: &Population, ga: &GaConfig, stream: &mut ChaCha8Rng) -> Result<Population> {
    ga.validate()?;
    let order = pop.ranked_indices()?;
    let n_ge = ga.elites as usize;
    let mut members: Vec<Gene> = order.iter().map(|&i| pop.members[i].clone()).collect();
    let mut fitness: Vec<Option<i64>> = order.iter().map(|&i| pop.fitness[i]).collect();

    // Crossover phase.
    for slot in n_ge..members.len() {
        if stream.gen::<f64>() < ga.crossover_prob {
            let a = stream.gen_range(0..n_ge);
            let mut b = stream.gen_range(0..n_ge - 1);
            if b >= a {
                b += 1;
            }
            let i0 = stream.gen_range(0..members[slot].len());
            let i1 = stream.gen_range(0..members[slot].len());
            let (i0, i1) = if i0 <= i1 { (i0, i1) } else { (i1, i0) };
            let child = crossover(&members[a], &members[b], i0, i1)?;
            if child != members[slot] {
                fitness[slot] = None;
            }
            members[slot] = child;
        }
    }

    // Mutation phase over every non-elite gene, carried-over ones included.
    for slot in n_ge..members.len() {
        let mut changed = false;
        for pos in 0..members[slot].len() {
            if stream.gen::<f64>() < ga.mutation_prob {
                let action = Action::ALL[stream.gen_range(0..3)];
                if members[slot].actions()[pos] != action {
                    changed = true;
                    members[slot].actions_mut()[pos] = action;
                }
            }
        }
        if changed {
            fitness[slot] = None;
        }
    }

    Ok(Population { generation: pop.generation + 1, members, fitness })
}

/// Per-generation summary, in the account unit of the market (ticks).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationStats {
    pub generation: u32,
    pub best_ticks: i64,
    pub mean_ticks: f64,
    pub median_ticks: f64,
    /// Wall-clock evaluation time; informational only.
    pub elapsed_secs: f64,
}

/// Everything needed to resume a run bit-exactly.
#[derive(Debug, Clone)]
pub struct GaState {
    pub generation: u32,
    pub members: Vec<Gene>,
    pub fitness: Vec<i64>,
    pub stream_word_pos: u128,
    pub history: Vec<GenerationStats>,
}

/// Drives evaluate/inherit cycles over any fitness function and exposes
/// enough state for exact checkpoint/resume.
pub struct GaRunner<F> {
    ga: GaConfig,
    evaluator: F,
    workers: Option<usize>,
    stream: ChaCha8Rng,
    pop: Population,
    history: Vec<GenerationStats>,
}

impl<F> GaRunner<F>
where
    F: Fn(&Gene) -> Result<i64> + Sync,
{
    pub fn new(ga: GaConfig, n_t: usize, workers: Option<usize>, evaluator: F) -> Result<GaRunner<F>> {
        ga.validate()?;
        if n_t == 0 {
            return Err(Error::Config("gene length must be positive".into()));
        }
        let mut stream = ga_stream(ga.ga_seed);
        let pop = init_population_from(&mut stream, ga.population, n_t);
        Ok(GaRunner { ga, evaluator, workers, stream, pop, history: Vec::new() })
    }

    /// Rebuilds a runner from checkpointed state.
    pub fn from_state(
        ga: GaConfig,
        workers: Option<usize>,
        evaluator: F,
        state: GaState,
    ) -> Result<GaRunner<F>> {
        ga.validate()?;
        if state.members.len() != ga.population as usize {
            return Err(Error::Config(format!(
                "checkpoint population {} does not match config population {}",
                state.members.len(),
                ga.population
            )));
        }
        let mut stream = ga_stream(ga.ga_seed);
        stream.set_word_pos(state.stream_word_pos);
        let fitness = state.fitness.into_iter().map(Some).collect();
        let pop = Population { generation: state.generation, members: state.members, fitness };
        Ok(GaRunner { ga, evaluator, workers, stream, pop, history: state.history })
    }

    pub fn generation(&self) -> u32 {
        self.pop.generation
    }

    pub fn population(&self) -> &Population {
        &self.pop
    }

    pub fn history(&self) -> &[GenerationStats] {
        &self.history
    }

    pub fn config(&self) -> &GaConfig {
        &self.ga
    }

    /// Evaluates generation zero if it has not been evaluated yet.
    pub fn ensure_evaluated(&mut self) -> Result<()> {
        if !self.pop.is_evaluated() {
            self.evaluate_current()?;
        } else if self.history.is_empty() {
            self.record_stats(0.0)?;
        }
        Ok(())
    }

    fn evaluate_current(&mut self) -> Result<()> {
        let start = Instant::now();
        evaluate_population(&mut self.pop, &self.evaluator, self.workers)?;
        self.record_stats(start.elapsed().as_secs_f64())
    }

    fn record_stats(&mut self, elapsed_secs: f64) -> Result<()> {
        let fitness = self.pop.fitness().ok_or(Error::Unevaluated)?;
        let best_ticks = *fitness.iter().max().expect("population is non-empty");
        let mean_ticks = fitness.iter().sum::<i64>() as f64 / fitness.len() as f64;
        let mut sorted = fitness;
        sorted.sort_unstable();
        let mid = sorted.len() / 2;
        let median_ticks = if sorted.len() % 2 == 1 {
            sorted[mid] as f64
        } else {
            (sorted[mid - 1] + sorted[mid]) as f64 / 2.0
        };
        self.history.push(GenerationStats {
            generation: self.pop.generation,
            best_ticks,
            mean_ticks,
            median_ticks,
            elapsed_secs,
        });
        Ok(())
    }

    /// One inheritance step: next generation, then evaluation.
    pub fn step(&mut self) -> Result<&GenerationStats> {
        self.ensure_evaluated()?;
        self.pop = next_generation(&self.pop, &self.ga, &mut self.stream)?;
        self.evaluate_current()?;
        Ok(self.history.last().expect("stats recorded"))
    }

    /// Runs until the given generation count is reached.
    pub fn run_to(&mut self, generations: u32) -> Result<()> {
        self.ensure_evaluated()?;
        while self.pop.generation < generations {
            self.step()?;
        }
        Ok(())
    }

    /// Snapshot for checkpointing; call after evaluation.
    pub fn state(&self) -> Result<GaState> {
        let fitness = self.pop.fitness().ok_or(Error::Unevaluated)?;
        Ok(GaState {
            generation: self.pop.generation,
            members: self.pop.members().to_vec(),
            fitness,
            stream_word_pos: self.stream.get_word_pos(),
            history: self.history.clone(),
        })
    }

    pub fn into_outcome(mut self) -> Result<GaOutcome> {
        self.ensure_evaluated()?;
        let (gene, fitness) = self.pop.best()?;
        Ok(GaOutcome {
            best_gene: gene.clone(),
            best_fitness: fitness,
            history: self.history,
            final_population: self.pop,
        })
    }
}

/// Result of a full optimizer run.
#[derive(Debug, Clone)]
pub struct GaOutcome {
    pub best_gene: Gene,
    pub best_fitness: i64,
    pub history: Vec<GenerationStats>,
    pub final_population: Population,
}

/// Full optimizer run against the live market: every fitness is the
/// trader's profit in its own simulation under the given master seed.
pub fn run_ga(
    ga: &GaConfig,
    market: &MarketConfig,
    seed: u64,
    workers: Option<usize>,
) -> Result<GaOutcome> {
    market.validate()?;
    let template = draw_profiles(seed, market);
    let mut runner = GaRunner::new(ga.clone(), market.n_t(), workers, |g: &Gene| {
        evaluate_gene_with(&template, market, g)
    })?;
    runner.run_to(ga.generations)?;
    runner.into_outcome()
}
