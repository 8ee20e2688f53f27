//! The coevolution main loop.
//!
//! Random-number consumption is fixed so runs are reproducible from the
//! seed alone. One ChaCha8 stream per run, seeded with `seed_from_u64`:
//!
//! 1. initialization draws `n` coordinates per member, member by member;
//! 2. each generation draws `N` mating pairs (see
//!    [`restricted_mating`](crate::coevolution::restricted_mating)), then,
//!    offspring by offspring, the second difference endpoint, the crossover
//!    draws and the polynomial-mutation draws.
//!
//! Selection and the archive update consume no randomness.

use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coevolution::{restricted_mating, update_archive, ArchiveNormalization, MatingContext};
use crate::model::{evaluate, Individual, Population, ProblemDefinition, DEFAULT_EPSILON};
use crate::ranking::environmental_selection;
use crate::variation::{generate_offspring, VariationParams};
use crate::{Error, Result};

/// Which main population the archive update sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArchiveSource {
    /// `P_t ∪ A_t ∪ Q_t`, with the population from before selection.
    #[default]
    PreSelection,
    /// `P_{t+1} ∪ A_t ∪ Q_t`.
    PostSelection,
}

/// Parameters of a single run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub population_size: usize,
    /// Maximum number of function evaluations, initialization included.
    pub budget: u64,
    pub f: f64,
    pub cr: f64,
    /// Per-variable mutation probability; `None` means `1 / n`.
    pub pm: Option<f64>,
    pub eta_m: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub force_inherit: bool,
    pub archive_normalization: ArchiveNormalization,
    pub archive_source: ArchiveSource,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            population_size: 100,
            budget: 20_000,
            f: 0.5,
            cr: 1.0,
            pm: None,
            eta_m: 20.0,
            epsilon: DEFAULT_EPSILON,
            seed: 0,
            force_inherit: true,
            archive_normalization: ArchiveNormalization::Reversed,
            archive_source: ArchiveSource::PreSelection,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 4 {
            return Err(Error::InvalidConfig(alloc::format!(
                "population_size = {} must be at least 4",
                self.population_size
            )));
        }
        if self.budget < self.population_size as u64 {
            return Err(Error::InvalidConfig(alloc::format!(
                "budget = {} is smaller than population_size = {}",
                self.budget,
                self.population_size
            )));
        }
        // Zero is allowed so equality constraints can be made exact.
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(alloc::format!(
                "epsilon = {} must be finite and non-negative",
                self.epsilon
            )));
        }
        self.variation_params(1).validate()
    }

    pub fn variation_params(&self, dimension: usize) -> VariationParams {
        VariationParams {
            f: self.f,
            cr: self.cr,
            pm: self.pm.unwrap_or(1.0 / dimension as f64),
            eta_m: self.eta_m,
            force_inherit: self.force_inherit,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AlgorithmState {
    pub generation: u64,
    pub population: Population,
    pub archive: Vec<Individual>,
    pub fe_used: u64,
    rng: ChaCha8Rng,
}

impl AlgorithmState {
    /// Whether one more generation fits in the budget.
    pub fn can_step(&self, config: &RunConfig) -> bool {
        self.fe_used + config.population_size as u64 <= config.budget
    }
}

/// Samples and evaluates the initial population; the archive starts empty.
pub fn initialize(config: &RunConfig, problem: &ProblemDefinition) -> Result<AlgorithmState> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut fe_used = 0;
    let mut population = Population::new(config.population_size);
    for _ in 0..config.population_size {
        let x = sample_uniform(problem, &mut rng);
        population
            .members
            .push(evaluate(problem, &x, config.epsilon, &mut fe_used)?);
    }
    Ok(AlgorithmState {
        generation: 0,
        population,
        archive: Vec::new(),
        fe_used,
        rng,
    })
}

/// One generation: mating, offspring, environmental selection, archive
/// update.
pub fn step(
    state: &mut AlgorithmState,
    config: &RunConfig,
    problem: &ProblemDefinition,
) -> Result<()> {
    if !state.can_step(config) {
        return Err(Error::BudgetExhausted {
            used: state.fe_used,
            budget: config.budget,
        });
    }
    let n = config.population_size;
    let params = config.variation_params(problem.n());
    let population = &state.population.members;
    let archive = &state.archive;

    let context = MatingContext::prepare(population, archive, n);
    let pairs: Vec<(usize, usize)> = (0..n)
        .map(|_| restricted_mating(population, archive, n, &context, &mut state.rng))
        .collect();
    let pool: Vec<&Individual> = population.iter().chain(archive).collect();
    let offspring = generate_offspring(
        &pairs,
        &pool,
        &params,
        problem,
        config.epsilon,
        &mut state.rng,
        &mut state.fe_used,
    )?;

    let parents = core::mem::take(&mut state.population.members);
    let (next_population, next_archive) = match config.archive_source {
        ArchiveSource::PreSelection => {
            let archive = update_archive(
                &parents,
                &state.archive,
                &offspring,
                n,
                config.archive_normalization,
            );
            (environmental_selection(parents, offspring, n), archive)
        }
        ArchiveSource::PostSelection => {
            let next = environmental_selection(parents, offspring.clone(), n);
            let archive =
                update_archive(&next, &state.archive, &offspring, n, config.archive_normalization);
            (next, archive)
        }
    };
    state.population.members = next_population;
    state.archive = next_archive;
    state.generation += 1;
    Ok(())
}

/// Final state of a completed run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub population: Vec<Individual>,
    pub archive: Vec<Individual>,
    pub fe_used: u64,
    pub generations: u64,
}

/// Runs generations until the next one would overrun the budget.
pub fn run(config: &RunConfig, problem: &ProblemDefinition) -> Result<RunOutcome> {
    let mut state = initialize(config, problem)?;
    while state.can_step(config) {
        step(&mut state, config, problem)?;
    }
    Ok(RunOutcome {
        population: state.population.members,
        archive: state.archive,
        fe_used: state.fe_used,
        generations: state.generation,
    })
}

/// `budget` independent uniform samples, all returned. The baseline that
/// convergence is judged against.
pub fn random_search(
    problem: &ProblemDefinition,
    budget: u64,
    epsilon: f64,
    seed: u64,
) -> Result<Vec<Individual>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fe = 0;
    (0..budget)
        .map(|_| {
            let x = sample_uniform(problem, &mut rng);
            evaluate(problem, &x, epsilon, &mut fe)
        })
        .collect()
}

fn sample_uniform<R: Rng + ?Sized>(problem: &ProblemDefinition, rng: &mut R) -> Vec<f64> {
    problem
        .lower()
        .iter()
        .zip(problem.upper())
        .map(|(&lo, &hi)| lo + (hi - lo) * rng.gen::<f64>())
        .collect()
}
