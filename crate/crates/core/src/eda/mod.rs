//! ECGA and BOA optimizers with exact fitness-call accounting.
//!
//! A run evaluates a random population, then repeats: select, learn a model,
//! sample offspring for the worst half, evaluate them. It stops when a global
//! optimum appears, when `max_generations` is reached, or when every individual
//! is identical.

pub mod boa;
pub mod ecga;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitness::{BitString, ProblemInstance, PseudoBoolean};
use crate::seeds::rng_for;

pub use boa::{bic_score, build_boa_network, sample_boa, BoaNetwork};
pub use ecga::{build_ecga_model, sample_ecga, EcgaModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Ecga,
    Boa,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ecga => "ecga",
            Algorithm::Boa => "boa",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ecga" => Ok(Algorithm::Ecga),
            "boa" => Ok(Algorithm::Boa),
            other => Err(Error::Parse(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Selection {
    /// Tournaments without replacement; each individual enters `size` rounds.
    Tournament(usize),
    /// Keep the best fraction.
    Truncation(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdaConfig {
    pub algorithm: Algorithm,
    pub population_size: usize,
    pub selection: Selection,
    pub max_generations: usize,
    pub max_parents: usize,
    pub rng_seed: u64,
}

impl EdaConfig {
    pub const DEFAULT_TOURNAMENT: usize = 4;
    pub const DEFAULT_MAX_GENERATIONS: usize = 200;
    pub const DEFAULT_MAX_PARENTS: usize = 10;

    pub fn new(algorithm: Algorithm, population_size: usize, rng_seed: u64) -> Self {
        Self {
            algorithm,
            population_size,
            selection: Selection::Tournament(Self::DEFAULT_TOURNAMENT),
            max_generations: Self::DEFAULT_MAX_GENERATIONS,
            max_parents: Self::DEFAULT_MAX_PARENTS,
            rng_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 4 {
            return Err(Error::Configuration(format!(
                "population size {} is below the minimum of 4",
                self.population_size
            )));
        }
        if self.max_generations == 0 {
            return Err(Error::Configuration("max_generations must be positive".into()));
        }
        match self.selection {
            Selection::Tournament(s) if s < 2 => {
                Err(Error::Configuration("tournament size must be at least 2".into()))
            }
            Selection::Truncation(f) if !(f > 0.0 && f <= 1.0) => {
                Err(Error::Configuration(format!("truncation fraction {f} outside (0, 1]")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub success: bool,
    pub fitness_calls: u64,
    pub generations_used: usize,
    pub best_fitness: f64,
    pub seed: u64,
    pub population_size: usize,
}

/// Indices of `count` tournament winners. Each round shuffles the population
/// and splits it into disjoint tournaments, so sampling is without replacement
/// within a round.
pub fn tournament_select(fitness: &[f64], size: usize, count: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fitness.len()).collect();
    let mut winners = Vec::with_capacity(count);
    while winners.len() < count {
        order.shuffle(rng);
        for group in order.chunks(size) {
            let best = group
                .iter()
                .copied()
                .reduce(|a, b| if fitness[b] > fitness[a] { b } else { a })
                .expect("chunks are non-empty");
            winners.push(best);
            if winners.len() == count {
                break;
            }
        }
    }
    winners
}

fn select(fitness: &[f64], selection: Selection, rng: &mut impl Rng) -> Vec<usize> {
    match selection {
        Selection::Tournament(size) => tournament_select(fitness, size, fitness.len(), rng),
        Selection::Truncation(fraction) => {
            crate::metrics::truncation_indices(fitness, fraction).expect("validated configuration")
        }
    }
}

enum Model {
    Ecga(EcgaModel),
    Boa(BoaNetwork),
}

impl Model {
    fn learn(algorithm: Algorithm, selected: &[BitString], n: usize, max_parents: usize) -> Self {
        match algorithm {
            Algorithm::Ecga => Model::Ecga(build_ecga_model(selected, n)),
            Algorithm::Boa => Model::Boa(build_boa_network(selected, n, max_parents)),
        }
    }

    fn sample(&self, count: usize, rng: &mut ChaCha8Rng) -> Vec<BitString> {
        match self {
            Model::Ecga(m) => sample_ecga(m, count, rng),
            Model::Boa(b) => sample_boa(b, count, rng),
        }
    }
}

fn converged(population: &[BitString]) -> bool {
    population.windows(2).all(|w| w[0] == w[1])
}

/// Runs the configured EDA until `problem`'s maximum is reached.
pub fn run_eda(problem: &ProblemInstance, config: &EdaConfig) -> Result<RunOutcome> {
    run_eda_on(problem, problem.f_max(), config)
}

/// Runs the configured EDA on any objective; success means reaching `target`.
pub fn run_eda_on<F: PseudoBoolean + ?Sized>(f: &F, target: f64, config: &EdaConfig) -> Result<RunOutcome> {
    config.validate()?;
    let n = f.num_vars();
    let size = config.population_size;
    let mut rng = rng_for(config.rng_seed, 0);
    let mut calls: u64 = 0;
    let mut evaluate = |x: &BitString| {
        calls += 1;
        f.fitness(x.as_slice())
    };

    let mut population: Vec<BitString> = (0..size).map(|_| BitString::random(n, &mut rng)).collect();
    let mut fitness: Vec<f64> = population.iter().map(&mut evaluate).collect();
    let mut best = fitness.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut generations = 0;

    let keep = size.div_ceil(2);
    while best < target && generations < config.max_generations && !converged(&population) {
        let chosen = select(&fitness, config.selection, &mut rng);
        let selected: Vec<BitString> = chosen.iter().map(|&i| population[i].clone()).collect();
        let model = Model::learn(config.algorithm, &selected, n, config.max_parents);
        let offspring = model.sample(size - keep, &mut rng);

        // Elitist replacement: offspring overwrite the worst half.
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]));
        for (slot, child) in order[keep..].iter().zip(offspring) {
            fitness[*slot] = evaluate(&child);
            best = best.max(fitness[*slot]);
            population[*slot] = child;
        }
        generations += 1;
    }

    Ok(RunOutcome {
        success: best >= target,
        fitness_calls: calls,
        generations_used: generations,
        best_fitness: best,
        seed: config.rng_seed,
        population_size: size,
    })
}
