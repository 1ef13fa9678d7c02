//! Bisection search for the smallest population size at which an optimizer
//! succeeds reliably.
//!
//! Phase 1 doubles N until a probe of `required_successes` seeded runs all
//! succeed, giving bounds [N/2, N]. Phase 2 probes midpoints until
//! (max − min)/min ≤ tolerance. The result is then re-verified with fresh seeds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eda::{run_eda, Algorithm, EdaConfig};
use crate::error::{Error, Result};
use crate::fitness::ProblemInstance;
use crate::seeds::derive_seed;

pub const DEFAULT_MAX_POPULATION: usize = 1 << 20;

/// Offset separating verification seeds from search seeds.
const VERIFY_STREAM: u64 = 1 << 48;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BisectionConfig {
    pub initial_population: usize,
    pub required_successes: usize,
    pub tolerance: f64,
    pub max_population: usize,
    pub seed: u64,
}

impl BisectionConfig {
    pub fn new(initial_population: usize, required_successes: usize, tolerance: f64, seed: u64) -> Self {
        Self {
            initial_population,
            required_successes,
            tolerance,
            max_population: DEFAULT_MAX_POPULATION,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.initial_population < 4 {
            return Err(Error::Configuration("initial population must be at least 4".into()));
        }
        if self.required_successes == 0 {
            return Err(Error::Configuration("required successes must be at least 1".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::Configuration(format!("tolerance {} outside (0, 1)", self.tolerance)));
        }
        if self.max_population < self.initial_population {
            return Err(Error::Configuration("population cap is below the initial population".into()));
        }
        Ok(())
    }
}

/// One seeded run as seen by the search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRun {
    pub success: bool,
    pub fitness_calls: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub population_size: usize,
    pub reliable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BisectionResult {
    pub population_size: usize,
    pub min_bound: usize,
    pub max_bound: usize,
    pub reliability_runs: usize,
    /// Median fitness calls over the verification runs at `population_size`.
    pub median_fitness_calls: f64,
    pub verification_calls: Vec<u64>,
    /// Largest probed size that failed, if any.
    pub failure_witness: Option<usize>,
    pub probes: Vec<ProbeRecord>,
    pub seed: u64,
}

pub fn median_u64(values: &[u64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_unstable();
    let m = v.len() / 2;
    if v.is_empty() {
        f64::NAN
    } else if v.len() % 2 == 1 {
        v[m] as f64
    } else {
        (v[m - 1] as f64 + v[m] as f64) / 2.0
    }
}

/// Bisection over an arbitrary seeded runner `run(N, seed)`.
pub fn bisect_with<R>(config: &BisectionConfig, run: R) -> Result<BisectionResult>
where
    R: Fn(usize, u64) -> ProbeRun + Sync,
{
    config.validate()?;
    let runs = config.required_successes;
    let seed_for = |n: usize, stream: u64, j: usize| derive_seed(derive_seed(config.seed, n as u64 + stream), j as u64);
    let mut probes = Vec::new();
    let mut failure_witness: Option<usize> = None;
    let mut probe = |n: usize| -> bool {
        let reliable = (0..runs).into_par_iter().all(|j| run(n, seed_for(n, 0, j)).success);
        probes.push(ProbeRecord { population_size: n, reliable });
        if !reliable {
            failure_witness = Some(failure_witness.map_or(n, |w| w.max(n)));
        }
        reliable
    };
    let unreachable = || Error::UnreachableReliability {
        cap: config.max_population,
        required: runs,
    };

    let mut n = config.initial_population;
    while !probe(n) {
        n *= 2;
        if n > config.max_population {
            return Err(unreachable());
        }
    }
    let (mut min, mut max) = (n / 2, n);

    // No evidence exists below the starting size, so a first-probe success ends the search.
    if n != config.initial_population {
        while (max - min) as f64 / min as f64 > config.tolerance {
            let mid = min + (max - min) / 2;
            if mid == min {
                break;
            }
            if probe(mid) {
                max = mid;
            } else {
                min = mid;
            }
        }
    }

    let mut size = max;
    let verification_calls = loop {
        let outcomes: Vec<ProbeRun> = (0..runs)
            .into_par_iter()
            .map(|j| run(size, seed_for(size, VERIFY_STREAM, j)))
            .collect();
        if outcomes.iter().all(|o| o.success) {
            break outcomes.iter().map(|o| o.fitness_calls).collect::<Vec<_>>();
        }
        failure_witness = Some(failure_witness.map_or(size, |w| w.max(size)));
        size = ((size as f64) * (1.0 + config.tolerance)).ceil() as usize;
        max = size;
        if size > config.max_population {
            return Err(unreachable());
        }
    };

    Ok(BisectionResult {
        population_size: size,
        min_bound: min,
        max_bound: max,
        reliability_runs: runs,
        median_fitness_calls: median_u64(&verification_calls),
        verification_calls,
        failure_witness,
        probes,
        seed: config.seed,
    })
}

/// Bisection for an EDA on a benchmark problem. `template` supplies every
/// setting except population size and seed.
pub fn bisect_population(
    problem: &ProblemInstance,
    template: &EdaConfig,
    config: &BisectionConfig,
) -> Result<BisectionResult> {
    let mut check = template.clone();
    check.population_size = config.initial_population;
    check.validate()?;
    bisect_with(config, |n, seed| {
        let mut cfg = template.clone();
        cfg.population_size = n;
        cfg.rng_seed = seed;
        let out = run_eda(problem, &cfg).expect("validated EDA configuration");
        ProbeRun {
            success: out.success,
            fitness_calls: out.fitness_calls,
        }
    })
}

/// Convenience wrapper using default EDA settings for `algorithm`.
pub fn bisect_default(problem: &ProblemInstance, algorithm: Algorithm, config: &BisectionConfig) -> Result<BisectionResult> {
    bisect_population(problem, &EdaConfig::new(algorithm, config.initial_population, 0), config)
}
