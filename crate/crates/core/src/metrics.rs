//! Problem-difficulty metrics computed from a dependent and an independent
//! variable pair.
//!
//! * `M1 = (|α_D| - |α_I|) / f_max` from estimated Walsh coefficients.
//! * `M2 = I(X;Y) - I(X;Z)` on survivors of one truncation-selection step.
//! * `M3 = 1 - H(X,Y) / H(X,Z)` on the same survivors.
//! * FDC, the correlation of fitness with Hamming distance to the nearest
//!   global optimum.
//!
//! Each repetition draws a fresh uniform sample from its own derived seed.
//! M1 and FDC use the sample as drawn; M2 and M3 use the selected part.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitness::{BitString, CanonicalPairs, ProblemInstance, PseudoBoolean};
use crate::seeds::{derive_seed, rng_for};
use crate::walsh::{estimate_coefficient, CoefficientMethod};

pub const DEFAULT_CONFUSION_TRIALS: usize = 64;

/// Walsh coefficient estimator used for M1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Estimator {
    Exact,
    Confusion { trials: usize },
    Population,
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Estimator::Exact => f.write_str("exact"),
            Estimator::Confusion { trials } if *trials == DEFAULT_CONFUSION_TRIALS => {
                f.write_str("confusion")
            }
            Estimator::Confusion { trials } => write!(f, "confusion:{trials}"),
            Estimator::Population => f.write_str("population"),
        }
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.split_once(':') {
            None => match s.as_str() {
                "exact" => Ok(Estimator::Exact),
                "confusion" => Ok(Estimator::Confusion {
                    trials: DEFAULT_CONFUSION_TRIALS,
                }),
                "population" => Ok(Estimator::Population),
                other => Err(Error::Parse(format!("unknown estimator `{other}`"))),
            },
            Some(("confusion", trials)) => trials
                .parse()
                .ok()
                .filter(|&t| t > 0)
                .map(|trials| Estimator::Confusion { trials })
                .ok_or_else(|| Error::Parse(format!("bad confusion trial count `{trials}`"))),
            Some(_) => Err(Error::Parse(format!("unknown estimator `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub sample_size: usize,
    pub selection_fraction: f64,
    pub repetitions: usize,
    pub estimator: Estimator,
    pub rng_seed: u64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            sample_size: 5000,
            selection_fraction: 0.5,
            repetitions: 50,
            estimator: Estimator::Population,
            rng_seed: 0,
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::Configuration("repetitions must be at least 1".into()));
        }
        if !(self.selection_fraction > 0.0 && self.selection_fraction <= 1.0) {
            return Err(Error::Configuration(format!(
                "selection fraction {} outside (0, 1]",
                self.selection_fraction
            )));
        }
        if survivors(self.sample_size, self.selection_fraction) < 2 {
            return Err(Error::Configuration(format!(
                "sample size {} with fraction {} leaves fewer than 2 survivors",
                self.sample_size, self.selection_fraction
            )));
        }
        if let Estimator::Confusion { trials: 0 } = self.estimator {
            return Err(Error::Configuration("confusion estimator needs trials >= 1".into()));
        }
        Ok(())
    }
}

fn survivors(len: usize, fraction: f64) -> usize {
    // Guard against `2/3 * 3 = 2.0000000000000004`.
    (((len as f64) * fraction) - 1e-9).ceil().max(0.0) as usize
}

/// Indices of the `ceil(fraction * N)` fittest individuals, best first; ties
/// keep input order.
pub fn truncation_indices(fitnesses: &[f64], fraction: f64) -> Result<Vec<usize>> {
    if fitnesses.is_empty() {
        return Err(Error::Argument("cannot select from an empty population".into()));
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Argument(format!("selection fraction {fraction} outside (0, 1]")));
    }
    let keep = survivors(fitnesses.len(), fraction).max(1);
    let mut order: Vec<usize> = (0..fitnesses.len()).collect();
    order.sort_by(|&a, &b| fitnesses[b].total_cmp(&fitnesses[a]));
    order.truncate(keep);
    Ok(order)
}

pub fn truncation_select<T: Clone>(population: &[T], fitnesses: &[f64], fraction: f64) -> Result<Vec<T>> {
    if population.len() != fitnesses.len() {
        return Err(Error::Dimension {
            expected: population.len(),
            actual: fitnesses.len(),
        });
    }
    Ok(truncation_indices(fitnesses, fraction)?
        .into_iter()
        .map(|i| population[i].clone())
        .collect())
}

fn entropy_of_counts(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum()
}

/// Plug-in entropy of variable `i`, in bits.
pub fn marginal_entropy(samples: &[BitString], i: usize) -> f64 {
    let mut counts = [0usize; 2];
    for x in samples {
        counts[x.get(i) as usize] += 1;
    }
    entropy_of_counts(&counts)
}

/// Plug-in joint entropy of `(x_i, x_j)`, in bits.
pub fn joint_entropy(samples: &[BitString], i: usize, j: usize) -> f64 {
    let mut counts = [0usize; 4];
    for x in samples {
        counts[(x.get(i) as usize) << 1 | x.get(j) as usize] += 1;
    }
    entropy_of_counts(&counts)
}

/// `H(X_i) + H(X_j) - H(X_i, X_j)`, in bits.
pub fn mutual_information(samples: &[BitString], i: usize, j: usize) -> f64 {
    let mi = marginal_entropy(samples, i) + marginal_entropy(samples, j) - joint_entropy(samples, i, j);
    // The plug-in identity is non-negative; clip rounding noise.
    mi.max(0.0)
}

/// Population-moment correlation used by FDC.
pub fn fitness_distance_correlation(fitness: &[f64], distance: &[f64]) -> Result<f64> {
    if fitness.len() != distance.len() {
        return Err(Error::Dimension {
            expected: fitness.len(),
            actual: distance.len(),
        });
    }
    if fitness.len() < 2 {
        return Err(Error::UndefinedCorrelation("need at least two samples".into()));
    }
    let n = fitness.len() as f64;
    let mf = fitness.iter().sum::<f64>() / n;
    let md = distance.iter().sum::<f64>() / n;
    let (mut cov, mut vf, mut vd) = (0.0, 0.0, 0.0);
    for (&f, &d) in fitness.iter().zip(distance) {
        cov += (f - mf) * (d - md);
        vf += (f - mf) * (f - mf);
        vd += (d - md) * (d - md);
    }
    if vf <= 0.0 || vd <= 0.0 {
        return Err(Error::UndefinedCorrelation(
            "zero variance in fitness or distance".into(),
        ));
    }
    Ok((cov / (vf.sqrt() * vd.sqrt())).clamp(-1.0, 1.0))
}

fn nearest_optimum_distance(problem: &ProblemInstance, x: &BitString) -> f64 {
    problem
        .global_optima()
        .iter()
        .map(|o| o.hamming(x))
        .min()
        .unwrap_or(0) as f64
}

/// One repetition's uniform sample and its fitness.
pub fn repetition_sample(problem: &ProblemInstance, config: &MetricConfig, rep: usize) -> (Vec<BitString>, Vec<f64>) {
    let mut rng = rng_for(config.rng_seed, rep as u64);
    let samples: Vec<BitString> = (0..config.sample_size)
        .map(|_| BitString::random(problem.n(), &mut rng))
        .collect();
    let fitness = samples.iter().map(|x| problem.fitness(x.as_slice())).collect();
    (samples, fitness)
}

fn pair_vec(p: (usize, usize)) -> [usize; 2] {
    [p.0, p.1]
}

fn m1_from(problem: &ProblemInstance, pairs: &CanonicalPairs, mut coeff: impl FnMut(&[usize]) -> Result<f64>) -> Result<f64> {
    let d = coeff(&pair_vec(pairs.dependent))?;
    let i = coeff(&pair_vec(pairs.independent))?;
    Ok((d.abs() - i.abs()) / problem.f_max())
}

fn m1_exact(problem: &ProblemInstance, pairs: &CanonicalPairs) -> Result<f64> {
    m1_from(problem, pairs, |s| estimate_coefficient(problem, s, CoefficientMethod::Exact))
}

fn m1_repetition(
    problem: &ProblemInstance,
    config: &MetricConfig,
    pairs: &CanonicalPairs,
    rep: usize,
    sample: &(Vec<BitString>, Vec<f64>),
) -> Result<f64> {
    match config.estimator {
        Estimator::Exact => m1_exact(problem, pairs),
        Estimator::Population => m1_from(problem, pairs, |s| {
            estimate_coefficient(
                problem,
                s,
                CoefficientMethod::Population {
                    samples: &sample.0,
                    fitness: &sample.1,
                },
            )
        }),
        Estimator::Confusion { trials } => {
            let mut rng = rng_for(derive_seed(config.rng_seed, rep as u64), 1);
            m1_from(problem, pairs, |s| {
                estimate_coefficient(problem, s, CoefficientMethod::Confusion { trials, rng: &mut rng })
            })
        }
    }
}

fn selected_samples(config: &MetricConfig, sample: &(Vec<BitString>, Vec<f64>)) -> Result<Vec<BitString>> {
    truncation_select(&sample.0, &sample.1, config.selection_fraction)
}

fn m2_of(survivors: &[BitString], pairs: &CanonicalPairs) -> f64 {
    let (x, y) = pairs.dependent;
    let (x2, z) = pairs.independent;
    mutual_information(survivors, x, y) - mutual_information(survivors, x2, z)
}

/// `None` when `H(X,Z) = 0`.
fn m3_of(survivors: &[BitString], pairs: &CanonicalPairs) -> Option<f64> {
    let (x, y) = pairs.dependent;
    let (x2, z) = pairs.independent;
    let hxz = joint_entropy(survivors, x2, z);
    (hxz > 0.0).then(|| 1.0 - joint_entropy(survivors, x, y) / hxz)
}

fn fdc_of(problem: &ProblemInstance, sample: &(Vec<BitString>, Vec<f64>)) -> Result<f64> {
    let distances: Vec<f64> = sample.0.iter().map(|x| nearest_optimum_distance(problem, x)).collect();
    fitness_distance_correlation(&sample.1, &distances)
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn per_repetition<T, F>(config: &MetricConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    (0..config.repetitions).into_par_iter().map(f).collect()
}

/// Mean M1 across repetitions.
pub fn metric_m1(problem: &ProblemInstance, config: &MetricConfig) -> Result<f64> {
    config.validate()?;
    let pairs = problem.canonical_pairs()?;
    if config.estimator == Estimator::Exact {
        return m1_exact(problem, &pairs);
    }
    let values = per_repetition(config, |rep| {
        let sample = repetition_sample(problem, config, rep);
        m1_repetition(problem, config, &pairs, rep, &sample)
    })?;
    Ok(mean(&values))
}

pub fn metric_m2(problem: &ProblemInstance, config: &MetricConfig) -> Result<f64> {
    config.validate()?;
    let pairs = problem.canonical_pairs()?;
    let values = per_repetition(config, |rep| {
        let sample = repetition_sample(problem, config, rep);
        Ok(m2_of(&selected_samples(config, &sample)?, &pairs))
    })?;
    Ok(mean(&values))
}

/// Mean M3 over repetitions with `H(X,Z) > 0`, and the number discarded.
pub fn metric_m3(problem: &ProblemInstance, config: &MetricConfig) -> Result<(f64, usize)> {
    config.validate()?;
    let pairs = problem.canonical_pairs()?;
    let values = per_repetition(config, |rep| {
        let sample = repetition_sample(problem, config, rep);
        Ok(m3_of(&selected_samples(config, &sample)?, &pairs))
    })?;
    let kept: Vec<f64> = values.iter().flatten().copied().collect();
    if kept.is_empty() {
        return Err(Error::DegenerateDistribution(
            "H(X,Z) is zero in every repetition".into(),
        ));
    }
    Ok((mean(&kept), values.len() - kept.len()))
}

pub fn metric_fdc(problem: &ProblemInstance, config: &MetricConfig) -> Result<f64> {
    config.validate()?;
    let values = per_repetition(config, |rep| fdc_of(problem, &repetition_sample(problem, config, rep)))?;
    Ok(mean(&values))
}

/// All four metrics with their per-repetition values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub problem: String,
    /// `None` when the problem has no independent pair.
    pub m1: Option<f64>,
    pub m2: Option<f64>,
    pub m3: Option<f64>,
    pub fdc: Option<f64>,
    pub m1_per_rep: Vec<f64>,
    pub m2_per_rep: Vec<f64>,
    pub m3_per_rep: Vec<f64>,
    pub fdc_per_rep: Vec<f64>,
    pub m3_discarded: usize,
    pub config: MetricConfig,
}

struct Repetition {
    m1: Option<f64>,
    m2: Option<f64>,
    m3: Option<f64>,
    fdc: Option<f64>,
}

/// Computes M1, M2, M3 and FDC in one pass per repetition. Metrics that are
/// undefined for the problem (no independent pair, zero variance, degenerate
/// entropy) are reported as `None`; other failures are returned as errors.
pub fn compute_metrics(problem: &ProblemInstance, config: &MetricConfig) -> Result<MetricReport> {
    config.validate()?;
    let pairs = match problem.canonical_pairs() {
        Ok(p) => Some(p),
        Err(Error::NoIndependentPair(_)) => None,
        Err(e) => return Err(e),
    };
    let exact_m1 = match (&pairs, config.estimator) {
        (Some(p), Estimator::Exact) => Some(m1_exact(problem, p)?),
        _ => None,
    };

    let reps = per_repetition(config, |rep| {
        let sample = repetition_sample(problem, config, rep);
        let fdc = match fdc_of(problem, &sample) {
            Ok(v) => Some(v),
            Err(Error::UndefinedCorrelation(_)) => None,
            Err(e) => return Err(e),
        };
        let Some(pairs) = &pairs else {
            return Ok(Repetition { m1: None, m2: None, m3: None, fdc });
        };
        let m1 = match exact_m1 {
            Some(v) => v,
            None => m1_repetition(problem, config, pairs, rep, &sample)?,
        };
        let survivors = selected_samples(config, &sample)?;
        Ok(Repetition {
            m1: Some(m1),
            m2: Some(m2_of(&survivors, pairs)),
            m3: m3_of(&survivors, pairs),
            fdc,
        })
    })?;

    let collect = |pick: fn(&Repetition) -> Option<f64>| -> Vec<f64> { reps.iter().filter_map(pick).collect() };
    let m1_per_rep = collect(|r| r.m1);
    let m2_per_rep = collect(|r| r.m2);
    let m3_per_rep = collect(|r| r.m3);
    let fdc_per_rep = collect(|r| r.fdc);
    let all_or_none = |v: &[f64]| (v.len() == reps.len()).then(|| mean(v));

    Ok(MetricReport {
        problem: problem.spec().to_string(),
        m1: all_or_none(&m1_per_rep),
        m2: all_or_none(&m2_per_rep),
        m3: (!m3_per_rep.is_empty()).then(|| mean(&m3_per_rep)),
        fdc: all_or_none(&fdc_per_rep),
        m3_discarded: if pairs.is_some() { reps.len() - m3_per_rep.len() } else { 0 },
        m1_per_rep,
        m2_per_rep,
        m3_per_rep,
        fdc_per_rep,
        config: config.clone(),
    })
}
