//! End-to-end pipeline: expand a problem matrix, size populations by
//! bisection, run seeded EDAs, compute metrics, and analyze the join.
//!
//! Configuration is line-oriented `key = value` text. Lists use brackets,
//! `#` starts a comment, and `seeds` also accepts a half-open range `a..b`.
//!
//! ```text
//! families   = [trap, msp2]
//! algorithms = [ecga]
//! dims_ecga  = [12, 15]
//! k          = [3]
//! seeds      = 0..10
//! output     = results/desk
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eda::{run_eda, Algorithm, EdaConfig};
use crate::error::{Error, Result};
use crate::fitness::{default_msp3_k2, Family, ProblemInstance, ProblemSpec};
use crate::metrics::{compute_metrics, Estimator, MetricConfig};
use crate::records::{write_metrics_csv, write_runs_csv, MetricRow, RunRecord};
use crate::seeds::{derive_seed, hash_str};
use crate::sizing::{bisect_population, BisectionConfig, BisectionResult, DEFAULT_MAX_POPULATION};
use crate::stats::{analyze, build_analysis_table, scatter_rows, write_scatter_csv, Analysis};

pub const THREADS_ENV: &str = "WALSH_HARDNESS_THREADS";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub families: Vec<Family>,
    pub algorithms: Vec<Algorithm>,
    /// Problem lengths per algorithm.
    pub dims: BTreeMap<Algorithm, Vec<usize>>,
    pub ks: Vec<usize>,
    pub alphas: Vec<f64>,
    /// Explicit problems added to every algorithm's matrix.
    pub problems: Vec<ProblemSpec>,
    pub initial_population: usize,
    pub required_successes: usize,
    pub tolerance: f64,
    pub max_population: usize,
    pub max_generations: usize,
    pub metrics: MetricConfig,
    pub seeds: Vec<u64>,
    pub seed: u64,
    pub output: PathBuf,
    /// Worker threads; 0 lets the pool choose.
    pub threads: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            families: Vec::new(),
            algorithms: vec![Algorithm::Ecga],
            dims: BTreeMap::new(),
            ks: vec![3],
            alphas: vec![1.0],
            problems: Vec::new(),
            initial_population: 1000,
            required_successes: 10,
            tolerance: 0.1,
            max_population: DEFAULT_MAX_POPULATION,
            max_generations: EdaConfig::DEFAULT_MAX_GENERATIONS,
            metrics: MetricConfig::default(),
            seeds: (0..10).collect(),
            seed: 0,
            output: PathBuf::from("results"),
            threads: 0,
        }
    }
}

fn config_error(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Configuration(format!("line {line}: {msg}"))
}

fn parse_list(value: &str) -> Vec<String> {
    let inner = value
        .trim()
        .strip_prefix('[')
        .and_then(|v| v.strip_suffix(']'))
        .unwrap_or(value);
    inner
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

fn parse_items<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<Vec<T>> {
    parse_list(value)
        .iter()
        .map(|s| s.parse().map_err(|_| config_error(line, format!("bad `{key}` entry `{s}`"))))
        .collect()
}

fn parse_scalar<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| config_error(line, format!("bad value `{value}` for `{key}`")))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut shared_dims: Option<Vec<usize>> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| config_error(line, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "families" => cfg.families = parse_items(line, key, value)?,
                "algorithms" => cfg.algorithms = parse_items(line, key, value)?,
                "dims" => shared_dims = Some(parse_items(line, key, value)?),
                "dims_ecga" => {
                    cfg.dims.insert(Algorithm::Ecga, parse_items(line, key, value)?);
                }
                "dims_boa" => {
                    cfg.dims.insert(Algorithm::Boa, parse_items(line, key, value)?);
                }
                "k" => cfg.ks = parse_items(line, key, value)?,
                "alpha" => cfg.alphas = parse_items(line, key, value)?,
                "problems" => {
                    cfg.problems = parse_list(value)
                        .iter()
                        .map(|s| {
                            let p: ProblemInstance =
                                s.parse().map_err(|e| config_error(line, format!("problem `{s}`: {e}")))?;
                            Ok(p.spec().clone())
                        })
                        .collect::<Result<_>>()?
                }
                "initial_pop" => cfg.initial_population = parse_scalar(line, key, value)?,
                "successes" => cfg.required_successes = parse_scalar(line, key, value)?,
                "tolerance" => cfg.tolerance = parse_scalar(line, key, value)?,
                "max_pop" => cfg.max_population = parse_scalar(line, key, value)?,
                "max_generations" => cfg.max_generations = parse_scalar(line, key, value)?,
                "samples" => cfg.metrics.sample_size = parse_scalar(line, key, value)?,
                "fraction" => cfg.metrics.selection_fraction = parse_scalar(line, key, value)?,
                "reps" => cfg.metrics.repetitions = parse_scalar(line, key, value)?,
                "estimator" => {
                    cfg.metrics.estimator = value.parse::<Estimator>().map_err(|e| config_error(line, e))?
                }
                "seeds" => {
                    cfg.seeds = match value.split_once("..") {
                        Some((a, b)) if !value.starts_with('[') => {
                            (parse_scalar::<u64>(line, key, a)?..parse_scalar::<u64>(line, key, b)?).collect()
                        }
                        _ => parse_items(line, key, value)?,
                    }
                }
                "seed" => cfg.seed = parse_scalar(line, key, value)?,
                "output" => cfg.output = PathBuf::from(value),
                "threads" => cfg.threads = parse_scalar(line, key, value)?,
                other => return Err(config_error(line, format!("unknown key `{other}`"))),
            }
        }
        if let Some(d) = shared_dims {
            for &a in &cfg.algorithms {
                cfg.dims.entry(a).or_insert_with(|| d.clone());
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::Configuration("no algorithms configured".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Configuration("no run seeds configured".into()));
        }
        if !self.families.is_empty() {
            for a in &self.algorithms {
                if self.dims.get(a).is_none_or(Vec::is_empty) {
                    return Err(Error::Configuration(format!("no problem lengths for {a}")));
                }
            }
        }
        self.bisection(0).validate()?;
        self.metrics.validate()?;
        EdaConfig {
            max_generations: self.max_generations,
            ..EdaConfig::new(Algorithm::Ecga, self.initial_population, 0)
        }
        .validate()
    }

    fn bisection(&self, seed: u64) -> BisectionConfig {
        BisectionConfig {
            initial_population: self.initial_population,
            required_successes: self.required_successes,
            tolerance: self.tolerance,
            max_population: self.max_population,
            seed,
        }
    }

    fn eda_template(&self, algorithm: Algorithm) -> EdaConfig {
        EdaConfig {
            max_generations: self.max_generations,
            ..EdaConfig::new(algorithm, self.initial_population, 0)
        }
    }

    /// Thread count after applying the environment override.
    pub fn effective_threads(&self) -> Result<usize> {
        match std::env::var(THREADS_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::Configuration(format!("{THREADS_ENV}=`{v}` is not a thread count"))),
            Err(_) => Ok(self.threads),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentCell {
    pub algorithm: Algorithm,
    pub problem: ProblemSpec,
}

impl ExperimentCell {
    pub fn key(&self) -> String {
        format!("{}:{}", self.algorithm, self.problem)
    }

    pub fn file_stem(&self) -> String {
        format!("{}_{}", self.algorithm, self.problem.to_string().replace(':', "_"))
    }

    pub fn seed(&self, base: u64) -> u64 {
        derive_seed(base, hash_str(&self.key()))
    }
}

/// Matrix cells plus the combinations dropped by the validity filter.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    pub cells: Vec<ExperimentCell>,
    pub filtered: Vec<(String, String)>,
}

impl Matrix {
    pub fn count(&self, algorithm: Algorithm) -> usize {
        self.cells.iter().filter(|c| c.algorithm == algorithm).count()
    }
}

/// Cartesian product of families × lengths × k × alpha per algorithm, keeping
/// only parameter-valid problems, plus any explicit problems. Cells are sorted
/// by algorithm, then problem spec text.
pub fn expand_matrix(config: &ExperimentConfig) -> Result<Matrix> {
    let mut cells: BTreeMap<(Algorithm, String), ProblemSpec> = BTreeMap::new();
    let mut filtered = BTreeSet::new();
    for &algorithm in &config.algorithms {
        let dims = config.dims.get(&algorithm).map(Vec::as_slice).unwrap_or(&[]);
        for &family in &config.families {
            for &n in dims {
                for &k in &config.ks {
                    let alphas: &[f64] = if family.uses_alpha() { &config.alphas } else { &[1.0] };
                    for &alpha in alphas {
                        let spec = ProblemSpec {
                            family,
                            n,
                            k: (family != Family::OneMax).then_some(k),
                            k2: (family == Family::Msp3).then(|| default_msp3_k2(k)),
                            alpha,
                        };
                        match ProblemInstance::new(spec.clone()) {
                            Ok(_) => {
                                cells.insert((algorithm, spec.to_string()), spec);
                            }
                            Err(e) => {
                                filtered.insert((spec.to_string(), e.to_string()));
                            }
                        }
                    }
                }
            }
        }
        for spec in &config.problems {
            cells.insert((algorithm, spec.to_string()), spec.clone());
        }
    }
    if cells.is_empty() {
        return Err(Error::Configuration("the problem matrix is empty".into()));
    }
    Ok(Matrix {
        cells: cells
            .into_iter()
            .map(|((algorithm, _), problem)| ExperimentCell { algorithm, problem })
            .collect(),
        filtered: filtered.into_iter().collect(),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellReport {
    pub algorithm: Algorithm,
    pub problem: String,
    pub bisection: BisectionResult,
}

#[derive(Clone, Debug)]
pub struct ExperimentSummary {
    pub cells: usize,
    pub unreachable: Vec<ExperimentCell>,
    pub runs: Vec<RunRecord>,
    pub metrics: Vec<MetricRow>,
    pub bisections: Vec<CellReport>,
    pub analysis: Analysis,
    pub output: PathBuf,
}

impl ExperimentSummary {
    /// True when no cell reached reliability.
    pub fn only_unreachable(&self) -> bool {
        !self.unreachable.is_empty() && self.bisections.is_empty()
    }
}

fn metric_config_for(config: &ExperimentConfig, spec: &str) -> MetricConfig {
    MetricConfig {
        rng_seed: derive_seed(config.seed, hash_str(spec)),
        ..config.metrics.clone()
    }
}

/// Runs the whole pipeline and writes its artifacts under `config.output`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentSummary> {
    config.validate()?;
    let matrix = expand_matrix(config)?;
    let threads = config.effective_threads()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Configuration(format!("thread pool: {e}")))?;
    pool.install(|| execute(config, &matrix))
}

fn execute(config: &ExperimentConfig, matrix: &Matrix) -> Result<ExperimentSummary> {
    let problems: BTreeMap<String, ProblemSpec> = matrix
        .cells
        .iter()
        .map(|c| (c.problem.to_string(), c.problem.clone()))
        .collect();

    let metrics: Vec<MetricRow> = problems
        .par_iter()
        .map(|(text, spec)| {
            let p = ProblemInstance::new(spec.clone())?;
            let report = compute_metrics(&p, &metric_config_for(config, text))?;
            Ok(MetricRow::from_report(&p, &report))
        })
        .collect::<Result<_>>()?;

    let sized: Vec<Option<BisectionResult>> = matrix
        .cells
        .par_iter()
        .map(|cell| {
            let p = ProblemInstance::new(cell.problem.clone())?;
            match bisect_population(&p, &config.eda_template(cell.algorithm), &config.bisection(cell.seed(config.seed))) {
                Ok(r) => Ok(Some(r)),
                Err(Error::UnreachableReliability { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;

    let mut unreachable = Vec::new();
    let mut bisections = Vec::new();
    let mut jobs = Vec::new();
    for (cell, result) in matrix.cells.iter().zip(sized) {
        match result {
            None => unreachable.push(cell.clone()),
            Some(b) => {
                for &seed in &config.seeds {
                    jobs.push((cell, b.population_size, seed));
                }
                bisections.push(CellReport {
                    algorithm: cell.algorithm,
                    problem: cell.problem.to_string(),
                    bisection: b,
                });
            }
        }
    }

    let runs: Vec<RunRecord> = jobs
        .par_iter()
        .map(|&(cell, pop, seed)| {
            let p = ProblemInstance::new(cell.problem.clone())?;
            let cfg = EdaConfig {
                population_size: pop,
                rng_seed: seed,
                ..config.eda_template(cell.algorithm)
            };
            let out = run_eda(&p, &cfg)?;
            Ok(RunRecord {
                problem: cell.problem.to_string(),
                n: p.n(),
                k: p.k(),
                alpha: p.alpha(),
                algorithm: cell.algorithm.to_string(),
                seed,
                population_size: pop,
                success: out.success,
                fitness_calls: out.fitness_calls,
                generations: out.generations_used,
                best_fitness: out.best_fitness,
            })
        })
        .collect::<Result<_>>()?;

    let table = build_analysis_table(&runs, &metrics)?;
    let analysis = analyze(&table);

    write_artifacts(config, &runs, &metrics, &bisections, &unreachable, &analysis, &table)?;
    Ok(ExperimentSummary {
        cells: matrix.cells.len(),
        unreachable,
        runs,
        metrics,
        bisections,
        analysis,
        output: config.output.clone(),
    })
}

fn write_artifacts(
    config: &ExperimentConfig,
    runs: &[RunRecord],
    metrics: &[MetricRow],
    bisections: &[CellReport],
    unreachable: &[ExperimentCell],
    analysis: &Analysis,
    table: &crate::stats::AnalysisTable,
) -> Result<()> {
    let out = &config.output;
    fs::create_dir_all(out.join("bisect"))?;
    write_runs_csv(fs::File::create(out.join("runs.csv"))?, runs)?;
    write_metrics_csv(fs::File::create(out.join("metrics.csv"))?, metrics)?;
    for report in bisections {
        let cell = ExperimentCell {
            algorithm: report.algorithm,
            problem: report.problem.parse::<ProblemInstance>()?.spec().clone(),
        };
        let path = out.join("bisect").join(format!("{}.json", cell.file_stem()));
        fs::write(path, serde_json::to_string_pretty(report)? + "\n")?;
    }
    let mut lines: Vec<String> = unreachable
        .iter()
        .map(|c| format!("{}\t{}\tunreachable reliability", c.algorithm, c.problem))
        .collect();
    lines.extend(table.exclusions.iter().map(|e| e.to_string()));
    lines.sort();
    lines.dedup();
    fs::write(
        out.join("exclusions.txt"),
        lines.iter().map(|l| format!("{l}\n")).collect::<String>(),
    )?;
    fs::write(out.join("analysis.json"), serde_json::to_string_pretty(analysis)? + "\n")?;
    write_scatter_csv(fs::File::create(out.join("scatter.csv"))?, &scatter_rows(table))?;
    Ok(())
}
