use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use walsh_hardness::eda::{run_eda, Algorithm, EdaConfig};
use walsh_hardness::experiment::{expand_matrix, run_experiment, ExperimentConfig};
use walsh_hardness::records::{read_metrics_csv, read_runs_csv, write_metrics_csv, write_walsh_csv, MetricRow};
use walsh_hardness::sizing::{bisect_population, BisectionConfig, DEFAULT_MAX_POPULATION};
use walsh_hardness::stats::{analyze, build_analysis_table, scatter_rows, write_scatter_csv};
use walsh_hardness::walsh::{estimate_coefficient, spectrum_of, subsets_of_order, CoefficientMethod};
use walsh_hardness::{compute_metrics, BitString, Error, Estimator, MetricConfig, ProblemInstance, PseudoBoolean};

#[derive(Parser)]
#[command(name = "walsh-hardness", version, about = "Walsh-coefficient difficulty metrics for EDAs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Exact,
    Confusion,
    Population,
}

#[derive(Subcommand)]
enum Command {
    /// Walsh coefficients of a benchmark problem.
    Walsh {
        #[arg(long)]
        problem: String,
        /// 1, 2 or all (all requires the exact method).
        #[arg(long, default_value = "2")]
        order: String,
        #[arg(long, value_enum, default_value = "exact")]
        method: Method,
        /// Population size, or number of contexts for the confusion method.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// M1, M2, M3 and FDC for one problem.
    Metrics {
        #[arg(long)]
        problem: String,
        #[arg(long, default_value_t = 5000)]
        samples: usize,
        #[arg(long, default_value_t = 0.5)]
        fraction: f64,
        #[arg(long, default_value_t = 50)]
        reps: usize,
        #[arg(long, default_value = "population")]
        estimator: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A single seeded ECGA or BOA run.
    RunEda {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        algo: String,
        #[arg(long)]
        pop: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = EdaConfig::DEFAULT_MAX_GENERATIONS)]
        max_gen: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bisection search for the minimal reliable population size.
    Bisect {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        algo: String,
        #[arg(long, default_value_t = 1000)]
        initial: usize,
        #[arg(long, default_value_t = 10)]
        successes: usize,
        #[arg(long, default_value_t = 0.1)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_POPULATION)]
        max_pop: usize,
        #[arg(long, default_value_t = EdaConfig::DEFAULT_MAX_GENERATIONS)]
        max_gen: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full pipeline from a configuration file.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the configured output directory.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        /// Print the expanded matrix and exit.
        #[arg(long)]
        dry_run: bool,
    },
    /// Correlations and regression over existing runs and metrics.
    Analyze {
        #[arg(long)]
        runs: PathBuf,
        #[arg(long)]
        metrics: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        scatter: Option<PathBuf>,
    },
}

fn output(path: &Option<PathBuf>) -> walsh_hardness::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json<T: serde::Serialize>(path: &Option<PathBuf>, value: &T) -> walsh_hardness::Result<()> {
    let mut w = output(path)?;
    writeln!(w, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn walsh(problem: &str, order: &str, method: Method, samples: Option<usize>, seed: u64, out: &Option<PathBuf>) -> walsh_hardness::Result<()> {
    let p: ProblemInstance = problem.parse()?;
    let rows: Vec<(u128, f64)> = if order == "all" {
        if !matches!(method, Method::Exact) {
            return Err(Error::Argument("--order all requires --method exact".into()));
        }
        let spectrum = spectrum_of(&p)?;
        spectrum.coeffs().iter().enumerate().map(|(m, &c)| (m as u128, c)).collect()
    } else {
        let order: usize = order
            .parse()
            .ok()
            .filter(|o| (1..=2).contains(o))
            .ok_or_else(|| Error::Argument(format!("--order must be 1, 2 or all, not `{order}`")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let population: Option<(Vec<BitString>, Vec<f64>)> = matches!(method, Method::Population).then(|| {
            let xs: Vec<BitString> = (0..samples.unwrap_or(5000)).map(|_| BitString::random(p.n(), &mut rng)).collect();
            let fs = xs.iter().map(|x| p.fitness(x.as_slice())).collect();
            (xs, fs)
        });
        let mut rows = Vec::new();
        for subset in subsets_of_order(p.n(), order) {
            let m = match (&population, method) {
                (_, Method::Exact) => CoefficientMethod::Exact,
                (_, Method::Confusion) => CoefficientMethod::Confusion {
                    trials: samples.unwrap_or(walsh_hardness::metrics::DEFAULT_CONFUSION_TRIALS),
                    rng: &mut rng,
                },
                (Some((xs, fs)), Method::Population) => CoefficientMethod::Population { samples: xs, fitness: fs },
                (None, Method::Population) => unreachable!(),
            };
            let c = estimate_coefficient(&p, &subset, m)?;
            rows.push((subset.iter().fold(0u128, |acc, &i| acc | 1 << i), c));
        }
        rows
    };
    write_walsh_csv(output(out)?, &rows)
}

fn run(command: Command) -> walsh_hardness::Result<ExitCode> {
    match command {
        Command::Walsh { problem, order, method, samples, seed, out } => walsh(&problem, &order, method, samples, seed, &out)?,
        Command::Metrics { problem, samples, fraction, reps, estimator, seed, out } => {
            let p: ProblemInstance = problem.parse()?;
            let cfg = MetricConfig {
                sample_size: samples,
                selection_fraction: fraction,
                repetitions: reps,
                estimator: estimator.parse::<Estimator>()?,
                rng_seed: seed,
            };
            let report = compute_metrics(&p, &cfg)?;
            write_metrics_csv(output(&out)?, &[MetricRow::from_report(&p, &report)])?;
        }
        Command::RunEda { problem, algo, pop, seed, max_gen, out } => {
            let p: ProblemInstance = problem.parse()?;
            let cfg = EdaConfig {
                max_generations: max_gen,
                ..EdaConfig::new(algo.parse::<Algorithm>()?, pop, seed)
            };
            write_json(&out, &run_eda(&p, &cfg)?)?;
        }
        Command::Bisect { problem, algo, initial, successes, tol, seed, max_pop, max_gen, out } => {
            let p: ProblemInstance = problem.parse()?;
            let template = EdaConfig {
                max_generations: max_gen,
                ..EdaConfig::new(algo.parse::<Algorithm>()?, initial, 0)
            };
            let cfg = BisectionConfig {
                max_population: max_pop,
                ..BisectionConfig::new(initial, successes, tol, seed)
            };
            write_json(&out, &bisect_population(&p, &template, &cfg)?)?;
        }
        Command::Experiment { config, output, threads, dry_run } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(o) = output {
                cfg.output = o;
            }
            if let Some(t) = threads {
                cfg.threads = t;
            }
            if dry_run {
                let m = expand_matrix(&cfg)?;
                for a in &cfg.algorithms {
                    println!("{a}: {} cells", m.count(*a));
                }
                for c in &m.cells {
                    println!("{}", c.key());
                }
                for (spec, reason) in &m.filtered {
                    println!("filtered {spec}: {reason}");
                }
                return Ok(ExitCode::SUCCESS);
            }
            let summary = run_experiment(&cfg)?;
            eprintln!(
                "{} cells, {} runs, {} unreachable; artifacts in {}",
                summary.cells,
                summary.runs.len(),
                summary.unreachable.len(),
                summary.output.display()
            );
            if summary.only_unreachable() {
                return Ok(ExitCode::from(3));
            }
        }
        Command::Analyze { runs, metrics, out, scatter } => {
            let open = |p: &Path| File::open(p).map_err(Error::from);
            let table = build_analysis_table(&read_runs_csv(open(&runs)?)?, &read_metrics_csv(open(&metrics)?)?)?;
            write_json(&out, &analyze(&table))?;
            if let Some(path) = scatter {
                write_scatter_csv(File::create(path)?, &scatter_rows(&table))?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::UnreachableReliability { .. } => ExitCode::from(3),
                e if e.is_configuration() => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
