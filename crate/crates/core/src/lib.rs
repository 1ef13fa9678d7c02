//! Walsh-coefficient difficulty metrics for estimation of distribution
//! algorithms, together with the benchmark functions, EDA runners, population
//! sizing and statistics needed to validate them against fitness-call counts.

pub mod eda;
pub mod error;
pub mod experiment;
pub mod fitness;
pub mod metrics;
pub mod records;
pub mod seeds;
pub mod sizing;
pub mod stats;
pub mod walsh;

pub use error::{Error, Result};
pub use fitness::{BitString, CanonicalPairs, Family, LinkageStructure, ProblemInstance, ProblemSpec, PseudoBoolean};
pub use metrics::{compute_metrics, Estimator, MetricConfig, MetricReport};
pub use walsh::{Schema, WalshSpectrum};
