//! Joining run records with metric rows and summarizing the result.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{grouped_kendall, kendall_tau, ols_standardized, pearson, GroupedKendall, Regression};
use crate::error::{Error, Result};
use crate::records::{format_float, format_opt, MetricRow, RunRecord, NA};
use crate::sizing::median_u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    M1,
    M2,
    M3,
    Fdc,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::M1, Metric::M2, Metric::M3, Metric::Fdc];
    /// Regressors; M3 is left out because it nearly duplicates M2.
    pub const REGRESSORS: [Metric; 3] = [Metric::M1, Metric::M2, Metric::Fdc];

    pub fn name(self) -> &'static str {
        match self {
            Metric::M1 => "m1",
            Metric::M2 => "m2",
            Metric::M3 => "m3",
            Metric::Fdc => "fdc",
        }
    }

    pub fn value(self, row: &AnalysisRow) -> Option<f64> {
        match self {
            Metric::M1 => row.m1,
            Metric::M2 => row.m2,
            Metric::M3 => row.m3,
            Metric::Fdc => row.fdc,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse(format!("unknown metric `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRow {
    pub algorithm: String,
    pub problem: String,
    pub n: usize,
    pub k: Option<usize>,
    pub m1: Option<f64>,
    pub m2: Option<f64>,
    pub m3: Option<f64>,
    pub fdc: Option<f64>,
    /// Median fitness calls over successful seeds.
    pub median_calls: f64,
    pub log10_calls: f64,
    pub successful_runs: usize,
    pub total_runs: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Exclusion {
    /// `None` when the exclusion applies to every algorithm.
    pub algorithm: Option<String>,
    pub problem: String,
    pub reason: String,
}

impl fmt::Display for Exclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}", self.algorithm.as_deref().unwrap_or("*"), self.problem, self.reason)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalysisTable {
    /// Sorted by (algorithm, problem).
    pub rows: Vec<AnalysisRow>,
    pub exclusions: Vec<Exclusion>,
}

impl AnalysisTable {
    pub fn algorithms(&self) -> Vec<String> {
        let mut a: Vec<String> = self.rows.iter().map(|r| r.algorithm.clone()).collect();
        a.dedup();
        a
    }

    pub fn rows_for<'a>(&'a self, algorithm: &'a str) -> impl Iterator<Item = &'a AnalysisRow> + 'a {
        self.rows.iter().filter(move |r| r.algorithm == algorithm)
    }
}

/// Inner join of runs and metrics on the problem spec. A (problem, algorithm)
/// with no successful seed is excluded; otherwise the median fitness calls of
/// its successful seeds is used.
pub fn build_analysis_table(runs: &[RunRecord], metrics: &[MetricRow]) -> Result<AnalysisTable> {
    let mut by_problem: BTreeMap<&str, &MetricRow> = BTreeMap::new();
    for m in metrics {
        if by_problem.insert(m.problem.as_str(), m).is_some() {
            return Err(Error::Ingestion(format!("duplicate metric row for `{}`", m.problem)));
        }
    }
    let mut cells: BTreeMap<(&str, &str), BTreeMap<u64, &RunRecord>> = BTreeMap::new();
    for r in runs {
        let seeds = cells.entry((r.algorithm.as_str(), r.problem.as_str())).or_default();
        if seeds.insert(r.seed, r).is_some() {
            return Err(Error::Ingestion(format!(
                "duplicate run for `{}` / {} / seed {}",
                r.problem, r.algorithm, r.seed
            )));
        }
    }

    let mut table = AnalysisTable::default();
    for (&(algorithm, problem), seeds) in &cells {
        let exclude = |reason: &str| Exclusion {
            algorithm: Some(algorithm.to_string()),
            problem: problem.to_string(),
            reason: reason.to_string(),
        };
        let Some(m) = by_problem.get(problem) else {
            table.exclusions.push(exclude("no metric row"));
            continue;
        };
        let calls: Vec<u64> = seeds.values().filter(|r| r.success).map(|r| r.fitness_calls).collect();
        if calls.is_empty() {
            table.exclusions.push(exclude("no successful run"));
            continue;
        }
        let median_calls = median_u64(&calls);
        table.rows.push(AnalysisRow {
            algorithm: algorithm.to_string(),
            problem: problem.to_string(),
            n: m.n,
            k: m.k,
            m1: m.m1,
            m2: m.m2,
            m3: m.m3,
            fdc: m.fdc,
            median_calls,
            log10_calls: median_calls.log10(),
            successful_runs: calls.len(),
            total_runs: seeds.len(),
        });
    }
    for problem in by_problem.keys() {
        if !cells.keys().any(|(_, p)| p == problem) {
            table.exclusions.push(Exclusion {
                algorithm: None,
                problem: problem.to_string(),
                reason: "no runs".into(),
            });
        }
    }
    table.exclusions.sort();
    Ok(table)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct AlgorithmAnalysis {
    rows: usize,
    pearson: BTreeMap<Metric, Option<f64>>,
    kendall: BTreeMap<Metric, Option<f64>>,
    grouped_kendall: BTreeMap<Metric, Option<GroupedKendall>>,
    regression: Option<Regression>,
    notes: Vec<String>,
}

/// Correlation and regression blocks keyed by algorithm, then metric.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub rows: BTreeMap<String, usize>,
    pub pearson: BTreeMap<String, BTreeMap<Metric, Option<f64>>>,
    pub kendall: BTreeMap<String, BTreeMap<Metric, Option<f64>>>,
    pub grouped_kendall: BTreeMap<String, BTreeMap<Metric, Option<GroupedKendall>>>,
    pub regression: BTreeMap<String, Option<Regression>>,
    pub notes: BTreeMap<String, Vec<String>>,
    pub exclusions: Vec<Exclusion>,
}

fn analyze_algorithm(rows: &[&AnalysisRow]) -> AlgorithmAnalysis {
    let mut out = AlgorithmAnalysis {
        rows: rows.len(),
        pearson: BTreeMap::new(),
        kendall: BTreeMap::new(),
        grouped_kendall: BTreeMap::new(),
        regression: None,
        notes: Vec::new(),
    };
    for metric in Metric::ALL {
        let usable: Vec<&&AnalysisRow> = rows.iter().filter(|r| metric.value(r).is_some()).collect();
        let xs: Vec<f64> = usable.iter().map(|r| metric.value(r).unwrap()).collect();
        let ys: Vec<f64> = usable.iter().map(|r| r.log10_calls).collect();
        let groups: Vec<usize> = usable.iter().map(|r| r.n).collect();
        let mut note = |what: &str, e: Error| out.notes.push(format!("{metric} {what}: {e}"));
        out.pearson.insert(metric, pearson(&xs, &ys).map_err(|e| note("pearson", e)).ok());
        out.kendall.insert(metric, kendall_tau(&xs, &ys).map_err(|e| note("kendall", e)).ok());
        out.grouped_kendall.insert(
            metric,
            grouped_kendall(&groups, &xs, &ys).map_err(|e| note("grouped kendall", e)).ok(),
        );
    }

    let complete: Vec<&&AnalysisRow> = rows
        .iter()
        .filter(|r| Metric::REGRESSORS.iter().all(|m| m.value(r).is_some()))
        .collect();
    let columns: Vec<Vec<f64>> = Metric::REGRESSORS
        .iter()
        .map(|m| complete.iter().map(|r| m.value(r).unwrap()).collect())
        .collect();
    let named: Vec<(&str, &[f64])> = Metric::REGRESSORS
        .iter()
        .zip(&columns)
        .map(|(m, c)| (m.name(), c.as_slice()))
        .collect();
    let y: Vec<f64> = complete.iter().map(|r| r.log10_calls).collect();
    match ols_standardized(&named, &y) {
        Ok(r) => out.regression = Some(r),
        Err(e) => out.notes.push(format!("regression: {e}")),
    }
    out
}

pub fn analyze(table: &AnalysisTable) -> Analysis {
    let mut analysis = Analysis {
        exclusions: table.exclusions.clone(),
        ..Analysis::default()
    };
    for algorithm in table.algorithms() {
        let rows: Vec<&AnalysisRow> = table.rows_for(&algorithm).collect();
        let a = analyze_algorithm(&rows);
        analysis.rows.insert(algorithm.clone(), a.rows);
        analysis.pearson.insert(algorithm.clone(), a.pearson);
        analysis.kendall.insert(algorithm.clone(), a.kendall);
        analysis.grouped_kendall.insert(algorithm.clone(), a.grouped_kendall);
        analysis.regression.insert(algorithm.clone(), a.regression);
        analysis.notes.insert(algorithm, a.notes);
    }
    analysis
}

/// One point of a metric-versus-calls scatter plot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatterRow {
    pub problem: String,
    pub n: usize,
    pub k: Option<usize>,
    pub metric: Metric,
    pub metric_value: f64,
    pub log10_calls: f64,
    pub algorithm: String,
}

pub fn scatter_rows(table: &AnalysisTable) -> Vec<ScatterRow> {
    let mut out = Vec::new();
    for row in &table.rows {
        for metric in Metric::ALL {
            if let Some(v) = metric.value(row) {
                out.push(ScatterRow {
                    problem: row.problem.clone(),
                    n: row.n,
                    k: row.k,
                    metric,
                    metric_value: v,
                    log10_calls: row.log10_calls,
                    algorithm: row.algorithm.clone(),
                });
            }
        }
    }
    out
}

pub fn write_scatter_csv<W: Write>(out: W, rows: &[ScatterRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["problem", "n", "k", "metric", "metric_value", "log10_calls", "algorithm"])?;
    for r in rows {
        w.write_record([
            r.problem.clone(),
            r.n.to_string(),
            r.k.map_or_else(|| NA.to_string(), |k| k.to_string()),
            r.metric.to_string(),
            format_opt(Some(r.metric_value)),
            format_float(r.log10_calls),
            r.algorithm.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
