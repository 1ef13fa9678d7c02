//! Flat record types and their CSV encodings.
//!
//! Floats are written in scientific notation with 17 significant digits so that
//! values round-trip exactly and files are byte-stable. Undefined values are
//! written as `NA`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitness::ProblemInstance;
use crate::metrics::MetricReport;

pub const NA: &str = "NA";

pub const RUNS_HEADER: [&str; 11] = [
    "problem",
    "n",
    "k",
    "alpha",
    "algorithm",
    "seed",
    "population_size",
    "success",
    "fitness_calls",
    "generations",
    "best_fitness",
];

pub const METRICS_HEADER: [&str; 11] = ["problem", "n", "k", "alpha", "m1", "m2", "m3", "fdc", "reps", "samples", "seed"];

pub const WALSH_HEADER: [&str; 4] = ["mask", "indices", "coefficient", "abs_coefficient"];

pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        // Avoid a distinct "-0" encoding.
        return format!("{:.16e}", 0.0);
    }
    format!("{x:.16e}")
}

pub fn format_opt(x: Option<f64>) -> String {
    x.filter(|v| v.is_finite()).map_or_else(|| NA.to_string(), format_float)
}

fn format_opt_usize(x: Option<usize>) -> String {
    x.map_or_else(|| NA.to_string(), |v| v.to_string())
}

pub fn parse_opt(s: &str) -> Result<Option<f64>> {
    let s = s.trim();
    if s.eq_ignore_ascii_case(NA) || s.is_empty() {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|_| Error::Ingestion(format!("bad number `{s}`")))
}

fn parse_field<T: std::str::FromStr>(s: &str, column: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Ingestion(format!("bad value `{s}` in column `{column}`")))
}

fn parse_opt_usize(s: &str, column: &str) -> Result<Option<usize>> {
    if s.trim().eq_ignore_ascii_case(NA) || s.trim().is_empty() {
        Ok(None)
    } else {
        parse_field(s, column).map(Some)
    }
}

/// One seeded optimizer run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub problem: String,
    pub n: usize,
    pub k: Option<usize>,
    pub alpha: f64,
    pub algorithm: String,
    pub seed: u64,
    pub population_size: usize,
    pub success: bool,
    pub fitness_calls: u64,
    pub generations: usize,
    pub best_fitness: f64,
}

/// Metric values for one problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub problem: String,
    pub n: usize,
    pub k: Option<usize>,
    pub alpha: f64,
    pub m1: Option<f64>,
    pub m2: Option<f64>,
    pub m3: Option<f64>,
    pub fdc: Option<f64>,
    pub reps: usize,
    pub samples: usize,
    pub seed: u64,
}

impl MetricRow {
    pub fn from_report(problem: &ProblemInstance, report: &MetricReport) -> Self {
        Self {
            problem: report.problem.clone(),
            n: problem.n(),
            k: problem.k(),
            alpha: problem.alpha(),
            m1: report.m1,
            m2: report.m2,
            m3: report.m3,
            fdc: report.fdc,
            reps: report.config.repetitions,
            samples: report.config.sample_size,
            seed: report.config.rng_seed,
        }
    }
}

fn header_index(headers: &csv::StringRecord, expected: &[&str]) -> Result<Vec<usize>> {
    expected
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h.trim() == *name)
                .ok_or_else(|| Error::Ingestion(format!("missing column `{name}`")))
        })
        .collect()
}

pub fn write_runs_csv<W: Write>(out: W, rows: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RUNS_HEADER)?;
    for r in rows {
        w.write_record([
            r.problem.clone(),
            r.n.to_string(),
            format_opt_usize(r.k),
            format_float(r.alpha),
            r.algorithm.clone(),
            r.seed.to_string(),
            r.population_size.to_string(),
            r.success.to_string(),
            r.fitness_calls.to_string(),
            r.generations.to_string(),
            format_float(r.best_fitness),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_runs_csv<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let idx = header_index(rd.headers()?, &RUNS_HEADER)?;
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let f = |i: usize| rec.get(idx[i]).unwrap_or("");
        rows.push(RunRecord {
            problem: f(0).trim().to_string(),
            n: parse_field(f(1), "n")?,
            k: parse_opt_usize(f(2), "k")?,
            alpha: parse_field(f(3), "alpha")?,
            algorithm: f(4).trim().to_ascii_lowercase(),
            seed: parse_field(f(5), "seed")?,
            population_size: parse_field(f(6), "population_size")?,
            success: parse_field(f(7), "success")?,
            fitness_calls: parse_field(f(8), "fitness_calls")?,
            generations: parse_field(f(9), "generations")?,
            best_fitness: parse_field(f(10), "best_fitness")?,
        });
    }
    Ok(rows)
}

pub fn write_metrics_csv<W: Write>(out: W, rows: &[MetricRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(METRICS_HEADER)?;
    for r in rows {
        w.write_record([
            r.problem.clone(),
            r.n.to_string(),
            format_opt_usize(r.k),
            format_float(r.alpha),
            format_opt(r.m1),
            format_opt(r.m2),
            format_opt(r.m3),
            format_opt(r.fdc),
            r.reps.to_string(),
            r.samples.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_metrics_csv<R: Read>(input: R) -> Result<Vec<MetricRow>> {
    let mut rd = csv::Reader::from_reader(input);
    let idx = header_index(rd.headers()?, &METRICS_HEADER)?;
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let f = |i: usize| rec.get(idx[i]).unwrap_or("");
        rows.push(MetricRow {
            problem: f(0).trim().to_string(),
            n: parse_field(f(1), "n")?,
            k: parse_opt_usize(f(2), "k")?,
            alpha: parse_field(f(3), "alpha")?,
            m1: parse_opt(f(4))?,
            m2: parse_opt(f(5))?,
            m3: parse_opt(f(6))?,
            fdc: parse_opt(f(7))?,
            reps: parse_field(f(8), "reps")?,
            samples: parse_field(f(9), "samples")?,
            seed: parse_field(f(10), "seed")?,
        });
    }
    Ok(rows)
}

/// Writes `(mask, coefficient)` pairs; `indices` lists the set bits of the mask.
pub fn write_walsh_csv<W: Write>(out: W, rows: &[(u128, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(WALSH_HEADER)?;
    for &(mask, c) in rows {
        let indices: Vec<String> = (0..128).filter(|b| mask >> b & 1 == 1).map(|b| b.to_string()).collect();
        w.write_record([mask.to_string(), indices.join(" "), format_float(c), format_float(c.abs())])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(problem: &str, seed: u64, success: bool, calls: u64) -> RunRecord {
        RunRecord {
            problem: problem.into(),
            n: 12,
            k: Some(3),
            alpha: 1.0,
            algorithm: "ecga".into(),
            seed,
            population_size: 50,
            success,
            fitness_calls: calls,
            generations: 4,
            best_fitness: 4.0 / 3.0,
        }
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 12345.678, f64::MIN_POSITIVE] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_float(-0.0), format_float(0.0));
        assert_eq!(format_opt(None), "NA");
        assert_eq!(format_opt(Some(f64::NAN)), "NA");
        assert_eq!(parse_opt("NA").unwrap(), None);
        assert!(parse_opt("abc").is_err());
    }

    #[test]
    fn runs_round_trip() {
        let rows = vec![run("trap:12:3", 0, true, 400), run("trap:12:3", 1, false, 900)];
        let mut buf = Vec::new();
        write_runs_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("problem,n,k,alpha,algorithm,seed,"));
        assert_eq!(read_runs_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn metrics_round_trip_with_na() {
        let rows = vec![MetricRow {
            problem: "onemax:8".into(),
            n: 8,
            k: None,
            alpha: 1.0,
            m1: None,
            m2: None,
            m3: None,
            fdc: Some(-1.0),
            reps: 2,
            samples: 100,
            seed: 9,
        }];
        let mut buf = Vec::new();
        write_metrics_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), METRICS_HEADER.join(","));
        assert!(text.contains("onemax:8,8,NA,"));
        assert_eq!(read_metrics_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn missing_column_is_ingestion_error() {
        let err = read_metrics_csv("problem,n\ntrap:12:3,12\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Ingestion(_)));
    }

    #[test]
    fn walsh_rows() {
        let mut buf = Vec::new();
        write_walsh_csv(&mut buf, &[(0b101, -0.5)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "5,0 2,-5.0000000000000000e-1,5.0000000000000000e-1");
    }
}
