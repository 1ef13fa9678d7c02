//! Correlation and regression of metric values against log fitness calls.

mod table;

pub use table::{
    analyze, build_analysis_table, scatter_rows, write_scatter_csv, Analysis, AnalysisRow, AnalysisTable, Exclusion,
    Metric, ScatterRow,
};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};

use crate::error::{Error, Result};

fn check_pair(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::Dimension {
            expected: xs.len(),
            actual: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::Argument("correlation needs at least two observations".into()));
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Population standard deviation.
fn std_dev(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
}

/// Pearson correlation with population moments.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_pair(xs, ys)?;
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("constant input".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Kendall tau-b.
pub fn kendall_tau(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_pair(xs, ys)?;
    let n = xs.len();
    let (mut concordant, mut discordant, mut tied_x, mut tied_y) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = xs[i].partial_cmp(&xs[j]).ok_or_else(|| Error::Argument("NaN in input".into()))?;
            let dy = ys[i].partial_cmp(&ys[j]).ok_or_else(|| Error::Argument("NaN in input".into()))?;
            use std::cmp::Ordering::Equal;
            match (dx, dy) {
                (Equal, Equal) => {
                    tied_x += 1;
                    tied_y += 1;
                }
                (Equal, _) => tied_x += 1,
                (_, Equal) => tied_y += 1,
                (a, b) if a == b => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let pairs = (n * (n - 1) / 2) as i64;
    let denom = (((pairs - tied_x) * (pairs - tied_y)) as f64).sqrt();
    if denom == 0.0 {
        return Err(Error::UndefinedCorrelation("all pairs tied".into()));
    }
    Ok(((concordant - discordant) as f64 / denom).clamp(-1.0, 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupTau {
    pub group: usize,
    pub size: usize,
    pub tau: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupWarning {
    pub group: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupedKendall {
    pub groups: Vec<GroupTau>,
    pub skipped: Vec<GroupWarning>,
    pub mean: f64,
    /// Student-t 95% interval across groups; `None` with fewer than two groups.
    pub ci95: Option<(f64, f64)>,
    pub overall: Option<f64>,
}

/// Kendall tau within each group, their mean with a t-based 95% interval, and
/// the tau of the pooled data. Groups with fewer than two rows or undefined tau
/// are skipped and reported.
pub fn grouped_kendall(groups: &[usize], xs: &[f64], ys: &[f64]) -> Result<GroupedKendall> {
    check_pair(xs, ys)?;
    if groups.len() != xs.len() {
        return Err(Error::Dimension {
            expected: xs.len(),
            actual: groups.len(),
        });
    }
    let mut keys: Vec<usize> = groups.to_vec();
    keys.sort_unstable();
    keys.dedup();

    let mut taus = Vec::new();
    let mut skipped = Vec::new();
    for key in keys {
        let idx: Vec<usize> = (0..groups.len()).filter(|&i| groups[i] == key).collect();
        if idx.len() < 2 {
            skipped.push(GroupWarning {
                group: key,
                reason: "fewer than two rows".into(),
            });
            continue;
        }
        let gx: Vec<f64> = idx.iter().map(|&i| xs[i]).collect();
        let gy: Vec<f64> = idx.iter().map(|&i| ys[i]).collect();
        match kendall_tau(&gx, &gy) {
            Ok(tau) => taus.push(GroupTau {
                group: key,
                size: idx.len(),
                tau,
            }),
            Err(e) => skipped.push(GroupWarning {
                group: key,
                reason: e.to_string(),
            }),
        }
    }
    if taus.is_empty() {
        return Err(Error::UndefinedCorrelation("no group has a defined tau".into()));
    }

    let values: Vec<f64> = taus.iter().map(|g| g.tau).collect();
    let m = mean(&values);
    let ci95 = (values.len() >= 2).then(|| {
        let g = values.len() as f64;
        let sd = (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (g - 1.0)).sqrt();
        let t = StudentsT::new(0.0, 1.0, g - 1.0).expect("positive dof").inverse_cdf(0.975);
        let half = t * sd / g.sqrt();
        (m - half, m + half)
    });
    Ok(GroupedKendall {
        groups: taus,
        skipped,
        mean: m,
        ci95,
        overall: kendall_tau(xs, ys).ok(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regression {
    pub columns: Vec<String>,
    /// Coefficients on z-scored regressors and response.
    pub standardized: Vec<f64>,
    /// The same fit expressed in original units.
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub r_squared: f64,
    pub f_statistic: f64,
    pub p_value: f64,
    pub observations: usize,
}

/// Solves the symmetric system `a x = b` by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let p = b.len();
    for col in 0..p {
        let pivot = (col..p).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..p {
            let factor = a[row][col] / a[col][col];
            for c in col..p {
                a[row][c] -= factor * a[col][c];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; p];
    for row in (0..p).rev() {
        let s: f64 = (row + 1..p).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Ordinary least squares on z-scored data via the normal equations.
///
/// A column whose residual after regressing on the earlier columns is
/// negligible makes the fit rank-deficient; it is reported together with the
/// earlier columns it depends on.
pub fn ols_standardized(columns: &[(&str, &[f64])], y: &[f64]) -> Result<Regression> {
    let rows = y.len();
    let p = columns.len();
    if p == 0 {
        return Err(Error::Argument("regression needs at least one column".into()));
    }
    for (_, c) in columns {
        if c.len() != rows {
            return Err(Error::Dimension {
                expected: rows,
                actual: c.len(),
            });
        }
    }
    if rows <= p + 1 {
        return Err(Error::Argument(format!("{rows} rows are too few for {p} regressors")));
    }
    let names: Vec<String> = columns.iter().map(|(n, _)| n.to_string()).collect();

    let zscore = |v: &[f64]| -> Option<Vec<f64>> {
        let (m, s) = (mean(v), std_dev(v));
        (s > 0.0).then(|| v.iter().map(|x| (x - m) / s).collect())
    };
    let mut z = Vec::with_capacity(p);
    for (name, c) in columns {
        z.push(zscore(c).ok_or_else(|| Error::Collinearity {
            columns: vec![name.to_string()],
        })?);
    }
    let zy = zscore(y).ok_or_else(|| Error::DegenerateDistribution("response is constant".into()))?;

    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let gram: Vec<Vec<f64>> = z.iter().map(|a| z.iter().map(|b| dot(a, b)).collect()).collect();
    let rhs: Vec<f64> = z.iter().map(|a| dot(a, &zy)).collect();

    // Condition check: each column must keep a non-trivial residual against its predecessors.
    for j in 1..p {
        let sub: Vec<Vec<f64>> = gram[..j].iter().map(|r| r[..j].to_vec()).collect();
        let target: Vec<f64> = gram[..j].iter().map(|r| r[j]).collect();
        if let Some(c) = solve(sub, target.clone()) {
            let residual = gram[j][j] - c.iter().zip(&target).map(|(a, b)| a * b).sum::<f64>();
            if residual / gram[j][j] < 1e-10 {
                let mut offending: Vec<String> =
                    (0..j).filter(|&i| c[i].abs() > 1e-8).map(|i| names[i].clone()).collect();
                offending.push(names[j].clone());
                return Err(Error::Collinearity { columns: offending });
            }
        }
    }
    let beta = solve(gram, rhs).ok_or_else(|| Error::Collinearity { columns: names.clone() })?;

    let ss_res: f64 = (0..rows)
        .map(|i| {
            let fit: f64 = (0..p).map(|j| beta[j] * z[j][i]).sum();
            (zy[i] - fit).powi(2)
        })
        .sum();
    let r_squared = (1.0 - ss_res / rows as f64).clamp(0.0, 1.0);
    let (d1, d2) = (p as f64, (rows - p - 1) as f64);
    let (f_statistic, p_value) = if r_squared >= 1.0 - 1e-15 {
        (f64::INFINITY, 0.0)
    } else {
        let f = (r_squared / d1) / ((1.0 - r_squared) / d2);
        (f, FisherSnedecor::new(d1, d2).expect("positive dof").sf(f))
    };

    let sy = std_dev(y);
    let coefficients: Vec<f64> = (0..p).map(|j| beta[j] * sy / std_dev(columns[j].1)).collect();
    let intercept = mean(y) - (0..p).map(|j| coefficients[j] * mean(columns[j].1)).sum::<f64>();

    Ok(Regression {
        columns: names,
        standardized: beta,
        coefficients,
        intercept,
        r_squared,
        f_statistic,
        p_value,
        observations: rows,
    })
}
