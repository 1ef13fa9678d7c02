//! Marginal product models learned by greedy group merging.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitness::BitString;

pub const MAX_GROUP_SIZE: usize = 12;

/// Group scoring rule used while merging. Lower is better.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum EcgaScore {
    /// log2(N+1)·(2^|g|−1) + N·H(g)
    #[default]
    Mdl,
    /// (log2 N)/2·(2^|g|−1) + N·H(g)
    Bic,
}

impl EcgaScore {
    fn group(self, n_samples: usize, group_size: usize, entropy: f64) -> f64 {
        let params = ((1u64 << group_size) - 1) as f64;
        let n = n_samples as f64;
        let model = match self {
            EcgaScore::Mdl => (n + 1.0).log2() * params,
            EcgaScore::Bic => n.log2() / 2.0 * params,
        };
        model + n * entropy
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EcgaModel {
    n: usize,
    groups: Vec<Vec<usize>>,
    /// `tables[g][c]` counts selected individuals whose bits on `groups[g]`
    /// encode to `c` (bit t of `c` is variable `groups[g][t]`).
    tables: Vec<Vec<u64>>,
}

impl EcgaModel {
    /// Builds a model from explicit groups and count tables.
    pub fn new(n: usize, groups: Vec<Vec<usize>>, tables: Vec<Vec<u64>>) -> Result<Self> {
        let model = Self { n, groups, tables };
        model.validate()?;
        Ok(model)
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn tables(&self) -> &[Vec<u64>] {
        &self.tables
    }

    pub fn is_partition(&self) -> bool {
        let mut seen = vec![false; self.n];
        for &v in self.groups.iter().flatten() {
            if v >= self.n || seen[v] {
                return false;
            }
            seen[v] = true;
        }
        seen.into_iter().all(|s| s)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.is_partition() {
            return Err(Error::Argument("groups do not partition the variables".into()));
        }
        if self.tables.len() != self.groups.len() {
            return Err(Error::Argument("one frequency table per group is required".into()));
        }
        let mut total = None;
        for (g, t) in self.groups.iter().zip(&self.tables) {
            if g.len() > MAX_GROUP_SIZE || t.len() != 1 << g.len() {
                return Err(Error::Argument(format!("table size {} does not fit group {g:?}", t.len())));
            }
            let sum: u64 = t.iter().sum();
            if sum == 0 || total.is_some_and(|s| s != sum) {
                return Err(Error::Argument("frequency tables must share a positive total".into()));
            }
            total = Some(sum);
        }
        Ok(())
    }
}

fn encode(x: &BitString, group: &[usize]) -> usize {
    group
        .iter()
        .enumerate()
        .fold(0, |c, (t, &v)| c | (usize::from(x.get(v)) << t))
}

fn counts(selected: &[BitString], group: &[usize]) -> Vec<u64> {
    let mut table = vec![0u64; 1 << group.len()];
    for x in selected {
        table[encode(x, group)] += 1;
    }
    table
}

fn entropy(table: &[u64], total: usize) -> f64 {
    let total = total as f64;
    table
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum()
}

fn score_of(selected: &[BitString], group: &[usize], rule: EcgaScore) -> f64 {
    rule.group(selected.len(), group.len(), entropy(&counts(selected, group), selected.len()))
}

/// Greedy agglomeration under the default MDL score.
pub fn build_ecga_model(selected: &[BitString], n: usize) -> EcgaModel {
    build_ecga_model_scored(selected, n, EcgaScore::Mdl)
}

/// Starts from singletons and repeatedly merges the pair with the largest
/// score decrease; ties go to the lexicographically smallest pair.
pub fn build_ecga_model_scored(selected: &[BitString], n: usize, rule: EcgaScore) -> EcgaModel {
    assert!(!selected.is_empty(), "ECGA model needs a non-empty selected set");
    let mut groups: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut scores: Vec<f64> = groups.iter().map(|g| score_of(selected, g, rule)).collect();

    // delta[a][b] (a < b) = score(a ∪ b) − score(a) − score(b); None if over the cap.
    let merged_delta = |groups: &[Vec<usize>], scores: &[f64], a: usize, b: usize| -> Option<f64> {
        if groups[a].len() + groups[b].len() > MAX_GROUP_SIZE {
            return None;
        }
        let union: Vec<usize> = groups[a].iter().chain(&groups[b]).copied().collect();
        Some(score_of(selected, &union, rule) - scores[a] - scores[b])
    };
    let mut delta: Vec<Vec<Option<f64>>> = (0..n)
        .map(|a| (0..n).map(|b| if a < b { merged_delta(&groups, &scores, a, b) } else { None }).collect())
        .collect();

    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for (a, row) in delta.iter().enumerate() {
            for (b, d) in row.iter().enumerate().skip(a + 1) {
                if let Some(d) = *d {
                    if d < -1e-9 && best.is_none_or(|(_, _, bd)| d < bd) {
                        best = Some((a, b, d));
                    }
                }
            }
        }
        let Some((a, b, _)) = best else { break };

        let absorbed = groups.remove(b);
        groups[a].extend(absorbed);
        scores.remove(b);
        scores[a] = score_of(selected, &groups[a], rule);
        delta.remove(b);
        for row in delta.iter_mut() {
            row.remove(b);
        }
        for other in 0..groups.len() {
            if other == a {
                continue;
            }
            let (lo, hi) = (other.min(a), other.max(a));
            delta[lo][hi] = merged_delta(&groups, &scores, lo, hi);
        }
    }

    let tables = groups.iter().map(|g| counts(selected, g)).collect();
    EcgaModel { n, groups, tables }
}

/// Draws each group independently from its empirical joint distribution.
pub fn sample_ecga(model: &EcgaModel, count: usize, rng: &mut impl Rng) -> Vec<BitString> {
    let cumulative: Vec<Vec<u64>> = model
        .tables
        .iter()
        .map(|t| {
            t.iter()
                .scan(0u64, |acc, &c| {
                    *acc += c;
                    Some(*acc)
                })
                .collect()
        })
        .collect();
    (0..count)
        .map(|_| {
            let mut x = BitString::zeros(model.n);
            for (group, cum) in model.groups.iter().zip(&cumulative) {
                let r = rng.random_range(0..*cum.last().expect("non-empty table"));
                let config = cum.partition_point(|&c| c <= r);
                for (t, &v) in group.iter().enumerate() {
                    x.set(v, ((config >> t) & 1) as u8);
                }
            }
            x
        })
        .collect()
}
