//! Bayesian networks learned by greedy BIC edge addition.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitness::BitString;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoaNetwork {
    parents: Vec<Vec<usize>>,
    /// `cpt[v][c]` = P(x_v = 1 | parents encode to `c`), bit t of `c` being
    /// the value of `parents[v][t]`.
    cpt: Vec<Vec<f64>>,
}

impl BoaNetwork {
    /// Network with no edges and the given marginals.
    pub fn independent(marginals: &[f64]) -> Result<Self> {
        Self::new(vec![Vec::new(); marginals.len()], marginals.iter().map(|&p| vec![p]).collect())
    }

    pub fn new(parents: Vec<Vec<usize>>, cpt: Vec<Vec<f64>>) -> Result<Self> {
        let net = Self { parents, cpt };
        net.validate()?;
        Ok(net)
    }

    pub fn num_vars(&self) -> usize {
        self.parents.len()
    }

    pub fn parents(&self) -> &[Vec<usize>] {
        &self.parents
    }

    pub fn cpt(&self) -> &[Vec<f64>] {
        &self.cpt
    }

    /// All edges as (parent, child), sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self
            .parents
            .iter()
            .enumerate()
            .flat_map(|(child, ps)| ps.iter().map(move |&p| (p, child)))
            .collect();
        edges.sort_unstable();
        edges
    }

    pub fn has_edge_between(&self, a: usize, b: usize) -> bool {
        self.parents[a].contains(&b) || self.parents[b].contains(&a)
    }

    /// Kahn's algorithm with the smallest ready node first; None if cyclic.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        topological_order(&self.parents)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.parents.len();
        if self.cpt.len() != n {
            return Err(Error::Argument("one conditional table per node is required".into()));
        }
        for (v, (ps, table)) in self.parents.iter().zip(&self.cpt).enumerate() {
            if ps.iter().any(|&p| p >= n || p == v) {
                return Err(Error::Argument(format!("node {v} has an invalid parent")));
            }
            if ps.len() >= usize::BITS as usize || table.len() != 1 << ps.len() {
                return Err(Error::Argument(format!("node {v} table does not match its parents")));
            }
            if table.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::Argument(format!("node {v} has a probability outside [0, 1]")));
            }
        }
        if self.topological_order().is_none() {
            return Err(Error::Argument("network contains a cycle".into()));
        }
        Ok(())
    }
}

fn topological_order(parents: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = parents.len();
    let mut children = vec![Vec::new(); n];
    let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
    for (child, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(child);
        }
    }
    let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop_first() {
        order.push(v);
        for &c in &children[v] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.insert(c);
            }
        }
    }
    (order.len() == n).then_some(order)
}

fn parent_config(x: &BitString, parents: &[usize]) -> usize {
    parents
        .iter()
        .enumerate()
        .fold(0, |c, (t, &p)| c | (usize::from(x.get(p)) << t))
}

/// Counts of (x_v = 0, x_v = 1) for every parent configuration.
fn node_counts(data: &[BitString], node: usize, parents: &[usize]) -> Vec<[u64; 2]> {
    let mut counts = vec![[0u64; 2]; 1 << parents.len()];
    for x in data {
        counts[parent_config(x, parents)][usize::from(x.get(node))] += 1;
    }
    counts
}

/// Maximum-likelihood log2-likelihood of one node minus (log2 N)/2 per free
/// parameter (one per parent configuration).
fn node_bic(data: &[BitString], node: usize, parents: &[usize]) -> f64 {
    let ll: f64 = node_counts(data, node, parents)
        .iter()
        .map(|&[c0, c1]| {
            let total = (c0 + c1) as f64;
            [c0, c1]
                .iter()
                .filter(|&&c| c > 0)
                .map(|&c| c as f64 * (c as f64 / total).log2())
                .sum::<f64>()
        })
        .sum();
    ll - (data.len() as f64).log2() / 2.0 * (1u64 << parents.len()) as f64
}

/// BIC of `network`'s structure on `data` (higher is better).
pub fn bic_score(network: &BoaNetwork, data: &[BitString]) -> f64 {
    network
        .parents
        .iter()
        .enumerate()
        .map(|(v, ps)| node_bic(data, v, ps))
        .sum()
}

fn reaches(parents: &[Vec<usize>], from: usize, to: usize) -> bool {
    // Walk edges forward from `from` by following child links.
    let n = parents.len();
    let mut stack = vec![from];
    let mut seen = vec![false; n];
    while let Some(v) = stack.pop() {
        if v == to {
            return true;
        }
        if std::mem::replace(&mut seen[v], true) {
            continue;
        }
        stack.extend((0..n).filter(|&c| parents[c].contains(&v)));
    }
    false
}

/// Greedy hill climbing from the empty network, adding the single edge with
/// the largest BIC gain until no acyclic, cap-respecting edge improves it.
/// CPTs are then fitted with pseudo-count 1.
pub fn build_boa_network(selected: &[BitString], n: usize, max_parents: usize) -> BoaNetwork {
    assert!(!selected.is_empty(), "BOA network needs a non-empty selected set");
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut node_score: Vec<f64> = (0..n).map(|v| node_bic(selected, v, &[])).collect();

    // gain[i][j] for adding edge i -> j.
    let gain_for = |parents: &[Vec<usize>], node_score: &[f64], i: usize, j: usize| -> f64 {
        let mut ps = parents[j].clone();
        ps.push(i);
        node_bic(selected, j, &ps) - node_score[j]
    };
    let mut gain = vec![vec![f64::NEG_INFINITY; n]; n];
    if max_parents > 0 {
        for (i, row) in gain.iter_mut().enumerate() {
            for (j, g) in row.iter_mut().enumerate() {
                if i != j {
                    *g = gain_for(&parents, &node_score, i, j);
                }
            }
        }
    }

    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for (i, row) in gain.iter().enumerate() {
            for (j, &g) in row.iter().enumerate() {
                if g > 1e-9
                    && best.is_none_or(|(_, _, bg)| g > bg)
                    && parents[j].len() < max_parents
                    && !parents[j].contains(&i)
                    && !reaches(&parents, j, i)
                {
                    best = Some((i, j, g));
                }
            }
        }
        let Some((i, j, g)) = best else { break };
        parents[j].push(i);
        node_score[j] += g;
        for k in 0..n {
            gain[k][j] = if k == j || parents[j].contains(&k) || parents[j].len() >= max_parents {
                f64::NEG_INFINITY
            } else {
                gain_for(&parents, &node_score, k, j)
            };
        }
    }

    let cpt = parents
        .iter()
        .enumerate()
        .map(|(v, ps)| {
            node_counts(selected, v, ps)
                .iter()
                .map(|&[c0, c1]| (c1 as f64 + 1.0) / ((c0 + c1) as f64 + 2.0))
                .collect()
        })
        .collect();
    BoaNetwork { parents, cpt }
}

/// Ancestral sampling in topological order.
pub fn sample_boa(network: &BoaNetwork, count: usize, rng: &mut impl Rng) -> Vec<BitString> {
    let order = network.topological_order().expect("network is acyclic");
    (0..count)
        .map(|_| {
            let mut x = BitString::zeros(network.num_vars());
            for &v in &order {
                let p = network.cpt[v][parent_config(&x, &network.parents[v])];
                x.set(v, u8::from(rng.random::<f64>() < p));
            }
            x
        })
        .collect()
}
