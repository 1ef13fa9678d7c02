//! Bit-string genomes and the benchmark pseudo-boolean fitness families.
//!
//! Every family is built from the k-bit trap `trap_k(l) = k if l == k else k - l - 1`
//! (where `l` counts ones in a block), its inverse, and one-max. Variable 0 is the
//! leftmost bit; families with a control bit reserve index 0 for it and lay their
//! blocks out over indices `1..n`.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported problem length. Subset masks are serialized as `u128`.
pub const MAX_VARIABLES: usize = 128;

/// Fixed-length binary genome. Each element is 0 or 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitString(Vec<u8>);

impl BitString {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Argument("bit string must have positive length".into()));
        }
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::Argument(format!(
                "bit {pos} has value {}, expected 0 or 1",
                bits[pos]
            )));
        }
        Ok(Self(bits))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![1; n])
    }

    /// Bit `i` of `mask` becomes variable `i`.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        let mut x = Self::zeros(n);
        x.set_from_mask(mask);
        x
    }

    pub fn set_from_mask(&mut self, mask: u64) {
        for (i, b) in self.0.iter_mut().enumerate() {
            *b = ((mask >> i) & 1) as u8;
        }
    }

    /// Inverse of [`BitString::from_mask`]; only meaningful for `n <= 64`.
    pub fn to_mask(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .fold(0u64, |m, (i, &b)| m | (u64::from(b) << i))
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self((0..n).map(|_| rng.random_range(0..2u8)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, value: u8) {
        self.0[i] = value & 1;
    }

    /// Ones-count u(x).
    pub fn ones_count(&self) -> usize {
        ones(&self.0)
    }

    pub fn hamming(&self, other: &BitString) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }

    pub fn complement(&self) -> Self {
        Self(self.0.iter().map(|b| 1 - b).collect())
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }
}

impl AsRef<[u8]> for BitString {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Parse(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        BitString::new(bits)
    }
}

/// Anything that maps `{0,1}^n` to a real number.
pub trait PseudoBoolean: Sync {
    fn num_vars(&self) -> usize;

    /// Fitness of `x`; callers guarantee `x.len() == self.num_vars()`.
    fn fitness(&self, x: &[u8]) -> f64;
}

impl<T: PseudoBoolean + ?Sized> PseudoBoolean for &T {
    fn num_vars(&self) -> usize {
        (**self).num_vars()
    }

    fn fitness(&self, x: &[u8]) -> f64 {
        (**self).fitness(x)
    }
}

/// Adapts a closure into a [`PseudoBoolean`].
pub struct FnObjective<F> {
    n: usize,
    f: F,
}

impl<F> FnObjective<F>
where
    F: Fn(&[u8]) -> f64 + Sync,
{
    pub fn new(n: usize, f: F) -> Self {
        Self { n, f }
    }
}

impl<F> PseudoBoolean for FnObjective<F>
where
    F: Fn(&[u8]) -> f64 + Sync,
{
    fn num_vars(&self) -> usize {
        self.n
    }

    fn fitness(&self, x: &[u8]) -> f64 {
        (self.f)(x)
    }
}

/// Wraps an objective and counts every evaluation.
pub struct CountingObjective<O> {
    inner: O,
    calls: AtomicU64,
}

impl<O: PseudoBoolean> CountingObjective<O> {
    pub fn new(inner: O) -> Self {
        Self {
            inner,
            calls: AtomicU64::new(0),
        }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}

impl<O: PseudoBoolean> PseudoBoolean for CountingObjective<O> {
    fn num_vars(&self) -> usize {
        self.inner.num_vars()
    }

    fn fitness(&self, x: &[u8]) -> f64 {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.fitness(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    OneMax,
    Trap,
    InverseTrap,
    TrapI1,
    TrapI2,
    Msp1,
    Msp2,
    Msp3,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::OneMax,
        Family::Trap,
        Family::InverseTrap,
        Family::TrapI1,
        Family::TrapI2,
        Family::Msp1,
        Family::Msp2,
        Family::Msp3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::OneMax => "onemax",
            Family::Trap => "trap",
            Family::InverseTrap => "itrap",
            Family::TrapI1 => "trapi1",
            Family::TrapI2 => "trapi2",
            Family::Msp1 => "msp1",
            Family::Msp2 => "msp2",
            Family::Msp3 => "msp3",
        }
    }

    pub fn has_control_bit(self) -> bool {
        matches!(self, Family::TrapI1 | Family::TrapI2 | Family::Msp1)
    }

    pub fn uses_alpha(self) -> bool {
        matches!(self, Family::Msp1 | Family::Msp2 | Family::Msp3)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "onemax" => Ok(Family::OneMax),
            "trap" => Ok(Family::Trap),
            "itrap" | "inversetrap" | "inverse-trap" => Ok(Family::InverseTrap),
            "trapi1" => Ok(Family::TrapI1),
            "trapi2" => Ok(Family::TrapI2),
            "msp1" => Ok(Family::Msp1),
            "msp2" => Ok(Family::Msp2),
            "msp3" => Ok(Family::Msp3),
            other => Err(Error::Parse(format!("unknown problem family `{other}`"))),
        }
    }
}

/// Parsed form of `family:n:k[:k2][:alpha]`.
///
/// The fourth field is `k2` for `msp3` and `alpha` for the other MSP families.
/// `onemax` takes only `n`. Displaying a spec yields its canonical string, which
/// is also the join key used across the CSV artifacts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub family: Family,
    pub n: usize,
    pub k: Option<usize>,
    pub k2: Option<usize>,
    pub alpha: f64,
}

impl ProblemSpec {
    pub const DEFAULT_ALPHA: f64 = 1.0;

    pub fn new(family: Family, n: usize, k: Option<usize>) -> Self {
        let k2 = match (family, k) {
            (Family::Msp3, Some(k1)) => Some(default_msp3_k2(k1)),
            _ => None,
        };
        Self {
            family,
            n,
            k,
            k2,
            alpha: Self::DEFAULT_ALPHA,
        }
    }
}

/// Second block size for MSP3 when only `k1` is given: the (3, 5) pair.
pub fn default_msp3_k2(k1: usize) -> usize {
    if k1 == 5 {
        3
    } else {
        5
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.family, self.n)?;
        if let Some(k) = self.k {
            write!(f, ":{k}")?;
        }
        if let Some(k2) = self.k2 {
            write!(f, ":{k2}")?;
        }
        if self.family.uses_alpha() && self.alpha != Self::DEFAULT_ALPHA {
            write!(f, ":{}", self.alpha)?;
        }
        Ok(())
    }
}

impl FromStr for ProblemSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fields: Vec<&str> = s.trim().split(':').map(str::trim).collect();
        let family: Family = fields[0].parse()?;
        let int = |idx: usize, what: &str| -> Result<usize> {
            fields[idx]
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("`{s}`: {what} must be a positive integer")))
        };
        let float = |idx: usize| -> Result<f64> {
            fields[idx]
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("`{s}`: alpha must be a number")))
        };
        if fields.len() < 2 {
            return Err(Error::Parse(format!("`{s}`: expected family:n[:k...]")));
        }
        let n = int(1, "n")?;
        let mut spec = ProblemSpec::new(family, n, None);
        match family {
            Family::OneMax => {
                if fields.len() > 2 {
                    return Err(Error::Parse(format!("`{s}`: onemax takes only n")));
                }
            }
            Family::Msp3 => {
                if fields.len() < 3 || fields.len() > 5 {
                    return Err(Error::Parse(format!("`{s}`: expected msp3:n:k1[:k2][:alpha]")));
                }
                let k1 = int(2, "k1")?;
                spec.k = Some(k1);
                spec.k2 = Some(if fields.len() >= 4 {
                    int(3, "k2")?
                } else {
                    default_msp3_k2(k1)
                });
                if fields.len() == 5 {
                    spec.alpha = float(4)?;
                }
            }
            _ => {
                let max_fields = if family.uses_alpha() { 4 } else { 3 };
                if fields.len() < 3 || fields.len() > max_fields {
                    let tail = if family.uses_alpha() { "[:alpha]" } else { "" };
                    return Err(Error::Parse(format!(
                        "`{s}`: expected {family}:n:k{tail}"
                    )));
                }
                spec.k = Some(int(2, "k")?);
                if fields.len() == 4 {
                    spec.alpha = float(3)?;
                }
            }
        }
        Ok(spec)
    }
}

/// Disjoint variable groups, one per subfunction, plus any control bits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkageStructure {
    pub groups: Vec<Vec<usize>>,
    pub control_bits: Vec<usize>,
}

impl LinkageStructure {
    fn consecutive(offset: usize, len: usize, k: usize) -> Vec<Vec<usize>> {
        (0..len / k)
            .map(|b| (offset + b * k..offset + (b + 1) * k).collect())
            .collect()
    }

    /// Dependent and independent variable pairs used by the pairwise metrics.
    ///
    /// The dependent pair is the two lowest indices of the first group; the
    /// independent pair joins the lowest index of the first and second groups.
    pub fn canonical_pairs(&self) -> Option<CanonicalPairs> {
        let first = self.groups.first()?;
        let second = self.groups.get(1)?;
        if first.len() < 2 || second.is_empty() {
            return None;
        }
        Some(CanonicalPairs {
            dependent: (first[0], first[1]),
            independent: (first[0], second[0]),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalPairs {
    pub dependent: (usize, usize),
    pub independent: (usize, usize),
}

/// A validated benchmark instance: spec, linkage structure, maximum and optima.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    spec: ProblemSpec,
    structure: LinkageStructure,
    f_max: f64,
    global_optima: Vec<BitString>,
}

impl ProblemInstance {
    pub fn new(spec: ProblemSpec) -> Result<Self> {
        validate(&spec)?;
        let structure = build_structure(&spec);
        let mut instance = Self {
            spec,
            structure,
            f_max: f64::NEG_INFINITY,
            global_optima: Vec::new(),
        };
        // Every family peaks at the all-zeros or all-ones string: trap and one-max
        // terms attain their maxima only there, and `max`/switching combinations of
        // such terms inherit that. Exhaustive tests in this module confirm it.
        let candidates = [BitString::zeros(spec.n), BitString::ones(spec.n)];
        let values: Vec<f64> = candidates
            .iter()
            .map(|c| instance.fitness(c.as_slice()))
            .collect();
        let f_max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        instance.f_max = f_max;
        instance.global_optima = candidates
            .into_iter()
            .zip(values)
            .filter(|(_, v)| *v == f_max)
            .map(|(c, _)| c)
            .collect();
        Ok(instance)
    }

    pub fn family(&self) -> Family {
        self.spec.family
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn k(&self) -> Option<usize> {
        self.spec.k
    }

    pub fn k2(&self) -> Option<usize> {
        self.spec.k2
    }

    pub fn alpha(&self) -> f64 {
        self.spec.alpha
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn structure(&self) -> &LinkageStructure {
        &self.structure
    }

    pub fn f_max(&self) -> f64 {
        self.f_max
    }

    pub fn global_optima(&self) -> &[BitString] {
        &self.global_optima
    }

    pub fn is_global_optimum(&self, x: &[u8]) -> bool {
        self.global_optima.iter().any(|o| o.as_slice() == x)
    }

    /// Checked evaluation.
    pub fn evaluate(&self, x: &BitString) -> Result<f64> {
        if x.len() != self.spec.n {
            return Err(Error::Dimension {
                expected: self.spec.n,
                actual: x.len(),
            });
        }
        Ok(self.fitness(x.as_slice()))
    }

    pub fn canonical_pairs(&self) -> Result<CanonicalPairs> {
        self.structure
            .canonical_pairs()
            .ok_or_else(|| Error::NoIndependentPair(self.spec.to_string()))
    }
}

impl FromStr for ProblemInstance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProblemInstance::new(s.parse()?)
    }
}

impl PseudoBoolean for ProblemInstance {
    fn num_vars(&self) -> usize {
        self.spec.n
    }

    fn fitness(&self, x: &[u8]) -> f64 {
        debug_assert_eq!(x.len(), self.spec.n);
        let spec = &self.spec;
        let n = spec.n;
        let k = spec.k.unwrap_or(1);
        match spec.family {
            Family::OneMax => ones(x) as f64,
            Family::Trap => trap_sum(x, k),
            Family::InverseTrap => inverse_trap_sum(x, k),
            Family::TrapI1 => {
                if x[0] == 0 {
                    inverse_trap_sum(&x[1..], k)
                } else {
                    trap_sum(&x[1..], k)
                }
            }
            Family::TrapI2 => {
                if x[0] == 0 {
                    inverse_trap_sum(&x[1..], k)
                } else {
                    shifted_trap_sum(&x[1..], k)
                }
            }
            Family::Msp1 => {
                if x[0] == 1 {
                    spec.alpha + trap_sum(&x[1..], k)
                } else {
                    (n - 1 - ones(&x[1..])) as f64
                }
            }
            Family::Msp2 => {
                let trap = spec.alpha + trap_sum(x, k);
                let onemax = (n - 1) as f64 - ones(x) as f64;
                trap.max(onemax)
            }
            Family::Msp3 => {
                let k2 = spec.k2.unwrap_or_else(|| default_msp3_k2(k));
                let direct = spec.alpha + trap_sum(x, k);
                let inverted: f64 = x
                    .chunks(k2)
                    .map(|block| trap_value(k2 - ones(block), k2))
                    .sum();
                direct.max(inverted)
            }
        }
    }
}

fn validate(spec: &ProblemSpec) -> Result<()> {
    let n = spec.n;
    let bad = |msg: String| Err(Error::Configuration(format!("{spec}: {msg}")));
    if n == 0 {
        return bad("n must be positive".into());
    }
    if n > MAX_VARIABLES {
        return Err(Error::Capacity {
            what: "problem length",
            limit: MAX_VARIABLES,
            requested: n,
        });
    }
    if !spec.alpha.is_finite() || spec.alpha < 0.0 {
        return bad("alpha must be finite and non-negative".into());
    }
    if !spec.family.uses_alpha() && spec.alpha != ProblemSpec::DEFAULT_ALPHA {
        return bad(format!("alpha does not apply to {}", spec.family));
    }
    if spec.family == Family::OneMax {
        return Ok(());
    }
    let Some(k) = spec.k else {
        return bad("block size k is required".into());
    };
    if k < 2 {
        return bad("block size k must be at least 2".into());
    }
    match spec.family {
        Family::Trap | Family::InverseTrap | Family::Msp2 => {
            if n % k != 0 {
                return bad(format!("k={k} must divide n={n}"));
            }
        }
        Family::TrapI1 | Family::TrapI2 | Family::Msp1 => {
            if n < 2 || (n - 1) % k != 0 {
                return bad(format!("k={k} must divide n-1={}", n.saturating_sub(1)));
            }
        }
        Family::Msp3 => {
            let k2 = spec.k2.unwrap_or_else(|| default_msp3_k2(k));
            if k2 < 2 {
                return bad("block size k2 must be at least 2".into());
            }
            if k2 == k {
                return bad("msp3 needs k1 != k2".into());
            }
            if n % k != 0 || n % k2 != 0 {
                return bad(format!("both k1={k} and k2={k2} must divide n={n}"));
            }
        }
        Family::OneMax => unreachable!(),
    }
    Ok(())
}

fn build_structure(spec: &ProblemSpec) -> LinkageStructure {
    let n = spec.n;
    match spec.family {
        Family::OneMax => LinkageStructure {
            groups: vec![(0..n).collect()],
            control_bits: Vec::new(),
        },
        Family::TrapI1 | Family::TrapI2 | Family::Msp1 => LinkageStructure {
            groups: LinkageStructure::consecutive(1, n - 1, spec.k.unwrap()),
            control_bits: vec![0],
        },
        Family::Trap | Family::InverseTrap | Family::Msp2 | Family::Msp3 => LinkageStructure {
            groups: LinkageStructure::consecutive(0, n, spec.k.unwrap()),
            control_bits: Vec::new(),
        },
    }
}

#[inline]
fn ones(x: &[u8]) -> usize {
    x.iter().map(|&b| b as usize).sum()
}

/// `trap_k(l)`: `k` at `l == k`, otherwise `k - l - 1`.
pub fn trap_value(l: usize, k: usize) -> f64 {
    if l == k {
        k as f64
    } else {
        (k - l - 1) as f64
    }
}

/// Inverse trap with its optimum at `l == 0`: `k` there, otherwise `l - 1`.
pub fn inverse_trap_value(l: usize, k: usize) -> f64 {
    if l == 0 {
        k as f64
    } else {
        (l - 1) as f64
    }
}

fn trap_sum(x: &[u8], k: usize) -> f64 {
    x.chunks(k).map(|b| trap_value(ones(b), k)).sum()
}

fn inverse_trap_sum(x: &[u8], k: usize) -> f64 {
    x.chunks(k).map(|b| inverse_trap_value(ones(b), k)).sum()
}

/// Trap over blocks rotated by `ceil(k/2)` positions; the last block wraps
/// around to the start of `x`.
fn shifted_trap_sum(x: &[u8], k: usize) -> f64 {
    let len = x.len();
    let shift = k.div_ceil(2);
    (0..len / k)
        .map(|block| {
            let l = (0..k)
                .map(|t| x[(shift + block * k + t) % len] as usize)
                .sum();
            trap_value(l, k)
        })
        .sum()
}

/// Groups of the rotated partition used by TrapI2 when the control bit is 1,
/// in absolute variable indices.
pub fn trapi2_shifted_groups(n: usize, k: usize) -> Vec<Vec<usize>> {
    let len = n - 1;
    let shift = k.div_ceil(2);
    (0..len / k)
        .map(|block| {
            (0..k)
                .map(|t| 1 + (shift + block * k + t) % len)
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(s: &str) -> ProblemInstance {
        s.parse().unwrap()
    }

    fn eval(p: &ProblemInstance, bits: &str) -> f64 {
        p.evaluate(&bits.parse().unwrap()).unwrap()
    }

    fn enumerate_max(p: &ProblemInstance) -> (f64, Vec<BitString>) {
        let n = p.n();
        let mut best = f64::NEG_INFINITY;
        let mut argmax = Vec::new();
        let mut x = BitString::zeros(n);
        for mask in 0..(1u64 << n) {
            x.set_from_mask(mask);
            let v = p.fitness(x.as_slice());
            assert!(v >= 0.0, "{} negative at {x}", p.spec());
            if v > best {
                best = v;
                argmax.clear();
            }
            if v == best {
                argmax.push(x.clone());
            }
        }
        argmax.sort();
        (best, argmax)
    }

    #[test]
    fn trap_examples() {
        let p = problem("trap:3:3");
        assert_eq!(eval(&p, "111"), 3.0);
        assert_eq!(eval(&p, "000"), 2.0);
        assert_eq!(eval(&p, "110"), 0.0);
    }

    #[test]
    fn inverse_trap_examples() {
        let p = problem("itrap:3:3");
        assert_eq!(eval(&p, "111"), 2.0);
        assert_eq!(eval(&p, "000"), 3.0);
    }

    #[test]
    fn msp_examples() {
        let p = problem("msp1:4:3");
        assert_eq!(eval(&p, "1111"), 4.0);
        assert_eq!(eval(&p, "0000"), 3.0);

        let p = problem("msp2:3:3");
        assert_eq!(eval(&p, "111"), 4.0);
        assert_eq!(eval(&p, "110"), 1.0);

        let p = problem("msp3:6:3:2:1");
        assert_eq!(eval(&p, "111111"), 7.0);
        assert_eq!(eval(&p, "000000"), 6.0);
    }

    #[test]
    fn trapi2_matches_hand_table() {
        // n = 7, k = 3: bits 1..6 form positions 0..5. With the control bit set the
        // blocks are positions {2,3,4} and {5,0,1}, i.e. variables {3,4,5} and {6,1,2}.
        let p = problem("trapi2:7:3");
        let groups = trapi2_shifted_groups(7, 3);
        assert_eq!(groups, vec![vec![3, 4, 5], vec![6, 1, 2]]);

        let cases = [
            ("1111111", 6.0),
            ("0000000", 6.0),
            // control 1, vars 1..6 = 000000: two traps at l=0
            ("1000000", 4.0),
            // control 1, vars 3,4,5 = 111, vars 6,1,2 = 000
            ("1001110", 3.0 + 2.0),
            // control 1, vars 1,2,6 = 111, rest 0: the wrapped block is full
            ("1110001", 3.0 + 2.0),
            // control 0: inverse trap on {1,2,3},{4,5,6}
            ("0110001", 1.0 + 0.0),
            ("0000111", 3.0 + 2.0),
        ];
        for (bits, want) in cases {
            assert_eq!(eval(&p, bits), want, "{bits}");
        }
        let (best, argmax) = enumerate_max(&p);
        assert_eq!(best, 6.0);
        assert_eq!(argmax, vec![BitString::zeros(7), BitString::ones(7)]);
    }

    #[test]
    fn f_max_examples() {
        assert_eq!(problem("trap:12:3").f_max(), 12.0);
        assert_eq!(problem("msp2:30:3").f_max(), 31.0);
        let p = problem("trapi1:16:3");
        assert_eq!(p.f_max(), 15.0);
        assert_eq!(enumerate_max(&p).0, 15.0);
        assert_eq!(problem("msp1:13:3").f_max(), 13.0);
    }

    #[test]
    fn enumeration_agrees_with_analytic_optima() {
        let specs = [
            "onemax:10",
            "trap:12:3",
            "trap:15:5",
            "trap:10:5",
            "itrap:12:3",
            "itrap:10:5",
            "trapi1:13:3",
            "trapi1:16:5",
            "trapi1:16:3",
            "trapi2:13:3",
            "trapi2:16:5",
            "trapi2:16:3",
            "msp1:13:3",
            "msp1:16:5",
            "msp1:10:3:0",
            "msp1:10:3:2.5",
            "msp2:12:3",
            "msp2:15:5",
            "msp2:12:3:0",
            "msp3:15:3:5",
            "msp3:15:5:3",
            "msp3:12:3:2:0",
            "msp3:12:2:4",
        ];
        for s in specs {
            let p = problem(s);
            let (best, argmax) = enumerate_max(&p);
            assert_eq!(best, p.f_max(), "{s}");
            let mut optima = p.global_optima().to_vec();
            optima.sort();
            assert_eq!(argmax, optima, "{s}");
        }
    }

    #[test]
    fn mixed_traps_have_two_optima() {
        for s in ["trapi1:13:3", "trapi2:13:3", "trapi2:16:5"] {
            let p = problem(s);
            assert_eq!(p.global_optima().len(), 2, "{s}");
        }
    }

    #[test]
    fn msp2_global_beats_local() {
        let p = problem("msp2:12:3");
        assert!(eval(&p, "111111111111") > eval(&p, "000000000000"));
    }

    #[test]
    fn canonical_pairs_examples() {
        let pairs = problem("trap:12:3").canonical_pairs().unwrap();
        assert_eq!(pairs.dependent, (0, 1));
        assert_eq!(pairs.independent, (0, 3));

        let pairs = problem("trapi1:13:3").canonical_pairs().unwrap();
        assert_eq!(pairs.dependent, (1, 2));
        assert_eq!(pairs.independent, (1, 4));

        assert!(matches!(
            problem("onemax:8").canonical_pairs(),
            Err(Error::NoIndependentPair(_))
        ));
        assert!(problem("trap:3:3").canonical_pairs().is_err());
    }

    #[test]
    fn dimension_and_configuration_errors() {
        let p = problem("trap:6:3");
        assert!(matches!(
            p.evaluate(&BitString::zeros(5)),
            Err(Error::Dimension { expected: 6, actual: 5 })
        ));
        for bad in [
            "trap:10:3",
            "trapi1:12:3",
            "msp1:12:3",
            "msp3:12:3:5",
            "msp3:15:3:3",
            "trap:12:3:2",
            "msp2:12:3:-1",
            "trap:12:1",
        ] {
            let err = bad.parse::<ProblemInstance>().unwrap_err();
            assert!(err.is_configuration(), "{bad}: {err}");
        }
        assert!("foo:12:3".parse::<ProblemSpec>().is_err());
        assert!("trap:12".parse::<ProblemSpec>().is_err());
        assert!("onemax:8:2".parse::<ProblemSpec>().is_err());
        assert!("trap:200:4".parse::<ProblemInstance>().is_err());
    }

    #[test]
    fn spec_round_trips_canonically() {
        for s in ["trap:12:3", "onemax:8", "msp3:30:3:5", "msp1:13:3:0.5", "trapi2:16:5"] {
            let spec: ProblemSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert_eq!("msp3:30:3".parse::<ProblemSpec>().unwrap().to_string(), "msp3:30:3:5");
        assert_eq!("msp3:30:3:5:1".parse::<ProblemSpec>().unwrap().to_string(), "msp3:30:3:5");
        assert_eq!("msp2:12:3:1".parse::<ProblemSpec>().unwrap().to_string(), "msp2:12:3");
    }

    #[test]
    fn counting_objective_counts() {
        let p = problem("trap:6:3");
        let counted = CountingObjective::new(&p);
        for mask in 0..10u64 {
            counted.fitness(BitString::from_mask(mask, 6).as_slice());
        }
        assert_eq!(counted.calls(), 10);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn trap_is_blockwise_sum(mask in 0u64..(1 << 15), k in prop::sample::select(vec![3usize, 5])) {
                let p: ProblemInstance = format!("trap:15:{k}").parse().unwrap();
                let x = BitString::from_mask(mask, 15);
                let mut total = 0.0;
                for block in p.structure().groups.iter() {
                    let l = block.iter().filter(|&&i| x.get(i) == 1).count();
                    total += if l == k { k as f64 } else { (k - l - 1) as f64 };
                }
                prop_assert_eq!(p.evaluate(&x).unwrap(), total);
            }

            #[test]
            fn evaluation_is_pure(mask in 0u64..(1 << 13), fam in prop::sample::select(vec!["trapi1:13:3", "trapi2:13:3", "msp1:13:3", "msp2:12:3"])) {
                let p: ProblemInstance = fam.parse().unwrap();
                let x = BitString::from_mask(mask, p.n());
                let a = p.evaluate(&x).unwrap();
                let b = p.evaluate(&x).unwrap();
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
