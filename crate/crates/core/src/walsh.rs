//! Walsh–Hadamard decomposition of pseudo-boolean functions.
//!
//! Fitness tables are indexed by bitmask with variable 0 as the least
//! significant bit, and the basis function for subset `M` is
//! `W_M(x) = (-1)^{|M ∩ ones(x)|}`. Under this convention the schema-average
//! identities and the schema-based coefficient estimator agree with the full
//! transform. Using zeros instead of ones in the exponent flips the sign of
//! odd-order coefficients only; every difficulty metric here uses `|α|`.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::fitness::{BitString, PseudoBoolean};

/// Largest `n` for which exhaustive enumeration is offered.
pub const EXACT_LIMIT: usize = 24;

/// Largest order for the dense Hadamard matrix.
pub const HADAMARD_LIMIT: usize = 14;

/// Sylvester Hadamard matrix of size `2^order`, built by doubling from `H_1`.
pub fn hadamard_matrix(order: usize) -> Result<Vec<Vec<i8>>> {
    if order == 0 || order > HADAMARD_LIMIT {
        return Err(Error::Capacity {
            what: "hadamard order",
            limit: HADAMARD_LIMIT,
            requested: order,
        });
    }
    let mut h: Vec<Vec<i8>> = vec![vec![1, 1], vec![1, -1]];
    for _ in 1..order {
        let size = h.len();
        let mut next = vec![vec![0i8; 2 * size]; 2 * size];
        for r in 0..size {
            for c in 0..size {
                let v = h[r][c];
                next[r][c] = v;
                next[r][c + size] = v;
                next[r + size][c] = v;
                next[r + size][c + size] = -v;
            }
        }
        h = next;
    }
    Ok(h)
}

/// Walsh coefficients `α_M`, indexed by subset mask.
#[derive(Clone, Debug, PartialEq)]
pub struct WalshSpectrum {
    n: usize,
    coeffs: Vec<f64>,
}

impl WalshSpectrum {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coefficient(&self, mask: usize) -> f64 {
        self.coeffs[mask]
    }

    /// Coefficient of the subset given as variable indices.
    pub fn coefficient_of(&self, subset: &[usize]) -> f64 {
        self.coeffs[subset.iter().fold(0usize, |m, &i| m | (1 << i))]
    }

    /// Rebuilds the fitness table, `f = H_n · α`.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut table = self.coeffs.clone();
        fwht_in_place(&mut table);
        table
    }
}

/// Tabulates `f` over all `2^n` points in canonical mask order.
pub fn fitness_table<F: PseudoBoolean + ?Sized>(f: &F) -> Result<Vec<f64>> {
    let n = f.num_vars();
    check_exact(n)?;
    let mut x = BitString::zeros(n);
    Ok((0..1u64 << n)
        .map(|mask| {
            x.set_from_mask(mask);
            f.fitness(x.as_slice())
        })
        .collect())
}

fn check_exact(n: usize) -> Result<()> {
    if n > EXACT_LIMIT {
        return Err(Error::Capacity {
            what: "exhaustive enumeration",
            limit: EXACT_LIMIT,
            requested: n,
        });
    }
    Ok(())
}

fn table_order(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::Argument(format!(
            "fitness table length {len} is not a power of two"
        )));
    }
    let n = len.trailing_zeros() as usize;
    check_exact(n)?;
    Ok(n)
}

/// `α = H_n f / 2^n` by direct summation, `O(4^n)`.
pub fn walsh_transform_naive(table: &[f64]) -> Result<WalshSpectrum> {
    let n = table_order(table.len())?;
    let size = table.len();
    let scale = 1.0 / size as f64;
    let coeffs = (0..size)
        .map(|m| {
            let sum: f64 = table
                .iter()
                .enumerate()
                .map(|(x, &fx)| if (m & x).count_ones() % 2 == 0 { fx } else { -fx })
                .sum();
            sum * scale
        })
        .collect();
    Ok(WalshSpectrum { n, coeffs })
}

/// Fast Walsh–Hadamard transform, `O(2^n · n)`.
pub fn walsh_transform_fast(table: &[f64]) -> Result<WalshSpectrum> {
    let n = table_order(table.len())?;
    let mut coeffs = table.to_vec();
    fwht_in_place(&mut coeffs);
    let scale = 1.0 / coeffs.len() as f64;
    coeffs.iter_mut().for_each(|c| *c *= scale);
    Ok(WalshSpectrum { n, coeffs })
}

/// Unnormalized in-place butterfly; applying it twice multiplies by `len`.
pub fn fwht_in_place(data: &mut [f64]) {
    let len = data.len();
    debug_assert!(len.is_power_of_two());
    let mut half = 1;
    while half < len {
        for chunk in data.chunks_exact_mut(2 * half) {
            let (lo, hi) = chunk.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half *= 2;
    }
}

/// Full spectrum of an objective by exhaustive tabulation.
pub fn spectrum_of<F: PseudoBoolean + ?Sized>(f: &F) -> Result<WalshSpectrum> {
    walsh_transform_fast(&fitness_table(f)?)
}

/// A hyperplane over `{0, 1, *}`; position `i` is variable `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Schema {
    symbols: Vec<Option<u8>>,
}

impl Schema {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, i: usize) -> Option<u8> {
        self.symbols[i]
    }

    /// Indices of determined positions (the set J).
    pub fn determined(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.symbols[i].is_some()).collect()
    }

    /// Mask of determined positions and mask of positions fixed to 1.
    fn masks(&self) -> (usize, usize) {
        self.symbols
            .iter()
            .enumerate()
            .fold((0, 0), |(det, one), (i, s)| match s {
                Some(1) => (det | 1 << i, one | 1 << i),
                Some(_) => (det | 1 << i, one),
                None => (det, one),
            })
    }

    pub fn matches(&self, x: &[u8]) -> bool {
        self.symbols
            .iter()
            .zip(x)
            .all(|(s, &b)| s.is_none_or(|v| v == b))
    }
}

impl FromStr for Schema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(Some(0)),
                '1' => Ok(Some(1)),
                '*' => Ok(None),
                other => Err(Error::Parse(format!("invalid schema symbol {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if symbols.is_empty() {
            return Err(Error::Parse("empty schema".into()));
        }
        Ok(Schema { symbols })
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            f.write_str(match s {
                Some(0) => "0",
                Some(_) => "1",
                None => "*",
            })?;
        }
        Ok(())
    }
}

/// Mean fitness of a schema from the spectrum:
/// `α_∅ + Σ_{∅≠J'⊆J} α_{J'} (-1)^{u(J')}`.
pub fn schema_average_exact(spectrum: &WalshSpectrum, schema: &Schema) -> Result<f64> {
    if schema.len() != spectrum.n {
        return Err(Error::Dimension {
            expected: spectrum.n,
            actual: schema.len(),
        });
    }
    let (det, one) = schema.masks();
    // Walk every submask of `det`, including the empty set.
    let mut total = 0.0;
    let mut sub = det;
    loop {
        let sign = if (sub & one).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * spectrum.coeffs[sub];
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & det;
    }
    Ok(total)
}

/// Mean fitness over every completion of the schema, by enumeration.
pub fn schema_average_bruteforce<F: PseudoBoolean + ?Sized>(f: &F, schema: &Schema) -> Result<f64> {
    let n = f.num_vars();
    if schema.len() != n {
        return Err(Error::Dimension {
            expected: n,
            actual: schema.len(),
        });
    }
    check_exact(n)?;
    let free: Vec<usize> = (0..n).filter(|&i| schema.symbol(i).is_none()).collect();
    let mut x = BitString::zeros(n);
    for i in 0..n {
        if let Some(v) = schema.symbol(i) {
            x.set(i, v);
        }
    }
    let count = 1u64 << free.len();
    let mut sum = 0.0;
    for assignment in 0..count {
        for (t, &i) in free.iter().enumerate() {
            x.set(i, ((assignment >> t) & 1) as u8);
        }
        sum += f.fitness(x.as_slice());
    }
    Ok(sum / count as f64)
}

/// How to obtain the schema-cell means that feed a coefficient estimate.
pub enum CoefficientMethod<'a> {
    /// Exhaustive schema means (`n <= 24`).
    Exact,
    /// Random contexts; each trial evaluates all `2^|M|` settings of the subset.
    Confusion {
        trials: usize,
        rng: &'a mut dyn RngCore,
    },
    /// Schema-cell means over a fixed sample with precomputed fitness.
    Population {
        samples: &'a [BitString],
        fitness: &'a [f64],
    },
}

fn validate_subset(n: usize, subset: &[usize]) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::Argument("coefficient subset must be non-empty".into()));
    }
    if subset.len() > 20 {
        return Err(Error::Capacity {
            what: "coefficient order",
            limit: 20,
            requested: subset.len(),
        });
    }
    for (pos, &i) in subset.iter().enumerate() {
        if i >= n {
            return Err(Error::Argument(format!("variable {i} out of range for n={n}")));
        }
        if subset[..pos].contains(&i) {
            return Err(Error::Argument(format!("variable {i} repeated in subset")));
        }
    }
    Ok(())
}

/// Index of the schema cell that `x` falls into: bit `t` is `x[subset[t]]`.
#[inline]
fn cell_of(x: &[u8], subset: &[usize]) -> usize {
    subset
        .iter()
        .enumerate()
        .fold(0, |c, (t, &i)| c | (x[i] as usize) << t)
}

/// `α_M = 2^{-|M|} Σ_b (-1)^{u(b)} f̄(b ⊕ *)` over the cell means.
fn combine_cells(means: &[f64]) -> f64 {
    let signed: f64 = means
        .iter()
        .enumerate()
        .map(|(b, &m)| if b.count_ones() % 2 == 0 { m } else { -m })
        .sum();
    signed / means.len() as f64
}

fn describe_cell(subset: &[usize], cell: usize) -> String {
    subset
        .iter()
        .enumerate()
        .map(|(t, i)| format!("x{i}={}", (cell >> t) & 1))
        .collect::<Vec<_>>()
        .join(",")
}

/// Estimates the Walsh coefficient of `subset` from schema fitness values.
pub fn estimate_coefficient<F: PseudoBoolean + ?Sized>(
    f: &F,
    subset: &[usize],
    method: CoefficientMethod<'_>,
) -> Result<f64> {
    let n = f.num_vars();
    validate_subset(n, subset)?;
    match method {
        CoefficientMethod::Exact => {
            check_exact(n)?;
            let mut sums = vec![0.0; 1 << subset.len()];
            let mut x = BitString::zeros(n);
            for mask in 0..1u64 << n {
                x.set_from_mask(mask);
                sums[cell_of(x.as_slice(), subset)] += f.fitness(x.as_slice());
            }
            let per_cell = (1u64 << (n - subset.len())) as f64;
            sums.iter_mut().for_each(|s| *s /= per_cell);
            Ok(combine_cells(&sums))
        }
        CoefficientMethod::Confusion { trials, rng } => {
            if trials == 0 {
                return Err(Error::Argument("confusion method needs at least one trial".into()));
            }
            let contexts: Vec<BitString> =
                (0..trials).map(|_| BitString::random(n, &mut *rng)).collect();
            confusion_over_contexts(f, subset, &contexts)
        }
        CoefficientMethod::Population { samples, fitness } => {
            if samples.len() != fitness.len() {
                return Err(Error::Dimension {
                    expected: samples.len(),
                    actual: fitness.len(),
                });
            }
            let cells = 1 << subset.len();
            let mut sums = vec![0.0; cells];
            let mut counts = vec![0usize; cells];
            for (x, &fx) in samples.iter().zip(fitness) {
                if x.len() != n {
                    return Err(Error::Dimension {
                        expected: n,
                        actual: x.len(),
                    });
                }
                let c = cell_of(x.as_slice(), subset);
                sums[c] += fx;
                counts[c] += 1;
            }
            if let Some(empty) = counts.iter().position(|&c| c == 0) {
                return Err(Error::InsufficientCoverage {
                    cell: describe_cell(subset, empty),
                });
            }
            let means: Vec<f64> = sums.iter().zip(&counts).map(|(s, &c)| s / c as f64).collect();
            Ok(combine_cells(&means))
        }
    }
}

/// Confusion estimate over explicit contexts: the average of the per-context
/// signed combinations. Bits of `subset` in each context are overwritten.
pub fn confusion_over_contexts<F: PseudoBoolean + ?Sized>(
    f: &F,
    subset: &[usize],
    contexts: &[BitString],
) -> Result<f64> {
    let n = f.num_vars();
    validate_subset(n, subset)?;
    if contexts.is_empty() {
        return Err(Error::Argument("at least one context is required".into()));
    }
    let cells = 1usize << subset.len();
    let mut total = 0.0;
    let mut values = vec![0.0; cells];
    for context in contexts {
        if context.len() != n {
            return Err(Error::Dimension {
                expected: n,
                actual: context.len(),
            });
        }
        let mut x = context.clone();
        for (b, v) in values.iter_mut().enumerate() {
            for (t, &i) in subset.iter().enumerate() {
                x.set(i, ((b >> t) & 1) as u8);
            }
            *v = f.fitness(x.as_slice());
        }
        total += combine_cells(&values);
    }
    Ok(total / contexts.len() as f64)
}

/// Pairwise non-linearity `|f00 + f11 - f01 - f10|` around one context.
pub fn linc_nonlinearity<F: PseudoBoolean + ?Sized>(
    f: &F,
    i: usize,
    j: usize,
    context: &BitString,
) -> Result<f64> {
    let n = f.num_vars();
    if i == j {
        return Err(Error::Argument(format!("linc needs two distinct variables, got {i} twice")));
    }
    if context.len() != n {
        return Err(Error::Dimension {
            expected: n,
            actual: context.len(),
        });
    }
    if i >= n || j >= n {
        return Err(Error::Argument(format!("variables ({i},{j}) out of range for n={n}")));
    }
    let mut x = context.clone();
    let mut at = |a: u8, b: u8| {
        x.set(i, a);
        x.set(j, b);
        f.fitness(x.as_slice())
    };
    let (f00, f01, f10, f11) = (at(0, 0), at(0, 1), at(1, 0), at(1, 1));
    Ok((f00 + f11 - f01 - f10).abs())
}

/// All subsets of `0..n` with exactly `order` elements, in lexicographic order.
pub fn subsets_of_order(n: usize, order: usize) -> Vec<Vec<usize>> {
    fn recurse(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..=n - left {
            cur.push(i);
            recurse(i + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if order <= n {
        recurse(0, n, order, &mut Vec::with_capacity(order), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fitness::{FnObjective, ProblemInstance};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn linear() -> FnObjective<impl Fn(&[u8]) -> f64 + Sync> {
        FnObjective::new(2, |x: &[u8]| 3.0 + x[0] as f64 - 2.0 * x[1] as f64)
    }

    #[test]
    fn hadamard_base_and_orthogonality() {
        assert_eq!(hadamard_matrix(1).unwrap(), vec![vec![1, 1], vec![1, -1]]);
        assert_eq!(hadamard_matrix(2).unwrap()[3][3], 1);
        for order in 1..=6 {
            let h = hadamard_matrix(order).unwrap();
            let size = h.len();
            for r in 0..size {
                for c in 0..size {
                    let dot: i64 = (0..size).map(|t| (h[r][t] as i64) * (h[c][t] as i64)).sum();
                    assert_eq!(dot, if r == c { size as i64 } else { 0 });
                }
            }
        }
        assert!(hadamard_matrix(0).is_err());
        assert!(hadamard_matrix(15).is_err());
    }

    #[test]
    fn linear_example_magnitudes() {
        let table = fitness_table(&linear()).unwrap();
        for spectrum in [
            walsh_transform_naive(&table).unwrap(),
            walsh_transform_fast(&table).unwrap(),
        ] {
            let mags: Vec<f64> = spectrum.coeffs().iter().map(|c| c.abs()).collect();
            assert_eq!(mags, vec![2.5, 0.5, 1.0, 0.0]);
        }
    }

    #[test]
    fn printed_vector_order_flips_odd_signs() {
        // The printed example orders the table [f11, f01, f10, f00]; that is the
        // complement-indexed table, which negates odd-order coefficients.
        let printed = [2.0, 1.0, 4.0, 3.0];
        let h = hadamard_matrix(2).unwrap();
        let printed_alpha: Vec<f64> = (0..4)
            .map(|r| (0..4).map(|c| h[r][c] as f64 * printed[c]).sum::<f64>() / 4.0)
            .collect();
        assert_eq!(printed_alpha, vec![2.5, 0.5, -1.0, 0.0]);
        let ours = walsh_transform_fast(&fitness_table(&linear()).unwrap()).unwrap();
        for (m, (&a, &b)) in ours.coeffs().iter().zip(&printed_alpha).enumerate() {
            let sign = if (m as u32).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            assert_eq!(a, sign * b);
        }
    }

    #[test]
    fn constant_and_zero_tables() {
        let s = walsh_transform_fast(&[4.25; 16]).unwrap();
        assert_eq!(s.coefficient(0), 4.25);
        assert!(s.coeffs()[1..].iter().all(|&c| c == 0.0));
        let z = walsh_transform_fast(&[0.0; 32]).unwrap();
        assert!(z.coeffs().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn non_power_of_two_is_rejected() {
        assert!(walsh_transform_naive(&[1.0, 2.0, 3.0]).is_err());
        assert!(walsh_transform_fast(&[]).is_err());
    }

    #[test]
    fn naive_matches_dense_hadamard_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let table: Vec<f64> = (0..8).map(|_| rng.random_range(-5.0..5.0)).collect();
        let h = hadamard_matrix(3).unwrap();
        let dense: Vec<f64> = (0..8)
            .map(|r| (0..8).map(|c| h[r][c] as f64 * table[c]).sum::<f64>() / 8.0)
            .collect();
        let naive = walsh_transform_naive(&table).unwrap();
        for (a, b) in naive.coeffs().iter().zip(&dense) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn schema_average_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let table: Vec<f64> = (0..8).map(|_| rng.random_range(0.0..10.0)).collect();
        let s = walsh_transform_fast(&table).unwrap();
        let a = |m: usize| s.coefficient(m);
        let avg = |p: &str| schema_average_exact(&s, &p.parse().unwrap()).unwrap();
        assert!((avg("***") - a(0)).abs() < 1e-12);
        assert!((avg("**0") - (a(0) + a(4))).abs() < 1e-12);
        assert!((avg("11*") - (a(0) - a(1) - a(2) + a(3))).abs() < 1e-12);
        assert!(schema_average_exact(&s, &"**".parse().unwrap()).is_err());
        assert!("*2*".parse::<Schema>().is_err());
    }

    #[test]
    fn bruteforce_schema_examples() {
        let trap: ProblemInstance = "trap:3:3".parse().unwrap();
        let mean = schema_average_bruteforce(&trap, &"***".parse().unwrap()).unwrap();
        // trap_3 over masks 0..8 in order: {2,1,1,0,1,0,0,3}
        let listed = [2.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 3.0];
        assert_eq!(mean, listed.iter().sum::<f64>() / 8.0);
        assert_eq!(mean, 1.0);
        let x: BitString = "101".parse().unwrap();
        let full = schema_average_bruteforce(&trap, &"101".parse().unwrap()).unwrap();
        assert_eq!(full, trap.evaluate(&x).unwrap());

        let lin = linear();
        let spec = spectrum_of(&lin).unwrap();
        for p in ["1*", "*1", "0*", "**", "10"] {
            let schema: Schema = p.parse().unwrap();
            let exact = schema_average_exact(&spec, &schema).unwrap();
            let brute = schema_average_bruteforce(&lin, &schema).unwrap();
            assert!((exact - brute).abs() < 1e-12, "{p}");
        }
    }

    #[test]
    fn exact_coefficient_examples() {
        let lin = linear();
        assert_eq!(estimate_coefficient(&lin, &[0, 1], CoefficientMethod::Exact).unwrap(), 0.0);

        let trap3: ProblemInstance = "trap:3:3".parse().unwrap();
        let a = estimate_coefficient(&trap3, &[0, 1], CoefficientMethod::Exact).unwrap();
        assert!((a - 0.5).abs() < 1e-12);

        let trap12: ProblemInstance = "trap:12:3".parse().unwrap();
        let cross = estimate_coefficient(&trap12, &[0, 3], CoefficientMethod::Exact).unwrap();
        assert!(cross.abs() <= 1e-12);
    }

    #[test]
    fn exact_coefficient_matches_schema_identity() {
        // α_{1,2} = (f̄*11 - f̄*01 - f̄*10 + f̄*00) / 4
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let table: Vec<f64> = (0..8).map(|_| rng.random_range(0.0..10.0)).collect();
        let f = FnObjective::new(3, |x: &[u8]| table[BitString::new(x.to_vec()).unwrap().to_mask() as usize]);
        let m = |p: &str| schema_average_bruteforce(&f, &p.parse().unwrap()).unwrap();
        let by_schema = (m("*11") - m("*01") - m("*10") + m("*00")) / 4.0;
        let est = estimate_coefficient(&f, &[1, 2], CoefficientMethod::Exact).unwrap();
        assert!((est - by_schema).abs() < 1e-12);
    }

    #[test]
    fn confusion_over_all_contexts_is_exact() {
        let p: ProblemInstance = "msp2:9:3".parse().unwrap();
        let subset = [0, 4];
        let contexts: Vec<BitString> =
            (0..1u64 << 9).filter(|m| m & 0b10001 == 0).map(|m| BitString::from_mask(m, 9)).collect();
        assert_eq!(contexts.len(), 1 << 7);
        let conf = confusion_over_contexts(&p, &subset, &contexts).unwrap();
        let exact = estimate_coefficient(&p, &subset, CoefficientMethod::Exact).unwrap();
        assert!((conf - exact).abs() < 1e-12);
    }

    #[test]
    fn confusion_with_rng_runs() {
        let p: ProblemInstance = "trap:12:3".parse().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let est = estimate_coefficient(
            &p,
            &[0, 3],
            CoefficientMethod::Confusion { trials: 64, rng: &mut rng },
        )
        .unwrap();
        // Cross-block pairs have zero interaction in every context.
        assert_eq!(est, 0.0);
        let err = estimate_coefficient(&p, &[0, 1], CoefficientMethod::Confusion { trials: 0, rng: &mut rng });
        assert!(err.is_err());
    }

    #[test]
    fn population_full_enumeration_equals_exact() {
        let p: ProblemInstance = "trapi1:10:3".parse().unwrap();
        let samples: Vec<BitString> = (0..1u64 << 10).map(|m| BitString::from_mask(m, 10)).collect();
        let fitness: Vec<f64> = samples.iter().map(|x| p.evaluate(x).unwrap()).collect();
        for subset in [vec![1, 2], vec![1, 4], vec![0, 1], vec![3]] {
            let pop = estimate_coefficient(
                &p,
                &subset,
                CoefficientMethod::Population { samples: &samples, fitness: &fitness },
            )
            .unwrap();
            let exact = estimate_coefficient(&p, &subset, CoefficientMethod::Exact).unwrap();
            assert!((pop - exact).abs() < 1e-12, "{subset:?}");
        }
    }

    #[test]
    fn population_reports_empty_cell() {
        let p: ProblemInstance = "trap:6:3".parse().unwrap();
        let samples = vec![BitString::zeros(6), BitString::ones(6)];
        let fitness = vec![4.0, 6.0];
        let err = estimate_coefficient(
            &p,
            &[0, 1],
            CoefficientMethod::Population { samples: &samples, fitness: &fitness },
        )
        .unwrap_err();
        match err {
            Error::InsufficientCoverage { cell } => assert_eq!(cell, "x0=1,x1=0"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn invalid_subsets() {
        let p: ProblemInstance = "trap:6:3".parse().unwrap();
        assert!(estimate_coefficient(&p, &[], CoefficientMethod::Exact).is_err());
        assert!(estimate_coefficient(&p, &[0, 6], CoefficientMethod::Exact).is_err());
        assert!(estimate_coefficient(&p, &[2, 2], CoefficientMethod::Exact).is_err());
        let big: ProblemInstance = "trap:30:3".parse().unwrap();
        assert!(matches!(
            estimate_coefficient(&big, &[0, 1], CoefficientMethod::Exact),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn linc_examples() {
        let lin = linear();
        for mask in 0..4 {
            let ctx = BitString::from_mask(mask, 2);
            assert_eq!(linc_nonlinearity(&lin, 0, 1, &ctx).unwrap(), 0.0);
        }
        let product = FnObjective::new(4, |x: &[u8]| (x[1] * x[3]) as f64);
        assert_eq!(linc_nonlinearity(&product, 1, 3, &BitString::zeros(4)).unwrap(), 1.0);

        let trap: ProblemInstance = "trap:6:3".parse().unwrap();
        // f00 = trap(0) = 2, f11 = trap(2) = 0, f01 = f10 = trap(1) = 1
        assert_eq!(linc_nonlinearity(&trap, 0, 1, &BitString::zeros(6)).unwrap(), 0.0);
        // with x2 = 1: f00 = 1, f11 = 3, f01 = f10 = 0
        let ctx: BitString = "001000".parse().unwrap();
        assert_eq!(linc_nonlinearity(&trap, 0, 1, &ctx).unwrap(), 4.0);
        assert!(linc_nonlinearity(&trap, 2, 2, &ctx).is_err());
    }

    #[test]
    fn linc_is_four_times_single_context_term() {
        let p: ProblemInstance = "msp3:15:3:5".parse().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let ctx = BitString::random(15, &mut rng);
            let single = confusion_over_contexts(&p, &[2, 7], std::slice::from_ref(&ctx)).unwrap();
            let linc = linc_nonlinearity(&p, 2, 7, &ctx).unwrap();
            assert!((linc - 4.0 * single.abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn subsets_enumeration() {
        assert_eq!(subsets_of_order(4, 2).len(), 6);
        assert_eq!(subsets_of_order(3, 1), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(subsets_of_order(3, 3), vec![vec![0, 1, 2]]);
        assert!(subsets_of_order(2, 3).is_empty());
    }
}
