use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use walsh_hardness::eda::boa::{bic_score, build_boa_network, BoaNetwork};
use walsh_hardness::eda::ecga::build_ecga_model;
use walsh_hardness::eda::{run_eda, Algorithm, EdaConfig};
use walsh_hardness::metrics::truncation_select;
use walsh_hardness::{BitString, ProblemInstance, PseudoBoolean};

fn truncated_sample(p: &ProblemInstance, size: usize, fraction: f64, seed: u64) -> Vec<BitString> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<BitString> = (0..size).map(|_| BitString::random(p.n(), &mut rng)).collect();
    let fs: Vec<f64> = xs.iter().map(|x| p.fitness(x.as_slice())).collect();
    truncation_select(&xs, &fs, fraction).unwrap()
}

#[test]
fn ecga_recovers_trap_blocks() {
    let p: ProblemInstance = "trap:12:3".parse().unwrap();
    let blocks = [vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8], vec![9, 10, 11]];
    let mut hits = 0;
    for seed in 0..20 {
        let selected = truncated_sample(&p, 8000, 0.1, seed);
        let model = build_ecga_model(&selected, 12);
        assert!(model.is_partition());
        let mut groups: Vec<Vec<usize>> = model.groups().to_vec();
        for g in &mut groups {
            g.sort_unstable();
        }
        if blocks.iter().all(|b| groups.contains(b)) {
            hits += 1;
        }
    }
    assert!(hits >= 18, "blocks recovered in {hits}/20 trials");
}

#[test]
fn learned_network_scores_at_least_empty() {
    for (spec, seed) in [("trap:12:3", 1), ("msp2:15:3", 2), ("onemax:10", 3)] {
        let p: ProblemInstance = spec.parse().unwrap();
        let data = truncated_sample(&p, 1000, 0.5, seed);
        let n = p.n();
        let marginals: Vec<f64> = (0..n)
            .map(|i| (data.iter().filter(|x| x.get(i) == 1).count() as f64 + 1.0) / (data.len() as f64 + 2.0))
            .collect();
        let empty = BoaNetwork::independent(&marginals).unwrap();
        let learned = build_boa_network(&data, n, 10);
        learned.validate().unwrap();
        assert!(learned.parents().iter().all(|ps| ps.len() <= 10));
        assert!(bic_score(&learned, &data) >= bic_score(&empty, &data) - 1e-9, "{spec}");
    }
}

#[test]
fn onemax_solved_quickly() {
    let p: ProblemInstance = "onemax:8".parse().unwrap();
    for seed in 0..5 {
        let out = run_eda(&p, &EdaConfig::new(Algorithm::Ecga, 200, seed)).unwrap();
        assert!(out.success);
        assert!(out.generations_used <= 20, "seed {seed}: {} generations", out.generations_used);
    }
}

#[test]
fn boa_solves_small_trap() {
    let p: ProblemInstance = "trap:9:3".parse().unwrap();
    let solved = (0..5)
        .filter(|&seed| run_eda(&p, &EdaConfig::new(Algorithm::Boa, 400, seed)).unwrap().success)
        .count();
    assert!(solved >= 4, "solved {solved}/5");
}
