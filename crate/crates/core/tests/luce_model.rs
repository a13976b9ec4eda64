mod common;

use common::*;
use luce::luce::{enumerate_pmf, sample_counts, second_card_probability, sample_urn_with, UrnMethod};
use luce::{luce_pmf, sample_spacings, Execution, Orientation, Permutation, RngStream, Sampler, WeightVector};

#[test]
fn pmf_matches_sequential_draws() {
    let mut r = rng(1);
    for n in 1..=6 {
        let raw = random_weights(&mut r, n);
        let w = WeightVector::new(raw.clone()).unwrap();
        for s in permutations(n) {
            let p = luce_pmf(&w, &Permutation::new(s.clone()).unwrap()).unwrap();
            approx::assert_relative_eq!(p, urn_probability(&raw, &s), max_relative = 1e-12);
        }
    }
}

#[test]
fn pmf_sums_to_one() {
    let mut r = rng(2);
    for n in 1..=7 {
        let w = WeightVector::new(random_weights(&mut r, n)).unwrap();
        let total: f64 = enumerate_pmf(&w).unwrap().iter().sum();
        assert!((total - 1.0).abs() < 1e-12, "n = {n}: {total}");
    }
}

#[test]
fn scaling_weights_leaves_the_law_unchanged() {
    let w = WeightVector::new(vec![0.3, 1.7, 2.2, 0.9]).unwrap();
    let scaled = w.scale(123.5).unwrap();
    for p in Permutation::all(4) {
        approx::assert_relative_eq!(luce_pmf(&w, &p).unwrap(), luce_pmf(&scaled, &p).unwrap(), max_relative = 1e-13);
    }
}

#[test]
fn heavier_labels_first_is_more_likely() {
    let w = WeightVector::sukhatme(5, Orientation::Descending).unwrap();
    for s in Permutation::all(5) {
        let p = luce_pmf(&w, &s).unwrap();
        for up in s.bruhat_covers() {
            assert!(luce_pmf(&w, &up).unwrap() <= p * (1.0 + 1e-12), "{s} -> {up}");
        }
    }
    let mode = luce_pmf(&w, &Permutation::identity(5)).unwrap();
    assert!(Permutation::all(5).all(|p| luce_pmf(&w, &p).unwrap() <= mode));
}

#[test]
fn relative_order_of_a_subset_is_luce() {
    let raw = vec![0.5, 1.5, 0.25, 2.0, 1.0];
    let w = WeightVector::new(raw.clone()).unwrap();
    let subset = [2usize, 4, 5];
    let sub = WeightVector::new(subset.iter().map(|&l| raw[l - 1]).collect()).unwrap();
    for order in permutations(3) {
        let labels: Vec<usize> = order.iter().map(|&i| subset[i - 1]).collect();
        let marginal: f64 = permutations(5)
            .into_iter()
            .map(|s| Permutation::new(s).unwrap())
            .filter(|s| s.relative_order(&subset) == labels)
            .map(|s| luce_pmf(&w, &s).unwrap())
            .sum();
        let direct = luce_pmf(&sub, &Permutation::new(order).unwrap()).unwrap();
        assert!((marginal - direct).abs() < 1e-13);
    }
}

#[test]
fn second_card_marginal() {
    let mut r = rng(3);
    let raw = normalized(&random_weights(&mut r, 5));
    let w = WeightVector::new(raw.clone()).unwrap();
    for j in 1..=5 {
        let by_enum: f64 = permutations(5).iter().filter(|s| s[1] == j).map(|s| urn_probability(&raw, s)).sum();
        assert!((second_card_probability(&w, j).unwrap() - by_enum).abs() < 1e-14);
    }
}

#[test]
fn samplers_pass_chi_square() {
    let w = WeightVector::new(vec![0.4, 0.1, 0.25, 0.05, 0.2]).unwrap();
    let probs: Vec<f64> = Permutation::all(5).map(|p| urn_probability(w.as_slice(), p.as_slice())).collect();
    let critical = chi_square_critical(probs.len() - 1, 1e-4);
    for (sampler, seed) in [(Sampler::Urn, 11), (Sampler::Exponential, 12)] {
        let counts = sample_counts(&w, sampler, 200_000, seed, Execution::Parallel).unwrap();
        let stat = chi_square(&counts, &probs);
        assert!(stat < critical, "{sampler:?}: {stat} >= {critical}");
    }
}

#[test]
fn fenwick_urn_matches_linear_urn_in_law() {
    let w = WeightVector::new(vec![3.0, 1.0, 2.0, 0.5]).unwrap();
    let probs: Vec<f64> = Permutation::all(4).map(|p| urn_probability(w.as_slice(), p.as_slice())).collect();
    let mut counts = vec![0u64; 24];
    let mut r = RngStream::new(99);
    for _ in 0..100_000 {
        counts[sample_urn_with(&w, &mut r, UrnMethod::Tree).lex_rank()] += 1;
    }
    assert!(chi_square(&counts, &probs) < chi_square_critical(23, 1e-4));
}

#[test]
fn first_card_frequency_on_a_large_deck() {
    // Fenwick path; label 1 carries a tenth of the mass.
    let n = 12_000;
    let mut raw = vec![1.0; n];
    raw[0] = (n - 1) as f64 / 9.0;
    let w = WeightVector::new(raw).unwrap();
    let mut r = RngStream::new(5);
    let trials = 1500;
    let hits = (0..trials).filter(|_| luce::sample_urn(&w, &mut r).at(1) == 1).count();
    let f = hits as f64 / trials as f64;
    assert!((f - 0.1).abs() < 4.0 * (0.09f64 / trials as f64).sqrt(), "{f}");
}

#[test]
fn scaled_spacings_are_standard_exponential() {
    let n = 8;
    let mut r = RngStream::new(21);
    let mut scaled = Vec::new();
    for _ in 0..4000 {
        let d = sample_spacings(n, &mut r).unwrap();
        scaled.extend(d.iter().enumerate().map(|(j, x)| (n - j) as f64 * x));
    }
    let len = scaled.len();
    let ks = ks_exp1(&mut scaled);
    assert!(ks < ks_critical_001(len), "{ks}");
}

#[test]
fn counts_do_not_depend_on_execution() {
    let w = WeightVector::zipf(5, 1.0).unwrap();
    let a = sample_counts(&w, Sampler::Urn, 50_000, 4, Execution::Sequential).unwrap();
    let b = sample_counts(&w, Sampler::Urn, 50_000, 4, Execution::Parallel).unwrap();
    assert_eq!(a, b);
}
