//! The Luce distribution on permutations: sequential weighted sampling
//! without replacement.
//!
//! σ(1) is the first label drawn (the top card). Two exact samplers are
//! provided: the urn (sequential draws) and the exponential race (sort
//! independent `Exp(θᵢ)` clocks ascending). Both produce the same law.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::perm::Permutation;
use crate::rng::RngStream;
use crate::weights::WeightVector;

/// Largest `n` handled by the linear-scan urn; above it a Fenwick tree is used.
pub const URN_LINEAR_MAX: usize = 10_000;

/// Largest `n` for which [`sample_counts`] keeps a dense table of all `n!` outcomes.
pub const COUNT_TABLE_MAX_N: usize = 9;

/// Probability of the draw order `sigma`.
pub fn luce_pmf(w: &WeightVector, sigma: &Permutation) -> Result<f64> {
    if sigma.len() != w.len() {
        return Err(Error::DimensionMismatch { expected: w.len(), actual: sigma.len() });
    }
    // Remaining mass before step j is the suffix sum over σ(j..n); summing from
    // the back keeps every denominator exact to rounding.
    let mut remaining = 0.0;
    let mut p = 1.0;
    for &label in sigma.as_slice().iter().rev() {
        let t = w.theta(label);
        remaining += t;
        p *= t / remaining;
    }
    Ok(p)
}

pub fn luce_log_pmf(w: &WeightVector, sigma: &Permutation) -> Result<f64> {
    if sigma.len() != w.len() {
        return Err(Error::DimensionMismatch { expected: w.len(), actual: sigma.len() });
    }
    let mut remaining = 0.0;
    let mut lp = 0.0;
    for &label in sigma.as_slice().iter().rev() {
        let t = w.theta(label);
        remaining += t;
        lp += (t / remaining).ln();
    }
    Ok(lp)
}

/// P(σ(2) = `label`) = θ_label · Σ_{i≠label} θᵢ / (1 − θᵢ), for normalized weights.
pub fn second_card_probability(w: &WeightVector, label: usize) -> Result<f64> {
    w.require_normalized()?;
    if w.len() < 2 {
        return Err(Error::InvalidArgument("second card needs n >= 2".into()));
    }
    if label == 0 || label > w.len() {
        return Err(Error::LabelOutOfRange { label, n: w.len() });
    }
    let s: f64 = (1..=w.len())
        .filter(|&i| i != label)
        .map(|i| {
            let t = w.theta(i);
            t / (1.0 - t)
        })
        .sum();
    Ok(w.theta(label) * s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampler {
    #[default]
    Urn,
    Exponential,
}

impl Sampler {
    pub fn sample(self, w: &WeightVector, rng: &mut RngStream) -> Permutation {
        match self {
            Sampler::Urn => sample_urn(w, rng),
            Sampler::Exponential => sample_exponential(w, rng),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UrnMethod {
    /// O(n) scan per draw.
    Linear,
    /// Fenwick tree, O(log n) per draw.
    Tree,
}

/// Draws labels one at a time with probability θᵢ / (remaining weight).
pub fn sample_urn(w: &WeightVector, rng: &mut RngStream) -> Permutation {
    let method = if w.len() <= URN_LINEAR_MAX { UrnMethod::Linear } else { UrnMethod::Tree };
    sample_urn_with(w, rng, method)
}

pub fn sample_urn_with(w: &WeightVector, rng: &mut RngStream, method: UrnMethod) -> Permutation {
    match method {
        UrnMethod::Linear => urn_linear(w, rng),
        UrnMethod::Tree => urn_tree(w, rng),
    }
}

fn urn_linear(w: &WeightVector, rng: &mut RngStream) -> Permutation {
    let mut labels: Vec<usize> = (1..=w.len()).collect();
    let mut weights: Vec<f64> = w.as_slice().to_vec();
    let mut out = Vec::with_capacity(w.len());
    while !labels.is_empty() {
        // fresh sum each round: no drift from repeated subtraction
        let remaining: f64 = weights.iter().sum();
        let target = rng.uniform() * remaining;
        let mut acc = 0.0;
        let mut pick = weights.len() - 1;
        for (i, &x) in weights.iter().enumerate() {
            acc += x;
            if target < acc {
                pick = i;
                break;
            }
        }
        out.push(labels.remove(pick));
        weights.remove(pick);
    }
    Permutation::from_vec_unchecked(out)
}

struct Fenwick {
    tree: Vec<f64>,
}

impl Fenwick {
    fn build(values: &[f64]) -> Self {
        let n = values.len();
        let mut tree = vec![0.0; n + 1];
        tree[1..].copy_from_slice(values);
        for i in 1..=n {
            let parent = i + (i & i.wrapping_neg());
            if parent <= n {
                tree[parent] += tree[i];
            }
        }
        Self { tree }
    }

    fn add(&mut self, mut i: usize, delta: f64) {
        let n = self.tree.len() - 1;
        while i <= n {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    fn total(&self) -> f64 {
        let mut i = self.tree.len() - 1;
        let mut s = 0.0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }

    /// Smallest 1-based index whose prefix sum exceeds `target`.
    fn search(&self, mut target: f64) -> usize {
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        (pos + 1).min(n)
    }
}

fn urn_tree(w: &WeightVector, rng: &mut RngStream) -> Permutation {
    let n = w.len();
    let mut live: Vec<f64> = w.as_slice().to_vec();
    let mut tree = Fenwick::build(&live);
    let mut built_total = tree.total();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut total = tree.total();
        // Rebuild once the cancellation error could matter relative to what is left.
        if total < built_total * 1e-6 {
            tree = Fenwick::build(&live);
            total = tree.total();
            built_total = total;
        }
        let mut idx = tree.search(rng.uniform() * total);
        if live[idx - 1] == 0.0 {
            // rounding landed on a drawn slot; take the nearest live one
            idx = (idx..=n)
                .chain((1..idx).rev())
                .find(|&i| live[i - 1] > 0.0)
                .expect("a live label remains");
        }
        let x = std::mem::replace(&mut live[idx - 1], 0.0);
        tree.add(idx, -x);
        out.push(idx);
    }
    Permutation::from_vec_unchecked(out)
}

/// Exponential race: Xᵢ = −ln(U)/θᵢ, labels sorted by X ascending; ties go
/// to the smaller label.
pub fn sample_exponential(w: &WeightVector, rng: &mut RngStream) -> Permutation {
    let mut clocks: Vec<(f64, usize)> = w
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, &t)| (rng.exp1() / t, i + 1))
        .collect();
    clocks.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Permutation::from_vec_unchecked(clocks.into_iter().map(|(_, l)| l).collect())
}

/// Spacings of `n` sorted standard exponentials:
/// `(Y(1), Y(2) − Y(1), …, Y(n) − Y(n−1))`.
pub fn sample_spacings(n: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    let mut y: Vec<f64> = (0..n).map(|_| rng.exp1()).collect();
    y.sort_by(f64::total_cmp);
    let mut prev = 0.0;
    Ok(y
        .into_iter()
        .map(|v| {
            let d = v - prev;
            prev = v;
            d
        })
        .collect())
}

/// Exact pmf over all n! permutations, indexed by lexicographic rank.
pub fn enumerate_pmf(w: &WeightVector) -> Result<Vec<f64>> {
    if w.len() > COUNT_TABLE_MAX_N {
        return Err(Error::TooLarge { what: "permutation table n", size: w.len(), cap: COUNT_TABLE_MAX_N });
    }
    Permutation::all(w.len()).map(|p| luce_pmf(w, &p)).collect()
}

/// Counts of `draws` samples by lexicographic rank of the outcome.
pub fn sample_counts(
    w: &WeightVector,
    sampler: Sampler,
    draws: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<u64>> {
    if w.len() > COUNT_TABLE_MAX_N {
        return Err(Error::TooLarge { what: "permutation table n", size: w.len(), cap: COUNT_TABLE_MAX_N });
    }
    let size: usize = (1..=w.len()).product();
    Ok(par::monte_carlo(
        exec,
        seed,
        draws,
        || vec![0u64; size],
        |rng, acc| acc[sampler.sample(w, rng).lex_rank()] += 1,
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    ))
}

/// ½ Σ |p − q| over two equally indexed distributions.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

pub fn counts_to_frequencies(counts: &[u64]) -> Vec<f64> {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return vec![0.0; counts.len()];
    }
    counts.iter().map(|&c| c as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wv(v: &[f64]) -> WeightVector {
        WeightVector::new(v.to_vec()).unwrap()
    }

    fn p(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn pmf_single_element() {
        assert_eq!(luce_pmf(&wv(&[5.0]), &p(&[1])).unwrap(), 1.0);
    }

    #[test]
    fn pmf_uniform_is_uniform() {
        let w = wv(&[1.0, 1.0, 1.0]);
        for s in Permutation::all(3) {
            assert!((luce_pmf(&w, &s).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        }
    }

    #[test]
    fn pmf_worked_example() {
        let w = wv(&[1.0, 2.0, 3.0]);
        assert!((luce_pmf(&w, &p(&[3, 2, 1])).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let total: f64 = Permutation::all(3).map(|s| luce_pmf(&w, &s).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-15);
        let lp = luce_log_pmf(&w, &p(&[3, 2, 1])).unwrap();
        assert!((lp.exp() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn pmf_rejects_size_mismatch() {
        assert_eq!(
            luce_pmf(&wv(&[1.0, 2.0]), &p(&[1, 2, 3])),
            Err(Error::DimensionMismatch { expected: 2, actual: 3 })
        );
    }

    #[test]
    fn samplers_trivial_n1() {
        let w = wv(&[2.5]);
        let mut rng = RngStream::new(3);
        for _ in 0..10 {
            assert_eq!(sample_urn(&w, &mut rng), p(&[1]));
            assert_eq!(sample_exponential(&w, &mut rng), p(&[1]));
            assert_eq!(sample_urn_with(&w, &mut rng, UrnMethod::Tree), p(&[1]));
        }
    }

    #[test]
    fn samplers_two_labels() {
        let w = wv(&[3.0, 1.0]);
        for sampler in [Sampler::Urn, Sampler::Exponential] {
            let c = sample_counts(&w, sampler, 1_000_000, 11, Execution::Parallel).unwrap();
            let f = c[0] as f64 / 1e6;
            assert!((f - 0.75).abs() < 0.002, "{sampler:?}: {f}");
        }
    }

    #[test]
    fn tree_urn_matches_linear_distribution() {
        let w = wv(&[0.4, 0.3, 0.2, 0.1]);
        let exact = enumerate_pmf(&w).unwrap();
        let mut counts = vec![0u64; 24];
        let mut rng = RngStream::new(5);
        for _ in 0..200_000 {
            counts[sample_urn_with(&w, &mut rng, UrnMethod::Tree).lex_rank()] += 1;
        }
        assert!(total_variation(&counts_to_frequencies(&counts), &exact) < 0.01);
    }

    #[test]
    fn tree_urn_large_n_is_a_permutation() {
        let w = WeightVector::sukhatme(20_000, crate::weights::Orientation::Descending).unwrap();
        let s = sample_urn(&w, &mut RngStream::new(9));
        assert!(Permutation::new(s.into_vec()).is_ok());
    }

    #[test]
    fn fenwick_search() {
        let f = Fenwick::build(&[1.0, 0.0, 2.0, 3.0, 0.5]);
        assert_eq!(f.total(), 6.5);
        assert_eq!(f.search(0.5), 1);
        assert_eq!(f.search(1.0), 3);
        assert_eq!(f.search(2.99), 3);
        assert_eq!(f.search(3.0), 4);
        assert_eq!(f.search(6.4), 5);
    }

    #[test]
    fn second_card_matches_enumeration() {
        let w = wv(&[0.1, 0.2, 0.3, 0.4]);
        for a in 1..=4 {
            let brute: f64 = Permutation::all(4)
                .filter(|s| s.at(2) == a)
                .map(|s| luce_pmf(&w, &s).unwrap())
                .sum();
            assert!((second_card_probability(&w, a).unwrap() - brute).abs() < 1e-12);
        }
        assert!(second_card_probability(&wv(&[1.0, 2.0]), 1).is_err());
    }

    #[test]
    fn spacings_n1_and_errors() {
        let mut rng = RngStream::new(4);
        let s = sample_spacings(1, &mut rng).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s[0] > 0.0);
        assert!(sample_spacings(0, &mut rng).is_err());
        let s = sample_spacings(50, &mut rng).unwrap();
        assert!(s.iter().all(|&x| x >= 0.0));
    }
}
