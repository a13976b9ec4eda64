//! Independent reference computations used by the integration tests.
//!
//! Nothing here calls into the library's numerical routines; every value is
//! computed from the definitions by enumeration or plain quadrature.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Weights in (0.05, 1.05), unnormalized.
pub fn random_weights(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| 0.05 + r.random::<f64>()).collect()
}

pub fn normalized(w: &[f64]) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

/// Random normalized weights with every entry at most `cap`, by rejection.
/// Needs `n * cap` comfortably above 1.
pub fn random_capped(r: &mut ChaCha8Rng, n: usize, cap: f64) -> Vec<f64> {
    loop {
        let w = normalized(&random_weights(r, n));
        if w.iter().all(|&x| x <= cap) {
            return w;
        }
    }
}

/// All permutations of 1..=n (Heap's algorithm), 1-based.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut a: Vec<usize> = (1..=n).collect();
    let mut out = vec![a.clone()];
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Sequential draws without replacement: θ_{σ₁}/Σθ · θ_{σ₂}/(Σθ − θ_{σ₁}) ⋯
pub fn urn_probability(w: &[f64], sigma: &[usize]) -> f64 {
    let mut remaining: f64 = w.iter().sum();
    let mut p = 1.0;
    for &s in sigma {
        let t = w[s - 1];
        p *= t / remaining;
        remaining -= t;
    }
    p
}

/// All k-tuples over 1..=n.
pub fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                (1..=n).map(move |x| {
                    let mut u = t.clone();
                    u.push(x);
                    u
                })
            })
            .collect();
    }
    out
}

fn distinct(t: &[usize]) -> bool {
    (0..t.len()).all(|i| (i + 1..t.len()).all(|j| t[i] != t[j]))
}

/// Top-k measure for normalized weights, zero on repeated labels.
pub fn top_p(w: &[f64], t: &[usize]) -> f64 {
    if !distinct(t) {
        return 0.0;
    }
    urn_probability(w, t)
}

pub fn top_q(w: &[f64], t: &[usize]) -> f64 {
    t.iter().map(|&s| w[s - 1]).product()
}

/// ½ Σ |P − Q| over all n^k tuples.
pub fn tv_by_tuples(w: &[f64], k: usize) -> f64 {
    0.5 * tuples(w.len(), k).iter().map(|t| (top_p(w, t) - top_q(w, t)).abs()).sum::<f64>()
}

/// max over distinct tuples of 1 − Q/P.
pub fn d_inf_by_tuples(w: &[f64], k: usize) -> f64 {
    tuples(w.len(), k)
        .iter()
        .filter(|t| distinct(t))
        .map(|t| 1.0 - top_q(w, t) / top_p(w, t))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// P(the last k labels drawn are a₁ (last), a₂, …) by summing over permutations.
pub fn bottom_by_enumeration(w: &[f64], a: &[usize]) -> f64 {
    let n = w.len();
    permutations(n)
        .iter()
        .filter(|s| a.iter().enumerate().all(|(j, &l)| s[n - 1 - j] == l))
        .map(|s| urn_probability(w, s))
        .sum()
}

/// Composite Simpson rule with `m` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        let x = a + i as f64 * h;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    s * h / 3.0
}

/// Limit P(last = a₁, second to last = a₂) for θᵢ = i as the double integral
/// of the joint density of the two arrival times over x₁ > x₂, all other
/// arrivals before x₂.
pub fn linear_bottom_two(a1: usize, a2: usize) -> f64 {
    let (t1, t2) = (a1 as f64, a2 as f64);
    let others = |x: f64| -> f64 {
        let mut p = 1.0;
        let mut i = 1usize;
        loop {
            if i != a1 && i != a2 {
                let e = (-(i as f64) * x).exp();
                if e < 1e-18 {
                    break;
                }
                p *= 1.0 - e;
            }
            i += 1;
        }
        p
    };
    let outer = |x2: f64| -> f64 {
        if x2 == 0.0 {
            return 0.0;
        }
        let inner = simpson(|x1| t1 * (-t1 * x1).exp(), x2, x2 + 40.0 / t1, 400);
        t2 * (-t2 * x2).exp() * others(x2) * inner
    };
    simpson(outer, 0.0, 40.0 / t2.min(t1), 4000)
}

/// Limit P(last = ℓ) for θᵢ = i: ∫₀^∞ ℓ e^{−ℓx} ∏_{i≠ℓ}(1 − e^{−ix}) dx by
/// Simpson on a truncated range.
pub fn linear_last_card(l: usize) -> f64 {
    let f = |x: f64| -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        let mut p = l as f64 * (-(l as f64) * x).exp();
        let mut i = 1usize;
        loop {
            if i != l {
                let e = (-(i as f64) * x).exp();
                if e < 1e-18 {
                    break;
                }
                p *= 1.0 - e;
            }
            i += 1;
        }
        p
    };
    simpson(f, 0.0, 50.0, 20_000)
}

/// Values of the last-card law for θᵢ = i, ℓ = 1..10, to 6 significant
/// digits.
pub const LAST_CARD_TABLE: [f64; 10] =
    [0.516094, 0.213212, 0.107310, 0.0597505, 0.0354888, 0.0220716, 0.0142167, 0.00941619, 0.00638121, 0.00440862];

/// Pearson statistic of observed counts against expected probabilities.
pub fn chi_square(counts: &[u64], probs: &[f64]) -> f64 {
    let total: u64 = counts.iter().sum();
    counts
        .iter()
        .zip(probs)
        .filter(|(_, &p)| p > 0.0)
        .map(|(&c, &p)| {
            let e = p * total as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum()
}

/// Upper `alpha` quantile of the chi-square law.
pub fn chi_square_critical(df: usize, alpha: f64) -> f64 {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    ChiSquared::new(df as f64).unwrap().inverse_cdf(1.0 - alpha)
}

/// Kolmogorov–Smirnov statistic of a sample against Exp(1).
pub fn ks_exp1(sample: &mut [f64]) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = 1.0 - (-x).exp();
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic one-sample KS critical value at level 0.001.
pub fn ks_critical_001(n: usize) -> f64 {
    1.94947 / (n as f64).sqrt()
}

/// Σ_{ℓ>A, ℓ∉skip} ℓe^{−ℓx}/(1 − e^{−ℓx}) times ∏_{i∉skip}(1 − e^{−ix}).
fn linear_tail_density(x: f64, above: usize, skip: Option<usize>) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let mut log_prod = 0.0;
    let mut hazard = 0.0;
    let mut i = 1usize;
    loop {
        let e = (-(i as f64) * x).exp();
        if e < 1e-18 && i > above {
            break;
        }
        if Some(i) != skip {
            log_prod += (-e).ln_1p();
            if i > above {
                hazard += i as f64 * e / (1.0 - e);
            }
        }
        i += 1;
    }
    hazard * log_prod.exp()
}

/// Limit P(last label > A) for θᵢ = i.
pub fn linear_last_beyond(above: usize) -> f64 {
    simpson(|x| linear_tail_density(x, above, None), 0.0, 50.0, 20_000)
}

/// Limit P(last = a₁, second to last > A) for θᵢ = i.
pub fn linear_second_beyond(a1: usize, above: usize) -> f64 {
    let t = a1 as f64;
    simpson(|y| (-t * y).exp() * linear_tail_density(y, above, Some(a1)), 0.0, 50.0, 20_000)
}
