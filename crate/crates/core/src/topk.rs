//! The top `k` cards: the induced measure `P` on the first `k` draws, the
//! i.i.d. product measure `Q`, and the distances between them.
//!
//! All operations here take normalized weights (|Σθ − 1| ≤ 1e-9) and fail
//! with [`Error::NotNormalized`] otherwise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weights::WeightVector;

/// The first `k` labels (σ₁,…,σ_k). Labels need not be distinct.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Prefix(Vec<usize>);

impl Prefix {
    pub fn new(labels: Vec<usize>, n: usize) -> Result<Self> {
        if labels.is_empty() || labels.len() > n {
            return Err(Error::InvalidK { k: labels.len(), min: 1, n });
        }
        if let Some(&l) = labels.iter().find(|&&l| l == 0 || l > n) {
            return Err(Error::LabelOutOfRange { label: l, n });
        }
        Ok(Self(labels))
    }

    pub fn labels(&self) -> &[usize] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn is_distinct(&self) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.0.len());
        self.0.iter().all(|l| seen.insert(*l))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub n: usize,
    pub k: usize,
    pub d_inf_exact: Option<f64>,
    pub d_inf_bound: f64,
    pub tv_exact: f64,
    pub lambda: f64,
    pub tv_poisson: f64,
}

fn check_k(w: &WeightVector, k: usize, min: usize) -> Result<()> {
    if k < min || k > w.len() {
        Err(Error::InvalidK { k, min, n: w.len() })
    } else {
        Ok(())
    }
}

fn check_prefix(w: &WeightVector, p: &Prefix) -> Result<()> {
    w.require_normalized()?;
    if let Some(&l) = p.labels().iter().find(|&&l| l > w.len()) {
        return Err(Error::LabelOutOfRange { label: l, n: w.len() });
    }
    Ok(())
}

/// P(σ₁…σ_k) = θ_{σ₁}⋯θ_{σ_k} / ∏_{j<k}(1 − θ_{σ₁} − ⋯ − θ_{σ_j}); zero unless distinct.
pub fn prefix_prob_p(w: &WeightVector, p: &Prefix) -> Result<f64> {
    check_prefix(w, p)?;
    if !p.is_distinct() {
        return Ok(0.0);
    }
    let mut prob = 1.0;
    let mut used = 0.0;
    for (j, &l) in p.labels().iter().enumerate() {
        let t = w.theta(l);
        prob *= t;
        if j > 0 {
            prob /= 1.0 - used;
        }
        used += t;
    }
    Ok(prob)
}

/// Q(σ₁…σ_k) = θ_{σ₁}⋯θ_{σ_k}.
pub fn prefix_prob_q(w: &WeightVector, p: &Prefix) -> Result<f64> {
    check_prefix(w, p)?;
    Ok(p.labels().iter().map(|&l| w.theta(l)).product())
}

/// max over distinct prefixes of 1 − Q/P = 1 − ∏_{j<k}(1 − S_j).
///
/// The product is smallest when every partial sum S_j is as large as
/// possible, which is achieved by placing the `k − 1` largest weights first
/// in descending order: moving a larger weight earlier raises one partial
/// sum and leaves the others unchanged.
pub fn d_inf_exact(w: &WeightVector, k: usize) -> Result<f64> {
    w.require_normalized()?;
    check_k(w, k, 1)?;
    let sorted = w.sorted_descending();
    let mut s = 0.0;
    let mut keep = 1.0;
    for &t in &sorted[..k - 1] {
        s += t;
        keep *= 1.0 - s;
    }
    Ok(1.0 - keep)
}

/// 1 − exp{−2((k−1)θ₍₁₎ + (k−2)θ₍₂₎ + ⋯ + θ₍ₖ₋₁₎)}; requires every θᵢ ≤ 1/2.
///
/// The value bounds [`d_inf_exact`] whenever θ₍₁₎ + ⋯ + θ₍ₖ₋₁₎ ≤ 1/2. The
/// per-weight condition alone is not enough once the partial sums pass
/// about 0.797, e.g. (0.43, 0.34, 0.17, 0.06) with k = 4.
pub fn d_inf_bound(w: &WeightVector, k: usize) -> Result<f64> {
    w.require_normalized()?;
    check_k(w, k, 1)?;
    let max = w.max();
    if max > 0.5 {
        return Err(Error::Precondition(format!(
            "d_inf bound needs every weight <= 1/2, largest is {max}"
        )));
    }
    let sorted = w.sorted_descending();
    let exponent: f64 = sorted[..k - 1]
        .iter()
        .enumerate()
        .map(|(j, &t)| (k - 1 - j) as f64 * t)
        .sum();
    Ok(-(-2.0 * exponent).exp_m1())
}

/// `j! · e_j(θ)` for `j = 0..=k`: the chance that `j` i.i.d. draws are distinct.
///
/// Uses the recurrence `f_j ← f_j + j·θ·f_{j−1}` so every intermediate lies
/// in [0, 1]. Above 1000 weights each cell carries a compensation term.
pub fn distinct_draw_probabilities(w: &[f64], k: usize) -> Vec<f64> {
    let mut f = vec![0.0; k + 1];
    f[0] = 1.0;
    if w.len() > 1000 {
        let mut c = vec![0.0; k + 1];
        for (i, &t) in w.iter().enumerate() {
            for j in (1..=k.min(i + 1)).rev() {
                let term = j as f64 * t * (f[j - 1] + c[j - 1]);
                let s = f[j] + term;
                if f[j].abs() >= term.abs() {
                    c[j] += (f[j] - s) + term;
                } else {
                    c[j] += (term - s) + f[j];
                }
                f[j] = s;
            }
        }
        f.iter_mut().zip(&c).for_each(|(x, y)| *x += y);
    } else {
        for (i, &t) in w.iter().enumerate() {
            for j in (1..=k.min(i + 1)).rev() {
                f[j] += j as f64 * t * f[j - 1];
            }
        }
    }
    f
}

/// ‖P − Q‖_TV = 1 − P_Q(σ₁,…,σ_k distinct) = 1 − k!·e_k(θ).
pub fn tv_exact(w: &WeightVector, k: usize) -> Result<f64> {
    w.require_normalized()?;
    check_k(w, k, 1)?;
    let f = distinct_draw_probabilities(w.as_slice(), k);
    Ok((1.0 - f[k]).max(0.0))
}

/// e_k(θ₁,…,θₙ) by the triangular recurrence over prefixes.
pub fn elementary_symmetric(w: &WeightVector, k: usize) -> Result<f64> {
    check_k(w, k, 0)?;
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for (i, &t) in w.as_slice().iter().enumerate() {
        for j in (1..=k.min(i + 1)).rev() {
            e[j] += t * e[j - 1];
        }
    }
    Ok(e[k])
}

/// λ = C(k, 2) · Σθᵢ².
pub fn collision_lambda(w: &WeightVector, k: usize) -> Result<f64> {
    w.require_normalized()?;
    check_k(w, k, 1)?;
    let pairs = (k * (k - 1) / 2) as f64;
    Ok(pairs * w.as_slice().iter().map(|t| t * t).sum::<f64>())
}

/// 1 − e^{−λ}.
pub fn tv_poisson_approx(lambda: f64) -> Result<f64> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidArgument(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    Ok(-(-lambda).exp_m1())
}

/// Exact TV for uniform weights, 1 − n!/((n−k)!·nᵏ), summed in log space.
pub fn uniform_tv_exact(n: usize, k: usize) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, min: 1, n });
    }
    let log_distinct: f64 = (0..k).map(|j| (-(j as f64) / n as f64).ln_1p()).sum();
    Ok(-log_distinct.exp_m1())
}

pub fn distance_report(w: &WeightVector, k: usize) -> Result<DistanceReport> {
    let d_inf_bound = d_inf_bound(w, k)?;
    let lambda = collision_lambda(w, k)?;
    Ok(DistanceReport {
        n: w.len(),
        k,
        d_inf_exact: Some(d_inf_exact(w, k)?),
        d_inf_bound,
        tv_exact: tv_exact(w, k)?,
        lambda,
        tv_poisson: tv_poisson_approx(lambda)?,
    })
}
