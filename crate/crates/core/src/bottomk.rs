//! The bottom `k` cards and the limit theory for infinite weight sequences.
//!
//! For a nondecreasing sequence 0 < θ₁ ≤ θ₂ ≤ ⋯ let σₙ be the reversed Luce
//! draw order on `n` labels (σₙ(1) is the last label drawn). With
//! `f(x) = Σ e^{−θᵢx}` and `x₀ = inf{x : f(x) < ∞}`, σₙ converges in law iff
//! `x₀ < ∞` and `f(x₀) = ∞`; the limiting mass of `(a₁,…,a_k)` is
//!
//! ```text
//! ∫_{x₁>⋯>x_k>0} ∏ⱼ θ_{aⱼ} e^{−θ_{aⱼ}xⱼ} ∏_{i∉a} (1 − e^{−θᵢ x_k}) dx.
//! ```
//!
//! Only `x_k` enters the infinite product, so the outer `k − 1` variables
//! integrate in closed form (memorylessness):
//!
//! ```text
//! ∫_{x₁>⋯>x_{k−1}>t} ∏_{j<k} θ_{aⱼ}e^{−θ_{aⱼ}xⱼ} = e^{−(θ_{a₁}+⋯+θ_{a_{k−1}})t} ∏_{m<k} θ_{a_m}/(θ_{a₁}+⋯+θ_{a_m}).
//! ```
//!
//! What remains is one integral over `t`, mapped onto `[0, 1]` with
//! `y = e^{−Θt}`, `Θ = θ_{a₁}+⋯+θ_{a_k}`, which leaves a bounded integrand.
//! The infinite product is truncated at `N` terms and bracketed by tail
//! bounds `T₋(N, x) ≤ Σ_{i>N} e^{−θᵢx} ≤ T₊(N, x)`:
//! `exp(−T₊/(1−ε)) ≤ ∏_{i>N}(1 − εᵢ) ≤ exp(−T₋)` with `ε = e^{−θ_{N+1}x}`.
//! Without a lower bound `T₋ = 0`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::quad::{self, QuadOptions};
use crate::weights::WeightVector;

type ThetaFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;
type TailFn = Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>;

/// Named sequence families with known analytic behaviour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    /// θᵢ = i
    Linear,
    /// θᵢ = 1
    Constant,
    /// θᵢ = β log(i + 1)
    Log { beta: f64 },
    /// θᵢ = log(i + 1) + 2 log log(i + 1), with θ₁ raised to θ₂.
    LogLoglog,
    Custom,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Linear => f.write_str("linear"),
            Family::Constant => f.write_str("constant"),
            Family::Log { beta } => write!(f, "log(beta={beta})"),
            Family::LogLoglog => f.write_str("log-loglog"),
            Family::Custom => f.write_str("custom"),
        }
    }
}

/// An infinite weight sequence θ₁, θ₂, … with an optional tail bound
/// `tail(N, x) ≥ Σ_{i>N} e^{−θᵢx}` (`+∞` where the series diverges). The
/// named families also carry a lower bound, which tightens the limit
/// brackets.
#[derive(Clone)]
pub struct WeightSequence {
    theta: ThetaFn,
    tail: Option<TailFn>,
    tail_lower: Option<TailFn>,
    monotone: bool,
    family: Family,
}

impl fmt::Debug for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightSequence")
            .field("family", &self.family)
            .field("monotone", &self.monotone)
            .field("tail_bound", &self.tail.is_some())
            .finish()
    }
}

/// `∫_a^∞ t^{−x} (ln t)^{−2x} dt` for `x ≥ 1`, `a > 1`, with its error
/// estimate. Substituting `ln t = L/w` gives `L^{1−2x} ∫₀¹ e^{−(x−1)L/w} w^{2x−2} dw`.
fn loglog_integral(a: f64, x: f64) -> (f64, f64) {
    let l = a.ln();
    let d = x - 1.0;
    let r = quad::integrate(
        |w| if w <= 0.0 { 0.0 } else { (-d * l / w).exp() * w.powf(2.0 * x - 2.0) },
        0.0,
        1.0,
        QuadOptions { abs_tol: 1e-300, rel_tol: 1e-12, max_panels: 200 },
    );
    let c = l.powf(1.0 - 2.0 * x);
    (c * r.value, c * r.error)
}

fn log_loglog_g(m: f64, x: f64) -> f64 {
    m.powf(-x) * m.ln().powf(-2.0 * x)
}

fn log_loglog_theta(i: usize) -> f64 {
    // log 2 + 2 log log 2 < 0, so the first weight is lifted to the second.
    let m = (i.max(2) + 1) as f64;
    m.ln() + 2.0 * m.ln().ln()
}

impl WeightSequence {
    pub fn linear() -> Self {
        Self {
            theta: Arc::new(|i| i as f64),
            tail: Some(Arc::new(|n, x| {
                // geometric: Σ_{i>N} e^{−ix} = e^{−(N+1)x} / (1 − e^{−x})
                (-((n + 1) as f64) * x).exp() / -(-x).exp_m1()
            })),
            tail_lower: Some(Arc::new(|n, x| (-((n + 1) as f64) * x).exp() / -(-x).exp_m1() * (1.0 - 1e-15))),
            monotone: true,
            family: Family::Linear,
        }
    }

    pub fn constant() -> Self {
        Self {
            theta: Arc::new(|_| 1.0),
            tail: Some(Arc::new(|_, _| f64::INFINITY)),
            tail_lower: Some(Arc::new(|_, _| f64::INFINITY)),
            monotone: true,
            family: Family::Constant,
        }
    }

    pub fn log(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
        }
        Ok(Self {
            theta: Arc::new(move |i| beta * ((i + 1) as f64).ln()),
            // Σ_{m≥M} m^{−s} with M = N + 2, bracketed by convexity:
            // ∫_M^∞ + M^{−s}/2 ≤ Σ ≤ ∫_{M−1/2}^∞
            tail: Some(Arc::new(move |n, x| {
                let s = beta * x;
                if s <= 1.0 {
                    f64::INFINITY
                } else {
                    ((n as f64) + 1.5).powf(1.0 - s) / (s - 1.0)
                }
            })),
            tail_lower: Some(Arc::new(move |n, x| {
                let s = beta * x;
                let m = (n + 2) as f64;
                if s <= 1.0 {
                    f64::INFINITY
                } else {
                    (m.powf(1.0 - s) / (s - 1.0) + 0.5 * m.powf(-s)) * (1.0 - 1e-12)
                }
            })),
            monotone: true,
            family: Family::Log { beta },
        })
    }

    pub fn log_loglog() -> Self {
        Self {
            theta: Arc::new(log_loglog_theta),
            // terms g(m) = m^{−x} (log m)^{−2x}, m = i + 1, convex and
            // decreasing for m > 1; bracketed like the log family
            tail: Some(Arc::new(|n, x| {
                if x < 1.0 {
                    return f64::INFINITY;
                }
                let (head, n) = if n == 0 { ((-log_loglog_theta(1) * x).exp(), 1) } else { (0.0, n) };
                let (v, e) = loglog_integral((n as f64) + 1.5, x);
                head + v * (1.0 + 1e-9) + e
            })),
            tail_lower: Some(Arc::new(|n, x| {
                if x < 1.0 {
                    return f64::INFINITY;
                }
                let (head, n) = if n == 0 { ((-log_loglog_theta(1) * x).exp(), 1) } else { (0.0, n) };
                let m = (n + 2) as f64;
                let (v, e) = loglog_integral(m, x);
                head + ((v + 0.5 * log_loglog_g(m, x)) * (1.0 - 1e-9) - e).max(0.0)
            })),
            monotone: true,
            family: Family::LogLoglog,
        }
    }

    /// A user-supplied sequence. `monotone` asserts θ₁ ≤ θ₂ ≤ ⋯; it is spot
    /// checked on the first 4096 terms.
    pub fn custom<F>(theta: F, monotone: bool, tail: Option<TailFn>) -> Result<Self>
    where
        F: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        let mut prev = 0.0;
        for i in 1..=4096 {
            let t = theta(i);
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidWeight { index: i, value: t });
            }
            if monotone && t < prev {
                return Err(Error::InvalidArgument(format!("sequence decreases at i = {i}")));
            }
            prev = t;
        }
        Ok(Self { theta: Arc::new(theta), tail, tail_lower: None, monotone, family: Family::Custom })
    }

    pub fn from_family(family: Family) -> Result<Self> {
        match family {
            Family::Linear => Ok(Self::linear()),
            Family::Constant => Ok(Self::constant()),
            Family::Log { beta } => Self::log(beta),
            Family::LogLoglog => Ok(Self::log_loglog()),
            Family::Custom => Err(Error::InvalidArgument("custom family needs an evaluator".into())),
        }
    }

    pub fn theta(&self, i: usize) -> f64 {
        (self.theta)(i)
    }

    pub fn tail_bound(&self, n: usize, x: f64) -> Option<f64> {
        self.tail.as_ref().map(|t| t(n, x))
    }

    /// Lower bound on `Σ_{i>N} e^{−θᵢx}`, where one is known.
    pub fn tail_lower_bound(&self, n: usize, x: f64) -> Option<f64> {
        self.tail_lower.as_ref().map(|t| t(n, x))
    }

    pub fn has_tail_bound(&self) -> bool {
        self.tail.is_some()
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// First `n` weights as a finite vector.
    pub fn truncate(&self, n: usize) -> Result<WeightVector> {
        WeightVector::new((1..=n).map(|i| self.theta(i)).collect())
    }
}

/// Result of evaluating `f(x) = Σ e^{−θᵢx}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum FValue {
    Finite {
        value: f64,
        /// Bound on the neglected tail; an extrapolated estimate when `certified` is false.
        error: f64,
        terms: usize,
        certified: bool,
    },
    Diverges,
}

/// Window count for the doubling-window heuristic: `2^WINDOWS` terms.
const WINDOWS: u32 = 20;
/// Smallest x0 the windows resolve without a tail bound.
const WINDOW_RESOLUTION: f64 = 64.0 / (1u64 << WINDOWS) as f64;

/// Logs of the doubling-window sums `W_j = Σ_{2^j ≤ i < 2^{j+1}} e^{−θᵢx}`
/// for `j < WINDOWS`, kept in log space so large `x` does not underflow.
fn window_log_sums(seq: &WeightSequence, x: f64) -> Vec<f64> {
    (0..WINDOWS)
        .map(|j| {
            let exps: Vec<f64> = ((1usize << j)..(1usize << (j + 1))).map(|i| -seq.theta(i) * x).collect();
            let m = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            m + exps.iter().map(|e| (e - m).exp()).sum::<f64>().ln()
        })
        .collect()
}

/// The series is judged divergent when the last window still carries more
/// than a third of the mass of the window halfway back. Harmonic-like tails
/// keep a ratio near 1, `1/(i log i)` near 1/2, while `1/(i log² i)` falls
/// to about 1/4 and geometric or power tails vanish.
fn windows_diverge(log_w: &[f64]) -> bool {
    let last = log_w[log_w.len() - 1];
    let mid = log_w[log_w.len() / 2];
    last - mid > -(3.0f64).ln()
}

const MAX_SERIES_TERMS: usize = 1 << 24;

pub fn f_eval(seq: &WeightSequence, x: f64, tol: f64) -> Result<FValue> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "f is evaluated at x > 0 only (f(0) = ∞), got x = {x}"
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let Some(_) = seq.tail else {
        let log_w = window_log_sums(seq, x);
        if windows_diverge(&log_w) {
            return Ok(FValue::Diverges);
        }
        let w: Vec<f64> = log_w.iter().map(|l| l.exp()).collect();
        let value: f64 = w.iter().sum();
        let last = w[w.len() - 1];
        let rho = last / w[w.len() - 2];
        let error = if rho < 1.0 { last * rho / (1.0 - rho) } else { f64::INFINITY };
        return Ok(FValue::Finite { value, error, terms: (1 << WINDOWS) - 1, certified: false });
    };
    if !seq.tail_bound(0, x).is_some_and(f64::is_finite) {
        return Ok(FValue::Diverges);
    }
    let mut sum = 0.0;
    let mut n = 0;
    let mut target = 16;
    loop {
        for i in n + 1..=target {
            sum += (-seq.theta(i) * x).exp();
        }
        n = target;
        let tail = seq.tail_bound(n, x).unwrap_or(f64::INFINITY);
        if tail <= tol {
            return Ok(FValue::Finite { value: sum, error: tail, terms: n, certified: true });
        }
        if n >= MAX_SERIES_TERMS {
            return Err(Error::ToleranceNotMet(format!(
                "f({x}) tail after {n} terms is {tail:e} > {tol:e}"
            )));
        }
        target = 2 * n;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Finiteness {
    Finite,
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Analytic,
    NumericBestEffort,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub family: String,
    #[serde(with = "f64_or_inf")]
    pub x0: f64,
    pub f_at_x0: Finiteness,
    pub converges: bool,
    pub method: Method,
    pub caveat: Option<String>,
}

impl ConvergenceReport {
    fn new(family: Family, x0: f64, f_at_x0: Finiteness, method: Method, caveat: Option<String>) -> Self {
        Self {
            family: family.to_string(),
            x0,
            f_at_x0,
            converges: x0.is_finite() && f_at_x0 == Finiteness::Infinite,
            method,
            caveat,
        }
    }
}

mod f64_or_inf {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str("inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("expected number or \"inf\", got {s:?}"))),
        }
    }
}

/// Classifies the sequence by the criterion `x₀ < ∞ and f(x₀) = ∞`.
///
/// Named families are classified analytically. Custom sequences get a
/// best-effort numeric answer: `x₀` is bisected on finiteness of `f` (from
/// the tail bound when present, otherwise from the doubling-window
/// heuristic), and `f(x₀)` is judged by the doubling-window heuristic.
pub fn convergence_test(seq: &WeightSequence) -> Result<ConvergenceReport> {
    if !seq.monotone {
        return Err(Error::Precondition("convergence criterion needs a nondecreasing sequence".into()));
    }
    use Finiteness::*;
    let fam = seq.family;
    Ok(match fam {
        Family::Linear => ConvergenceReport::new(fam, 0.0, Infinite, Method::Analytic, None),
        Family::Constant => ConvergenceReport::new(fam, f64::INFINITY, Infinite, Method::Analytic, None),
        Family::Log { beta } => ConvergenceReport::new(fam, 1.0 / beta, Infinite, Method::Analytic, None),
        Family::LogLoglog => ConvergenceReport::new(fam, 1.0, Finite, Method::Analytic, None),
        Family::Custom => numeric_convergence(seq),
    })
}

fn numeric_convergence(seq: &WeightSequence) -> ConvergenceReport {
    let finite_at = |x: f64| match seq.tail_bound(0, x) {
        Some(t) => t.is_finite(),
        None => !windows_diverge(&window_log_sums(seq, x)),
    };
    let mut caveat = String::from("numeric best effort: ");
    caveat.push_str(if seq.has_tail_bound() {
        "x0 bisected on the tail bound; f(x0) judged by doubling-window growth"
    } else {
        "no tail bound; x0 and f(x0) judged by doubling-window growth"
    });
    let report = |x0, f| ConvergenceReport::new(Family::Custom, x0, f, Method::NumericBestEffort, Some(caveat.clone()));

    if finite_at(1e-9) {
        // x₀ = 0 and f(0) = ∞ since every term is 1 there
        return report(0.0, Finiteness::Infinite);
    }
    let mut hi = 1.0;
    while !finite_at(hi) {
        hi *= 2.0;
        if hi > 1e12 {
            return report(f64::INFINITY, Finiteness::Infinite);
        }
    }
    let mut lo = if hi > 1.0 { hi / 2.0 } else { 1e-9 };
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if finite_at(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-9 * hi {
            break;
        }
    }
    let x0 = 0.5 * (lo + hi);
    if !seq.has_tail_bound() && x0 < WINDOW_RESOLUTION {
        // the windows cannot tell x0 apart from zero
        return report(0.0, Finiteness::Infinite);
    }
    let f = if windows_diverge(&window_log_sums(seq, x0)) { Finiteness::Infinite } else { Finiteness::Finite };
    report(x0, f)
}

#[derive(Debug, Clone, Copy)]
pub struct BottomOptions {
    /// Target bound on `upper − lower` plus the quadrature error.
    pub tol: f64,
    /// Hard cap on the number of product terms.
    pub max_terms: usize,
    /// Product terms always included, even where the tail is negligible.
    pub min_terms: usize,
}

impl Default for BottomOptions {
    fn default() -> Self {
        Self { tol: 1e-6, max_terms: 1 << 20, min_terms: 0 }
    }
}

impl BottomOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BottomPmf {
    /// Estimate using the tail bound as the tail sum.
    pub value: f64,
    pub lower: f64,
    /// The truncated integral; the limit never exceeds it beyond `quad_error`.
    pub upper: f64,
    pub quad_error: f64,
    /// Largest number of product terms used at any quadrature node.
    pub terms: usize,
    pub tolerance_met: bool,
    /// The sequence fails the convergence criterion, so limits may carry
    /// total mass below one.
    pub defective: bool,
}

/// Source of weights for the product `∏_{i∉a}(1 − e^{−θᵢx})`.
struct ProductTerms<'a> {
    theta: &'a (dyn Fn(usize) -> f64 + Sync),
    len: Option<usize>,
    tail: Option<&'a (dyn Fn(usize, f64) -> f64 + Sync)>,
    tail_lower: Option<&'a (dyn Fn(usize, f64) -> f64 + Sync)>,
    excluded: &'a [usize],
    min_terms: usize,
    max_terms: usize,
    /// Stop adding terms once the bracket on the product is narrower than this.
    stop_tol: f64,
}

/// Log of the product below this is treated as zero.
const LOG_FLOOR: f64 = -700.0;
/// Tail sums below this cannot move a double-precision product.
const NEGLIGIBLE_TAIL: f64 = 1e-17;

#[derive(Debug, Clone, Copy)]
struct ProductValue {
    log_product: f64,
    /// Tail-sum bounds after the last included term (0 for finite products).
    tail: f64,
    tail_lower: f64,
    /// e^{−θ_{N+1}x}
    next_eps: f64,
    terms: usize,
}

impl ProductTerms<'_> {
    fn eval(&self, x: f64) -> ProductValue {
        const ZERO: ProductValue =
            ProductValue { log_product: f64::NEG_INFINITY, tail: 0.0, tail_lower: 0.0, next_eps: 0.0, terms: 0 };
        let cap = self.len.unwrap_or(self.max_terms);
        let mut lp = 0.0;
        let mut next_check = 16usize.max(self.excluded.iter().copied().max().unwrap_or(0));
        let mut i = 0;
        let bounds = |i: usize| {
            let hi = self.tail.map_or(f64::INFINITY, |t| t(i, x));
            let lo = self.tail_lower.map_or(0.0, |t| t(i, x));
            (hi, lo)
        };
        while i < cap {
            i += 1;
            if !self.excluded.contains(&i) {
                lp += (-(-(self.theta)(i) * x).exp()).ln_1p();
            }
            if lp < LOG_FLOOR {
                return ProductValue { terms: i, ..ZERO };
            }
            if i == next_check && i < cap && self.tail.is_some() {
                next_check *= 2;
                let (hi, lo) = bounds(i);
                if hi == f64::INFINITY {
                    // a divergent tail sum sends the infinite product to zero
                    return ProductValue { terms: i, ..ZERO };
                }
                if i >= self.min_terms {
                    let next_eps = (-(self.theta)(i + 1) * x).exp();
                    let width = (lp - lo).exp() - (lp - hi / (1.0 - next_eps)).exp();
                    if hi <= NEGLIGIBLE_TAIL || width <= self.stop_tol {
                        return ProductValue { log_product: lp, tail: hi, tail_lower: lo, next_eps, terms: i };
                    }
                }
            }
        }
        if self.len.is_some() {
            return ProductValue { log_product: lp, tail: 0.0, tail_lower: 0.0, next_eps: 0.0, terms: i };
        }
        let (hi, lo) = bounds(i);
        let next_eps = (-(self.theta)(i + 1) * x).exp();
        ProductValue { log_product: lp, tail: hi, tail_lower: lo, next_eps, terms: i }
    }
}

struct Integrals {
    value: f64,
    lower: f64,
    upper: f64,
    quad_error: f64,
    terms: usize,
}

/// `coef · ∫₀¹ ∏_{i∉a}(1 − e^{−θᵢ x(y)}) dy` with `x(y) = −ln(y)/Θ`.
fn integrate_product(terms: &ProductTerms<'_>, big_theta: f64, coef: f64, tol: f64) -> Integrals {
    let breaks = [0.0, 0.5, 0.8, 0.9, 0.95, 0.98, 0.995, 1.0];
    let opts = QuadOptions { abs_tol: (tol / 10.0) / coef.max(1e-300), rel_tol: 1e-13, max_panels: 4000 };
    // the three integrands mostly share nodes
    let cache = std::cell::RefCell::new(std::collections::HashMap::<u64, ProductValue>::new());
    let max_terms = std::cell::Cell::new(0usize);
    let at = |y: f64| -> ProductValue {
        if y <= 0.0 {
            // x = ∞: every factor is 1
            return ProductValue { log_product: 0.0, tail: 0.0, tail_lower: 0.0, next_eps: 0.0, terms: 0 };
        }
        if y >= 1.0 {
            return ProductValue { log_product: f64::NEG_INFINITY, tail: 0.0, tail_lower: 0.0, next_eps: 0.0, terms: 0 };
        }
        if let Some(v) = cache.borrow().get(&y.to_bits()) {
            return *v;
        }
        let v = terms.eval(-y.ln() / big_theta);
        max_terms.set(max_terms.get().max(v.terms));
        cache.borrow_mut().insert(y.to_bits(), v);
        v
    };
    let upper = quad::integrate_with_breaks(
        |y| {
            let v = at(y);
            (v.log_product - v.tail_lower).exp()
        },
        &breaks,
        opts,
    );
    let (value, lower) = if terms.len.is_some() {
        (upper, upper)
    } else {
        let value = quad::integrate_with_breaks(
            |y| {
                let v = at(y);
                (v.log_product - v.tail).exp()
            },
            &breaks,
            opts,
        );
        let lower = quad::integrate_with_breaks(
            |y| {
                let v = at(y);
                if v.tail.is_finite() && v.next_eps < 1.0 {
                    (v.log_product - v.tail / (1.0 - v.next_eps)).exp()
                } else {
                    0.0
                }
            },
            &breaks,
            opts,
        );
        (value, lower)
    };
    Integrals {
        value: coef * value.value,
        lower: coef * lower.value,
        upper: coef * upper.value,
        quad_error: coef * upper.error.max(value.error).max(lower.error),
        terms: max_terms.into_inner(),
    }
}

/// `∏_{m<k} θ_{a_m} / (θ_{a₁}+⋯+θ_{a_m})` times `θ_{a_k}/Θ`, and `Θ`.
fn ordering_coefficient(thetas: &[f64]) -> (f64, f64) {
    let mut partial = 0.0;
    let mut coef = 1.0;
    let k = thetas.len();
    for &t in &thetas[..k - 1] {
        partial += t;
        coef *= t / partial;
    }
    let big = partial + thetas[k - 1];
    (coef * thetas[k - 1] / big, big)
}

fn check_bottom_labels(a: &[usize], n: Option<usize>) -> Result<()> {
    if a.is_empty() {
        return Err(Error::InvalidK { k: 0, min: 1, n: n.unwrap_or(usize::MAX) });
    }
    crate::weights::check_labels(a, n.unwrap_or(usize::MAX >> 1))
}

/// Limiting probability that the last `k` labels drawn are `a₁, a₂, …, a_k`
/// (a₁ drawn last).
pub fn limit_bottom_pmf(seq: &WeightSequence, a: &[usize], opts: BottomOptions) -> Result<BottomPmf> {
    check_bottom_labels(a, None)?;
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {}", opts.tol)));
    }
    let defective = match convergence_test(seq) {
        Ok(r) => !r.converges,
        Err(_) => true,
    };
    let thetas: Vec<f64> = a.iter().map(|&l| seq.theta(l)).collect();
    let (coef, big_theta) = ordering_coefficient(&thetas);
    let theta = |i: usize| seq.theta(i);
    let tail = seq.tail.as_deref().map(|t| t as &(dyn Fn(usize, f64) -> f64 + Sync));
    let tail_lower = seq.tail_lower.as_deref().map(|t| t as &(dyn Fn(usize, f64) -> f64 + Sync));
    let terms = ProductTerms {
        theta: &theta,
        len: None,
        tail,
        tail_lower,
        excluded: a,
        min_terms: opts.min_terms,
        max_terms: opts.max_terms.max(opts.min_terms),
        stop_tol: 1e-2 * opts.tol / coef.max(1e-300),
    };
    let r = integrate_product(&terms, big_theta, coef, opts.tol);
    Ok(BottomPmf {
        value: r.value,
        lower: r.lower,
        upper: r.upper,
        quad_error: r.quad_error,
        terms: r.terms,
        tolerance_met: (r.upper - r.lower) + r.quad_error <= opts.tol,
        defective,
    })
}

/// Probability, for finite weights, that the last `k` labels drawn are
/// `a₁, …, a_k` (a₁ drawn last), by quadrature of the same integral with
/// the product over `[n] ∖ a`.
pub fn finite_n_bottom_pmf(w: &WeightVector, a: &[usize], tol: f64) -> Result<f64> {
    check_bottom_labels(a, Some(w.len()))?;
    let thetas: Vec<f64> = a.iter().map(|&l| w.theta(l)).collect();
    let (coef, big_theta) = ordering_coefficient(&thetas);
    let theta = |i: usize| w.theta(i);
    let terms = ProductTerms {
        theta: &theta,
        len: Some(w.len()),
        tail: None,
        tail_lower: None,
        excluded: a,
        min_terms: 0,
        max_terms: w.len(),
        stop_tol: 0.0,
    };
    let r = integrate_product(&terms, big_theta, coef, tol);
    if r.quad_error > tol {
        return Err(Error::ToleranceNotMet(format!("quadrature error {:e} > {tol:e}", r.quad_error)));
    }
    Ok(r.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub label: usize,
    pub probability: f64,
    pub error: f64,
}

/// P(ℓ is last) in the limit for θᵢ = i, ℓ = 1..=max_label, each row from
/// `∫₀¹ ℓ y^{ℓ−1} ∏_{j≠ℓ}(1 − y^j) dy`.
pub fn sukhatme_last_card_table(max_label: usize, tol: f64, exec: Execution) -> Result<Vec<TableRow>> {
    if max_label == 0 {
        return Err(Error::InvalidArgument("max_label must be >= 1".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let rows = par::map_range(exec, max_label, |i| last_card_row(i + 1, tol));
    rows.into_iter().collect()
}

fn last_card_row(label: usize, tol: f64) -> Result<TableRow> {
    let integrand = |y: f64| -> f64 {
        if y <= 0.0 {
            return if label == 1 { 1.0 } else { 0.0 };
        }
        if y >= 1.0 {
            return 0.0;
        }
        let ln_y = y.ln();
        let mut lp = (label - 1) as f64 * ln_y;
        let mut yj = 1.0;
        let mut j = 0;
        loop {
            j += 1;
            yj *= y;
            if j != label {
                lp += (-yj).ln_1p();
            }
            if lp < LOG_FLOOR {
                return 0.0;
            }
            // Σ_{i>j} y^i = y^{j+1} / (1 − y)
            if j >= label && yj * y / (1.0 - y) <= NEGLIGIBLE_TAIL {
                break;
            }
        }
        label as f64 * lp.exp()
    };
    let breaks = [0.0, 0.5, 0.8, 0.9, 0.95, 0.98, 0.995, 1.0];
    let r = quad::integrate_with_breaks(
        integrand,
        &breaks,
        QuadOptions { abs_tol: tol / 10.0, rel_tol: 1e-13, max_panels: 4000 },
    );
    if r.error > tol {
        return Err(Error::ToleranceNotMet(format!("row {label}: quadrature error {:e}", r.error)));
    }
    Ok(TableRow { label, probability: r.value, error: r.error })
}
