//! Random walks on the chambers of a real hyperplane arrangement.
//!
//! A walk is specified by a probability table on faces. One step draws a
//! face `F` from the table and moves the current chamber `C` to the
//! projection `FC`. Two concrete arrangements are provided: [`Boolean`]
//! (sign vectors) and [`Braid`] (permutations, i.e. card shuffling).

mod boolean;
mod braid;
mod coloring;

use std::collections::HashMap;
use std::fmt::{Debug, Display};
use std::hash::Hash;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

pub use boolean::{ehrenfest_face_weights, project_boolean, Boolean, Sign, SignVector, MAX_BOOLEAN_DIM};
pub use braid::{
    project_braid, riffle_face_weights, tsetlin_face_weights, BlockOrderedSetPartition, Braid, MAX_BRAID_N,
    MAX_RIFFLE_N,
};
pub use coloring::{coloring_face_weights, coloring_transition_matrix, graph_coloring_step, Graph};

use crate::error::{Error, Result};
use crate::luce::sample_urn;
use crate::par::{self, Execution};
use crate::rng::RngStream;
use crate::weights::WeightVector;

/// Tolerance on the total mass of a face table.
pub const TABLE_SUM_TOL: f64 = 1e-12;
/// Largest state space handed to the dense stationary solver.
pub const MAX_EXACT_STATES: usize = 5040;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ArrangementKind {
    Boolean { d: usize },
    Braid { n: usize },
}

pub trait Arrangement: Clone + Debug + Send + Sync {
    type Chamber: Clone + Eq + Hash + Ord + Debug + Display + Send + Sync;
    type Face: Clone + Eq + Hash + Ord + Debug + Display + Send + Sync;

    fn kind(&self) -> ArrangementKind;
    fn check_face(&self, f: &Self::Face) -> Result<()>;
    fn check_chamber(&self, c: &Self::Chamber) -> Result<()>;
    /// `F C` for a validated chamber and face.
    fn project(&self, c: &Self::Chamber, f: &Self::Face) -> Self::Chamber;
    /// `None` when the count overflows `usize`.
    fn chamber_count(&self) -> Option<usize>;
    /// All chambers in a fixed order; errors above the enumeration cap.
    fn chambers(&self) -> Result<Vec<Self::Chamber>>;
    fn hyperplane_count(&self) -> usize;
    /// Whether `f` lies off hyperplane `h`.
    fn face_off_hyperplane(&self, f: &Self::Face, h: usize) -> bool;
    fn reference_chamber(&self) -> Self::Chamber;
    /// The central face, whose projection is the identity.
    fn identity_face(&self) -> Self::Face;
}

/// A probability distribution on the faces of an arrangement.
#[derive(Debug, Clone)]
pub struct FaceWeightTable<A: Arrangement> {
    arrangement: A,
    entries: Vec<(A::Face, f64)>,
}

impl<A: Arrangement> FaceWeightTable<A> {
    /// Validates faces and weights; repeated faces have their weights added.
    /// The weights must sum to 1 within [`TABLE_SUM_TOL`].
    pub fn new(arrangement: A, entries: impl IntoIterator<Item = (A::Face, f64)>) -> Result<Self> {
        Self::new_with_tolerance(arrangement, entries, TABLE_SUM_TOL)
    }

    pub fn new_with_tolerance(
        arrangement: A,
        entries: impl IntoIterator<Item = (A::Face, f64)>,
        tol: f64,
    ) -> Result<Self> {
        let mut index: HashMap<A::Face, usize> = HashMap::new();
        let mut merged: Vec<(A::Face, f64)> = Vec::new();
        for (i, (face, w)) in entries.into_iter().enumerate() {
            arrangement.check_face(&face)?;
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidWeight { index: i, value: w });
            }
            match index.get(&face) {
                Some(&j) => merged[j].1 += w,
                None => {
                    index.insert(face.clone(), merged.len());
                    merged.push((face, w));
                }
            }
        }
        if merged.is_empty() {
            return Err(Error::EmptyWeights);
        }
        let sum = crate::weights::neumaier_sum(&merged.iter().map(|e| e.1).collect::<Vec<_>>());
        if (sum - 1.0).abs() > tol {
            return Err(Error::NotNormalized { sum, tolerance: tol });
        }
        Ok(Self { arrangement, entries: merged })
    }

    /// Like [`FaceWeightTable::new`] but rescales positive weights to sum to 1.
    pub fn normalized(arrangement: A, entries: impl IntoIterator<Item = (A::Face, f64)>) -> Result<Self> {
        let entries: Vec<_> = entries.into_iter().collect();
        for (i, (_, w)) in entries.iter().enumerate() {
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::InvalidWeight { index: i, value: *w });
            }
        }
        let sum = crate::weights::neumaier_sum(&entries.iter().map(|e| e.1).collect::<Vec<_>>());
        if sum <= 0.0 {
            return Err(Error::InvalidArgument("face weights sum to zero".into()));
        }
        Self::new(arrangement, entries.into_iter().map(|(f, w)| (f, w / sum)))
    }

    pub fn arrangement(&self) -> &A {
        &self.arrangement
    }

    /// Distinct faces with their weights, in first-seen order.
    pub fn entries(&self) -> &[(A::Face, f64)] {
        &self.entries
    }

    pub fn support(&self) -> impl Iterator<Item = &(A::Face, f64)> {
        self.entries.iter().filter(|e| e.1 > 0.0)
    }

    /// The walk is separating when every hyperplane has a positive-weight
    /// face off it.
    pub fn is_separating(&self) -> bool {
        (0..self.arrangement.hyperplane_count())
            .all(|h| self.support().any(|(f, _)| self.arrangement.face_off_hyperplane(f, h)))
    }

    pub fn step(&self, c: &A::Chamber, u: f64) -> A::Chamber {
        let face = self.face_at(u);
        self.arrangement.project(c, face)
    }

    fn face_at(&self, u: f64) -> &A::Face {
        let mut acc = 0.0;
        let mut last = &self.entries[0].0;
        for (f, w) in &self.entries {
            if *w <= 0.0 {
                continue;
            }
            last = f;
            acc += w;
            if u < acc {
                return f;
            }
        }
        last
    }
}

/// A running realization of the walk.
#[derive(Debug, Clone)]
pub struct ChamberChain<'a, A: Arrangement> {
    table: &'a FaceWeightTable<A>,
    current: A::Chamber,
}

impl<'a, A: Arrangement> ChamberChain<'a, A> {
    pub fn new(table: &'a FaceWeightTable<A>, start: A::Chamber) -> Result<Self> {
        table.arrangement.check_chamber(&start)?;
        Ok(Self { table, current: start })
    }

    pub fn current(&self) -> &A::Chamber {
        &self.current
    }

    pub fn step(&mut self, rng: &mut RngStream) -> &A::Chamber {
        self.current = self.table.step(&self.current, rng.uniform());
        &self.current
    }

    pub fn run(&mut self, steps: usize, rng: &mut RngStream) -> &A::Chamber {
        for _ in 0..steps {
            self.step(rng);
        }
        &self.current
    }
}

/// A sparse row-stochastic matrix over an explicit list of states.
#[derive(Debug, Clone)]
pub struct TransitionMatrix<S> {
    states: Vec<S>,
    rows: Vec<Vec<(usize, f64)>>,
}

impl<S: Clone + Eq + Hash> TransitionMatrix<S> {
    pub(crate) fn from_rows(states: Vec<S>, rows: Vec<Vec<(usize, f64)>>) -> Self {
        Self { states, rows }
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Nonzero entries of row `i` as `(column, probability)`, sorted by column.
    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn index_of(&self, s: &S) -> Option<usize> {
        self.states.iter().position(|t| t == s)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, p) in row {
                m[(i, j)] += p;
            }
        }
        m
    }

    /// `π K` for a row vector `π`.
    pub fn left_multiply(&self, pi: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, p) in row {
                out[j] += pi[i] * p;
            }
        }
        out
    }
}

/// The chamber-to-chamber transition matrix of a face table.
pub fn transition_matrix<A: Arrangement>(
    table: &FaceWeightTable<A>,
    exec: Execution,
) -> Result<TransitionMatrix<A::Chamber>> {
    let arr = table.arrangement();
    let chambers = arr.chambers()?;
    let index: HashMap<&A::Chamber, usize> = chambers.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let support: Vec<_> = table.support().collect();
    let rows = par::map(exec, &chambers, |c| {
        let mut row: Vec<(usize, f64)> = Vec::with_capacity(support.len());
        for (f, w) in &support {
            row.push((index[&arr.project(c, f)], *w));
        }
        row.sort_unstable_by_key(|e| e.0);
        row.dedup_by(|next, kept| {
            if next.0 == kept.0 {
                kept.1 += next.1;
                true
            } else {
                false
            }
        });
        row
    });
    Ok(TransitionMatrix::from_rows(chambers, rows))
}

/// Solves `π K = π`, `Σπ = 1` by full-pivot LU. Fails with
/// [`Error::Singular`] when the stationary distribution is not unique.
pub fn stationary_exact<S: Clone + Eq + Hash>(k: &TransitionMatrix<S>) -> Result<Vec<f64>> {
    let n = k.len();
    if n == 0 {
        return Err(Error::EmptyWeights);
    }
    if n > MAX_EXACT_STATES {
        return Err(Error::TooLarge { what: "stationary solve states", size: n, cap: MAX_EXACT_STATES });
    }
    let mut a = k.to_dense().transpose();
    for i in 0..n {
        a[(i, i)] -= 1.0;
    }
    // the rows of Kᵀ − I sum to zero, so one of them is redundant
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    let lu = a.clone().full_piv_lu();
    let diag = lu.u().diagonal().map(f64::abs);
    let (lo, hi) = (diag.min(), diag.max());
    if hi == 0.0 || lo / hi < 1e-12 {
        return Err(Error::Singular(format!("stationary system has pivot ratio {:.3e}", lo / hi.max(f64::MIN_POSITIVE))));
    }
    let x = lu.solve(&b).ok_or_else(|| Error::Singular("LU solve failed".into()))?;
    let residual = (&a * &x - &b).amax();
    if residual > 1e-10 {
        return Err(Error::Singular(format!("stationary residual {residual:.3e}")));
    }
    if let Some(bad) = x.iter().find(|&&v| v < -1e-12) {
        return Err(Error::ToleranceNotMet(format!("negative stationary mass {bad:.3e}")));
    }
    let clipped: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
    let s: f64 = clipped.iter().sum();
    Ok(clipped.into_iter().map(|v| v / s).collect())
}

/// Multiplicity of the eigenvalue 1 of `K`, as the nullity of `K − I`.
pub fn eigenvalue_one_multiplicity<S: Clone + Eq + Hash>(k: &TransitionMatrix<S>) -> Result<usize> {
    let n = k.len();
    if n > MAX_EXACT_STATES {
        return Err(Error::TooLarge { what: "eigen solve states", size: n, cap: MAX_EXACT_STATES });
    }
    let mut a = k.to_dense();
    for i in 0..n {
        a[(i, i)] -= 1.0;
    }
    let sv = a.singular_values();
    let scale = sv.max().max(1.0);
    Ok(sv.iter().filter(|&&s| s <= 1e-9 * scale).count())
}

/// Draws exactly from the stationary distribution of a separating walk:
/// order the positive-weight faces by a weighted draw without replacement
/// and project any chamber onto them, last drawn first.
#[derive(Debug, Clone)]
pub struct BrownDiaconisSampler<'a, A: Arrangement> {
    table: &'a FaceWeightTable<A>,
    faces: Vec<&'a A::Face>,
    weights: WeightVector,
    start: A::Chamber,
}

impl<'a, A: Arrangement> BrownDiaconisSampler<'a, A> {
    pub fn new(table: &'a FaceWeightTable<A>) -> Result<Self> {
        Self::with_start(table, table.arrangement().reference_chamber())
    }

    /// The output law does not depend on `start`; this exists for checking that.
    pub fn with_start(table: &'a FaceWeightTable<A>, start: A::Chamber) -> Result<Self> {
        table.arrangement().check_chamber(&start)?;
        if !table.is_separating() {
            return Err(Error::Precondition("face weights are not separating".into()));
        }
        let (faces, w): (Vec<_>, Vec<_>) = table.support().map(|(f, w)| (f, *w)).unzip();
        Ok(Self { table, faces, weights: WeightVector::new(w)?, start })
    }

    pub fn sample(&self, rng: &mut RngStream) -> A::Chamber {
        let arr = self.table.arrangement();
        let order = sample_urn(&self.weights, rng);
        let mut c = self.start.clone();
        for &label in order.as_slice().iter().rev() {
            c = arr.project(&c, self.faces[label - 1]);
        }
        c
    }
}

/// Empirical law of `samples` exact draws, indexed like `chambers`.
pub fn brown_diaconis_frequencies<A: Arrangement>(
    sampler: &BrownDiaconisSampler<'_, A>,
    chambers: &[A::Chamber],
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Vec<f64> {
    let index: HashMap<&A::Chamber, usize> = chambers.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let counts = par::monte_carlo(
        exec,
        seed,
        samples,
        || vec![0u64; chambers.len()],
        |rng, acc| acc[index[&sampler.sample(rng)]] += 1,
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    );
    crate::luce::counts_to_frequencies(&counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Permutation;

    #[test]
    fn table_merges_and_validates() {
        let arr = Boolean::new(2).unwrap();
        let f: SignVector = "+0".parse().unwrap();
        let t = FaceWeightTable::new(arr, vec![(f.clone(), 0.25), (f.clone(), 0.25), ("-0".parse().unwrap(), 0.5)])
            .unwrap();
        assert_eq!(t.entries().len(), 2);
        assert_eq!(t.entries()[0], (f.clone(), 0.5));
        assert!(!t.is_separating());
        assert!(FaceWeightTable::new(arr, vec![(f.clone(), 0.9)]).is_err());
        assert!(FaceWeightTable::new(arr, vec![(f.clone(), -0.1), (f.clone(), 1.1)]).is_err());
        assert!(FaceWeightTable::new(arr, vec![("+".parse().unwrap(), 1.0)]).is_err());
        let t = FaceWeightTable::normalized(arr, vec![(f, 2.0), ("0-".parse().unwrap(), 2.0)]).unwrap();
        assert!(t.is_separating());
    }

    #[test]
    fn transition_rows_are_stochastic() {
        let t = riffle_face_weights(4).unwrap();
        let k = transition_matrix(&t, Execution::Sequential).unwrap();
        assert_eq!(k.len(), 24);
        for i in 0..k.len() {
            let s: f64 = k.row(i).iter().map(|e| e.1).sum();
            assert!((s - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn ehrenfest_stationary_is_uniform() {
        let t = ehrenfest_face_weights(3).unwrap();
        let k = transition_matrix(&t, Execution::Sequential).unwrap();
        let pi = stationary_exact(&k).unwrap();
        assert!(pi.iter().all(|p| (p - 0.125).abs() < 1e-12));
        assert_eq!(eigenvalue_one_multiplicity(&k).unwrap(), 1);
    }

    #[test]
    fn non_separating_walk_is_singular() {
        let arr = Boolean::new(2).unwrap();
        let t = FaceWeightTable::new(arr, vec![("+0".parse().unwrap(), 0.5), ("-0".parse().unwrap(), 0.5)]).unwrap();
        let k = transition_matrix(&t, Execution::Sequential).unwrap();
        assert!(matches!(stationary_exact(&k), Err(Error::Singular(_))));
        assert_eq!(eigenvalue_one_multiplicity(&k).unwrap(), 2);
        assert!(BrownDiaconisSampler::new(&t).is_err());
    }

    #[test]
    fn identity_only_table() {
        let arr = Braid::new(1).unwrap();
        let t = FaceWeightTable::new(arr, vec![(arr.identity_face(), 1.0)]).unwrap();
        assert!(t.is_separating());
        let k = transition_matrix(&t, Execution::Sequential).unwrap();
        assert_eq!(stationary_exact(&k).unwrap(), vec![1.0]);
        let mut rng = RngStream::new(0);
        assert_eq!(BrownDiaconisSampler::new(&t).unwrap().sample(&mut rng), Permutation::identity(1));
    }

    #[test]
    fn chain_walks() {
        let t = ehrenfest_face_weights(4).unwrap();
        let mut chain = ChamberChain::new(&t, "++++".parse().unwrap()).unwrap();
        let mut rng = RngStream::new(5);
        let c = chain.run(100, &mut rng).clone();
        assert!(c.is_chamber());
        assert!(ChamberChain::new(&t, "++0+".parse().unwrap()).is_err());
    }
}
