//! Permutations in one-line notation with 1-based labels.
//!
//! `Permutation` entry `j` is σ(j+1): the label drawn at step `j + 1`, or the
//! card at position `j + 1` counted from the top.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        if n == 0 {
            return Err(Error::NotAPermutation { n, detail: "empty".into() });
        }
        let mut seen = vec![false; n + 1];
        for &v in &mapping {
            if v == 0 || v > n {
                return Err(Error::NotAPermutation { n, detail: format!("value {v} out of range") });
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::NotAPermutation { n, detail: format!("value {v} repeated") });
            }
        }
        Ok(Self(mapping))
    }

    /// Caller guarantees `mapping` is a bijection of 1..=n.
    pub(crate) fn from_vec_unchecked(mapping: Vec<usize>) -> Self {
        debug_assert!(Self::new(mapping.clone()).is_ok());
        Self(mapping)
    }

    pub fn identity(n: usize) -> Self {
        Self((1..=n).collect())
    }

    pub fn reversed_identity(n: usize) -> Self {
        Self((1..=n).rev().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    /// σ(j) for 1-based position `j`.
    pub fn at(&self, j: usize) -> usize {
        self.0[j - 1]
    }

    /// Bottom-to-top order.
    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    /// 1-based position of every label: `positions()[label - 1]`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.len()];
        for (j, &l) in self.0.iter().enumerate() {
            pos[l - 1] = j + 1;
        }
        pos
    }

    /// Relative order of `labels` within this permutation.
    pub fn relative_order(&self, labels: &[usize]) -> Vec<usize> {
        let keep: std::collections::HashSet<usize> = labels.iter().copied().collect();
        self.0.iter().copied().filter(|l| keep.contains(l)).collect()
    }

    /// Elements covered by `self` in the weak Bruhat order: swap positions
    /// `i, i+1` wherever `self(i) < self(i+1)`.
    pub fn bruhat_covers(&self) -> Vec<Permutation> {
        self.0
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0] < w[1])
            .map(|(i, _)| {
                let mut v = self.0.clone();
                v.swap(i, i + 1);
                Permutation(v)
            })
            .collect()
    }

    /// Lexicographic successor, or `None` at the last permutation.
    pub fn next_lex(&self) -> Option<Self> {
        let mut v = self.0.clone();
        let i = v.windows(2).rposition(|w| w[0] < w[1])?;
        let j = v.iter().rposition(|&x| x > v[i]).expect("successor exists");
        v.swap(i, j);
        v[i + 1..].reverse();
        Some(Permutation(v))
    }

    /// Index of this permutation in lexicographic order, in `0..n!`.
    pub fn lex_rank(&self) -> usize {
        let n = self.len();
        let mut rank = 0usize;
        for i in 0..n {
            let smaller_after = self.0[i + 1..].iter().filter(|&&x| x < self.0[i]).count();
            rank = rank * (n - i) + smaller_after;
        }
        rank
    }

    /// Inverse of [`Permutation::lex_rank`].
    pub fn from_lex_rank(n: usize, mut rank: usize) -> Self {
        let mut digits = vec![0usize; n];
        for i in (0..n).rev() {
            let base = n - i;
            digits[i] = rank % base;
            rank /= base;
        }
        let mut pool: Vec<usize> = (1..=n).collect();
        Permutation(digits.into_iter().map(|d| pool.remove(d)).collect())
    }

    /// All n! permutations in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        std::iter::successors(Some(Permutation::identity(n)), |p| p.next_lex())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Accepts labels separated by commas and/or whitespace, optionally
    /// wrapped in brackets: `3,2,1`, `3 2 1`, `[3, 2, 1]`.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches(['[', '(']).trim_end_matches([']', ')']);
        let labels = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("label {t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(labels)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        Permutation::new(v).map_err(serde::de::Error::custom)
    }
}
