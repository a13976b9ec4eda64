//! The braid arrangement: hyperplanes `xᵢ = xⱼ` for `i < j`.
//!
//! Chambers are permutations (a deck read top to bottom). Faces are block
//! ordered set partitions; projecting a deck onto `B₁/B₂/…` pulls the cards
//! of each block out in their current relative order and stacks the blocks
//! in block order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Arrangement, ArrangementKind, FaceWeightTable};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::weights::WeightVector;

/// Ordered blocks, each stored sorted; written `1 3/2/4 5`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockOrderedSetPartition(Vec<Vec<usize>>);

impl BlockOrderedSetPartition {
    pub fn new(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n: usize = blocks.iter().map(Vec::len).sum();
        if blocks.iter().any(Vec::is_empty) {
            return Err(Error::InvalidArgument("empty block".into()));
        }
        let mut seen = vec![false; n + 1];
        for &x in blocks.iter().flatten() {
            if x == 0 || x > n {
                return Err(Error::LabelOutOfRange { label: x, n });
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::RepeatedLabel(x));
            }
        }
        let blocks = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        Ok(Self(blocks))
    }

    /// The single block `[n]`.
    pub fn whole(n: usize) -> Self {
        Self(vec![(1..=n).collect()])
    }

    /// `S / [n]∖S`, or the single block when `S` is empty or everything.
    pub fn two_block(n: usize, top: &[usize]) -> Result<Self> {
        if top.is_empty() || top.len() == n {
            return Ok(Self::whole(n));
        }
        let rest: Vec<usize> = (1..=n).filter(|x| !top.contains(x)).collect();
        Self::new(vec![top.to_vec(), rest])
    }

    /// Singleton blocks in the order of `p`: the chamber face of `p`.
    pub fn singletons(p: &Permutation) -> Self {
        Self(p.as_slice().iter().map(|&x| vec![x]).collect())
    }

    pub fn n(&self) -> usize {
        self.0.iter().map(Vec::len).sum()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.0
    }

    pub fn is_chamber(&self) -> bool {
        self.0.iter().all(|b| b.len() == 1)
    }

    /// Block index of every label, `block_of()[label - 1]`.
    pub fn block_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.n()];
        for (b, block) in self.0.iter().enumerate() {
            for &x in block {
                out[x - 1] = b;
            }
        }
        out
    }
}

impl fmt::Display for BlockOrderedSetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            for (j, x) in b.iter().enumerate() {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{x}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for BlockOrderedSetPartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let blocks = s
            .split('/')
            .map(|b| {
                b.split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|t| !t.is_empty())
                    .map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("label {t:?}: {e}"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(blocks)
    }
}

impl Serialize for BlockOrderedSetPartition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BlockOrderedSetPartition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Tits projection of the deck `c` onto the face `f`.
pub fn project_braid(c: &Permutation, f: &BlockOrderedSetPartition) -> Result<Permutation> {
    if c.len() != f.n() {
        return Err(Error::DimensionMismatch { expected: c.len(), actual: f.n() });
    }
    Ok(project_unchecked(c, f))
}

fn project_unchecked(c: &Permutation, f: &BlockOrderedSetPartition) -> Permutation {
    let pos = c.positions();
    let mut out = Vec::with_capacity(c.len());
    for block in f.blocks() {
        let start = out.len();
        out.extend_from_slice(block);
        out[start..].sort_unstable_by_key(|&x| pos[x - 1]);
    }
    Permutation::from_vec_unchecked(out)
}

/// Largest `n` whose `n!` chambers are enumerated.
pub const MAX_BRAID_N: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Braid {
    pub n: usize,
}

impl Braid {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be >= 1".into()));
        }
        Ok(Self { n })
    }

    /// Hyperplane index `h` ↦ pair `(i, j)`, `i < j`, in lexicographic order.
    fn pair(&self, mut h: usize) -> (usize, usize) {
        let mut i = 1;
        while h >= self.n - i {
            h -= self.n - i;
            i += 1;
        }
        (i, i + 1 + h)
    }
}

impl Arrangement for Braid {
    type Chamber = Permutation;
    type Face = BlockOrderedSetPartition;

    fn kind(&self) -> ArrangementKind {
        ArrangementKind::Braid { n: self.n }
    }

    fn check_face(&self, f: &BlockOrderedSetPartition) -> Result<()> {
        if f.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: f.n() });
        }
        Ok(())
    }

    fn check_chamber(&self, c: &Permutation) -> Result<()> {
        if c.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: c.len() });
        }
        Ok(())
    }

    fn project(&self, c: &Permutation, f: &BlockOrderedSetPartition) -> Permutation {
        project_unchecked(c, f)
    }

    fn chamber_count(&self) -> Option<usize> {
        (1..=self.n).try_fold(1usize, |acc, i| acc.checked_mul(i))
    }

    fn chambers(&self) -> Result<Vec<Permutation>> {
        if self.n > MAX_BRAID_N {
            return Err(Error::TooLarge { what: "braid n", size: self.n, cap: MAX_BRAID_N });
        }
        Ok(Permutation::all(self.n).collect())
    }

    fn hyperplane_count(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    fn face_off_hyperplane(&self, f: &BlockOrderedSetPartition, h: usize) -> bool {
        let (i, j) = self.pair(h);
        let blocks = f.block_of();
        blocks[i - 1] != blocks[j - 1]
    }

    fn reference_chamber(&self) -> Permutation {
        Permutation::identity(self.n)
    }

    fn identity_face(&self) -> BlockOrderedSetPartition {
        BlockOrderedSetPartition::whole(self.n)
    }
}

/// Weight θᵢ on the face `i / [n]∖i` ("move card i to the top").
pub fn tsetlin_face_weights(w: &WeightVector) -> Result<FaceWeightTable<Braid>> {
    w.require_normalized()?;
    let n = w.len();
    let arr = Braid::new(n)?;
    let entries = (1..=n).map(|i| {
        let face = BlockOrderedSetPartition::two_block(n, &[i]).expect("valid labels");
        (face, w.theta(i))
    });
    FaceWeightTable::new_with_tolerance(arr, entries, crate::weights::NORMALIZATION_TOL)
}

/// Largest deck for the riffle table (2ⁿ faces).
pub const MAX_RIFFLE_N: usize = 15;

/// Weight 2⁻ⁿ on every `S / [n]∖S` (inverse riffle shuffle). `S = ∅` and
/// `S = [n]` both act as the identity and share the single-block face.
pub fn riffle_face_weights(n: usize) -> Result<FaceWeightTable<Braid>> {
    if n > MAX_RIFFLE_N {
        return Err(Error::TooLarge { what: "riffle n", size: n, cap: MAX_RIFFLE_N });
    }
    let arr = Braid::new(n)?;
    let w = (0.5f64).powi(n as i32);
    let entries = (0..1usize << n).map(|mask| {
        let top: Vec<usize> = (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect();
        (BlockOrderedSetPartition::two_block(n, &top).expect("valid labels"), w)
    });
    FaceWeightTable::new(arr, entries)
}
