//! The Boolean arrangement: coordinate hyperplanes `xᵢ = 0` in ℝᵈ.
//!
//! Faces are sign vectors over {−, 0, +}; chambers are the sign vectors
//! without zeros.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Arrangement, ArrangementKind, FaceWeightTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Minus,
    Zero,
    Plus,
}

impl Sign {
    fn symbol(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Zero => '0',
            Sign::Plus => '+',
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Zero => Sign::Zero,
            Sign::Plus => Sign::Minus,
        }
    }
}

/// Written as a string over `+`, `-`, `0`, e.g. `+-0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector(Vec<Sign>);

impl SignVector {
    pub fn new(entries: Vec<Sign>) -> Self {
        Self(entries)
    }

    pub fn constant(d: usize, s: Sign) -> Self {
        Self(vec![s; d])
    }

    /// The `d`-dimensional chamber whose coordinate `i` is `+` iff bit
    /// `d − 1 − i` of `mask` is set; masks `0..2^d` enumerate chambers in
    /// lexicographic order.
    pub fn chamber_from_mask(d: usize, mask: usize) -> Self {
        Self((0..d).map(|i| if mask >> (d - 1 - i) & 1 == 1 { Sign::Plus } else { Sign::Minus }).collect())
    }

    /// Inverse of [`SignVector::chamber_from_mask`]; zeros count as `−`.
    pub fn mask(&self) -> usize {
        self.0.iter().fold(0, |m, &s| (m << 1) | usize::from(s == Sign::Plus))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Sign] {
        &self.0
    }

    pub fn is_chamber(&self) -> bool {
        !self.0.contains(&Sign::Zero)
    }

    pub fn flipped(&self) -> Self {
        Self(self.0.iter().map(|s| s.flip()).collect())
    }

    pub(crate) fn set(&mut self, i: usize, s: Sign) {
        self.0[i] = s;
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|s| write!(f, "{}", s.symbol()))
    }
}

impl FromStr for SignVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' => Ok(Sign::Minus),
                '0' => Ok(Sign::Zero),
                other => Err(Error::Parse(format!("sign vector character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(SignVector)
    }
}

impl Serialize for SignVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SignVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Coordinatewise projection: take `f`'s sign where nonzero, else `c`'s.
pub fn project_boolean(c: &SignVector, f: &SignVector) -> Result<SignVector> {
    if c.len() != f.len() {
        return Err(Error::DimensionMismatch { expected: c.len(), actual: f.len() });
    }
    if !c.is_chamber() {
        return Err(Error::InvalidArgument(format!("{c} is not a chamber")));
    }
    Ok(project_unchecked(c, f))
}

fn project_unchecked(c: &SignVector, f: &SignVector) -> SignVector {
    SignVector(c.0.iter().zip(&f.0).map(|(&a, &b)| if b == Sign::Zero { a } else { b }).collect())
}

/// Largest dimension whose chambers are enumerated.
pub const MAX_BOOLEAN_DIM: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Boolean {
    pub d: usize,
}

impl Boolean {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("dimension must be >= 1".into()));
        }
        Ok(Self { d })
    }
}

impl Arrangement for Boolean {
    type Chamber = SignVector;
    type Face = SignVector;

    fn kind(&self) -> ArrangementKind {
        ArrangementKind::Boolean { d: self.d }
    }

    fn check_face(&self, f: &SignVector) -> Result<()> {
        if f.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, actual: f.len() });
        }
        Ok(())
    }

    fn check_chamber(&self, c: &SignVector) -> Result<()> {
        self.check_face(c)?;
        if !c.is_chamber() {
            return Err(Error::InvalidArgument(format!("{c} is not a chamber")));
        }
        Ok(())
    }

    fn project(&self, c: &SignVector, f: &SignVector) -> SignVector {
        project_unchecked(c, f)
    }

    fn chamber_count(&self) -> Option<usize> {
        1usize.checked_shl(self.d as u32)
    }

    fn chambers(&self) -> Result<Vec<SignVector>> {
        if self.d > MAX_BOOLEAN_DIM {
            return Err(Error::TooLarge { what: "Boolean dimension", size: self.d, cap: MAX_BOOLEAN_DIM });
        }
        Ok((0..1usize << self.d).map(|m| SignVector::chamber_from_mask(self.d, m)).collect())
    }

    fn hyperplane_count(&self) -> usize {
        self.d
    }

    fn face_off_hyperplane(&self, f: &SignVector, h: usize) -> bool {
        f.0[h] != Sign::Zero
    }

    fn reference_chamber(&self) -> SignVector {
        SignVector::constant(self.d, Sign::Plus)
    }

    fn identity_face(&self) -> SignVector {
        SignVector::constant(self.d, Sign::Zero)
    }
}

/// Weight 1/(2d) on each face with exactly one nonzero coordinate.
pub fn ehrenfest_face_weights(d: usize) -> Result<FaceWeightTable<Boolean>> {
    let arr = Boolean::new(d)?;
    let w = 1.0 / (2 * d) as f64;
    let entries = (0..d).flat_map(|i| {
        [Sign::Plus, Sign::Minus].map(move |s| {
            let mut f = SignVector::constant(d, Sign::Zero);
            f.set(i, s);
            (f, w)
        })
    });
    FaceWeightTable::new(arr, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(s: &str) -> SignVector {
        s.parse().unwrap()
    }

    #[test]
    fn projection_examples() {
        assert_eq!(project_boolean(&sv("++-"), &sv("000")).unwrap(), sv("++-"));
        assert_eq!(project_boolean(&sv("++-"), &sv("0-0")).unwrap(), sv("+--"));
        assert_eq!(project_boolean(&sv("++-"), &sv("-+-")).unwrap(), sv("-+-"));
        assert!(project_boolean(&sv("+0-"), &sv("000")).is_err());
        assert!(project_boolean(&sv("++"), &sv("000")).is_err());
    }

    #[test]
    fn chamber_masks_round_trip() {
        let arr = Boolean::new(4).unwrap();
        let ch = arr.chambers().unwrap();
        assert_eq!(ch.len(), 16);
        assert_eq!(ch[0], sv("----"));
        assert_eq!(ch[15], sv("++++"));
        for (m, c) in ch.iter().enumerate() {
            assert_eq!(c.mask(), m);
        }
        assert!(ch.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(sv("+-0").to_string(), "+-0");
        assert!("+x".parse::<SignVector>().is_err());
        let json = serde_json::to_string(&sv("+-")).unwrap();
        assert_eq!(json, "\"+-\"");
        assert_eq!(serde_json::from_str::<SignVector>(&json).unwrap(), sv("+-"));
    }

    #[test]
    fn ehrenfest_d1() {
        let t = ehrenfest_face_weights(1).unwrap();
        assert_eq!(t.entries().len(), 2);
        assert!(t.entries().iter().all(|(_, w)| *w == 0.5));
        assert!(ehrenfest_face_weights(0).is_err());
    }
}
