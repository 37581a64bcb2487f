//! Ground-set subsets and non-negative integer vectors.
//!
//! Ground elements are 0-based in the library: element `i` is bit `i` of a
//! [`Subset`] and component `i` of an [`IntVector`]. Files and the CLI use
//! the 1-based numbering `1..=r`.

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A subset of the ground set `{0, .., r-1}` stored as a bitmask.
///
/// Serialized as the sorted list of its 1-based elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(pub u32);

impl Serialize for Subset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.elements().map(|i| i + 1))
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let elems = Vec::<usize>::deserialize(d)?;
        if let Some(&bad) = elems.iter().find(|&&e| e == 0 || e > 32) {
            return Err(D::Error::custom(format!("element {bad} outside 1..=32")));
        }
        Ok(Subset::from_elements(elems.into_iter().map(|e| e - 1)))
    }
}

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn full(r: usize) -> Subset {
        if r >= 32 {
            Subset(u32::MAX)
        } else {
            Subset((1u32 << r) - 1)
        }
    }

    pub fn singleton(i: usize) -> Subset {
        Subset(1 << i)
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(elems: I) -> Subset {
        Subset(elems.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        i < 32 && self.0 >> i & 1 == 1
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn is_proper_subset_of(self, other: Subset) -> bool {
        self.is_subset_of(other) && self != other
    }

    #[inline]
    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    #[inline]
    pub fn with(self, i: usize) -> Subset {
        Subset(self.0 | 1 << i)
    }

    /// Elements in ascending order.
    pub fn elements(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// Every subset of `{0, .., r-1}`, in bitmask order.
    pub fn all(r: usize) -> impl Iterator<Item = Subset> {
        (0..1u32 << r).map(Subset)
    }

    /// Every subset of `self`, including the empty set and `self`.
    pub fn subsets(self) -> impl Iterator<Item = Subset> {
        let full = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(Subset(cur))
        })
    }
}

impl fmt::Display for Subset {
    /// 1-based, e.g. `{1,2}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.elements().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

/// A vector in `Z^r_{>=0}`. Ordering is lexicographic on components.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntVector(Vec<u32>);

impl IntVector {
    pub fn new(components: Vec<u32>) -> Self {
        IntVector(components)
    }

    pub fn zero(r: usize) -> Self {
        IntVector(vec![0; r])
    }

    /// The unit vector with a one in component `i`.
    pub fn unit(i: usize, r: usize) -> Result<Self> {
        if i >= r {
            return Err(Error::IndexOutOfRange { index: i, size: r });
        }
        let mut v = vec![0; r];
        v[i] = 1;
        Ok(IntVector(v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn components(&self) -> &[u32] {
        &self.0
    }

    pub fn into_components(self) -> Vec<u32> {
        self.0
    }

    /// `|v|`, the sum of all components.
    pub fn weight(&self) -> u64 {
        self.0.iter().map(|&c| c as u64).sum()
    }

    /// `|v(A)|`, the sum of the components indexed by `a`.
    pub fn weight_on(&self, a: Subset) -> u64 {
        a.elements()
            .filter(|&i| i < self.0.len())
            .map(|i| self.0[i] as u64)
            .sum()
    }

    /// `v(A)`: the components indexed by `a`, in ascending index order.
    pub fn restrict(&self, a: Subset) -> Result<IntVector> {
        if let Some(i) = a.elements().find(|&i| i >= self.0.len()) {
            return Err(Error::IndexOutOfRange {
                index: i,
                size: self.0.len(),
            });
        }
        Ok(IntVector(a.elements().map(|i| self.0[i]).collect()))
    }

    /// Componentwise maximum `u ∨ v`.
    pub fn join(&self, other: &IntVector) -> Result<IntVector> {
        self.check_len(other)?;
        Ok(IntVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        ))
    }

    /// `u ≤ v` componentwise, i.e. `u` is an integral sub-vector of `v`.
    pub fn is_subvector(&self, other: &IntVector) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `u < v`: a sub-vector that differs from `v`.
    pub fn is_proper_subvector(&self, other: &IntVector) -> bool {
        self.is_subvector(other) && self != other
    }

    /// `(v)_{>0}`, the indices of non-zero components.
    pub fn support(&self) -> Subset {
        Subset::from_elements(
            self.0
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(i, _)| i),
        )
    }

    /// `v + e_i`.
    pub fn plus_unit(&self, i: usize) -> IntVector {
        let mut v = self.0.clone();
        v[i] += 1;
        IntVector(v)
    }

    /// `v - e_i`, or `None` when component `i` is already zero.
    pub fn minus_unit(&self, i: usize) -> Option<IntVector> {
        let mut v = self.0.clone();
        v[i] = v[i].checked_sub(1)?;
        Some(IntVector(v))
    }

    fn check_len(&self, other: &IntVector) -> Result<()> {
        if self.0.len() != other.0.len() {
            return Err(Error::Dimension(format!(
                "vectors of length {} and {}",
                self.0.len(),
                other.0.len()
            )));
        }
        Ok(())
    }
}

impl Index<usize> for IntVector {
    type Output = u32;

    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

impl From<Vec<u32>> for IntVector {
    fn from(v: Vec<u32>) -> Self {
        IntVector(v)
    }
}

impl<const N: usize> From<[u32; N]> for IntVector {
    fn from(v: [u32; N]) -> Self {
        IntVector(v.to_vec())
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}
