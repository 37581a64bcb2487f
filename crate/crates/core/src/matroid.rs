//! Matroids given by their independent sets, and their embedding as
//! discrete polymatroids with all singleton ranks at most one.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::polymatroid::{DiscretePolymatroid, Representation};
use crate::vector::Subset;

pub const MAX_MATROID_GROUND_SET: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matroid {
    r: usize,
    independent: BTreeSet<Subset>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom")]
pub enum MatroidViolation {
    /// The empty set is not independent.
    EmptyNotIndependent,
    /// `subset` of the independent set `set` is missing.
    NotDownwardClosed { set: Subset, subset: Subset },
    /// `larger` has one more element than `smaller` but no element of
    /// `larger \ smaller` extends `smaller`.
    Augmentation { larger: Subset, smaller: Subset },
    /// A set mentions an element outside the ground set.
    OutOfRange { set: Subset },
}

impl fmt::Display for MatroidViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatroidViolation::EmptyNotIndependent => {
                write!(f, "axiom 1: the empty set is not independent")
            }
            MatroidViolation::NotDownwardClosed { set, subset } => {
                write!(f, "axiom 2: {set} is independent but {subset} is not")
            }
            MatroidViolation::Augmentation { larger, smaller } => {
                write!(f, "axiom 3: no element of {larger} augments {smaller}")
            }
            MatroidViolation::OutOfRange { set } => write!(f, "{set} leaves the ground set"),
        }
    }
}

impl Matroid {
    /// Wraps an independent-set family without checking the axioms.
    pub fn new(r: usize, independent: impl IntoIterator<Item = Subset>) -> Result<Self> {
        if r == 0 || r > MAX_MATROID_GROUND_SET {
            return Err(Error::GroundSetSize(r));
        }
        Ok(Matroid {
            r,
            independent: independent.into_iter().collect(),
        })
    }

    /// The uniform matroid `U_{k,r}`.
    pub fn uniform(k: usize, r: usize) -> Result<Self> {
        Matroid::new(r, Subset::all(r).filter(|s| s.len() <= k))
    }

    /// Every subset independent.
    pub fn free(r: usize) -> Result<Self> {
        Matroid::uniform(r, r)
    }

    /// The matroid of a representation by one-dimensional subspaces: a set
    /// is independent when its generators are linearly independent.
    pub fn from_representation(rep: &Representation) -> Result<Self> {
        if let Some(i) = rep.generators().iter().position(|g| g.cols() != 1) {
            return Err(Error::Input(format!(
                "generator {} has {} columns; a matroid representation needs exactly one",
                i + 1,
                rep.generator(i).cols()
            )));
        }
        let d = DiscretePolymatroid::from_representation(rep)?;
        Matroid::new(
            rep.len(),
            Subset::all(rep.len()).filter(|&x| d.rank(x) as usize == x.len()),
        )
    }

    pub fn ground_set_size(&self) -> usize {
        self.r
    }

    pub fn independent_sets(&self) -> impl Iterator<Item = Subset> + '_ {
        self.independent.iter().copied()
    }

    pub fn is_independent(&self, x: Subset) -> bool {
        self.independent.contains(&x)
    }

    /// Checks the three independence axioms exhaustively.
    pub fn validate(&self) -> Vec<MatroidViolation> {
        let mut out = Vec::new();
        let ground = Subset::full(self.r);
        for &set in &self.independent {
            if !set.is_subset_of(ground) {
                out.push(MatroidViolation::OutOfRange { set });
            }
        }
        if !self.independent.contains(&Subset::EMPTY) {
            out.push(MatroidViolation::EmptyNotIndependent);
        }
        for &set in &self.independent {
            for i in set.elements() {
                let subset = Subset(set.bits() & !(1 << i));
                if !self.independent.contains(&subset) {
                    out.push(MatroidViolation::NotDownwardClosed { set, subset });
                }
            }
        }
        for &larger in &self.independent {
            for &smaller in &self.independent {
                if larger.len() != smaller.len() + 1 {
                    continue;
                }
                let diff = Subset(larger.bits() & !smaller.bits());
                if !diff
                    .elements()
                    .any(|x| self.independent.contains(&smaller.with(x)))
                {
                    out.push(MatroidViolation::Augmentation { larger, smaller });
                }
            }
        }
        out
    }

    /// `max{|X| : X ⊆ a, X independent}`.
    pub fn rank(&self, a: Subset) -> usize {
        self.independent
            .iter()
            .filter(|x| x.is_subset_of(a))
            .map(|x| x.len())
            .max()
            .unwrap_or(0)
    }

    /// `D(M)`, whose rank function is the matroid rank function.
    pub fn to_polymatroid(&self) -> Result<DiscretePolymatroid> {
        DiscretePolymatroid::from_fn(self.r, |a| self.rank(a) as u32)
    }
}
