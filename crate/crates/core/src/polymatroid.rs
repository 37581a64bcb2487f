//! Discrete polymatroids given by their rank functions.
//!
//! A [`DiscretePolymatroid`] stores the rank of every subset of its ground
//! set densely, indexed by bitmask. Membership of a vector `u` is the family
//! of inequalities `|u(A)| <= rank(A)` over all subsets `A`. Everything that
//! enumerates vectors (members, bases, excluded vectors, the `C_i` sets)
//! walks the box `0 <= u_i <= rank({i})` in lexicographic order, so all
//! returned vector lists are sorted lexicographically.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Field, Mat};
use crate::vector::{IntVector, Subset};

/// Largest supported ground set.
pub const MAX_GROUND_SET: usize = 20;

/// Default cap on the number of vectors a bounded enumeration may visit.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 1 << 24;

/// Subspaces `V_1, .., V_r` of `F_q^ambient`, each given by a generator
/// matrix whose columns span it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    field: Field,
    ambient: usize,
    generators: Vec<Mat>,
}

impl Representation {
    pub fn new(field: Field, ambient: usize, generators: Vec<Mat>) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if g.field() != field {
                return Err(Error::FieldMismatch {
                    left: field.modulus(),
                    right: g.field().modulus(),
                });
            }
            if g.rows() != ambient {
                return Err(Error::Dimension(format!(
                    "generator {} has {} rows, ambient dimension is {ambient}",
                    i + 1,
                    g.rows()
                )));
            }
        }
        Ok(Representation {
            field,
            ambient,
            generators,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Size of the ground set.
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Mat] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &Mat {
        &self.generators[i]
    }

    /// The generators of `x`, concatenated in ascending element order.
    pub fn stacked(&self, x: Subset) -> Mat {
        Mat::hconcat_rows(
            self.field,
            self.ambient,
            x.elements().map(|i| &self.generators[i]),
        )
        .expect("generators share shape by construction")
    }

    /// `dim(sum_{i in x} V_i)`.
    pub fn rank_of(&self, x: Subset) -> Result<u32> {
        if let Some(i) = x.elements().find(|&i| i >= self.len()) {
            return Err(Error::IndexOutOfRange {
                index: i,
                size: self.len(),
            });
        }
        Ok(self.stacked(x).rank() as u32)
    }

    /// Keeps only the listed elements, renumbered `0..elements.len()` in
    /// the given order.
    pub fn restrict(&self, elements: &[usize]) -> Result<Representation> {
        let gens = elements
            .iter()
            .map(|&i| {
                self.generators
                    .get(i)
                    .cloned()
                    .ok_or(Error::IndexOutOfRange {
                        index: i,
                        size: self.len(),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Representation::new(self.field, self.ambient, gens)
    }

    /// Left-multiplies every generator by `t`, which must be square of the
    /// ambient order. The rank function is unchanged when `t` is invertible.
    pub fn transform(&self, t: &Mat) -> Result<Representation> {
        let gens = self
            .generators
            .iter()
            .map(|g| t.mul(g))
            .collect::<Result<Vec<_>>>()?;
        Representation::new(self.field, t.rows(), gens)
    }
}

/// A rank function evaluated on lists of ground elements.
///
/// Lets the network conditions be checked directly on a representation
/// whose ground set is too large for a rank table.
pub trait RankOracle {
    fn ground_set_size(&self) -> usize;

    /// Rank of the set of listed elements; repeats are ignored. Elements
    /// must be in range.
    fn rank_of_elements(&self, elements: &[usize]) -> u32;

    fn singleton_rank(&self, i: usize) -> u32 {
        self.rank_of_elements(&[i])
    }
}

impl RankOracle for Representation {
    fn ground_set_size(&self) -> usize {
        self.len()
    }

    fn rank_of_elements(&self, elements: &[usize]) -> u32 {
        let mut elements = elements.to_vec();
        elements.sort_unstable();
        elements.dedup();
        Mat::hconcat_rows(
            self.field,
            self.ambient,
            elements.iter().map(|&i| &self.generators[i]),
        )
        .expect("generators share shape by construction")
        .rank() as u32
    }
}

impl RankOracle for DiscretePolymatroid {
    fn ground_set_size(&self) -> usize {
        self.r
    }

    fn rank_of_elements(&self, elements: &[usize]) -> u32 {
        self.rank(Subset::from_elements(elements.iter().copied()))
    }

    fn singleton_rank(&self, i: usize) -> u32 {
        DiscretePolymatroid::singleton_rank(self, i)
    }
}

/// A violated rank axiom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom")]
pub enum AxiomViolation {
    /// `a ⊆ b` but `rank(a) > rank(b)`.
    Monotonicity { a: Subset, b: Subset },
    /// `rank(a ∪ b) + rank(a ∩ b) > rank(a) + rank(b)`.
    Submodularity { a: Subset, b: Subset },
    /// `rank(∅) != 0`.
    EmptySet { rank: u32 },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::Monotonicity { a, b } => {
                write!(f, "D1 (monotonicity): rank{a} > rank{b}")
            }
            AxiomViolation::Submodularity { a, b } => {
                write!(f, "D2 (submodularity) fails for {a} and {b}")
            }
            AxiomViolation::EmptySet { rank } => write!(f, "D3: rank of the empty set is {rank}"),
        }
    }
}

/// A discrete polymatroid on the ground set `{0, .., r-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscretePolymatroid {
    r: usize,
    rank: Vec<u32>,
}

impl DiscretePolymatroid {
    /// Wraps a rank table indexed by bitmask. The table is not checked
    /// against the axioms; see [`DiscretePolymatroid::validate_axioms`].
    pub fn from_rank_table(r: usize, rank: Vec<u32>) -> Result<Self> {
        if r == 0 || r > MAX_GROUND_SET {
            return Err(Error::GroundSetSize(r));
        }
        if rank.len() != 1 << r {
            return Err(Error::Dimension(format!(
                "rank table has {} entries, expected {}",
                rank.len(),
                1usize << r
            )));
        }
        Ok(DiscretePolymatroid { r, rank })
    }

    pub fn from_fn(r: usize, f: impl FnMut(Subset) -> u32) -> Result<Self> {
        if r == 0 || r > MAX_GROUND_SET {
            return Err(Error::GroundSetSize(r));
        }
        DiscretePolymatroid::from_rank_table(r, Subset::all(r).map(f).collect())
    }

    /// `D(V_1, .., V_r)`: the rank of each subset is the dimension of the
    /// sum of its subspaces.
    pub fn from_representation(rep: &Representation) -> Result<Self> {
        let r = rep.len();
        if r == 0 || r > MAX_GROUND_SET {
            return Err(Error::GroundSetSize(r));
        }
        DiscretePolymatroid::from_fn(r, |x| rep.stacked(x).rank() as u32)
    }

    pub fn ground_set_size(&self) -> usize {
        self.r
    }

    pub fn ground_set(&self) -> Subset {
        Subset::full(self.r)
    }

    #[inline]
    pub fn rank(&self, a: Subset) -> u32 {
        self.rank[a.bits() as usize]
    }

    pub fn rank_table(&self) -> &[u32] {
        &self.rank
    }

    #[inline]
    pub fn singleton_rank(&self, i: usize) -> u32 {
        self.rank(Subset::singleton(i))
    }

    /// Checks (D1) monotonicity, (D2) submodularity and (D3) `rank(∅) = 0`.
    ///
    /// Monotonicity and submodularity are checked on adjacent pairs
    /// (`A ⊂ A+i`, and `A+i`, `A+j`), which is equivalent to the global
    /// conditions; each violation names the two offending subsets.
    pub fn validate_axioms(&self) -> Vec<AxiomViolation> {
        let mut out = Vec::new();
        if self.rank[0] != 0 {
            out.push(AxiomViolation::EmptySet { rank: self.rank[0] });
        }
        for a in Subset::all(self.r) {
            for i in (0..self.r).filter(|&i| !a.contains(i)) {
                let ai = a.with(i);
                if self.rank(a) > self.rank(ai) {
                    out.push(AxiomViolation::Monotonicity { a, b: ai });
                }
                for j in (i + 1..self.r).filter(|&j| !a.contains(j)) {
                    let aj = a.with(j);
                    if self.rank(ai.with(j)) + self.rank(a) > self.rank(ai) + self.rank(aj) {
                        out.push(AxiomViolation::Submodularity { a: ai, b: aj });
                    }
                }
            }
        }
        out
    }

    /// `|u(A)| <= rank(A)` for every subset `A`.
    pub fn contains(&self, u: &IntVector) -> bool {
        assert_eq!(u.len(), self.r, "vector length must match the ground set");
        let mut sums = vec![0u64; 1 << self.r];
        self.contains_with(u.components(), &mut sums)
    }

    fn contains_with(&self, u: &[u32], sums: &mut [u64]) -> bool {
        for (i, &c) in u.iter().enumerate() {
            if c > self.singleton_rank(i) {
                return false;
            }
        }
        for a in 1..sums.len() {
            let low = a.trailing_zeros() as usize;
            sums[a] = sums[a & (a - 1)] + u[low] as u64;
            if sums[a] > self.rank[a] as u64 {
                return false;
            }
        }
        true
    }

    /// Number of vectors in the box `0 <= u_i <= rank({i})`.
    pub fn box_size(&self) -> u128 {
        (0..self.r)
            .map(|i| self.singleton_rank(i) as u128 + 1)
            .product()
    }

    fn bounds(&self) -> Vec<u32> {
        (0..self.r).map(|i| self.singleton_rank(i)).collect()
    }

    /// Visits every vector of the box with the given per-component bounds in
    /// lexicographic order, along with its membership verdict.
    fn walk_box(
        &self,
        lower: &[u32],
        upper: &[u32],
        budget: u128,
        mut visit: impl FnMut(&[u32], bool),
    ) -> Result<()> {
        let needed: u128 = lower
            .iter()
            .zip(upper)
            .map(|(&lo, &hi)| if hi < lo { 0 } else { (hi - lo) as u128 + 1 })
            .product();
        if needed > budget {
            return Err(Error::Budget { needed, budget });
        }
        if needed == 0 {
            return Ok(());
        }
        let mut sums = vec![0u64; 1 << self.r];
        let mut u = lower.to_vec();
        loop {
            let member = self.contains_with(&u, &mut sums);
            visit(&u, member);
            // odometer, last component fastest
            let mut k = self.r;
            loop {
                if k == 0 {
                    return Ok(());
                }
                k -= 1;
                if u[k] < upper[k] {
                    u[k] += 1;
                    break;
                }
                u[k] = lower[k];
            }
        }
    }

    /// All members, lexicographically sorted.
    pub fn members(&self) -> Result<Vec<IntVector>> {
        self.members_within(DEFAULT_ENUMERATION_BUDGET)
    }

    pub fn members_within(&self, budget: u128) -> Result<Vec<IntVector>> {
        let mut out = Vec::new();
        self.walk_box(&vec![0; self.r], &self.bounds(), budget, |u, member| {
            if member {
                out.push(IntVector::new(u.to_vec()));
            }
        })?;
        Ok(out)
    }

    /// Maximal members under the sub-vector order.
    pub fn bases(&self) -> Result<Vec<IntVector>> {
        let members = self.members()?;
        let set: HashSet<&IntVector> = members.iter().collect();
        Ok(members
            .iter()
            .filter(|u| (0..self.r).all(|i| !set.contains(&u.plus_unit(i))))
            .cloned()
            .collect())
    }

    /// The rank of the polymatroid, `rank(ground set)`, which is the common
    /// weight of all basis vectors.
    pub fn rank_of(&self) -> u32 {
        self.rank(self.ground_set())
    }

    pub fn rho_max(&self) -> u32 {
        (0..self.r)
            .map(|i| self.singleton_rank(i))
            .max()
            .unwrap_or(0)
    }

    /// Vectors of the box `u_i <= rank({i})` that are not members.
    pub fn excluded_vectors(&self) -> Result<Vec<IntVector>> {
        let mut out = Vec::new();
        self.walk_box(
            &vec![0; self.r],
            &self.bounds(),
            DEFAULT_ENUMERATION_BUDGET,
            |u, member| {
                if !member {
                    out.push(IntVector::new(u.to_vec()));
                }
            },
        )?;
        Ok(out)
    }

    /// `D_i`: excluded vectors whose component `i` equals one.
    pub fn excluded_at(&self, i: usize) -> Result<Vec<IntVector>> {
        self.check_index(i)?;
        let mut lower = vec![0; self.r];
        let mut upper = self.bounds();
        if upper[i] == 0 {
            return Ok(Vec::new());
        }
        lower[i] = 1;
        upper[i] = 1;
        let mut out = Vec::new();
        self.walk_box(&lower, &upper, DEFAULT_ENUMERATION_BUDGET, |u, member| {
            if !member {
                out.push(IntVector::new(u.to_vec()));
            }
        })?;
        Ok(out)
    }

    /// `C_i`: the vectors `u` of `D_i` such that
    /// 1. `u - e_i` is a member,
    /// 2. no other `v` in `D_i` satisfies `v < u`,
    /// 3. no other `v` in `D_i` has support strictly inside the support of `u`.
    pub fn c_set(&self, i: usize) -> Result<Vec<IntVector>> {
        let excluded = self.excluded_at(i)?;
        Ok(excluded
            .iter()
            .filter(|u| {
                let lowered = u.minus_unit(i).expect("component i is one");
                if !self.contains(&lowered) {
                    return false;
                }
                let support = u.support();
                excluded.iter().all(|v| {
                    v == *u
                        || (!v.is_proper_subvector(u) && !v.support().is_proper_subset_of(support))
                })
            })
            .cloned()
            .collect())
    }

    /// `phi(b)`: the largest singleton rank outside the support of `b`.
    pub fn phi(&self, b: &IntVector) -> Result<u32> {
        if b.len() != self.r {
            return Err(Error::Dimension(format!(
                "vector of length {} for ground set of size {}",
                b.len(),
                self.r
            )));
        }
        let support = b.support();
        (0..self.r)
            .filter(|&i| !support.contains(i))
            .map(|i| self.singleton_rank(i))
            .max()
            .ok_or(Error::PhiUndefined)
    }

    /// The polymatroid on a subset of elements, renumbered in the given order.
    pub fn restrict(&self, elements: &[usize]) -> Result<DiscretePolymatroid> {
        for &i in elements {
            self.check_index(i)?;
        }
        DiscretePolymatroid::from_fn(elements.len(), |x| {
            self.rank(Subset::from_elements(x.elements().map(|k| elements[k])))
        })
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.r {
            return Err(Error::IndexOutOfRange {
                index: i,
                size: self.r,
            });
        }
        Ok(())
    }
}

/// Checks the exchange property of a finite family of vectors: whenever
/// `|u| < |v|` there is a member `w` with `u < w <= u ∨ v`.
///
/// The family must be closed under integral sub-vectors; a violation of
/// that precondition is reported as an error. Because of the closure, it is
/// enough to look for `w = u + e_i` with `u_i < v_i`.
pub fn validate_exchange(members: &[IntVector]) -> Result<bool> {
    let set: HashSet<&IntVector> = members.iter().collect();
    let r = members.first().map_or(0, IntVector::len);
    for u in members {
        if u.len() != r {
            return Err(Error::Dimension("members of different lengths".into()));
        }
        for i in 0..r {
            if let Some(lower) = u.minus_unit(i) {
                if !set.contains(&lower) {
                    return Err(Error::NotSubvectorClosed(format!(
                        "{u} is present but {lower} is not"
                    )));
                }
            }
        }
    }
    for u in members {
        for v in members {
            if u.weight() >= v.weight() {
                continue;
            }
            let exchanged = (0..r).any(|i| u[i] < v[i] && set.contains(&u.plus_unit(i)));
            if !exchanged {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The exchange condition checked literally, with `w` ranging over the
/// family itself. Makes no closure assumption; cubic in the family size.
pub fn exchange_holds(members: &[IntVector]) -> bool {
    members.iter().all(|u| {
        members.iter().all(|v| {
            if u.weight() >= v.weight() || u.len() != v.len() {
                return true;
            }
            let Ok(join) = u.join(v) else { return false };
            members
                .iter()
                .any(|w| u.is_proper_subvector(w) && w.is_subvector(&join))
        })
    })
}
