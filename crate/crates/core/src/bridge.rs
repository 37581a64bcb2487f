//! Discrete polymatroidal networks and the two directions of the
//! correspondence with linear fractional network codes.
//!
//! A network is `(k_1, .., k_m; n)`-discrete polymatroidal with respect to a
//! polymatroid `D` when some map `f` from edges to ground elements satisfies
//!
//! - DN1: `f` is injective on input edges;
//! - DN2: `sum_i k_i e_{f(s_i)}` is a member of `D`;
//! - DN3: `rank({f(s_i)}) = k_i` for every message, and the largest singleton
//!   rank over `f(E) \ f(S)` equals `n`;
//! - DN4: `rank(f(In(v))) = rank(f(In(v) ∪ Out(v)))` at every node.
//!
//! When `f(E) \ f(S)` is empty the width clause of DN3 is vacuous.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::codec::{selector, verify_solution, FncSolution};
use crate::error::{Error, Result};
use crate::io::one_based;
use crate::linalg::Mat;
use crate::matroid::Matroid;
use crate::network::{Network, Topology};
use crate::polymatroid::{DiscretePolymatroid, RankOracle, Representation};
use crate::vector::IntVector;

/// Edge id to ground element (0-based; 1-based in files).
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolymatroidMap {
    #[serde(with = "one_based::map")]
    pub f: BTreeMap<String, usize>,
}

impl PolymatroidMap {
    pub fn get(&self, edge: &str) -> Option<usize> {
        self.f.get(edge).copied()
    }

    pub fn insert(&mut self, edge: impl Into<String>, element: usize) {
        self.f.insert(edge.into(), element);
    }

    /// Ground elements hit by the map, ascending.
    pub fn image(&self) -> Vec<usize> {
        self.f
            .values()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }
}

impl FromIterator<(String, usize)> for PolymatroidMap {
    fn from_iter<I: IntoIterator<Item = (String, usize)>>(iter: I) -> Self {
        PolymatroidMap {
            f: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "condition")]
pub enum DpnViolation {
    /// The map is undefined on an edge or points outside the ground set.
    Map { edge: String, detail: String },
    /// Two input edges share a ground element.
    DN1 {
        edges: (String, String),
        #[serde(with = "crate::io::one_based")]
        element: usize,
    },
    /// The source vector is not a member.
    DN2 { vector: IntVector },
    /// A source element's singleton rank differs from its message dimension.
    DN3Source {
        #[serde(with = "crate::io::one_based")]
        msg: usize,
        #[serde(with = "crate::io::one_based")]
        element: usize,
        rank: u32,
        k: usize,
    },
    /// The largest singleton rank outside the sources is not `n`.
    DN3Width { max: u32, n: usize },
    /// A node's outputs are not spanned by its inputs.
    DN4 {
        node: String,
        in_rank: u32,
        total_rank: u32,
    },
}

impl fmt::Display for DpnViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DpnViolation::Map { edge, detail } => write!(f, "map at edge {edge:?}: {detail}"),
            DpnViolation::DN1 { edges, element } => write!(
                f,
                "DN1: input edges {:?} and {:?} both map to {}",
                edges.0,
                edges.1,
                element + 1
            ),
            DpnViolation::DN2 { vector } => write!(f, "DN2: {vector} is not a member"),
            DpnViolation::DN3Source {
                msg,
                element,
                rank,
                k,
            } => write!(
                f,
                "DN3: message x_{} maps to {} of rank {rank}, but k = {k}",
                msg + 1,
                element + 1
            ),
            DpnViolation::DN3Width { max, n } => {
                write!(
                    f,
                    "DN3: largest non-source singleton rank is {max}, but n = {n}"
                )
            }
            DpnViolation::DN4 {
                node,
                in_rank,
                total_rank,
            } => write!(
                f,
                "DN4: at node {node:?} rank(In) = {in_rank} but rank(In ∪ Out) = {total_rank}"
            ),
        }
    }
}

fn join_violations<T: fmt::Display>(v: &[T]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Checks DN1-DN4 and reports every violated condition.
///
/// `k` lists message dimensions by message index. Ranks are taken from any
/// [`RankOracle`], so the check also runs on representations whose ground
/// set is too large for a rank table.
pub fn check_dpn<R: RankOracle + ?Sized>(
    net: &Network,
    d: &R,
    f: &PolymatroidMap,
    k: &[usize],
    n: usize,
) -> Result<Vec<DpnViolation>> {
    net.ensure_valid()?;
    if k.len() != net.message_count() {
        return Err(Error::Dimension(format!(
            "{} dimensions for {} messages",
            k.len(),
            net.message_count()
        )));
    }
    let r = d.ground_set_size();
    let mut out = Vec::new();
    for id in net.edge_ids() {
        match f.get(id) {
            None => out.push(DpnViolation::Map {
                edge: id.to_string(),
                detail: "undefined".into(),
            }),
            Some(x) if x >= r => out.push(DpnViolation::Map {
                edge: id.to_string(),
                detail: format!("element {} outside a ground set of size {r}", x + 1),
            }),
            _ => {}
        }
    }
    if !out.is_empty() {
        return Ok(out);
    }
    let elem = |id: &str| f.get(id).expect("total");

    // DN1
    let mut by_element: BTreeMap<usize, &str> = BTreeMap::new();
    let mut inputs: Vec<_> = net.inputs.iter().collect();
    inputs.sort_by_key(|e| e.msg);
    for e in &inputs {
        let x = elem(&e.id);
        if let Some(prev) = by_element.insert(x, &e.id) {
            out.push(DpnViolation::DN1 {
                edges: (prev.to_string(), e.id.clone()),
                element: x,
            });
        }
    }

    // DN2: the source vector lives on the source elements, so only their
    // subsets can bound it
    let mut source_vec = vec![0u32; r];
    for e in &inputs {
        source_vec[elem(&e.id)] += k[e.msg] as u32;
    }
    let support: Vec<usize> = (0..r).filter(|&i| source_vec[i] > 0).collect();
    if support.len() >= usize::BITS as usize {
        return Err(Error::Dimension(format!(
            "{} source elements",
            support.len()
        )));
    }
    let member = (0u64..1 << support.len()).all(|mask| {
        let a: Vec<usize> = (0..support.len())
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| support[b])
            .collect();
        a.iter().map(|&i| source_vec[i]).sum::<u32>() <= d.rank_of_elements(&a)
    });
    if !member {
        out.push(DpnViolation::DN2 {
            vector: IntVector::new(source_vec),
        });
    }

    // DN3
    let source_elems: BTreeSet<usize> = inputs.iter().map(|e| elem(&e.id)).collect();
    for e in &inputs {
        let x = elem(&e.id);
        let rank = d.singleton_rank(x);
        if rank as usize != k[e.msg] {
            out.push(DpnViolation::DN3Source {
                msg: e.msg,
                element: x,
                rank,
                k: k[e.msg],
            });
        }
    }
    let width = net
        .edges
        .iter()
        .map(|e| elem(&e.id))
        .filter(|x| !source_elems.contains(x))
        .map(|x| d.singleton_rank(x))
        .max();
    if let Some(max) = width {
        if max as usize != n {
            out.push(DpnViolation::DN3Width { max, n });
        }
    }

    // DN4
    for node in &net.nodes {
        let ins: Vec<usize> = net.in_edges(node)?.into_iter().map(elem).collect();
        let mut all = ins.clone();
        all.extend(net.out_set(node)?.into_iter().map(elem));
        let in_rank = d.rank_of_elements(&ins);
        let total_rank = d.rank_of_elements(&all);
        if in_rank != total_rank {
            out.push(DpnViolation::DN4 {
                node: node.clone(),
                in_rank,
                total_rank,
            });
        }
    }
    Ok(out)
}

/// `(k, .., k; k)`-discrete polymatroidal with `k = rho_max(d)`.
pub fn is_discrete_polymatroidal(
    net: &Network,
    d: &DiscretePolymatroid,
    f: &PolymatroidMap,
) -> Result<bool> {
    let k = d.rho_max() as usize;
    Ok(check_dpn(net, d, f, &vec![k; net.message_count()], k)?.is_empty())
}

/// Matroidal: `(1, .., 1; 1)`-discrete polymatroidal with respect to `D(M)`.
pub fn is_matroidal(net: &Network, m: &Matroid, f: &PolymatroidMap) -> Result<bool> {
    let d = m.to_polymatroid()?;
    Ok(check_dpn(net, &d, f, &vec![1; net.message_count()], 1)?.is_empty())
}

/// Dimensions a representation induces on a network through a map: `k_i` is
/// the rank of the element carrying message `i`, and `n` is the largest rank
/// among elements carried only by intermediate edges.
///
/// When every intermediate edge maps to a source element, `n` is the largest
/// rank among those elements (1 if there are no intermediate edges), which
/// keeps every edge within the edge width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedDims {
    pub k: Vec<usize>,
    pub n: usize,
}

pub fn induced_dims<R: RankOracle + ?Sized>(
    net: &Network,
    d: &R,
    f: &PolymatroidMap,
) -> Result<InducedDims> {
    let elem = |id: &str| {
        f.get(id)
            .filter(|&x| x < d.ground_set_size())
            .ok_or_else(|| Error::InvalidMap(format!("edge {id:?} is unmapped or out of range")))
    };
    let mut k = vec![0; net.message_count()];
    let mut sources = BTreeSet::new();
    for e in &net.inputs {
        let x = elem(&e.id)?;
        sources.insert(x);
        k[e.msg] = d.singleton_rank(x) as usize;
    }
    let mut outside = None;
    let mut any = None;
    for e in &net.edges {
        let x = elem(&e.id)?;
        let rank = d.singleton_rank(x) as usize;
        any = any.max(Some(rank));
        if !sources.contains(&x) {
            outside = outside.max(Some(rank));
        }
    }
    let n = outside.or(any).unwrap_or(1).max(1);
    Ok(InducedDims { k, n })
}

/// Builds a linear solution from a representation of a polymatroid with
/// respect to which the network is polymatroidal.
///
/// Generators outside the image of `f` are dropped. The generators of the
/// source elements form a basis `B` of the sum of all subspaces; every
/// generator is rewritten in that basis, so sources become block selectors,
/// and each intermediate edge carries the rewritten generator of its
/// element, zero-padded to `n` columns.
///
/// An intermediate edge mapped to a source element whose message is wider
/// than `n` cannot carry the whole subspace. Such an edge carries the
/// projection onto that source of what its destination must forward or
/// decode, which fits whenever that requirement has dimension at most `n`.
pub fn extract_solution(
    net: &Network,
    rep: &Representation,
    f: &PolymatroidMap,
) -> Result<FncSolution> {
    extract_solution_with_width(net, rep, f, None)
}

/// As [`extract_solution`], optionally padding intermediate edges to a
/// larger width than the one the map induces.
pub fn extract_solution_with_width(
    net: &Network,
    rep: &Representation,
    f: &PolymatroidMap,
    width: Option<usize>,
) -> Result<FncSolution> {
    let topo = Topology::new(net)?;
    for id in &topo.edge_ids {
        match f.get(id) {
            None => return Err(Error::InvalidMap(format!("edge {id:?} is unmapped"))),
            Some(x) if x >= rep.len() => {
                return Err(Error::InvalidMap(format!(
                    "edge {id:?} maps to {} outside a ground set of size {}",
                    x + 1,
                    rep.len()
                )))
            }
            _ => {}
        }
    }

    // restrict to the image of f
    let image = f.image();
    let renumber: BTreeMap<usize, usize> = image
        .iter()
        .enumerate()
        .map(|(new, &old)| (old, new))
        .collect();
    let rep = rep.restrict(&image)?;
    let f: PolymatroidMap = topo
        .edge_ids
        .iter()
        .map(|id| (id.clone(), renumber[&f.get(id).expect("total")]))
        .collect();
    let InducedDims { k, n: derived } = induced_dims(net, &rep, &f)?;
    if let Some(msg) = k.iter().position(|&ki| ki == 0) {
        return Err(Error::Inconsistent(format!(
            "message x_{} maps to a zero subspace",
            msg + 1
        )));
    }
    let n = match width {
        Some(w) if w < derived => {
            return Err(Error::Dimension(format!(
                "requested width {w} is below the induced width {derived}"
            )))
        }
        Some(w) => w,
        None => derived,
    };
    let violations = check_dpn(net, &rep, &f, &k, derived)?;
    if !violations.is_empty() {
        return Err(Error::NotPolymatroidal(join_violations(&violations)));
    }
    let total: usize = k.iter().sum();
    let full = rep.rank_of_elements(&(0..rep.len()).collect::<Vec<_>>()) as usize;
    if full != total {
        return Err(Error::Inconsistent(format!(
            "the subspaces span {full} dimensions but the messages need {total}"
        )));
    }

    // change of basis: B = [A_{f(s_1)} .. A_{f(s_m)}] with independent columns
    let field = rep.field();
    let bases: Vec<Mat> = rep
        .generators()
        .iter()
        .map(Mat::column_space_basis)
        .collect();
    let elem = |e: usize| f.get(&topo.edge_ids[e]).expect("total");
    let b = Mat::hconcat_rows(
        field,
        rep.ambient(),
        (0..topo.m).map(|msg| &bases[elem(msg)]),
    )?;
    let coords: Vec<Mat> = bases
        .iter()
        .map(|a| b.solve_right(a))
        .collect::<Result<_>>()
        .map_err(|_| Error::Inconsistent("a subspace leaves the span of the sources".into()))?;
    let source_of: BTreeMap<usize, usize> = (0..topo.m).map(|msg| (elem(msg), msg)).collect();

    let mut global: Vec<Option<Mat>> = vec![None; topo.edge_count()];
    for msg in 0..topo.m {
        global[msg] = Some(selector(field, msg, &k)?);
    }
    let mut wide_by_dest: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for e in topo.m..topo.edge_count() {
        let x = &coords[elem(e)];
        if x.cols() <= n {
            global[e] = Some(x.pad_columns(n)?);
        } else {
            wide_by_dest.entry(topo.dest[e]).or_default().push(e);
        }
    }

    for (v, wide) in wide_by_dest {
        let wide_elems: BTreeSet<usize> = wide.iter().map(|&e| elem(e)).collect();
        for &x in &wide_elems {
            if !source_of.contains_key(&x) {
                return Err(Error::Inconsistent(format!(
                    "element {} is wider than n = {n}",
                    image[x] + 1
                )));
            }
        }
        // what v must forward or decode
        let mut required: Vec<Mat> = Vec::new();
        for o in topo.m..topo.edge_count() {
            if topo.origin[o] == Some(v) {
                required.push(coords[elem(o)].clone());
            }
        }
        for &msg in &topo.demands[v] {
            required.push(selector(field, msg, &k)?);
        }
        let required = Mat::hconcat_rows(field, total, required.iter())?;
        let narrow = Mat::hconcat_rows(
            field,
            total,
            topo.in_edges[v]
                .iter()
                .filter(|&&e| !wide.contains(&e))
                .map(|&e| &coords[elem(e)]),
        )?;
        let spread = Mat::hconcat_rows(field, total, wide_elems.iter().map(|&x| &coords[x]))?;
        let split = Mat::hconcat_rows(field, total, [&spread, &narrow])?
            .solve_right(&required)
            .map_err(|_| {
                Error::Inconsistent(format!(
                    "node {:?} cannot meet its outputs",
                    topo.node_names[v]
                ))
            })?;
        let top = Mat::from_fn(field, spread.cols(), split.cols(), |i, j| {
            split.get(i, j) as i64
        });
        let needed = spread.mul(&top)?;
        for &e in &wide {
            let msg = source_of[&elem(e)];
            let offset: usize = k[..msg].iter().sum();
            let projected = Mat::from_fn(field, total, needed.cols(), |i, j| {
                if (offset..offset + k[msg]).contains(&i) {
                    needed.get(i, j) as i64
                } else {
                    0
                }
            });
            let carried = projected.column_space_basis();
            if carried.cols() > n {
                return Err(Error::WidthExceeded {
                    edge: topo.edge_ids[e].clone(),
                    needed: carried.cols(),
                    width: n,
                });
            }
            global[e] = Some(carried.pad_columns(n)?);
        }
    }

    let sol = FncSolution {
        field,
        k,
        n,
        global: topo
            .edge_ids
            .iter()
            .cloned()
            .zip(global.into_iter().map(|g| g.expect("every edge assigned")))
            .collect(),
    };
    let check = verify_solution(net, &sol)?;
    if !check.is_verified() {
        return Err(Error::Inconsistent(format!(
            "extracted code fails verification: {}",
            join_violations(&check.failures)
        )));
    }
    Ok(sol)
}

/// The converse direction: one ground element per edge, spanned by that
/// edge's global encoding matrix, and `f` the identity.
///
/// Elements are numbered like [`Topology`] edges: input edges by message,
/// then intermediate edges in file order.
pub fn polymatroid_from_solution(
    net: &Network,
    sol: &FncSolution,
) -> Result<(Representation, PolymatroidMap)> {
    let check = verify_solution(net, sol)?;
    if !check.is_verified() {
        return Err(Error::InvalidSolution(format!(
            "solution is not verified: {}",
            join_violations(&check.failures)
        )));
    }
    let topo = Topology::new(net)?;
    let gens = topo
        .edge_ids
        .iter()
        .map(|id| sol.global[id].clone())
        .collect();
    let rep = Representation::new(sol.field, sol.total_dim(), gens)?;
    let map = topo
        .edge_ids
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, id)| (id, i))
        .collect();
    Ok((rep, map))
}
