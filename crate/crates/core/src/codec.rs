//! Linear fractional network code solutions.
//!
//! A `(k_1, .., k_m; n)` solution assigns every edge a global encoding
//! matrix with `K = k_1 + .. + k_m` rows: input edge `i` gets the `K x k_i`
//! block selector of message `i`, every intermediate edge a `K x n` matrix.
//! The symbol on an edge is `x M` for the row vector `x` of all messages.
//!
//! Local encoding and decoding maps are not stored; verification
//! recomputes them as witnesses of `[M_in] X = target`.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{Field, Mat};
use crate::network::{Network, Topology};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FncSolution {
    pub field: Field,
    /// Message dimensions by message index.
    pub k: Vec<usize>,
    /// Intermediate edge dimension.
    pub n: usize,
    /// Global encoding matrix per edge id.
    pub global: BTreeMap<String, Mat>,
}

impl FncSolution {
    pub fn total_dim(&self) -> usize {
        self.k.iter().sum()
    }
}

/// The `K x k_i` block of the identity that reads message `msg`.
pub fn selector(field: Field, msg: usize, dims: &[usize]) -> Result<Mat> {
    if msg >= dims.len() {
        return Err(Error::IndexOutOfRange {
            index: msg,
            size: dims.len(),
        });
    }
    let total: usize = dims.iter().sum();
    let offset: usize = dims[..msg].iter().sum();
    Ok(Mat::from_fn(field, total, dims[msg], |r, c| {
        (r == offset + c) as i64
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "condition")]
pub enum Failure {
    /// The input edge does not carry its message's block selector.
    N1 { edge: String },
    /// A node demands a message it cannot decode from its in-edges.
    N2 {
        node: String,
        #[serde(with = "crate::io::one_based")]
        msg: usize,
    },
    /// An intermediate edge is not a linear function of its origin's in-edges.
    N3 { edge: String },
}

impl Failure {
    fn sort_key(&self) -> (u8, &str, usize) {
        match self {
            Failure::N1 { edge } => (0, edge, 0),
            Failure::N3 { edge } => (1, edge, 0),
            Failure::N2 { node, msg } => (2, node, *msg),
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::N1 { edge } => write!(f, "N1: input edge {edge:?} does not carry its message"),
            Failure::N2 { node, msg } => write!(f, "N2: node {node:?} cannot decode x_{}", msg + 1),
            Failure::N3 { edge } => {
                write!(
                    f,
                    "N3: edge {edge:?} is not computable from the in-edges of its origin"
                )
            }
        }
    }
}

/// Outcome of [`verify_solution`], with the recomputed witnesses.
#[derive(Debug, Clone, Default)]
pub struct Verification {
    /// Sorted by condition, then edge or node id.
    pub failures: Vec<Failure>,
    /// Local encoding matrix per intermediate edge that passed (N3).
    pub local: BTreeMap<String, Mat>,
    /// Decoding matrix per (node, message) that passed (N2).
    pub decoders: BTreeMap<(String, usize), Mat>,
}

impl Verification {
    pub fn is_verified(&self) -> bool {
        self.failures.is_empty()
    }
}

fn check_shapes(net: &Network, sol: &FncSolution) -> Result<()> {
    if sol.k.len() != net.message_count() {
        return Err(Error::InvalidSolution(format!(
            "{} message dimensions for {} messages",
            sol.k.len(),
            net.message_count()
        )));
    }
    if sol.n == 0 || sol.k.contains(&0) {
        return Err(Error::InvalidSolution("dimensions must be positive".into()));
    }
    let total = sol.total_dim();
    for e in &net.inputs {
        let m = sol
            .global
            .get(&e.id)
            .ok_or_else(|| Error::InvalidSolution(format!("no matrix for edge {:?}", e.id)))?;
        if m.field() != sol.field || m.rows() != total || m.cols() != sol.k[e.msg] {
            return Err(Error::InvalidSolution(format!(
                "edge {:?} needs a {total}x{} matrix over {}",
                e.id, sol.k[e.msg], sol.field
            )));
        }
    }
    for e in &net.edges {
        let m = sol
            .global
            .get(&e.id)
            .ok_or_else(|| Error::InvalidSolution(format!("no matrix for edge {:?}", e.id)))?;
        if m.field() != sol.field || m.rows() != total || m.cols() != sol.n {
            return Err(Error::InvalidSolution(format!(
                "edge {:?} needs a {total}x{} matrix over {}",
                e.id, sol.n, sol.field
            )));
        }
    }
    if let Some(extra) = sol
        .global
        .keys()
        .find(|id| !net.edge_ids().any(|e| e == id.as_str()))
    {
        return Err(Error::InvalidSolution(format!(
            "matrix for unknown edge {extra:?}"
        )));
    }
    Ok(())
}

/// Checks (N1) input edges carry their selectors, (N3) every intermediate
/// edge is computable from the in-edges of its origin, and (N2) every demand
/// is decodable from the in-edges of the demanding node.
pub fn verify_solution(net: &Network, sol: &FncSolution) -> Result<Verification> {
    let topo = Topology::new(net)?;
    check_shapes(net, sol)?;
    let total = sol.total_dim();
    let global: Vec<&Mat> = topo.edge_ids.iter().map(|id| &sol.global[id]).collect();
    let incoming = |node: usize| {
        Mat::hconcat_rows(
            sol.field,
            total,
            topo.in_edges[node].iter().map(|&e| global[e]),
        )
        .expect("shapes checked")
    };

    let mut out = Verification::default();
    for msg in 0..topo.m {
        if *global[msg] != selector(sol.field, msg, &sol.k)? {
            out.failures.push(Failure::N1 {
                edge: topo.edge_ids[msg].clone(),
            });
        }
    }
    for e in topo.m..topo.edge_count() {
        let origin = topo.origin[e].expect("intermediate edge");
        match incoming(origin).solve_right(global[e]) {
            Ok(w) => {
                out.local.insert(topo.edge_ids[e].clone(), w);
            }
            Err(Error::NoSolution) => out.failures.push(Failure::N3 {
                edge: topo.edge_ids[e].clone(),
            }),
            Err(err) => return Err(err),
        }
    }
    for v in 0..topo.node_count() {
        if topo.demands[v].is_empty() {
            continue;
        }
        let inc = incoming(v);
        for &msg in &topo.demands[v] {
            match inc.solve_right(&selector(sol.field, msg, &sol.k)?) {
                Ok(w) => {
                    out.decoders.insert((topo.node_names[v].clone(), msg), w);
                }
                Err(Error::NoSolution) => out.failures.push(Failure::N2 {
                    node: topo.node_names[v].clone(),
                    msg,
                }),
                Err(err) => return Err(err),
            }
        }
    }
    out.failures.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(out)
}

fn ratio_str<S: Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn ratios_str<S: Serializer>(rs: &[Ratio<u64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(rs.iter().map(ToString::to_string))
}

/// Rates achieved by a `(k_1, .., k_m; n)` solution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RateReport {
    /// `k_i / n` per message.
    #[serde(serialize_with = "ratios_str")]
    pub rates: Vec<Ratio<u64>>,
    /// `(1/m) * sum k_i / n`.
    #[serde(serialize_with = "ratio_str")]
    pub average: Ratio<u64>,
    /// All message dimensions are equal.
    pub symmetric: bool,
}

impl RateReport {
    pub fn from_dims(k: &[usize], n: usize) -> Result<RateReport> {
        if k.is_empty() || n == 0 {
            return Err(Error::InvalidSolution(
                "rates need at least one message and n >= 1".into(),
            ));
        }
        let rates: Vec<Ratio<u64>> = k
            .iter()
            .map(|&ki| Ratio::new(ki as u64, n as u64))
            .collect();
        let sum: u64 = k.iter().map(|&ki| ki as u64).sum();
        Ok(RateReport {
            rates,
            average: Ratio::new(sum, (k.len() * n) as u64),
            symmetric: k.windows(2).all(|w| w[0] == w[1]),
        })
    }
}

pub fn rates(net: &Network, sol: &FncSolution) -> Result<RateReport> {
    check_shapes(net, sol)?;
    RateReport::from_dims(&sol.k, sol.n)
}
