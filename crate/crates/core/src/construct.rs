//! Building a network, and the map onto the ground set, from a discrete
//! polymatroid and one of its basis vectors.
//!
//! 1. Every element `i` in the support of the basis `b` becomes a source
//!    node `i` whose input edge carries a message of dimension `b_i`.
//! 2. Repeatedly take the smallest uncovered element `i` with some
//!    `u in C_i` whose other support is already covered, pick the
//!    lexicographically smallest such `u`, and add a relay `i'` fed by the
//!    nodes of `supp(u - e_i)` plus a carrier `i` fed by `i'`.
//! 3. For each source element `i` and each `u in C_i` with covered support
//!    (or for an explicit list of choices), add a node fed by the nodes of
//!    `supp(u - e_i)` that demands the message of `i`.
//!
//! Nodes are named by 1-based ground element: carriers `"4"`, relays `"4'"`,
//! demand nodes `"d1_1"`, `"d1_2"`, ... Input edges are `"e<i>"` and
//! intermediate edges `"<from>-><to>"`, with `"#2"`, `"#3"`, ... appended to
//! repeated pairs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::bridge::{extract_solution, PolymatroidMap};
use crate::codec::{rates, FncSolution, RateReport};
use crate::error::{Error, Result};
use crate::io::one_based;
use crate::network::{Demand, Edge, InputEdge, Network};
use crate::polymatroid::{DiscretePolymatroid, Representation};
use crate::vector::{IntVector, Subset};

/// How step 3 adds demand nodes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Policy {
    /// One demand node for every source element `i` and every eligible
    /// `u in C_i`.
    #[default]
    Exhaustive,
    /// Exactly the listed `(i, u)` pairs, in order.
    Select(Vec<Choice>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Choice {
    #[serde(with = "one_based")]
    pub i: usize,
    pub u: IntVector,
}

/// File form of [`Policy::Select`]: `{"choices": [{"i": 1, "u": [..]}, ..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Choices {
    pub choices: Vec<Choice>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogEntry {
    pub step: u8,
    #[serde(with = "one_based")]
    pub i: usize,
    pub u: IntVector,
}

/// The output of [`build_network`] together with the construction state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Construction {
    pub network: Network,
    pub map: PolymatroidMap,
    /// Source elements, the support of the basis.
    pub sources: Subset,
    /// Elements with a carrier node.
    pub covered: Subset,
    /// Every relay (step 2) and demand (step 3) addition in order.
    pub log: Vec<LogEntry>,
}

/// Nonzero bases `b` with `b_i = rank({i})` on their support.
pub fn eligible_bases(d: &DiscretePolymatroid) -> Result<Vec<IntVector>> {
    Ok(d.bases()?
        .into_iter()
        .filter(|b| is_eligible(d, b))
        .collect())
}

fn is_eligible(d: &DiscretePolymatroid, b: &IntVector) -> bool {
    !b.support().is_empty() && b.support().elements().all(|i| b[i] == d.singleton_rank(i))
}

struct Builder<'a> {
    d: &'a DiscretePolymatroid,
    c_sets: Vec<Vec<IntVector>>,
    msg_of: BTreeMap<usize, usize>,
    out: Construction,
    edge_pairs: BTreeMap<(String, String), usize>,
    demand_seq: BTreeMap<usize, usize>,
}

fn carrier(i: usize) -> String {
    (i + 1).to_string()
}

impl<'a> Builder<'a> {
    fn new(d: &'a DiscretePolymatroid, b: &IntVector) -> Result<Self> {
        if b.len() != d.ground_set_size() {
            return Err(Error::Construction(format!(
                "basis has length {}, ground set has size {}",
                b.len(),
                d.ground_set_size()
            )));
        }
        if !d.bases()?.contains(b) {
            return Err(Error::Construction(format!("{b} is not a basis vector")));
        }
        if !is_eligible(d, b) {
            return Err(Error::Construction(format!(
                "{b} is zero or differs from the singleton ranks on its support"
            )));
        }
        let c_sets = (0..d.ground_set_size())
            .map(|i| d.c_set(i))
            .collect::<Result<_>>()?;
        let sources = b.support();
        let mut out = Construction {
            network: Network::default(),
            map: PolymatroidMap::default(),
            sources,
            covered: sources,
            log: Vec::new(),
        };
        let mut msg_of = BTreeMap::new();
        for (msg, i) in sources.elements().enumerate() {
            msg_of.insert(i, msg);
            let id = format!("e{}", i + 1);
            out.network.nodes.push(carrier(i));
            out.network.inputs.push(InputEdge {
                id: id.clone(),
                at: carrier(i),
                msg,
                k: b[i] as usize,
            });
            out.map.insert(id, i);
        }
        Ok(Builder {
            d,
            c_sets,
            msg_of,
            out,
            edge_pairs: BTreeMap::new(),
            demand_seq: BTreeMap::new(),
        })
    }

    fn add_edge(&mut self, from: String, to: String, element: usize) {
        let seq = self
            .edge_pairs
            .entry((from.clone(), to.clone()))
            .or_insert(0);
        *seq += 1;
        let id = match *seq {
            1 => format!("{from}->{to}"),
            s => format!("{from}->{to}#{s}"),
        };
        self.out.network.edges.push(Edge {
            id: id.clone(),
            from,
            to,
        });
        self.out.map.insert(id, element);
    }

    /// `supp(u - e_i)`, provided `u` is in `C_i` and that support is covered.
    fn feeders(&self, i: usize, u: &IntVector, need_i_covered: bool) -> Result<Subset> {
        if i >= self.d.ground_set_size() {
            return Err(Error::Construction(format!(
                "element {} out of range",
                i + 1
            )));
        }
        if !self.c_sets[i].contains(u) {
            return Err(Error::Construction(format!("{u} is not in C_{}", i + 1)));
        }
        let feeders = u.minus_unit(i).expect("C_i vectors have u_i = 1").support();
        if !feeders.is_subset_of(self.out.covered)
            || (need_i_covered && !self.out.covered.contains(i))
        {
            return Err(Error::Construction(format!(
                "the support of {u} is not covered by {}",
                self.out.covered
            )));
        }
        Ok(feeders)
    }

    fn add_relay(&mut self, i: usize, u: &IntVector) -> Result<()> {
        if self.out.covered.contains(i) {
            return Err(Error::Construction(format!(
                "element {} is already covered",
                i + 1
            )));
        }
        let feeders = self.feeders(i, u, false)?;
        let relay = format!("{}'", i + 1);
        self.out.network.nodes.push(relay.clone());
        for j in feeders.elements() {
            self.add_edge(carrier(j), relay.clone(), j);
        }
        self.out.network.nodes.push(carrier(i));
        self.add_edge(relay, carrier(i), i);
        self.out.covered = self.out.covered.with(i);
        self.out.log.push(LogEntry {
            step: 2,
            i,
            u: u.clone(),
        });
        Ok(())
    }

    fn add_demand(&mut self, i: usize, u: &IntVector) -> Result<()> {
        let msg = *self
            .msg_of
            .get(&i)
            .ok_or_else(|| Error::Construction(format!("element {} is not a source", i + 1)))?;
        let feeders = self.feeders(i, u, true)?;
        let seq = self.demand_seq.entry(i).or_insert(0);
        *seq += 1;
        let node = format!("d{}_{}", i + 1, seq);
        self.out.network.nodes.push(node.clone());
        for j in feeders.elements() {
            self.add_edge(carrier(j), node.clone(), j);
        }
        self.out.network.demands.push(Demand {
            node,
            msgs: vec![msg],
        });
        self.out.log.push(LogEntry {
            step: 3,
            i,
            u: u.clone(),
        });
        Ok(())
    }

    /// Step 2 to its fixpoint.
    fn grow(&mut self) -> Result<()> {
        'scan: loop {
            for i in 0..self.d.ground_set_size() {
                if self.out.covered.contains(i) {
                    continue;
                }
                let pick = self.c_sets[i]
                    .iter()
                    .find(|u| {
                        let lowered = u.minus_unit(i).expect("u_i = 1");
                        lowered.support().is_subset_of(self.out.covered)
                    })
                    .cloned();
                if let Some(u) = pick {
                    self.add_relay(i, &u)?;
                    continue 'scan;
                }
            }
            return Ok(());
        }
    }

    fn demands(&mut self, policy: &Policy) -> Result<()> {
        match policy {
            Policy::Exhaustive => {
                for i in self.out.sources.elements() {
                    let eligible: Vec<IntVector> = self.c_sets[i]
                        .iter()
                        .filter(|u| u.support().is_subset_of(self.out.covered))
                        .cloned()
                        .collect();
                    for u in eligible {
                        self.add_demand(i, &u)?;
                    }
                }
            }
            Policy::Select(choices) => {
                for c in choices {
                    self.add_demand(c.i, &c.u)?;
                }
            }
        }
        Ok(())
    }
}

/// Runs the three construction steps. Deterministic in `(d, b, policy)`.
pub fn build_network(
    d: &DiscretePolymatroid,
    b: &IntVector,
    policy: &Policy,
) -> Result<Construction> {
    let mut builder = Builder::new(d, b)?;
    builder.grow()?;
    builder.demands(policy)?;
    Ok(builder.out)
}

/// Rebuilds a construction from its log, re-checking every entry.
pub fn replay(d: &DiscretePolymatroid, b: &IntVector, log: &[LogEntry]) -> Result<Construction> {
    let mut builder = Builder::new(d, b)?;
    for entry in log {
        match entry.step {
            2 => builder.add_relay(entry.i, &entry.u)?,
            3 => builder.add_demand(entry.i, &entry.u)?,
            s => return Err(Error::Construction(format!("unknown step {s} in log"))),
        }
    }
    Ok(builder.out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solved {
    pub construction: Construction,
    pub solution: FncSolution,
    pub rates: RateReport,
}

/// Builds the network of `rep`'s polymatroid at `b` and extracts a linear
/// solution from `rep`.
///
/// Message dimensions are the components of `b` on its support. The edge
/// dimension is the largest rank among the elements the construction
/// reaches outside the sources, which is `phi(b)` whenever step 2 covers
/// the whole ground set.
pub fn construct_and_solve(rep: &Representation, b: &IntVector, policy: &Policy) -> Result<Solved> {
    let d = DiscretePolymatroid::from_representation(rep)?;
    let construction = build_network(&d, b, policy)?;
    let solution = extract_solution(&construction.network, rep, &construction.map)?;
    let expected: Vec<usize> = b.support().elements().map(|i| b[i] as usize).collect();
    if solution.k != expected {
        return Err(Error::Inconsistent(format!(
            "extracted message dimensions {:?} differ from the basis {b}",
            solution.k
        )));
    }
    let rates = rates(&construction.network, &solution)?;
    Ok(Solved {
        construction,
        solution,
        rates,
    })
}

/// Ground elements feeding each node, 1-based, for inspecting constructions.
pub fn in_neighbor_elements(c: &Construction, node: &str) -> Result<BTreeSet<usize>> {
    Ok(c.network
        .in_edges(node)?
        .into_iter()
        .map(|e| c.map.get(e).expect("total map") + 1)
        .collect())
}
