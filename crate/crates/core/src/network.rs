//! Acyclic coding networks.
//!
//! Edges run from an *origin* node to a *destination* node. (Some of the
//! network coding literature calls the origin the "head" of an edge; this
//! crate only uses origin/destination.)
//!
//! Messages enter through input edges, which have no origin node: input
//! edge `i` carries message `i` of dimension `k_i` into the node `at`. Every
//! other edge is an intermediate edge carrying an `n`-dimensional symbol.
//! Parallel intermediate edges between the same pair of nodes are allowed.
//!
//! Messages are 0-based in the library and 1-based in files.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::one_based;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputEdge {
    pub id: String,
    /// Node the message enters.
    pub at: String,
    #[serde(with = "one_based")]
    pub msg: usize,
    /// Nominal message dimension.
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub id: String,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Demand {
    pub node: String,
    #[serde(with = "one_based::vec")]
    pub msgs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Network {
    pub nodes: Vec<String>,
    pub inputs: Vec<InputEdge>,
    pub edges: Vec<Edge>,
    #[serde(default)]
    pub demands: Vec<Demand>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NetworkViolation {
    DuplicateNode {
        node: String,
    },
    DuplicateEdge {
        edge: String,
    },
    UnknownNode {
        edge: String,
        node: String,
    },
    /// Message indices must be exactly `0..m`, one per input edge.
    BadMessageIndex {
        edge: String,
        #[serde(with = "crate::io::one_based")]
        msg: usize,
    },
    ZeroDimension {
        edge: String,
    },
    UnknownDemandNode {
        node: String,
    },
    UnknownMessage {
        node: String,
        #[serde(with = "crate::io::one_based")]
        msg: usize,
    },
    /// Nodes along a directed cycle, first node repeated at the end.
    Cycle {
        witness: Vec<String>,
    },
}

impl fmt::Display for NetworkViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetworkViolation::DuplicateNode { node } => {
                write!(f, "node {node:?} is declared twice")
            }
            NetworkViolation::DuplicateEdge { edge } => write!(f, "edge id {edge:?} is used twice"),
            NetworkViolation::UnknownNode { edge, node } => {
                write!(f, "edge {edge:?} refers to unknown node {node:?}")
            }
            NetworkViolation::BadMessageIndex { edge, msg } => {
                write!(
                    f,
                    "input edge {edge:?} has message index {} out of range or repeated",
                    msg + 1
                )
            }
            NetworkViolation::ZeroDimension { edge } => {
                write!(f, "input edge {edge:?} has dimension 0")
            }
            NetworkViolation::UnknownDemandNode { node } => {
                write!(f, "demand at unknown node {node:?}")
            }
            NetworkViolation::UnknownMessage { node, msg } => {
                write!(f, "node {node:?} demands nonexistent message x_{}", msg + 1)
            }
            NetworkViolation::Cycle { witness } => write!(f, "cycle {}", witness.join(" -> ")),
        }
    }
}

/// A permutation of all edge ids in which every edge comes after every edge
/// entering its origin, with input edges first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct EdgeOrder(pub Vec<String>);

impl EdgeOrder {
    pub fn position(&self, id: &str) -> Option<usize> {
        self.0.iter().position(|e| e == id)
    }

    /// True when this is a permutation of the network's edges respecting
    /// the ancestral precedence.
    pub fn is_valid_for(&self, net: &Network) -> bool {
        let all: BTreeSet<&str> = net.edge_ids().collect();
        let seen: BTreeSet<&str> = self.0.iter().map(String::as_str).collect();
        if all != seen || seen.len() != self.0.len() {
            return false;
        }
        let pos: HashMap<&str, usize> = self
            .0
            .iter()
            .enumerate()
            .map(|(i, e)| (e.as_str(), i))
            .collect();
        let m = net.inputs.len();
        if net.inputs.iter().any(|e| pos[e.id.as_str()] >= m) {
            return false;
        }
        net.edges.iter().all(|e| {
            let Ok(preds) = net.in_edges(&e.from) else {
                return false;
            };
            preds.iter().all(|p| pos[p] < pos[e.id.as_str()])
        })
    }
}

impl Network {
    pub fn message_count(&self) -> usize {
        self.inputs.len()
    }

    /// Nominal message dimensions, by message index.
    pub fn message_dims(&self) -> Vec<usize> {
        let mut dims = vec![0; self.inputs.len()];
        for e in &self.inputs {
            if e.msg < dims.len() {
                dims[e.msg] = e.k;
            }
        }
        dims
    }

    pub fn input_for_message(&self, msg: usize) -> Option<&InputEdge> {
        self.inputs.iter().find(|e| e.msg == msg)
    }

    /// Input edge ids followed by intermediate edge ids, in file order.
    pub fn edge_ids(&self) -> impl Iterator<Item = &str> {
        self.inputs
            .iter()
            .map(|e| e.id.as_str())
            .chain(self.edges.iter().map(|e| e.id.as_str()))
    }

    pub fn is_input_edge(&self, id: &str) -> bool {
        self.inputs.iter().any(|e| e.id == id)
    }

    pub fn has_node(&self, node: &str) -> bool {
        self.nodes.iter().any(|n| n == node)
    }

    /// Messages demanded at `node`, ascending and deduplicated.
    pub fn demands_of(&self, node: &str) -> Vec<usize> {
        self.demands
            .iter()
            .filter(|d| d.node == node)
            .flat_map(|d| d.msgs.iter().copied())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn validate(&self) -> Vec<NetworkViolation> {
        let mut out = Vec::new();
        let mut nodes = HashSet::new();
        for n in &self.nodes {
            if !nodes.insert(n.as_str()) {
                out.push(NetworkViolation::DuplicateNode { node: n.clone() });
            }
        }
        let mut ids = HashSet::new();
        for id in self.edge_ids() {
            if !ids.insert(id) {
                out.push(NetworkViolation::DuplicateEdge {
                    edge: id.to_string(),
                });
            }
        }
        let m = self.inputs.len();
        let mut msgs = HashSet::new();
        for e in &self.inputs {
            if !nodes.contains(e.at.as_str()) {
                out.push(NetworkViolation::UnknownNode {
                    edge: e.id.clone(),
                    node: e.at.clone(),
                });
            }
            if e.msg >= m || !msgs.insert(e.msg) {
                out.push(NetworkViolation::BadMessageIndex {
                    edge: e.id.clone(),
                    msg: e.msg,
                });
            }
            if e.k == 0 {
                out.push(NetworkViolation::ZeroDimension { edge: e.id.clone() });
            }
        }
        for e in &self.edges {
            for node in [&e.from, &e.to] {
                if !nodes.contains(node.as_str()) {
                    out.push(NetworkViolation::UnknownNode {
                        edge: e.id.clone(),
                        node: node.clone(),
                    });
                }
            }
        }
        for d in &self.demands {
            if !nodes.contains(d.node.as_str()) {
                out.push(NetworkViolation::UnknownDemandNode {
                    node: d.node.clone(),
                });
            }
            for &msg in &d.msgs {
                if msg >= m {
                    out.push(NetworkViolation::UnknownMessage {
                        node: d.node.clone(),
                        msg,
                    });
                }
            }
        }
        if let Some(witness) = self.find_cycle() {
            out.push(NetworkViolation::Cycle { witness });
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidNetwork(
                v.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; "),
            ))
        }
    }

    fn find_cycle(&self) -> Option<Vec<String>> {
        let mut succ: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for e in &self.edges {
            succ.entry(e.from.as_str()).or_default().push(e.to.as_str());
        }
        // 0 unvisited, 1 on stack, 2 done
        let mut state: HashMap<&str, u8> = HashMap::new();
        let mut stack: Vec<&str> = Vec::new();

        fn dfs<'a>(
            v: &'a str,
            succ: &BTreeMap<&'a str, Vec<&'a str>>,
            state: &mut HashMap<&'a str, u8>,
            stack: &mut Vec<&'a str>,
        ) -> Option<Vec<String>> {
            state.insert(v, 1);
            stack.push(v);
            for &w in succ.get(v).map(Vec::as_slice).unwrap_or(&[]) {
                match state.get(w).copied().unwrap_or(0) {
                    0 => {
                        if let Some(c) = dfs(w, succ, state, stack) {
                            return Some(c);
                        }
                    }
                    1 => {
                        let start = stack.iter().position(|&x| x == w).expect("on stack");
                        let mut cycle: Vec<String> =
                            stack[start..].iter().map(|s| s.to_string()).collect();
                        cycle.push(w.to_string());
                        return Some(cycle);
                    }
                    _ => {}
                }
            }
            stack.pop();
            state.insert(v, 2);
            None
        }

        let starts: Vec<&str> = self
            .nodes
            .iter()
            .map(String::as_str)
            .chain(self.edges.iter().map(|e| e.from.as_str()))
            .collect();
        for v in starts {
            if state.get(v).copied().unwrap_or(0) == 0 {
                if let Some(c) = dfs(v, &succ, &mut state, &mut stack) {
                    return Some(c);
                }
            }
        }
        None
    }

    fn check_node(&self, node: &str) -> Result<()> {
        if self.has_node(node) {
            Ok(())
        } else {
            Err(Error::UnknownNode(node.to_string()))
        }
    }

    /// `In(v)`: input edges entering `v` followed by intermediate edges
    /// ending at `v`.
    pub fn in_edges(&self, node: &str) -> Result<Vec<&str>> {
        self.check_node(node)?;
        Ok(self
            .inputs
            .iter()
            .filter(|e| e.at == node)
            .map(|e| e.id.as_str())
            .chain(
                self.edges
                    .iter()
                    .filter(|e| e.to == node)
                    .map(|e| e.id.as_str()),
            )
            .collect())
    }

    /// `Out(v)`: intermediate edges leaving `v`, together with the input
    /// edges of the messages `v` demands.
    pub fn out_set(&self, node: &str) -> Result<Vec<&str>> {
        self.check_node(node)?;
        let demanded = self.demands_of(node);
        Ok(self
            .edges
            .iter()
            .filter(|e| e.from == node)
            .map(|e| e.id.as_str())
            .chain(
                demanded
                    .into_iter()
                    .filter_map(|msg| self.input_for_message(msg).map(|e| e.id.as_str())),
            )
            .collect())
    }

    /// Input edges sorted by id, then intermediate edges in topological
    /// order; among edges that are ready at the same time the smallest id
    /// goes first.
    pub fn ancestral_order(&self) -> Result<EdgeOrder> {
        self.ensure_valid()?;
        let mut order: Vec<String> = self.inputs.iter().map(|e| e.id.clone()).collect();
        order.sort();

        let mut pending: HashMap<&str, usize> =
            self.nodes.iter().map(|n| (n.as_str(), 0)).collect();
        for e in &self.edges {
            *pending.get_mut(e.to.as_str()).expect("validated") += 1;
        }
        let mut ready: BTreeSet<(&str, usize)> = BTreeSet::new();
        for (idx, e) in self.edges.iter().enumerate() {
            if pending[e.from.as_str()] == 0 {
                ready.insert((e.id.as_str(), idx));
            }
        }
        while let Some((id, idx)) = ready.pop_first() {
            order.push(id.to_string());
            let to = self.edges[idx].to.as_str();
            let left = pending.get_mut(to).expect("validated");
            *left -= 1;
            if *left == 0 {
                for (j, e) in self.edges.iter().enumerate() {
                    if e.from == to {
                        ready.insert((e.id.as_str(), j));
                    }
                }
            }
        }
        debug_assert_eq!(order.len(), self.inputs.len() + self.edges.len());
        Ok(EdgeOrder(order))
    }

    /// Graphviz rendering: source nodes are boxes, demand nodes list the
    /// messages they want, and every edge is labelled with its id.
    pub fn to_dot(&self) -> String {
        let sources: BTreeSet<&str> = self.inputs.iter().map(|e| e.at.as_str()).collect();
        let mut s = String::from("digraph network {\n  rankdir=TB;\n");
        for n in &self.nodes {
            let wants = self.demands_of(n);
            let mut attrs = Vec::new();
            if sources.contains(n.as_str()) {
                attrs.push("shape=box".to_string());
            }
            if !wants.is_empty() {
                let list: Vec<String> = wants.iter().map(|m| format!("x_{}", m + 1)).collect();
                attrs.push(format!(
                    "label=\"{}\\nwants {}\"",
                    escape(n),
                    list.join(", ")
                ));
            }
            if attrs.is_empty() {
                let _ = writeln!(s, "  \"{}\";", escape(n));
            } else {
                let _ = writeln!(s, "  \"{}\" [{}];", escape(n), attrs.join(", "));
            }
        }
        for e in &self.inputs {
            let src = format!("input:{}", e.id);
            let _ = writeln!(s, "  \"{}\" [shape=point];", escape(&src));
            let _ = writeln!(
                s,
                "  \"{}\" -> \"{}\" [label=\"{}: x_{}\"];",
                escape(&src),
                escape(&e.at),
                escape(&e.id),
                e.msg + 1
            );
        }
        for e in &self.edges {
            let _ = writeln!(
                s,
                "  \"{}\" -> \"{}\" [label=\"{}\"];",
                escape(&e.from),
                escape(&e.to),
                escape(&e.id)
            );
        }
        s.push_str("}\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Index-based view of a valid network used by the solution algorithms.
///
/// Edge `i < m` is the input edge of message `i`; edge `m + j` is the
/// `j`-th intermediate edge in file order.
#[derive(Debug, Clone)]
pub struct Topology {
    pub m: usize,
    pub edge_ids: Vec<String>,
    pub node_names: Vec<String>,
    /// Origin node of each edge; `None` for input edges.
    pub origin: Vec<Option<usize>>,
    pub dest: Vec<usize>,
    /// In-edges per node, in the order of [`Network::in_edges`].
    pub in_edges: Vec<Vec<usize>>,
    /// Demanded messages per node.
    pub demands: Vec<Vec<usize>>,
    /// Edge indices in ancestral order.
    pub order: Vec<usize>,
}

impl Topology {
    pub fn new(net: &Network) -> Result<Topology> {
        net.ensure_valid()?;
        let m = net.inputs.len();
        let node_index: HashMap<&str, usize> = net
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let mut edge_ids = vec![String::new(); m];
        let mut origin = vec![None; m];
        let mut dest = vec![0; m];
        for e in &net.inputs {
            edge_ids[e.msg] = e.id.clone();
            dest[e.msg] = node_index[e.at.as_str()];
        }
        for e in &net.edges {
            edge_ids.push(e.id.clone());
            origin.push(Some(node_index[e.from.as_str()]));
            dest.push(node_index[e.to.as_str()]);
        }
        let mut in_edges = vec![Vec::new(); net.nodes.len()];
        // inputs in file order first, then intermediate edges, as in Network::in_edges
        for e in &net.inputs {
            in_edges[node_index[e.at.as_str()]].push(e.msg);
        }
        for j in 0..net.edges.len() {
            in_edges[dest[m + j]].push(m + j);
        }
        let demands = net.nodes.iter().map(|n| net.demands_of(n)).collect();
        let id_index: HashMap<&str, usize> = edge_ids
            .iter()
            .enumerate()
            .map(|(i, e)| (e.as_str(), i))
            .collect();
        let order = net
            .ancestral_order()?
            .0
            .iter()
            .map(|id| id_index[id.as_str()])
            .collect();
        Ok(Topology {
            m,
            edge_ids,
            node_names: net.nodes.clone(),
            origin,
            dest,
            in_edges,
            demands,
            order,
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edge_ids.len()
    }

    pub fn node_count(&self) -> usize {
        self.node_names.len()
    }

    pub fn is_input(&self, e: usize) -> bool {
        e < self.m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_cycle() -> Network {
        serde_json::from_str(
            r#"{"nodes":["a","b"],"inputs":[{"id":"s","at":"a","msg":1,"k":1}],
                "edges":[{"id":"ab","from":"a","to":"b"},{"id":"ba","from":"b","to":"a"}],
                "demands":[]}"#,
        )
        .unwrap()
    }

    fn line() -> Network {
        serde_json::from_str(
            r#"{"nodes":["s","r","t","lonely"],"inputs":[{"id":"e1","at":"s","msg":1,"k":2}],
                "edges":[{"id":"b","from":"r","to":"t"},{"id":"a","from":"s","to":"r"}],
                "demands":[{"node":"t","msgs":[1]}]}"#,
        )
        .unwrap()
    }

    #[test]
    fn detects_cycles_with_witness() {
        let v = two_cycle().validate();
        assert_eq!(
            v,
            vec![NetworkViolation::Cycle {
                witness: vec!["a".into(), "b".into(), "a".into()]
            }]
        );
        assert!(two_cycle().ancestral_order().is_err());
    }

    #[test]
    fn detects_bad_demands_and_ids() {
        let mut net = line();
        net.demands.push(Demand {
            node: "t".into(),
            msgs: vec![1],
        });
        net.edges.push(Edge {
            id: "a".into(),
            from: "s".into(),
            to: "nowhere".into(),
        });
        let v = net.validate();
        assert!(v.contains(&NetworkViolation::UnknownMessage {
            node: "t".into(),
            msg: 1
        }));
        assert!(v.contains(&NetworkViolation::DuplicateEdge { edge: "a".into() }));
        assert!(v.contains(&NetworkViolation::UnknownNode {
            edge: "a".into(),
            node: "nowhere".into()
        }));
    }

    #[test]
    fn neighbourhoods() {
        let net = line();
        assert!(net.validate().is_empty());
        assert_eq!(net.in_edges("s").unwrap(), vec!["e1"]);
        assert_eq!(net.out_set("s").unwrap(), vec!["a"]);
        assert_eq!(net.in_edges("t").unwrap(), vec!["b"]);
        assert_eq!(net.out_set("t").unwrap(), vec!["e1"]);
        assert!(net.in_edges("lonely").unwrap().is_empty());
        assert!(net.out_set("lonely").unwrap().is_empty());
        assert_eq!(
            net.in_edges("ghost"),
            Err(Error::UnknownNode("ghost".into()))
        );
    }

    #[test]
    fn ancestral_order_respects_precedence() {
        let net = line();
        let order = net.ancestral_order().unwrap();
        assert_eq!(order.0, vec!["e1", "a", "b"]);
        assert!(order.is_valid_for(&net));
        assert!(!EdgeOrder(vec!["e1".into(), "b".into(), "a".into()]).is_valid_for(&net));
    }

    #[test]
    fn single_input_edge() {
        let net: Network = serde_json::from_str(
            r#"{"nodes":["s"],"inputs":[{"id":"e1","at":"s","msg":1,"k":1}],"edges":[]}"#,
        )
        .unwrap();
        assert_eq!(net.ancestral_order().unwrap().0, vec!["e1"]);
    }

    #[test]
    fn json_uses_one_based_messages() {
        let net = line();
        assert_eq!(net.inputs[0].msg, 0);
        let text = serde_json::to_string(&net).unwrap();
        assert!(text.contains(r#""msg":1"#));
        assert_eq!(serde_json::from_str::<Network>(&text).unwrap(), net);
    }

    #[test]
    fn dot_export() {
        let dot = line().to_dot();
        assert!(dot.contains("\"s\" [shape=box];"));
        assert!(dot.contains("wants x_1"));
        assert!(dot.contains("\"r\" -> \"t\" [label=\"b\"];"));
        assert!(dot.contains("[label=\"e1: x_1\"]"));
    }

    #[test]
    fn topology_indices() {
        let t = Topology::new(&line()).unwrap();
        assert_eq!(t.edge_ids, vec!["e1", "b", "a"]);
        assert_eq!(t.order, vec![0, 2, 1]);
        assert_eq!(t.origin[0], None);
        assert_eq!(t.in_edges[2], vec![1]);
        assert_eq!(t.demands[2], vec![0]);
    }
}
