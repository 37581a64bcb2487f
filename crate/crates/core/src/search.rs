//! Bounded exhaustive search for linear `(k_1, .., k_m; n)` solutions.
//!
//! Intermediate edges are assigned in ancestral order. With the reduction
//! on (the default) an edge never gets a local encoding matrix directly:
//!
//! - if the in-edges of its origin span a space `W` of dimension at most
//!   `n`, the edge carries all of `W` (zero-padded);
//! - otherwise it carries an `n`-dimensional subspace of `W`, one candidate
//!   per subspace.
//!
//! This loses nothing. Every global matrix an edge can carry has column
//! space inside `W`, and both decodability at a node and computability of
//! an out-edge only get easier as the column spaces of the in-edges grow.
//! So a solution exists iff one exists whose edges carry maximal spaces, and
//! dominated choices (smaller subspaces, different bases of the same space)
//! are skipped. Without the reduction every local encoding matrix is tried,
//! ordered as base-`q` integers.
//!
//! The candidate budget counts edge assignments. Verdicts and the reported
//! solution do not depend on the number of worker threads.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::codec::{selector, FncSolution};
use crate::error::{Error, Result};
use crate::linalg::{Field, Mat};
use crate::network::{Network, Topology};

pub const DEFAULT_BUDGET: u128 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchOptions {
    pub budget: u128,
    pub jobs: usize,
    /// Enumerate maximal subspaces instead of all local matrices.
    pub reduce: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: DEFAULT_BUDGET,
            jobs: 1,
            reduce: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Found(FncSolution),
    ExhaustedNone,
    BudgetExceeded,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Found(_) => "found",
            Verdict::ExhaustedNone => "exhausted_none",
            Verdict::BudgetExceeded => "budget_exceeded",
        }
    }

    pub fn solution(&self) -> Option<&FncSolution> {
        match self {
            Verdict::Found(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Verdict::Found(_))
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchBounds {
    pub q: u32,
    pub k: Vec<usize>,
    pub n: usize,
    pub budget: u128,
    pub reduce: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchOutcome {
    pub verdict: Verdict,
    pub candidates_examined: u128,
    pub bounds: SearchBounds,
}

/// Candidates for one edge, indexable so the space can be split.
enum Candidates {
    Fixed(Mat),
    /// `n`-dimensional subspaces of the span of `basis`, as `basis * C`
    /// where `C^T` runs over the full-rank `n x d` matrices in reduced
    /// row-echelon form.
    Subspaces {
        basis: Mat,
        n: usize,
        /// Pivot columns with the number of free entries they leave.
        combos: Vec<(Vec<usize>, u32)>,
        total: u128,
    },
    /// `incoming * L` for every `c x n` matrix `L`.
    Local {
        incoming: Mat,
        n: usize,
        total: u128,
    },
}

fn combinations(d: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, d: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..=d - left {
            cur.push(i);
            rec(i + 1, d, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, d, n, &mut Vec::new(), &mut out);
    out
}

fn checked_pow(q: u32, e: u128) -> u128 {
    u32::try_from(e)
        .ok()
        .and_then(|e| (q as u128).checked_pow(e))
        .unwrap_or(u128::MAX)
}

impl Candidates {
    fn new(field: Field, incoming: Mat, n: usize, reduce: bool) -> Candidates {
        let q = field.modulus();
        if !reduce {
            let total = checked_pow(q, (incoming.cols() * n) as u128);
            return Candidates::Local { incoming, n, total };
        }
        let basis = incoming.column_space_basis();
        let d = basis.cols();
        if d <= n {
            return Candidates::Fixed(basis.pad_columns(n).expect("d <= n"));
        }
        let combos: Vec<(Vec<usize>, u32)> = combinations(d, n)
            .into_iter()
            .map(|p| {
                let free: usize = p
                    .iter()
                    .enumerate()
                    .map(|(row, &col)| (col + 1..d).filter(|c| !p[row..].contains(c)).count())
                    .sum();
                (p, free as u32)
            })
            .collect();
        let total = combos.iter().fold(0u128, |acc, (_, free)| {
            acc.saturating_add(checked_pow(q, *free as u128))
        });
        Candidates::Subspaces {
            basis,
            n,
            combos,
            total,
        }
    }

    fn len(&self) -> u128 {
        match self {
            Candidates::Fixed(_) => 1,
            Candidates::Subspaces { total, .. } | Candidates::Local { total, .. } => *total,
        }
    }

    /// Digits of `idx` in base `q`, most significant first.
    fn digits(q: u32, mut idx: u128, len: usize) -> Vec<i64> {
        let mut out = vec![0; len];
        for slot in out.iter_mut().rev() {
            *slot = (idx % q as u128) as i64;
            idx /= q as u128;
        }
        out
    }

    fn get(&self, idx: u128) -> Mat {
        match self {
            Candidates::Fixed(m) => m.clone(),
            Candidates::Local { incoming, n, .. } => {
                let field = incoming.field();
                let digits = Candidates::digits(field.modulus(), idx, incoming.cols() * n);
                let local = Mat::from_fn(field, incoming.cols(), *n, |r, c| digits[r * n + c]);
                incoming.mul(&local).expect("conformable")
            }
            Candidates::Subspaces {
                basis, n, combos, ..
            } => {
                let field = basis.field();
                let q = field.modulus();
                let d = basis.cols();
                let mut idx = idx;
                for (pivots, free) in combos {
                    let size = checked_pow(q, *free as u128);
                    if idx >= size {
                        idx -= size;
                        continue;
                    }
                    let digits = Candidates::digits(q, idx, *free as usize);
                    let mut next = digits.iter();
                    // rows of the echelon form, stored transposed as C (d x n)
                    let mut c = Mat::zeros(field, d, *n);
                    for (row, &p) in pivots.iter().enumerate() {
                        c.set(p, row, 1);
                        for col in p + 1..d {
                            if !pivots[row..].contains(&col) {
                                c.set(col, row, *next.next().expect("digit count") as u32);
                            }
                        }
                    }
                    return basis.mul(&c).expect("conformable");
                }
                unreachable!("candidate index within total")
            }
        }
    }
}

struct Problem<'a> {
    net: &'a Network,
    topo: &'a Topology,
    field: Field,
    k: Vec<usize>,
    n: usize,
    reduce: bool,
    /// Intermediate edges in ancestral order.
    order: Vec<usize>,
    /// Demand nodes whose last in-edge is `order[pos]`.
    checks: Vec<Vec<usize>>,
    /// Demand nodes fed by input edges only.
    initial_checks: Vec<usize>,
}

enum Explore {
    Found(Vec<Option<Mat>>),
    None,
    Exceeded,
}

impl<'a> Problem<'a> {
    fn new(
        net: &'a Network,
        topo: &'a Topology,
        field: Field,
        k: &[usize],
        n: usize,
        reduce: bool,
    ) -> Self {
        let order: Vec<usize> = topo
            .order
            .iter()
            .copied()
            .filter(|&e| !topo.is_input(e))
            .collect();
        let position: BTreeMap<usize, usize> =
            order.iter().enumerate().map(|(p, &e)| (e, p)).collect();
        let mut checks = vec![Vec::new(); order.len()];
        let mut initial_checks = Vec::new();
        for v in 0..topo.node_count() {
            if topo.demands[v].is_empty() {
                continue;
            }
            match topo.in_edges[v]
                .iter()
                .filter_map(|e| position.get(e))
                .max()
            {
                Some(&p) => checks[p].push(v),
                None => initial_checks.push(v),
            }
        }
        Problem {
            net,
            topo,
            field,
            k: k.to_vec(),
            n,
            reduce,
            order,
            checks,
            initial_checks,
        }
    }

    fn total(&self) -> usize {
        self.k.iter().sum()
    }

    fn incoming(&self, v: usize, global: &[Option<Mat>]) -> Mat {
        Mat::hconcat_rows(
            self.field,
            self.total(),
            self.topo.in_edges[v]
                .iter()
                .map(|&e| global[e].as_ref().expect("assigned")),
        )
        .expect("shapes agree")
    }

    fn decodes(&self, v: usize, global: &[Option<Mat>]) -> bool {
        let inc = self.incoming(v, global);
        self.topo.demands[v].iter().all(|&msg| {
            inc.spans(&selector(self.field, msg, &self.k).expect("message index"))
                .expect("same field")
        })
    }

    fn candidates(&self, pos: usize, global: &[Option<Mat>]) -> Candidates {
        let e = self.order[pos];
        let origin = self.topo.origin[e].expect("intermediate edge");
        Candidates::new(
            self.field,
            self.incoming(origin, global),
            self.n,
            self.reduce,
        )
    }

    fn explore(
        &self,
        pos: usize,
        global: &mut Vec<Option<Mat>>,
        count: &mut u128,
        budget: u128,
    ) -> Explore {
        if pos == self.order.len() {
            return Explore::Found(global.clone());
        }
        let cands = self.candidates(pos, global);
        let e = self.order[pos];
        let mut idx = 0u128;
        while idx < cands.len() {
            *count += 1;
            if *count > budget {
                return Explore::Exceeded;
            }
            global[e] = Some(cands.get(idx));
            if self.checks[pos].iter().all(|&v| self.decodes(v, global)) {
                match self.explore(pos + 1, global, count, budget) {
                    Explore::None => {}
                    other => return other,
                }
            }
            idx += 1;
        }
        global[e] = None;
        Explore::None
    }
}

struct Subtree {
    count: u128,
    result: Explore,
}

/// Searches for a linear solution with message dimensions `k` and edge
/// dimension `n` over `field`.
///
/// The search is split over the candidates of the first edge with more
/// than one choice; subtrees are merged in index order, so the first
/// solution in enumeration order is returned for any number of jobs.
pub fn search_linear(
    net: &Network,
    k: &[usize],
    n: usize,
    field: Field,
    opts: &SearchOptions,
) -> Result<SearchOutcome> {
    let topo = Topology::new(net)?;
    if k.len() != topo.m {
        return Err(Error::Dimension(format!(
            "{} dimensions for {} messages",
            k.len(),
            topo.m
        )));
    }
    if n == 0 || k.contains(&0) {
        return Err(Error::Dimension("dimensions must be positive".into()));
    }
    let problem = Problem::new(net, &topo, field, k, n, opts.reduce);
    let bounds = SearchBounds {
        q: field.modulus(),
        k: k.to_vec(),
        n,
        budget: opts.budget,
        reduce: opts.reduce,
    };
    let outcome = |verdict, candidates_examined| SearchOutcome {
        verdict,
        candidates_examined,
        bounds: bounds.clone(),
    };

    let mut global: Vec<Option<Mat>> = vec![None; topo.edge_count()];
    for msg in 0..topo.m {
        global[msg] = Some(selector(field, msg, k)?);
    }
    if !problem
        .initial_checks
        .iter()
        .all(|&v| problem.decodes(v, &global))
    {
        return Ok(outcome(Verdict::ExhaustedNone, 0));
    }

    // walk the forced prefix
    let mut count = 0u128;
    let mut pos = 0;
    let branch = loop {
        if pos == problem.order.len() {
            return Ok(outcome(Verdict::Found(finish(&problem, global)), count));
        }
        let cands = problem.candidates(pos, &global);
        if cands.len() != 1 {
            break cands;
        }
        count += 1;
        if count > opts.budget {
            return Ok(outcome(Verdict::BudgetExceeded, opts.budget));
        }
        global[problem.order[pos]] = Some(cands.get(0));
        if !problem.checks[pos]
            .iter()
            .all(|&v| problem.decodes(v, &global))
        {
            return Ok(outcome(Verdict::ExhaustedNone, count));
        }
        pos += 1;
    };
    if branch.len() == 0 {
        return Ok(outcome(Verdict::ExhaustedNone, count));
    }

    let remaining = opts.budget - count;
    let best = AtomicUsize::new(usize::MAX);
    let results: Mutex<BTreeMap<u128, Subtree>> = Mutex::new(BTreeMap::new());
    let jobs = opts.jobs.max(1) as u128;
    let edge = problem.order[pos];
    let worker = |start: u128| {
        let mut spent = 0u128;
        let mut idx = start;
        while idx < branch.len()
            && idx <= best.load(Ordering::Relaxed) as u128
            && spent <= remaining
        {
            let mut local = global.clone();
            let mut sub = 1u128;
            local[edge] = Some(branch.get(idx));
            let result = if sub > remaining {
                Explore::Exceeded
            } else if problem.checks[pos]
                .iter()
                .all(|&v| problem.decodes(v, &local))
            {
                problem.explore(pos + 1, &mut local, &mut sub, remaining)
            } else {
                Explore::None
            };
            if matches!(result, Explore::Found(_)) {
                best.fetch_min(idx.min(usize::MAX as u128 - 1) as usize, Ordering::Relaxed);
            }
            spent += sub;
            results
                .lock()
                .expect("no poisoned workers")
                .insert(idx, Subtree { count: sub, result });
            idx += jobs;
        }
    };
    if jobs == 1 {
        worker(0);
    } else {
        std::thread::scope(|s| {
            for start in 0..jobs {
                let worker = &worker;
                s.spawn(move || worker(start));
            }
        });
    }

    let results = results.into_inner().expect("no poisoned workers");
    for idx in 0..branch.len() {
        let sub = results
            .get(&idx)
            .expect("every subtree before the stopping point is explored");
        count += sub.count;
        if count > opts.budget || matches!(sub.result, Explore::Exceeded) {
            return Ok(outcome(Verdict::BudgetExceeded, count.min(opts.budget)));
        }
        if let Explore::Found(g) = &sub.result {
            return Ok(outcome(Verdict::Found(finish(&problem, g.clone())), count));
        }
    }
    Ok(outcome(Verdict::ExhaustedNone, count))
}

fn finish(problem: &Problem<'_>, global: Vec<Option<Mat>>) -> FncSolution {
    let sol = FncSolution {
        field: problem.field,
        k: problem.k.clone(),
        n: problem.n,
        global: problem
            .topo
            .edge_ids
            .iter()
            .cloned()
            .zip(global.into_iter().map(|g| g.expect("all edges assigned")))
            .collect(),
    };
    debug_assert!(
        crate::codec::verify_solution(problem.net, &sol).map_or(true, |v| v.is_verified()),
        "search produced an unverified solution"
    );
    sol
}

fn ratio_str<S: Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn opt_ratio_str<S: Serializer>(
    r: &Option<Ratio<u64>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

/// One searched `(k; n)` cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub k: Vec<usize>,
    pub n: usize,
    #[serde(serialize_with = "ratio_str")]
    pub rate: Ratio<u64>,
    pub verdict: Verdict,
    pub candidates_examined: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RateTable {
    pub cells: Vec<Cell>,
    /// Largest rate with a solution found, if any.
    #[serde(serialize_with = "opt_ratio_str")]
    pub best: Option<Ratio<u64>>,
}

impl RateTable {
    pub fn best_cell(&self) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.verdict.is_found() && Some(c.rate) == self.best)
    }
}

/// Searches every symmetric cell `(k, .., k; n)` with `k <= k_max` and
/// `n <= n_max`, largest `k/n` first (ties by smaller `k`).
pub fn max_symmetric_rate(
    net: &Network,
    field: Field,
    k_max: usize,
    n_max: usize,
    opts: &SearchOptions,
) -> Result<RateTable> {
    if k_max == 0 || n_max == 0 {
        return Err(Error::Dimension("bounds must be at least 1".into()));
    }
    let m = net.message_count();
    let mut grid: Vec<(usize, usize)> = (1..=k_max)
        .flat_map(|k| (1..=n_max).map(move |n| (k, n)))
        .collect();
    grid.sort_by(|a, b| {
        Ratio::new(b.0 as u64, b.1 as u64)
            .cmp(&Ratio::new(a.0 as u64, a.1 as u64))
            .then(a.0.cmp(&b.0))
    });
    let mut cells = Vec::new();
    let mut best = None;
    for (k, n) in grid {
        let out = search_linear(net, &vec![k; m], n, field, opts)?;
        let rate = Ratio::new(k as u64, n as u64);
        if out.verdict.is_found() && best.is_none_or(|b| rate > b) {
            best = Some(rate);
        }
        cells.push(Cell {
            k: vec![k; m],
            n,
            rate,
            verdict: out.verdict,
            candidates_examined: out.candidates_examined,
        });
    }
    Ok(RateTable { cells, best })
}

/// Searches dimension tuples `k_i <= dim_max`, `n <= n_max` by decreasing
/// average rate (ties: smaller `n`, then lexicographically larger `k`) and
/// stops at the first solution. The table lists every cell searched.
pub fn best_average_rate(
    net: &Network,
    field: Field,
    dim_max: usize,
    n_max: usize,
    opts: &SearchOptions,
) -> Result<RateTable> {
    if dim_max == 0 || n_max == 0 {
        return Err(Error::Dimension("bounds must be at least 1".into()));
    }
    let m = net.message_count();
    if m == 0 {
        return Err(Error::InvalidNetwork("no messages".into()));
    }
    let tuples_len = u32::try_from(m)
        .ok()
        .and_then(|m| dim_max.checked_pow(m))
        .filter(|&t| t.saturating_mul(n_max) <= 1 << 20)
        .ok_or_else(|| Error::Dimension("too many dimension tuples".into()))?;
    let mut grid: Vec<(Vec<usize>, usize)> = Vec::with_capacity(tuples_len * n_max);
    for t in 0..tuples_len {
        let mut k = vec![0; m];
        let mut rest = t;
        for slot in k.iter_mut().rev() {
            *slot = rest % dim_max + 1;
            rest /= dim_max;
        }
        for n in 1..=n_max {
            grid.push((k.clone(), n));
        }
    }
    let average =
        |k: &[usize], n: usize| Ratio::new(k.iter().sum::<usize>() as u64, (k.len() * n) as u64);
    grid.sort_by(|a, b| {
        average(&b.0, b.1)
            .cmp(&average(&a.0, a.1))
            .then(a.1.cmp(&b.1))
            .then(b.0.cmp(&a.0))
    });
    let mut cells = Vec::new();
    for (k, n) in grid {
        let out = search_linear(net, &k, n, field, opts)?;
        let found = out.verdict.is_found();
        cells.push(Cell {
            rate: average(&k, n),
            k,
            n,
            verdict: out.verdict,
            candidates_examined: out.candidates_examined,
        });
        if found {
            let best = cells.last().map(|c| c.rate);
            return Ok(RateTable { cells, best });
        }
    }
    Ok(RateTable { cells, best: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::verify_solution;

    fn butterfly() -> Network {
        serde_json::from_str(
            r#"{"nodes":["s1","s2","a","b","t1","t2"],
                "inputs":[{"id":"x1","at":"s1","msg":1,"k":1},{"id":"x2","at":"s2","msg":2,"k":1}],
                "edges":[{"id":"s1t1","from":"s1","to":"t1"},{"id":"s1a","from":"s1","to":"a"},
                         {"id":"s2a","from":"s2","to":"a"},{"id":"s2t2","from":"s2","to":"t2"},
                         {"id":"ab","from":"a","to":"b"},{"id":"bt1","from":"b","to":"t1"},
                         {"id":"bt2","from":"b","to":"t2"}],
                "demands":[{"node":"t1","msgs":[2]},{"node":"t2","msgs":[1]}]}"#,
        )
        .unwrap()
    }

    #[test]
    fn subspace_counts_are_gaussian_binomials() {
        let f = Field::binary();
        let c = Candidates::new(f, Mat::identity(f, 4), 2, true);
        assert_eq!(c.len(), 35);
        let c = Candidates::new(f, Mat::identity(f, 6), 3, true);
        assert_eq!(c.len(), 1395);
        let f3 = Field::new(3).unwrap();
        assert_eq!(Candidates::new(f3, Mat::identity(f3, 3), 1, true).len(), 13);
        // all candidates distinct subspaces of full rank
        let c = Candidates::new(f, Mat::identity(f, 4), 2, true);
        let mats: Vec<Mat> = (0..c.len()).map(|i| c.get(i)).collect();
        for (i, a) in mats.iter().enumerate() {
            assert_eq!(a.rank(), 2);
            for b in &mats[i + 1..] {
                assert!(!a.same_column_space(b).unwrap());
            }
        }
    }

    #[test]
    fn butterfly_is_scalar_solvable() {
        let net = butterfly();
        let out =
            search_linear(&net, &[1, 1], 1, Field::binary(), &SearchOptions::default()).unwrap();
        let sol = out.verdict.solution().expect("found");
        assert!(verify_solution(&net, sol).unwrap().is_verified());
        let unreduced = SearchOptions {
            reduce: false,
            ..Default::default()
        };
        let out = search_linear(&net, &[1, 1], 1, Field::binary(), &unreduced).unwrap();
        assert!(out.verdict.is_found());
    }

    #[test]
    fn budget_is_reported() {
        let tiny = SearchOptions {
            budget: 2,
            reduce: false,
            ..Default::default()
        };
        let out = search_linear(&butterfly(), &[1, 1], 1, Field::binary(), &tiny).unwrap();
        assert_eq!(out.verdict, Verdict::BudgetExceeded);
    }

    #[test]
    fn jobs_do_not_change_the_answer() {
        let net = butterfly();
        let unreduced = SearchOptions {
            reduce: false,
            ..Default::default()
        };
        let one = search_linear(&net, &[1, 1], 2, Field::binary(), &unreduced).unwrap();
        for jobs in [2, 3, 8] {
            let many = search_linear(
                &net,
                &[1, 1],
                2,
                Field::binary(),
                &SearchOptions { jobs, ..unreduced },
            )
            .unwrap();
            assert_eq!(one, many);
        }
    }

    #[test]
    fn single_edge_rates() {
        let net: Network = serde_json::from_str(
            r#"{"nodes":["s","t"],"inputs":[{"id":"x","at":"s","msg":1,"k":1}],
                "edges":[{"id":"st","from":"s","to":"t"}],"demands":[{"node":"t","msgs":[1]}]}"#,
        )
        .unwrap();
        let table =
            max_symmetric_rate(&net, Field::binary(), 2, 2, &SearchOptions::default()).unwrap();
        assert_eq!(table.best, Some(Ratio::from_integer(1)));
        assert_eq!(table.cells[0].verdict, Verdict::ExhaustedNone);
        let table =
            max_symmetric_rate(&net, Field::binary(), 1, 1, &SearchOptions::default()).unwrap();
        assert_eq!(table.best, Some(Ratio::from_integer(1)));
    }
}
