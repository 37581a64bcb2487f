mod common;

use polynet::io::parse_json;
use polynet::{search_linear, verify_solution, Field, Network, SearchOptions, Verdict};

use common::three_source_net;

fn opts(reduce: bool, jobs: usize) -> SearchOptions {
    SearchOptions {
        reduce,
        jobs,
        ..SearchOptions::default()
    }
}

// Two messages through one shared edge, each sink also hearing the other source.
fn shared_edge() -> Network {
    parse_json(
        r#"{"nodes":["s1","s2","m","t1","t2"],
            "inputs":[{"id":"x1","at":"s1","msg":1,"k":1},{"id":"x2","at":"s2","msg":2,"k":1}],
            "edges":[{"id":"s1m","from":"s1","to":"m"},{"id":"s2m","from":"s2","to":"m"},
                     {"id":"mt1","from":"m","to":"t1"},{"id":"mt2","from":"m","to":"t2"},
                     {"id":"s1t2","from":"s1","to":"t2"},{"id":"s2t1","from":"s2","to":"t1"}],
            "demands":[{"node":"t1","msgs":[1]},{"node":"t2","msgs":[2]}]}"#,
        "network",
    )
    .unwrap()
}

fn agree(net: &Network, k: &[usize], n: usize, q: u32) {
    let field = Field::new(q).unwrap();
    let reduced = search_linear(net, k, n, field, &opts(true, 1)).unwrap();
    let full = search_linear(net, k, n, field, &opts(false, 1)).unwrap();
    assert_ne!(full.verdict, Verdict::BudgetExceeded);
    assert_eq!(
        reduced.verdict.is_found(),
        full.verdict.is_found(),
        "k={k:?} n={n} q={q}"
    );
    for out in [&reduced, &full] {
        if let Verdict::Found(sol) = &out.verdict {
            assert!(verify_solution(net, sol).unwrap().is_verified());
        }
    }
}

#[test]
fn reduced_and_full_enumeration_agree() {
    let c = three_source_net();
    for q in [2, 3] {
        agree(&c.network, &[1, 1, 1], 1, q);
    }
    let net = shared_edge();
    for q in [2, 3] {
        for (k, n) in [([1, 1], 1), ([1, 2], 1), ([2, 1], 1)] {
            agree(&net, &k, n, q);
        }
    }
}

#[test]
fn parallel_search_is_deterministic() {
    let c = three_source_net();
    let field = Field::new(3).unwrap();
    let base = search_linear(&c.network, &[1, 1, 1], 2, field, &opts(true, 1)).unwrap();
    assert!(base.verdict.is_found());
    for jobs in [2, 3, 8] {
        let out = search_linear(&c.network, &[1, 1, 1], 2, field, &opts(true, jobs)).unwrap();
        assert_eq!(out.verdict, base.verdict, "jobs={jobs}");
    }
}

#[test]
fn tiny_budget_is_exceeded() {
    let c = three_source_net();
    let o = SearchOptions {
        budget: 1,
        ..opts(false, 1)
    };
    let out = search_linear(&c.network, &[1, 1, 1], 1, Field::new(2).unwrap(), &o).unwrap();
    assert_eq!(out.verdict, Verdict::BudgetExceeded);
}
