//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;

use num_rational::Ratio;
use polynet::construct::{in_neighbor_elements, Construction};
use polynet::fixtures::{mixed_rate_rep, three_source_rep};
use polynet::{
    best_average_rate, check_dpn, construct_and_solve, eligible_bases, max_symmetric_rate,
    polymatroid_from_solution, search_linear, validate_exchange, verify_solution,
    DiscretePolymatroid, Field, IntVector, Mat, Matroid, Policy, SearchOptions, Subset, Verdict,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{mixed_rate_net, random_rep, three_source_net, v};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn set(e: &[usize]) -> Subset {
    Subset::from_elements(e.iter().map(|i| i - 1))
}

fn vecs(vs: &[&[u32]]) -> Vec<IntVector> {
    vs.iter().map(|c| v(c)).collect()
}

fn ex1() -> DiscretePolymatroid {
    DiscretePolymatroid::from_representation(&three_source_rep()).unwrap()
}

fn ex2() -> DiscretePolymatroid {
    DiscretePolymatroid::from_representation(&mixed_rate_rep()).unwrap()
}

fn rank_listing(d: &DiscretePolymatroid, listed: &[(u32, &[&[usize]])], otherwise: u32) -> Check {
    let mut seen = BTreeSet::new();
    for (rank, sets) in listed {
        for s in *sets {
            let x = set(s);
            seen.insert(x);
            ensure!(
                d.rank(x) == *rank,
                "rank({x}) = {}, expected {rank}",
                d.rank(x)
            );
        }
    }
    ensure!(
        d.rank(Subset::EMPTY) == 0,
        "rank of the empty set is {}",
        d.rank(Subset::EMPTY)
    );
    for x in Subset::all(d.ground_set_size()).filter(|x| !x.is_empty() && !seen.contains(x)) {
        ensure!(
            d.rank(x) == otherwise,
            "rank({x}) = {}, expected {otherwise}",
            d.rank(x)
        );
    }
    Ok(())
}

fn criterion_1() -> Check {
    rank_listing(
        &ex1(),
        &[
            (1, &[&[1], &[2], &[3]]),
            (2, &[&[1, 2], &[1, 3], &[1, 4], &[2, 3], &[4]]),
        ],
        3,
    )
}

fn criterion_2() -> Check {
    let expected = vecs(&[
        &[0, 0, 1, 2],
        &[0, 1, 0, 2],
        &[0, 1, 1, 1],
        &[1, 0, 1, 1],
        &[1, 1, 0, 1],
        &[1, 1, 1, 0],
    ]);
    let got = ex1().bases().map_err(|e| e.to_string())?;
    ensure!(got == expected, "bases {got:?}");
    Ok(())
}

fn criterion_3() -> Check {
    let d = ex1();
    let c_sets = [
        vecs(&[&[1, 0, 0, 2]]),
        vecs(&[&[0, 1, 1, 2]]),
        vecs(&[&[0, 1, 1, 2]]),
        vecs(&[&[1, 1, 1, 1]]),
    ];
    let d_sets = [
        vecs(&[
            &[1, 0, 0, 2],
            &[1, 0, 1, 2],
            &[1, 1, 0, 2],
            &[1, 1, 1, 1],
            &[1, 1, 1, 2],
        ]),
        vecs(&[&[0, 1, 1, 2], &[1, 1, 0, 2], &[1, 1, 1, 1], &[1, 1, 1, 2]]),
        vecs(&[&[0, 1, 1, 2], &[1, 0, 1, 2], &[1, 1, 1, 1], &[1, 1, 1, 2]]),
        vecs(&[&[1, 1, 1, 1]]),
    ];
    for i in 0..4 {
        let c = d.c_set(i).map_err(|e| e.to_string())?;
        ensure!(c == c_sets[i], "C_{} = {c:?}", i + 1);
        let di = d.excluded_at(i).map_err(|e| e.to_string())?;
        ensure!(di == d_sets[i], "D_{} = {di:?}", i + 1);
    }
    Ok(())
}

fn criterion_4() -> Check {
    rank_listing(
        &ex2(),
        &[
            (1, &[&[2], &[3]]),
            (2, &[&[1], &[4], &[5], &[2, 3], &[3, 5]]),
            (
                3,
                &[&[1, 2], &[1, 3], &[2, 4], &[2, 5], &[3, 4], &[2, 3, 5]],
            ),
        ],
        4,
    )
}

fn criterion_5() -> Check {
    let d = ex2();
    let expected = [
        vecs(&[&[1, 0, 0, 2, 2], &[1, 1, 1, 2, 0]]),
        vecs(&[&[0, 1, 0, 2, 2], &[2, 1, 0, 0, 2], &[2, 1, 0, 2, 0]]),
        vecs(&[&[0, 0, 1, 0, 2], &[2, 0, 1, 2, 0]]),
        vecs(&[&[0, 0, 1, 1, 2], &[2, 1, 1, 1, 0]]),
        vecs(&[&[0, 0, 1, 2, 1], &[2, 0, 0, 2, 1], &[2, 1, 1, 0, 1]]),
    ];
    let mut wrong = Vec::new();
    for (i, want) in expected.iter().enumerate() {
        let got = d.c_set(i).map_err(|e| e.to_string())?;
        if &got != want {
            wrong.push(format!("C_{} = {got:?}, expected {want:?}", i + 1));
        }
    }
    ensure!(wrong.is_empty(), "{}", wrong.join("; "));
    Ok(())
}

fn demand_sets(c: &Construction) -> Result<Vec<(BTreeSet<usize>, usize)>, String> {
    c.network
        .demands
        .iter()
        .map(|dm| {
            ensure!(
                dm.msgs.len() == 1,
                "demand node {} wants {:?}",
                dm.node,
                dm.msgs
            );
            Ok((
                in_neighbor_elements(c, &dm.node).map_err(|e| e.to_string())?,
                dm.msgs[0] + 1,
            ))
        })
        .collect()
}

fn elems(e: &[usize]) -> BTreeSet<usize> {
    e.iter().copied().collect()
}

fn criterion_6() -> Check {
    let c = three_source_net();
    ensure!(
        c.network.validate().is_empty(),
        "network invalid: {:?}",
        c.network.validate()
    );
    let sources: BTreeSet<&str> = c.network.inputs.iter().map(|e| e.at.as_str()).collect();
    ensure!(sources == ["1", "2", "3"].into(), "sources {sources:?}");
    let relay = in_neighbor_elements(&c, "4'").map_err(|e| e.to_string())?;
    ensure!(relay == elems(&[1, 2, 3]), "4' fed by {relay:?}");
    let carrier = c.network.in_edges("4").map_err(|e| e.to_string())?;
    ensure!(carrier == ["4'->4"], "4 fed by {carrier:?}");
    let demands = demand_sets(&c)?;
    let expected = vec![(elems(&[4]), 1), (elems(&[3, 4]), 2), (elems(&[2, 4]), 3)];
    ensure!(demands == expected, "demand nodes {demands:?}");
    Ok(())
}

fn criterion_7() -> Check {
    let s = construct_and_solve(&three_source_rep(), &v(&[1, 1, 1, 0]), &Policy::Exhaustive)
        .map_err(|e| e.to_string())?;
    let check = verify_solution(&s.construction.network, &s.solution).map_err(|e| e.to_string())?;
    ensure!(check.is_verified(), "failures {:?}", check.failures);
    ensure!(
        s.solution.k == [1, 1, 1] && s.solution.n == 2,
        "dims {:?}; {}",
        s.solution.k,
        s.solution.n
    );
    let a4 = Mat::from_rows(Field::binary(), &[[1i64, 0], [0, 1], [0, 1]]).unwrap();
    let carried = &s.solution.global["4'->4"];
    ensure!(
        carried.same_column_space(&a4).unwrap(),
        "4'->4 carries {carried:?}"
    );
    ensure!(
        s.rates.average == Ratio::new(1, 2),
        "average {}",
        s.rates.average
    );
    Ok(())
}

fn criterion_8() -> Check {
    let s = construct_and_solve(&mixed_rate_rep(), &v(&[2, 1, 1, 0, 0]), &Policy::Exhaustive)
        .map_err(|e| e.to_string())?;
    let check = verify_solution(&s.construction.network, &s.solution).map_err(|e| e.to_string())?;
    ensure!(check.is_verified(), "failures {:?}", check.failures);
    ensure!(
        s.solution.k == [2, 1, 1] && s.solution.n == 2,
        "dims {:?}; {}",
        s.solution.k,
        s.solution.n
    );
    ensure!(
        s.rates.average == Ratio::new(2, 3),
        "average {}",
        s.rates.average
    );
    let demands = demand_sets(&s.construction)?;
    ensure!(
        demands.contains(&(elems(&[1, 5]), 2)),
        "no x_2 demand fed by {{1,5}}: {demands:?}"
    );
    ensure!(
        demands.contains(&(elems(&[5]), 3)),
        "no x_3 demand fed by {{5}}: {demands:?}"
    );
    let carrier = s
        .construction
        .network
        .in_edges("5")
        .map_err(|e| e.to_string())?;
    ensure!(carrier == ["5'->5"], "5 fed by {carrier:?}");
    Ok(())
}

fn expect_verdict(c: &Construction, k: &[usize], n: usize, q: u32, found: bool) -> Check {
    let field = Field::new(q).unwrap();
    let out = search_linear(&c.network, k, n, field, &SearchOptions::default())
        .map_err(|e| e.to_string())?;
    match (&out.verdict, found) {
        (Verdict::Found(sol), true) => {
            let check = verify_solution(&c.network, sol).map_err(|e| e.to_string())?;
            ensure!(
                check.is_verified(),
                "found an unverified solution at {k:?};{n}"
            );
        }
        (Verdict::ExhaustedNone, false) => {}
        (verdict, _) => return Err(format!("{k:?};{n} over F_{q}: {}", verdict.label())),
    }
    Ok(())
}

fn criterion_9() -> Check {
    let c = three_source_net();
    expect_verdict(&c, &[1, 1, 1], 1, 2, false)?;
    expect_verdict(&c, &[1, 1, 1], 1, 3, false)?;
    expect_verdict(&c, &[2, 2, 2], 3, 2, false)?;
    expect_verdict(&c, &[1, 1, 1], 2, 2, true)?;
    let table = max_symmetric_rate(&c.network, Field::binary(), 2, 4, &SearchOptions::default())
        .map_err(|e| e.to_string())?;
    ensure!(
        table.best == Some(Ratio::new(1, 2)),
        "best symmetric rate {:?}",
        table.best
    );
    Ok(())
}

fn criterion_10() -> Check {
    let c = mixed_rate_net();
    expect_verdict(&c, &[1, 1, 1], 1, 2, false)?;
    expect_verdict(&c, &[2, 2, 2], 3, 2, false)?;
    let table = best_average_rate(&c.network, Field::binary(), 2, 2, &SearchOptions::default())
        .map_err(|e| e.to_string())?;
    ensure!(
        table.best == Some(Ratio::new(2, 3)),
        "best average rate {:?}",
        table.best
    );
    Ok(())
}

fn criterion_11() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut cases = 0;
    let mut failed = Vec::new();
    let mut wide_sources = 0;
    for reps in 1..=200 {
        let rep = random_rep(&mut rng, &[2, 3, 5], 5, 5);
        let d = DiscretePolymatroid::from_representation(&rep).map_err(|e| e.to_string())?;
        for b in eligible_bases(&d).map_err(|e| e.to_string())? {
            cases += 1;
            let ctx = format!("rep {reps} {}, basis {b}", polynet::io::to_json(&rep));
            let outcome = (|| -> Check {
                let s = construct_and_solve(&rep, &b, &Policy::Exhaustive)
                    .map_err(|e| e.to_string())?;
                let net = &s.construction.network;
                let check = verify_solution(net, &s.solution).map_err(|e| e.to_string())?;
                ensure!(check.is_verified(), "{:?}", check.failures);
                let (back, f) =
                    polymatroid_from_solution(net, &s.solution).map_err(|e| e.to_string())?;
                let violations = check_dpn(net, &back, &f, &s.solution.k, s.solution.n)
                    .map_err(|e| e.to_string())?;
                ensure!(violations.is_empty(), "round trip {violations:?}");
                Ok(())
            })();
            if let Err(e) = outcome {
                let phi = d.phi(&b).map_err(|e| e.to_string())?;
                if b.components().iter().any(|&k| k > phi) {
                    wide_sources += 1;
                }
                failed.push(format!("{ctx}: {e}"));
            }
        }
    }
    ensure!(cases >= 200, "only {cases} (representation, basis) cases");
    ensure!(
        failed.is_empty(),
        "{} of {cases} cases failed ({wide_sources} with a source rank above phi(b)); first: {}",
        failed.len(),
        failed[0]
    );
    Ok(())
}

fn criterion_12() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let rep = random_rep(&mut rng, &[2, 3, 5], 5, 5);
        let d = DiscretePolymatroid::from_representation(&rep).map_err(|e| e.to_string())?;
        let violations = d.validate_axioms();
        ensure!(violations.is_empty(), "axioms {violations:?}");
        let bases = d.bases().map_err(|e| e.to_string())?;
        ensure!(
            bases.iter().all(|b| b.weight() == d.rank_of() as u64),
            "unequal basis weights {bases:?}"
        );
        let members = d.members().map_err(|e| e.to_string())?;
        ensure!(validate_exchange(&members) == Ok(true), "exchange fails");
        for u in &members {
            for i in u.support().elements() {
                let lower = u.minus_unit(i).unwrap();
                ensure!(d.contains(&lower), "{u} is a member but {lower} is not");
            }
        }
    }
    for m in [Matroid::uniform(2, 3).unwrap(), Matroid::free(2).unwrap()] {
        ensure!(m.validate().is_empty(), "matroid axioms");
        let d = m.to_polymatroid().map_err(|e| e.to_string())?;
        let r = m.ground_set_size();
        ensure!(
            Subset::all(r).all(|x| d.rank(x) as usize <= x.len()),
            "rank exceeds cardinality"
        );
        let members: BTreeSet<Subset> = d
            .members()
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|u| {
                if u.components().iter().any(|&c| c > 1) {
                    Err(format!("non-0/1 member {u}"))
                } else {
                    Ok(u.support())
                }
            })
            .collect::<Result<_, _>>()?;
        let independent: BTreeSet<Subset> = m.independent_sets().collect();
        ensure!(members == independent, "D(M) members differ from I");
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("rank table of the three-source example", criterion_1),
        ("bases of the three-source example", criterion_2),
        ("C and D sets of the three-source example", criterion_3),
        ("rank values of the mixed-rate example", criterion_4),
        ("C sets of the mixed-rate example", criterion_5),
        ("network built from the three-source example", criterion_6),
        ("three-source construction solved at (1,1,1;2)", criterion_7),
        ("mixed-rate construction solved at (2,1,1;2)", criterion_8),
        ("linear search on the three-source network", criterion_9),
        ("linear search on the mixed-rate network", criterion_10),
        ("construct/extract/verify round trips", criterion_11),
        ("axiom and property suite", criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(()) => println!("criterion {:>2}: PASS  {name} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
