mod common;

use polynet::construct::replay;
use polynet::fixtures::{mixed_rate_rep, three_source_rep};
use polynet::{
    build_network, check_dpn, construct_and_solve, eligible_bases, extract_solution,
    polymatroid_from_solution, verify_solution, DiscretePolymatroid, Policy,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{random_invertible, random_rep, v};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // Bases whose components all fit in phi(b) admit a width-phi(b) solution.
    #[test]
    fn construct_extract_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rep = random_rep(&mut rng, &[2, 3, 5], 4, 4);
        let d = DiscretePolymatroid::from_representation(&rep).unwrap();
        for b in eligible_bases(&d).unwrap() {
            if let Ok(phi) = d.phi(&b) {
                if b.components().iter().any(|&k| k > phi) {
                    continue;
                }
            }
            let s = construct_and_solve(&rep, &b, &Policy::Exhaustive).unwrap();
            let net = &s.construction.network;
            prop_assert!(verify_solution(net, &s.solution).unwrap().is_verified());
            let (back, f) = polymatroid_from_solution(net, &s.solution).unwrap();
            prop_assert!(check_dpn(net, &back, &f, &s.solution.k, s.solution.n).unwrap().is_empty());
        }
    }

    #[test]
    fn extraction_is_basis_free(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rep = polynet::fixtures::three_source_rep_over([2, 3, 5][(seed % 3) as usize]);
        let t = random_invertible(&mut rng, rep.field(), rep.ambient());
        let moved = rep.transform(&t).unwrap();
        let d = DiscretePolymatroid::from_representation(&rep).unwrap();
        let c = build_network(&d, &v(&[1, 1, 1, 0]), &Policy::Exhaustive).unwrap();
        let a = extract_solution(&c.network, &rep, &c.map).unwrap();
        let b = extract_solution(&c.network, &moved, &c.map).unwrap();
        prop_assert!(verify_solution(&c.network, &b).unwrap().is_verified());
        prop_assert_eq!((a.k, a.n), (b.k, b.n));
    }
}

#[test]
fn replay_reproduces_the_construction() {
    for (rep, b) in [
        (three_source_rep(), v(&[1, 1, 1, 0])),
        (mixed_rate_rep(), v(&[2, 1, 1, 0, 0])),
    ] {
        let d = DiscretePolymatroid::from_representation(&rep).unwrap();
        let c = build_network(&d, &b, &Policy::Exhaustive).unwrap();
        assert_eq!(build_network(&d, &b, &Policy::Exhaustive).unwrap(), c);
        assert_eq!(replay(&d, &b, &c.log).unwrap(), c);
    }
}

#[test]
fn solutions_map_back_to_the_network() {
    let s =
        construct_and_solve(&mixed_rate_rep(), &v(&[2, 1, 1, 0, 0]), &Policy::Exhaustive).unwrap();
    let net = &s.construction.network;
    let (back, f) = polymatroid_from_solution(net, &s.solution).unwrap();
    assert_eq!(back.len(), net.edge_ids().count());
    let again = extract_solution(net, &back, &f).unwrap();
    assert!(verify_solution(net, &again).unwrap().is_verified());
}

#[test]
fn wrong_dimensions_are_reported() {
    let s =
        construct_and_solve(&three_source_rep(), &v(&[1, 1, 1, 0]), &Policy::Exhaustive).unwrap();
    let net = &s.construction.network;
    let (back, f) = polymatroid_from_solution(net, &s.solution).unwrap();
    assert!(!check_dpn(net, &back, &f, &[1, 1, 1], 1).unwrap().is_empty());
}
