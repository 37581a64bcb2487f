mod common;

use polynet::io::{parse_json, to_json, PolymatroidInput};
use polynet::{validate_exchange, DiscretePolymatroid, Matroid, Representation, Subset};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{random_invertible, random_rep};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn representable_functions_are_polymatroids(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rep = random_rep(&mut rng, &[2, 3, 5], 5, 4);
        let d = DiscretePolymatroid::from_representation(&rep).unwrap();
        prop_assert!(d.validate_axioms().is_empty());
        let members = d.members().unwrap();
        prop_assert_eq!(validate_exchange(&members).unwrap(), true);
        let top = d.rank_of() as u64;
        prop_assert!(d.bases().unwrap().iter().all(|b| b.weight() == top));
    }

    #[test]
    fn rank_table_survives_invertible_transform(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rep = random_rep(&mut rng, &[2, 3, 5], 5, 4);
        let t = random_invertible(&mut rng, rep.field(), rep.ambient());
        let a = DiscretePolymatroid::from_representation(&rep).unwrap();
        let b = DiscretePolymatroid::from_representation(&rep.transform(&t).unwrap()).unwrap();
        prop_assert_eq!(a.rank_table(), b.rank_table());
    }

    #[test]
    fn c_sets_are_excluded_and_minimal(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rep = random_rep(&mut rng, &[2, 3], 4, 3);
        let d = DiscretePolymatroid::from_representation(&rep).unwrap();
        for i in 0..d.ground_set_size() {
            for c in d.c_set(i).unwrap() {
                prop_assert!(!d.contains(&c));
                let below = c.minus_unit(i).unwrap();
                prop_assert!(d.contains(&below));
            }
        }
    }

    #[test]
    fn serialization_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rep = random_rep(&mut rng, &[2, 3, 5], 5, 4);
        let back: Representation = parse_json(&to_json(&rep), "representation").unwrap();
        prop_assert_eq!(&back, &rep);
        let d = DiscretePolymatroid::from_representation(&rep).unwrap();
        let d_back = parse_json::<PolymatroidInput>(&to_json(&d), "polymatroid").unwrap().polymatroid().unwrap();
        prop_assert_eq!(d_back, d);
    }
}

#[test]
fn matroid_polymatroid_round_trip() {
    for m in [
        Matroid::uniform(2, 3).unwrap(),
        Matroid::uniform(1, 4).unwrap(),
        Matroid::free(3).unwrap(),
    ] {
        let d = m.to_polymatroid().unwrap();
        let members = d.members().unwrap();
        let supports: Vec<Subset> = members.iter().map(|u| u.support()).collect();
        assert!(members
            .iter()
            .all(|u| u.components().iter().all(|&c| c <= 1)));
        let mut independent: Vec<Subset> = m.independent_sets().collect();
        independent.sort();
        let mut supports = supports;
        supports.sort();
        assert_eq!(supports, independent);
        let back: Matroid = parse_json(&to_json(&m), "matroid").unwrap();
        assert_eq!(back, m);
    }
}

#[test]
fn rank_table_rejects_bad_monotonicity() {
    let d = DiscretePolymatroid::from_rank_table(2, vec![0, 2, 1, 1]).unwrap();
    assert!(!d.validate_axioms().is_empty());
}
