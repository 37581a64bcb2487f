#![allow(dead_code)]

use polynet::construct::Construction;
use polynet::fixtures::{mixed_rate_rep, three_source_rep};
use polynet::{build_network, DiscretePolymatroid, Field, IntVector, Mat, Policy, Representation};
use rand::Rng;

pub fn v(c: &[u32]) -> IntVector {
    IntVector::new(c.to_vec())
}

/// Network built from the three-source polymatroid at `(1,1,1,0)`.
pub fn three_source_net() -> Construction {
    let d = DiscretePolymatroid::from_representation(&three_source_rep()).unwrap();
    build_network(&d, &v(&[1, 1, 1, 0]), &Policy::Exhaustive).unwrap()
}

/// Network built from the mixed-rate polymatroid at `(2,1,1,0,0)`.
pub fn mixed_rate_net() -> Construction {
    let d = DiscretePolymatroid::from_representation(&mixed_rate_rep()).unwrap();
    build_network(&d, &v(&[2, 1, 1, 0, 0]), &Policy::Exhaustive).unwrap()
}

/// Uniformly random generators: `r` in `1..=max_r`, ambient in
/// `1..=max_ambient`, one or two columns each.
pub fn random_rep(
    rng: &mut impl Rng,
    primes: &[u32],
    max_r: usize,
    max_ambient: usize,
) -> Representation {
    let q = primes[rng.gen_range(0..primes.len())];
    let field = Field::new(q).unwrap();
    let r = rng.gen_range(1..=max_r);
    let ambient = rng.gen_range(1..=max_ambient);
    let gens = (0..r)
        .map(|_| {
            let cols = rng.gen_range(1..=2);
            Mat::from_fn(field, ambient, cols, |_, _| rng.gen_range(0..q) as i64)
        })
        .collect();
    Representation::new(field, ambient, gens).unwrap()
}

pub fn random_invertible(rng: &mut impl Rng, field: Field, n: usize) -> Mat {
    loop {
        let m = Mat::from_fn(field, n, n, |_, _| rng.gen_range(0..field.modulus()) as i64);
        if m.rank() == n {
            return m;
        }
    }
}
