//! Small reference objects used by tests, benches and the CLI golden files.

use crate::linalg::{Field, Mat};
use crate::polymatroid::Representation;

fn rep(q: u32, ambient: usize, gens: &[&[&[i64]]]) -> Representation {
    let field = Field::new(q).expect("prime");
    let gens = gens
        .iter()
        .map(|rows| Mat::from_rows(field, rows).expect("valid generator"))
        .collect();
    Representation::new(field, ambient, gens).expect("consistent shapes")
}

/// Three unit source subspaces `e1, e2, e3` of `F_2^3` and a fourth,
/// two-dimensional subspace spanned by `(1,0,0)` and `(0,1,1)`.
///
/// Rank 3, `rho_max` 2. Building a network from the basis `(1,1,1,0)`
/// gives a network that is solvable with three unit messages over
/// two-dimensional edges but has no scalar solution.
pub fn three_source_rep() -> Representation {
    three_source_rep_over(2)
}

pub fn three_source_rep_over(q: u32) -> Representation {
    rep(
        q,
        3,
        &[
            &[&[1], &[0], &[0]],
            &[&[0], &[1], &[0]],
            &[&[0], &[0], &[1]],
            &[&[1, 0], &[0, 1], &[0, 1]],
        ],
    )
}

/// Five subspaces of `F_2^4`: a two-dimensional source `e1, e2`, unit
/// sources `e3` and `e4`, and two two-dimensional coding subspaces.
///
/// Building a network from the basis `(2,1,1,0,0)` gives a network whose
/// best symmetric rate is 1/2 while unequal message sizes reach 2/3.
pub fn mixed_rate_rep() -> Representation {
    mixed_rate_rep_over(2)
}

pub fn mixed_rate_rep_over(q: u32) -> Representation {
    rep(
        q,
        4,
        &[
            &[&[1, 0], &[0, 1], &[0, 0], &[0, 0]],
            &[&[0], &[0], &[1], &[0]],
            &[&[0], &[0], &[0], &[1]],
            &[&[1, 1], &[1, 0], &[1, 1], &[1, 0]],
            &[&[0, 0], &[0, 1], &[0, 1], &[1, 0]],
        ],
    )
}
