//! Discrete polymatroids over prime fields and their correspondence with
//! linear fractional network codes.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: exact linear algebra over `F_p`.
//! - [`vector`] and [`polymatroid`]: integer vectors, rank functions,
//!   membership, bases, excluded vectors and the `C_i` sets.
//! - [`matroid`]: matroids and their embedding as discrete polymatroids.
//! - [`network`]: acyclic coding networks with heterogeneous message sizes.
//! - [`codec`]: fractional network code solutions and their verification.
//! - [`bridge`]: the polymatroidal-network conditions, extraction of a code
//!   from a representation, and the converse.
//! - [`construct`]: building networks from a polymatroid and a basis vector.
//! - [`search`]: bounded exhaustive search for linear solutions.
//! - [`io`]: the JSON file formats.

#![allow(clippy::needless_range_loop)]

pub mod bridge;
pub mod codec;
pub mod construct;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod linalg;
pub mod matroid;
pub mod network;
pub mod polymatroid;
pub mod search;
pub mod vector;

pub use bridge::{
    check_dpn, extract_solution, polymatroid_from_solution, DpnViolation, PolymatroidMap,
};
pub use codec::{rates, selector, verify_solution, FncSolution, RateReport, Verification};
pub use construct::{build_network, construct_and_solve, eligible_bases, Construction, Policy};
pub use error::{Error, Result};
pub use linalg::{Field, Mat};
pub use matroid::Matroid;
pub use network::{EdgeOrder, Network};
pub use polymatroid::{
    validate_exchange, AxiomViolation, DiscretePolymatroid, RankOracle, Representation,
};
pub use search::{
    best_average_rate, max_symmetric_rate, search_linear, SearchOptions, SearchOutcome, Verdict,
};
pub use vector::{IntVector, Subset};
