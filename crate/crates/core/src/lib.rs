//! Exact cover pebbling toolkit.
//!
//! * [`graphs`]: graph families, products, edge-list input and hypercube
//!   symmetry.
//! * [`pebbling`]: configurations, moves and their verification.
//! * [`decider`]: exact coverability and reachability search.
//! * [`cube_strategist`]: constructive cover strategies on hypercubes.
//! * [`numbers`]: the invariants `gamma`, `pi`, `rho` and conjecture checks.
//! * [`cli`]: the `pebblecover` command-line front end.

pub mod cli;
pub mod cube_strategist;
pub mod decider;
pub mod error;
pub mod graphs;
pub mod numbers;
pub mod pebbling;

pub use error::{Error, Result};
