//! Feedback vertex set in tournaments.
//!
//! The crate is organised bottom-up:
//!
//! * [`tournament`] holds the bit-matrix tournament type, triangle
//!   enumeration, acyclicity checks, canonical forms and seeded generation.
//! * [`structure`] has the structural predicates used by the layering
//!   algorithm: diagonals, heavy/light triangles, BFS in-layers,
//!   2-in-domination and the `T5`/`T7` family census.
//! * [`lp`] builds the basic triangle relaxation and its one-round
//!   Sherali–Adams lift, and solves them with a bounded revised simplex.
//! * [`solvers`] contains the exact branch-and-bound oracle, the CDZ exact
//!   solver for `T5`-free tournaments, the local-ratio 3-approximation, the
//!   layering algorithm and the full 7/3-approximation pipeline.
//! * [`io`] reads and writes the instance text format and JSON run reports.

pub mod io;
pub mod lp;
pub mod solvers;
pub mod structure;
pub mod tournament;
pub mod weight;

pub use lp::{LpConfig, LpModel, LpSolution, LpStatus, SolveMode, Tolerances};
pub use solvers::{FvsSolution, LayeringTrace, RoundingTrace, SolveError};
pub use structure::FamilyCensus;
pub use tournament::{
    CanonicalForm, Tournament, TournamentError, Triangle, VertexSet, WeightedTournament,
};
pub use weight::Weight;
