//! Solvers for the Distinct Vectors problem — select at most `k` columns of a
//! binary matrix so that all rows stay pairwise distinct — plus a
//! satisfiability-preserving builder that turns 3-CNF formulas into Distinct
//! Vectors instances, with encoders/decoders mapping solutions back and forth.
//!
//! The crate is organized around five modules:
//!
//! * [`bitmatrix`] — bit-packed binary matrices, column sets, and the instance
//!   and solution text formats.
//! * [`cnf`] — 3-CNF formulas, DIMACS I/O, assignment evaluation, and a
//!   brute-force satisfiability oracle.
//! * [`solver`] — exact branch-and-bound, exhaustive brute force, and a greedy
//!   heuristic for Distinct Vectors.
//! * [`reduction`] — the 3-CNF → Distinct Vectors construction, solution
//!   encoding/decoding, and exact size accounting.
//! * [`harness`] — seeded random generators, the SAT-vs-solver equivalence
//!   campaign, and a benchmark runner.

pub mod bitmatrix;
pub mod cnf;
pub mod harness;
pub mod reduction;
pub mod solver;

mod error;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
