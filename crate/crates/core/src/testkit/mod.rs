//! Proof producers and semantic oracles for tests and benchmarks.

pub mod gen;
pub mod oracle;
pub mod solver;

pub use gen::{gen_php, gen_random, gen_random_widths, gen_rat_proof};
pub use oracle::{brute_force, entails, naive_propagate, naive_rat, naive_rup, NaiveOutcome, Satisfiability};
pub use solver::{cdcl_solve, SolveResult, SolveStats, SolveStatus};
