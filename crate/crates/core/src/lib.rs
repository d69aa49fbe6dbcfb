//! Checking and transforming clausal unsatisfiability proofs.
//!
//! Supported proof systems are DRAT (text and binary), LRAT and extended resolution
//! (ER). The crate provides parsers and writers for all of them, a watched-literal
//! propagation engine, checkers for each format, and a pipeline that trims a DRAT
//! proof to its core, emits LRAT and translates to ER. The [`testkit`] module holds
//! a small proof-logging CDCL solver, formula generators and brute-force oracles.
//!
//! ```
//! use dratkit::{check_drat, parse_dimacs, parse_drat, CheckMode};
//!
//! let cnf = parse_dimacs(b"p cnf 2 4\n1 2 0\n-1 2 0\n1 -2 0\n-1 -2 0\n").unwrap();
//! let proof = parse_drat(b"1 0\n0\n", None).unwrap();
//! assert!(check_drat(&cnf.formula, &proof, CheckMode::default()).is_verified());
//! ```

pub mod checkers;
pub mod cnf;
pub mod error;
pub mod formats;
pub mod pipeline;
pub mod propagate;
pub mod testkit;

pub use checkers::{
    check_drat, check_er, check_lrat, CheckMode, CheckReport, ErChecker, Flavor, RejectReason,
    Verdict,
};
pub use cnf::{resolve, Clause, ClauseId, Formula, Lit, Normalized, Var};
pub use error::{Error, Result};
pub use formats::{
    parse_dimacs, parse_drat, parse_er, parse_lrat, write_dimacs, write_drat_binary,
    write_drat_text, write_er, write_lrat, ErStep, HintBlock, LratStep, ProofStep, RatGroup,
};
pub use propagate::{Engine, PivotPolicy};
