//! A workbench for two-player game algebras.
//!
//! The crate parses game terms and recursive specifications, normalizes
//! closed terms to basic form with an audited strongly-normalizing rewrite
//! system, generates labeled transition systems from structural operational
//! rules, decides strong, weak, and branching equivalence, evaluates the
//! BAG fragment on finite game boards, and applies and verifies the cluster
//! fair abstraction rule.
//!
//! The `book/` directory of the repository walks through each of these
//! pieces; its code snippets compile and run as part of `cargo test`.

pub mod lpo;
pub mod parse;
pub mod rewrite;
pub mod spec;
pub mod term;

pub use parse::{parse_specs, parse_term, ParseError};
pub use rewrite::{eq_by_normal_form, normalize, rewrite_trace, RewriteTrace};
pub use spec::{classify_spec, Classification, LinearBody, Literal, RecSpec, SpecEnv, Summand};
pub use term::{AtomId, GameTerm, Player, SpecId, System, VarId};
