//! Optimal delete-free planning via ground logic programs.
//!
//! The pipeline: parse a grounded STRIPS problem, build its delete
//! relaxation, and compile the relaxation into one of three ground
//! programs whose optimal models have cost h+ (the optimal relaxed plan
//! cost):
//!
//! * `p` - a choice-rule program evaluated under stable model semantics,
//! * `pc` - a causal program evaluated under supported model semantics,
//!   kept acyclic by vertex-elimination constraints,
//! * `pd` - a diagnostic variant of `pc` that guesses state atoms first
//!   and justifies them afterwards.
//!
//! The crate also carries the machinery needed to check those claims
//! without an external solver: exhaustive model enumeration for all three
//! semantics, a brute-force planning oracle, seeded instance generation,
//! and serializers for the text and smodels program formats.

pub mod emit;
pub mod encode;
pub mod generate;
pub mod oracle;
pub mod program;
pub mod strips;
pub mod velim;
pub mod verify;

pub use program::{Interpretation, LogicProgram, ProgAtom, Rule, RuleKind, Semantics};
pub use strips::{Action, Atom, RelaxedProblem, StripsProblem};
