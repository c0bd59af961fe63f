//! Compilers from relaxed problems to ground logic programs.
//!
//! All encoders share the objective: the action atoms, weighted by
//! action cost, so the cost of a model is the cost of the action set it
//! selects. They differ in which semantics makes their models coincide
//! with the executable goal-achieving action sets:
//!
//! * [`stable::encode_p`]: stable models;
//! * [`supported::encode_acyc`]: supported models whose `dep` atoms stay
//!   acyclic (the acyclicity is checked outside the program);
//! * [`supported::encode_pc`], [`supported::encode_pd`]: plain supported
//!   models, with acyclicity compiled in through vertex elimination.

use crate::program::ProgAtom;
use crate::strips::RelaxedProblem;

pub mod stable;
pub mod supported;

pub use stable::encode_p;
pub use supported::{
    dependency_skeleton, default_ordering, encode_acyc, encode_pc, encode_pd, DependencySkeleton,
};

/// One weighted objective entry per action, in action order.
fn action_objective(problem: &RelaxedProblem) -> Vec<(ProgAtom, u64)> {
    problem
        .actions
        .iter()
        .enumerate()
        .map(|(i, a)| (ProgAtom::Action(i as u32), u64::from(a.cost)))
        .collect()
}
