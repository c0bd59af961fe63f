//! Seeded random instance generation for property tests and sweep
//! campaigns.
//!
//! Generated problems have an empty initial state, every action adds at
//! least one atom, and no action adds one of its own preconditions, so
//! the delete relaxation keeps every action effective. Delete sets are
//! still populated at random to exercise the relaxation itself.

use std::collections::BTreeSet;

use rand::seq::index;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::encode::dependency_skeleton;
use crate::strips::{relax, Action, Atom, RelaxedProblem, StripsProblem};
use crate::velim::{eliminate, min_degree_ordering, EliminationOrdering};

/// Size limits for generated instances.
#[derive(Debug, Clone)]
pub struct InstanceShape {
    pub max_atoms: usize,
    pub max_actions: usize,
    pub max_cost: u32,
    pub max_pre: usize,
    pub max_add: usize,
    pub max_goals: usize,
    /// Ceiling on the signature of the instance's largest encoding,
    /// counting the fill-in arcs of both standard elimination orderings.
    /// [`random_relaxed`] rejects instances above it so exhaustive model
    /// enumeration stays affordable.
    pub max_encoding_atoms: usize,
}

impl Default for InstanceShape {
    fn default() -> Self {
        InstanceShape {
            max_atoms: 6,
            max_actions: 6,
            max_cost: 3,
            max_pre: 2,
            max_add: 2,
            max_goals: 2,
            max_encoding_atoms: 18,
        }
    }
}

pub fn random_problem(rng: &mut impl Rng, shape: &InstanceShape) -> StripsProblem {
    let n_atoms = rng.gen_range(1..=shape.max_atoms.max(1));
    let atoms = (0..n_atoms)
        .map(|i| Atom { name: format!("p{i}"), index: i })
        .collect();
    let n_actions = rng.gen_range(0..=shape.max_actions);
    let mut actions = Vec::with_capacity(n_actions);
    for i in 0..n_actions {
        let add_size = rng.gen_range(1..=shape.max_add.min(n_atoms).max(1));
        let add: BTreeSet<usize> =
            index::sample(rng, n_atoms, add_size).into_iter().collect();
        let rest: Vec<usize> = (0..n_atoms).filter(|p| !add.contains(p)).collect();
        let pre_size = rng.gen_range(0..=shape.max_pre.min(rest.len()));
        let pre: BTreeSet<usize> =
            rest.choose_multiple(rng, pre_size).copied().collect();
        let del: BTreeSet<usize> = (0..n_atoms).filter(|_| rng.gen_bool(0.2)).collect();
        let cost = rng.gen_range(0..=shape.max_cost);
        actions.push(Action { name: format!("a{i}"), pre, add, del, cost });
    }
    let goal_size = rng.gen_range(0..=shape.max_goals.min(n_atoms));
    let goal = index::sample(rng, n_atoms, goal_size).into_iter().collect();
    StripsProblem { atoms, init: BTreeSet::new(), goal, actions }
}

/// Draws relaxed problems until one fits `shape.max_encoding_atoms`.
pub fn random_relaxed(rng: &mut impl Rng, shape: &InstanceShape) -> RelaxedProblem {
    loop {
        let relaxed = relax(&random_problem(rng, shape));
        if encoding_atom_bound(&relaxed) <= shape.max_encoding_atoms {
            return relaxed;
        }
    }
}

/// Upper bound on the signature size of any encoding of `problem`:
/// fluents, actions, support atoms, dependency atoms (skeleton arcs plus
/// fill-ins of both standard orderings), and the sentinel.
pub fn encoding_atom_bound(problem: &RelaxedProblem) -> usize {
    let skeleton = dependency_skeleton(problem);
    let mut deps = skeleton.pairs.clone();
    for ordering in [
        min_degree_ordering(&skeleton.graph),
        EliminationOrdering::input_order(problem.atoms.len()),
    ] {
        let elim = eliminate(&skeleton.graph, &ordering);
        deps.extend(elim.fill_in.iter().map(|&(p, q)| (p as u32, q as u32)));
    }
    problem.atoms.len() + problem.actions.len() + skeleton.supports.len() + deps.len() + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_problems_respect_the_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let shape = InstanceShape::default();
        for _ in 0..100 {
            let problem = random_problem(&mut rng, &shape);
            assert!(!problem.atoms.is_empty());
            assert!(problem.atoms.len() <= shape.max_atoms);
            assert!(problem.actions.len() <= shape.max_actions);
            assert!(problem.init.is_empty());
            assert!(problem.goal.len() <= shape.max_goals);
            for action in &problem.actions {
                assert!(!action.add.is_empty());
                assert!(action.add.len() <= shape.max_add);
                assert!(action.pre.len() <= shape.max_pre);
                assert!(action.pre.is_disjoint(&action.add));
                assert!(action.cost <= shape.max_cost);
            }
        }
    }

    #[test]
    fn relaxed_instances_fit_the_enumeration_budget() {
        use crate::encode::{default_ordering, encode_pd};

        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let shape = InstanceShape::default();
        for _ in 0..50 {
            let problem = random_relaxed(&mut rng, &shape);
            assert!(encoding_atom_bound(&problem) <= shape.max_encoding_atoms);
            for action in &problem.actions {
                assert!(!action.add.is_empty(), "relaxation must keep actions effective");
            }
            for ordering in [
                default_ordering(&problem),
                EliminationOrdering::input_order(problem.atoms.len()),
            ] {
                let program = encode_pd(&problem, &ordering);
                assert!(program.signature().len() <= shape.max_encoding_atoms);
            }
        }
    }

    #[test]
    fn generation_is_deterministic_for_a_seed() {
        let shape = InstanceShape::default();
        let mut a = ChaCha8Rng::seed_from_u64(99);
        let mut b = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..10 {
            assert_eq!(random_problem(&mut a, &shape), random_problem(&mut b, &shape));
        }
    }
}
