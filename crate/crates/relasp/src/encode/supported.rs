//! The supported-model encodings.
//!
//! Both encodings revolve around two atom families: `ws(a, p)` ("action
//! `a` is the reason fluent `p` holds") and `dep(p, q)` ("deriving `p`
//! leaned on `q`"). A supported model may justify atoms circularly, so
//! each encoding must rule out circular `dep` choices.
//!
//! [`encode_acyc`] leaves that to the caller: its intended models are
//! the supported models whose `dep` atoms span an acyclic digraph.
//! [`encode_pc`] and [`encode_pd`] compile the acyclicity test into the
//! program using vertex elimination over the static dependency skeleton:
//! fill-in rules derive the transitive shortcut arcs an elimination step
//! would create, and a constraint forbids both arcs of any 2-cycle of
//! the elimination graph. A cycle of chosen `dep` arcs always collapses
//! to such a 2-cycle, so the constraints reject exactly the circular
//! models.

use std::collections::BTreeSet;

use crate::program::{LogicProgram, ProgAtom, Rule};
use crate::strips::RelaxedProblem;
use crate::velim::{eliminate, min_degree_ordering, Digraph, EliminationOrdering, EliminationResult};

use super::action_objective;

/// The static dependency structure of a relaxed problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencySkeleton {
    /// `(p, q)` pairs where some action adds `p` and requires `q`; the
    /// candidate `dep` atoms.
    pub pairs: BTreeSet<(u32, u32)>,
    /// `(action, fluent)` pairs with the fluent in the action's add set;
    /// the candidate `ws` atoms.
    pub supports: BTreeSet<(u32, u32)>,
    /// `pairs` as a digraph over all fluents of the problem.
    pub graph: Digraph,
}

pub fn dependency_skeleton(problem: &RelaxedProblem) -> DependencySkeleton {
    let mut pairs = BTreeSet::new();
    let mut supports = BTreeSet::new();
    for (i, action) in problem.actions.iter().enumerate() {
        for &p in &action.add {
            supports.insert((i as u32, p as u32));
            for &q in &action.pre {
                debug_assert_ne!(p, q, "normalization drops self-supporting adds");
                pairs.insert((p as u32, q as u32));
            }
        }
    }
    let graph = Digraph::from_arcs(
        problem.atoms.len(),
        pairs.iter().map(|&(p, q)| (p as usize, q as usize)),
    );
    DependencySkeleton { pairs, supports, graph }
}

/// The ordering used when the caller has no preference: greedy minimum
/// degree over the dependency skeleton.
pub fn default_ordering(problem: &RelaxedProblem) -> EliminationOrdering {
    min_degree_ordering(&dependency_skeleton(problem).graph)
}

/// Rules shared by [`encode_acyc`] and [`encode_pc`].
fn causal_rules(problem: &RelaxedProblem, skeleton: &DependencySkeleton) -> Vec<Rule> {
    let mut rules = Vec::new();
    for &(p, q) in &skeleton.pairs {
        rules.push(Rule::choice(ProgAtom::Dep(p, q), [ProgAtom::Fluent(q)], []));
    }
    for &(a, p) in &skeleton.supports {
        let pre = &problem.actions[a as usize].pre;
        rules.push(Rule::choice(
            ProgAtom::Support(a, p),
            pre.iter().map(|&q| ProgAtom::Dep(p, q as u32)),
            [],
        ));
    }
    for &(a, p) in &skeleton.supports {
        rules.push(Rule::normal(ProgAtom::Fluent(p), [ProgAtom::Support(a, p)], []));
    }
    for &(a, p) in &skeleton.supports {
        rules.push(Rule::normal(ProgAtom::Action(a), [ProgAtom::Support(a, p)], []));
    }
    for &g in &problem.goal {
        let g = ProgAtom::Fluent(g as u32);
        rules.push(Rule::normal(g, [], [g]));
    }
    rules
}

/// Fill-in derivation rules and 2-cycle constraints for an elimination
/// run over the dependency skeleton.
fn elimination_rules(elim: &EliminationResult) -> Vec<Rule> {
    let mut rules = Vec::new();
    for step in &elim.steps {
        let v = step.vertex as u32;
        for &(p, q) in &step.fill_in {
            let (p, q) = (p as u32, q as u32);
            rules.push(Rule::normal(
                ProgAtom::Dep(p, q),
                [ProgAtom::Dep(p, v), ProgAtom::Dep(v, q)],
                [],
            ));
        }
    }
    for &(p, q) in &elim.two_cycle_pairs {
        let (p, q) = (p as u32, q as u32);
        rules.push(Rule::normal(
            ProgAtom::Sentinel,
            [ProgAtom::Dep(p, q), ProgAtom::Dep(q, p)],
            [ProgAtom::Sentinel],
        ));
    }
    rules
}

/// The causal encoding without compiled-in acyclicity. Evaluate its
/// models under [`Semantics::AcyclicSupported`].
///
/// [`Semantics::AcyclicSupported`]: crate::program::Semantics
pub fn encode_acyc(problem: &RelaxedProblem) -> LogicProgram {
    let skeleton = dependency_skeleton(problem);
    let rules = causal_rules(problem, &skeleton);
    debug_assert_eq!(
        rules.len(),
        skeleton.pairs.len() + 3 * skeleton.supports.len() + problem.goal.len()
    );
    LogicProgram::new(rules, action_objective(problem))
}

/// The causal encoding with vertex-elimination acyclicity, for plain
/// supported model semantics.
pub fn encode_pc(problem: &RelaxedProblem, ordering: &EliminationOrdering) -> LogicProgram {
    let skeleton = dependency_skeleton(problem);
    let elim = eliminate(&skeleton.graph, ordering);
    let mut rules = causal_rules(problem, &skeleton);
    rules.extend(elimination_rules(&elim));

    let fill_rules: usize = elim.steps.iter().map(|s| s.fill_in.len()).sum();
    debug_assert_eq!(
        rules.len(),
        skeleton.pairs.len()
            + 3 * skeleton.supports.len()
            + problem.goal.len()
            + fill_rules
            + elim.two_cycle_pairs.len()
    );
    LogicProgram::new(rules, action_objective(problem))
}

/// The diagnostic encoding, also for plain supported model semantics.
///
/// Instead of deriving fluents from chosen actions, it guesses every
/// fluent up front and then demands an explanation: a fluent without a
/// chosen `ws` atom trips the sentinel constraint. The `dep` atoms are
/// derived (not guessed), and the same elimination rules as in
/// [`encode_pc`] keep them acyclic.
pub fn encode_pd(problem: &RelaxedProblem, ordering: &EliminationOrdering) -> LogicProgram {
    let skeleton = dependency_skeleton(problem);
    let elim = eliminate(&skeleton.graph, ordering);
    let fluents = problem.atoms.len();

    let mut rules = Vec::new();
    for p in 0..fluents {
        rules.push(Rule::choice(ProgAtom::Fluent(p as u32), [], []));
    }
    for &(a, p) in &skeleton.supports {
        rules.push(Rule::choice(ProgAtom::Support(a, p), [ProgAtom::Fluent(p)], []));
    }
    for &(a, p) in &skeleton.supports {
        rules.push(Rule::normal(ProgAtom::Action(a), [ProgAtom::Support(a, p)], []));
    }
    for p in 0..fluents as u32 {
        let adders = skeleton.supports.iter().filter(|&&(_, q)| q == p).map(|&(a, _)| {
            ProgAtom::Support(a, p)
        });
        let neg: Vec<ProgAtom> = adders.chain([ProgAtom::Sentinel]).collect();
        rules.push(Rule::normal(ProgAtom::Sentinel, [ProgAtom::Fluent(p)], neg));
    }
    for (i, action) in problem.actions.iter().enumerate() {
        for &p in &action.add {
            for &q in &action.pre {
                rules.push(Rule::normal(
                    ProgAtom::Dep(p as u32, q as u32),
                    [ProgAtom::Support(i as u32, p as u32)],
                    [],
                ));
            }
        }
    }
    for &(p, q) in &skeleton.pairs {
        rules.push(Rule::normal(ProgAtom::Fluent(q), [ProgAtom::Dep(p, q)], []));
    }
    for &g in &problem.goal {
        let g = ProgAtom::Fluent(g as u32);
        rules.push(Rule::normal(g, [], [g]));
    }
    rules.extend(elimination_rules(&elim));

    let triples: usize =
        problem.actions.iter().map(|a| a.add.len() * a.pre.len()).sum();
    let fill_rules: usize = elim.steps.iter().map(|s| s.fill_in.len()).sum();
    debug_assert_eq!(
        rules.len(),
        2 * fluents
            + 2 * skeleton.supports.len()
            + triples
            + skeleton.pairs.len()
            + problem.goal.len()
            + fill_rules
            + elim.two_cycle_pairs.len()
    );
    LogicProgram::new(rules, action_objective(problem))
}
