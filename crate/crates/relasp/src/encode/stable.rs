//! The stable-model encoding.
//!
//! Per goal atom `g` one constraint `g :- not g` (satisfiable only with
//! `g` true, and `g` gets no support from it), per action `a` one choice
//! rule `{a} :- pre(a)`, and per add effect `p` of `a` one rule
//! `p :- a`. Under stable model semantics the choice of action atoms
//! must derive its own preconditions non-circularly, so the stable
//! models are exactly the images of the action sets that can be ordered
//! into executable goal-achieving sequences: the model for a set `A'`
//! holds `A'` plus everything `A'` adds.

use crate::program::{LogicProgram, ProgAtom, Rule};
use crate::strips::RelaxedProblem;

use super::action_objective;

pub fn encode_p(problem: &RelaxedProblem) -> LogicProgram {
    let fluent = |p: usize| ProgAtom::Fluent(p as u32);
    let mut rules = Vec::new();
    for &g in &problem.goal {
        rules.push(Rule::normal(fluent(g), [], [fluent(g)]));
    }
    for (i, action) in problem.actions.iter().enumerate() {
        rules.push(Rule::choice(
            ProgAtom::Action(i as u32),
            action.pre.iter().map(|&q| fluent(q)),
            [],
        ));
    }
    for (i, action) in problem.actions.iter().enumerate() {
        for &p in &action.add {
            rules.push(Rule::normal(fluent(p), [ProgAtom::Action(i as u32)], []));
        }
    }

    let adds: usize = problem.actions.iter().map(|a| a.add.len()).sum();
    debug_assert_eq!(rules.len(), problem.goal.len() + problem.actions.len() + adds);

    LogicProgram::new(rules, action_objective(problem))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::{
        enumerate_models, EnumerateOptions, Interpretation, RuleKind, Semantics,
    };
    use crate::strips::{parse_problem, relax};
    use ProgAtom::{Action, Fluent};

    fn codep() -> RelaxedProblem {
        relax(
            &parse_problem(
                "atoms: p q\ninit:\ngoal: p\n\
                 action a\n  pre: p\n  add: q\n\
                 action b\n  pre: q\n  add: p\n",
            )
            .unwrap(),
        )
    }

    fn chain() -> RelaxedProblem {
        relax(
            &parse_problem(
                "atoms: p q\ninit:\ngoal: q\n\
                 action a1 cost 1\n  add: p\n\
                 action a2 cost 2\n  pre: p\n  add: q\n",
            )
            .unwrap(),
        )
    }

    #[test]
    fn codep_encodes_to_exactly_five_rules() {
        let program = encode_p(&codep());
        assert_eq!(
            program.rules(),
            &[
                Rule::normal(Fluent(0), [], [Fluent(0)]),
                Rule::choice(Action(0), [Fluent(0)], []),
                Rule::choice(Action(1), [Fluent(1)], []),
                Rule::normal(Fluent(1), [Action(0)], []),
                Rule::normal(Fluent(0), [Action(1)], []),
            ]
        );
        assert_eq!(program.minimize(), &[(Action(0), 1), (Action(1), 1)]);
    }

    #[test]
    fn chain_encodes_goal_then_choices_then_effects() {
        let program = encode_p(&chain());
        assert_eq!(
            program.rules(),
            &[
                Rule::normal(Fluent(1), [], [Fluent(1)]),
                Rule::choice(Action(0), [], []),
                Rule::choice(Action(1), [Fluent(0)], []),
                Rule::normal(Fluent(0), [Action(0)], []),
                Rule::normal(Fluent(1), [Action(1)], []),
            ]
        );
        assert_eq!(program.minimize(), &[(Action(0), 1), (Action(1), 2)]);
    }

    #[test]
    fn chain_has_the_single_expected_stable_model() {
        let program = encode_p(&chain());
        let list =
            enumerate_models(&program, Semantics::Stable, &EnumerateOptions::default()).unwrap();
        assert_eq!(
            list.models,
            vec![Interpretation::new([Fluent(0), Fluent(1), Action(0), Action(1)])]
        );
        assert_eq!(program.model_cost(&list.models[0]), 3);
    }

    #[test]
    fn empty_problem_encodes_to_the_empty_program() {
        let problem = relax(&parse_problem("atoms:\ninit:\ngoal:\n").unwrap());
        let program = encode_p(&problem);
        assert!(program.rules().is_empty());
        assert!(program.minimize().is_empty());
        assert!(program.signature().is_empty());
    }

    #[test]
    fn heads_are_goals_actions_and_effects_exactly() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let shape = crate::generate::InstanceShape::default();
        for _ in 0..40 {
            let problem = crate::generate::random_relaxed(&mut rng, &shape);
            let program = encode_p(&problem);
            let mut expected: std::collections::BTreeSet<ProgAtom> =
                problem.goal.iter().map(|&g| Fluent(g as u32)).collect();
            for (i, action) in problem.actions.iter().enumerate() {
                expected.insert(Action(i as u32));
                expected.extend(action.add.iter().map(|&p| Fluent(p as u32)));
            }
            let heads: std::collections::BTreeSet<ProgAtom> =
                program.rules().iter().map(|r| r.head).collect();
            assert_eq!(heads, expected);
            // Choice rules are exactly the per-action rules.
            let choices =
                program.rules().iter().filter(|r| r.kind == RuleKind::Choice).count();
            assert_eq!(choices, problem.actions.len());
        }
    }
}
