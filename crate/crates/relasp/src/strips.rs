//! Grounded STRIPS problems, delete relaxation, and reachability.

use std::collections::BTreeSet;
use std::fmt;

pub mod parse;

pub use parse::{parse_problem, ParseError};

/// A Boolean state variable. Atoms are referenced by their dense index
/// into the owning problem's atom table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub name: String,
    pub index: usize,
}

/// A grounded action. The pre/add/del sets hold atom indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub name: String,
    pub pre: BTreeSet<usize>,
    pub add: BTreeSet<usize>,
    pub del: BTreeSet<usize>,
    pub cost: u32,
}

/// A grounded STRIPS planning problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StripsProblem {
    pub atoms: Vec<Atom>,
    pub init: BTreeSet<usize>,
    pub goal: BTreeSet<usize>,
    pub actions: Vec<Action>,
}

/// Maps atoms and actions of a relaxed problem back to the problem it
/// was derived from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    /// Relaxed atom index -> original atom index.
    pub atom_source: Vec<usize>,
    /// Relaxed action index -> original action index.
    pub action_source: Vec<usize>,
}

/// The delete relaxation of a [`StripsProblem`], normalized to an empty
/// initial state.
///
/// Invariants established by [`relax`]: every delete set is empty, no
/// atom of the original initial state survives anywhere, and no action
/// adds one of its own preconditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelaxedProblem {
    pub atoms: Vec<Atom>,
    pub goal: BTreeSet<usize>,
    pub actions: Vec<Action>,
    pub provenance: Provenance,
}

impl StripsProblem {
    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a.name == name)
    }

    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a.name == name)
    }
}

impl RelaxedProblem {
    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a.name == name)
    }

    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a.name == name)
    }

    pub fn atom_name(&self, index: usize) -> &str {
        &self.atoms[index].name
    }

    pub fn action_name(&self, index: usize) -> &str {
        &self.actions[index].name
    }

    /// Re-wraps the relaxation as a plain problem with an empty initial
    /// state, dropping provenance.
    pub fn to_strips(&self) -> StripsProblem {
        StripsProblem {
            atoms: self.atoms.clone(),
            init: BTreeSet::new(),
            goal: self.goal.clone(),
            actions: self.actions.clone(),
        }
    }
}

/// Builds the delete relaxation of `problem`, normalized to an empty
/// initial state.
///
/// Delete sets are discarded. Atoms of the initial state are removed
/// from the goal and from every precondition and add set; since nothing
/// adds them afterwards they are dropped from the atom table entirely
/// and the remaining atoms are re-indexed densely. Adds that repeat one
/// of the action's own preconditions are dropped as redundant: under an
/// empty initial state such an add can never fire first, so it carries
/// no information. Actions are all retained, even when normalization
/// leaves them with no effects.
pub fn relax(problem: &StripsProblem) -> RelaxedProblem {
    let mut remap = vec![usize::MAX; problem.atoms.len()];
    let mut atoms = Vec::new();
    let mut atom_source = Vec::new();
    for atom in &problem.atoms {
        if !problem.init.contains(&atom.index) {
            remap[atom.index] = atoms.len();
            atoms.push(Atom {
                name: atom.name.clone(),
                index: atoms.len(),
            });
            atom_source.push(atom.index);
        }
    }

    let keep = |i: &usize| !problem.init.contains(i);
    let goal = problem.goal.iter().filter(|i| keep(i)).map(|&i| remap[i]).collect();

    let mut actions = Vec::new();
    for action in &problem.actions {
        let pre: BTreeSet<usize> =
            action.pre.iter().filter(|i| keep(i)).map(|&i| remap[i]).collect();
        let add: BTreeSet<usize> = action
            .add
            .iter()
            .filter(|i| keep(i))
            .map(|&i| remap[i])
            .filter(|i| !pre.contains(i))
            .collect();
        actions.push(Action {
            name: action.name.clone(),
            pre,
            add,
            del: BTreeSet::new(),
            cost: action.cost,
        });
    }

    RelaxedProblem {
        atoms,
        goal,
        actions,
        provenance: Provenance {
            atom_source,
            action_source: (0..problem.actions.len()).collect(),
        },
    }
}

/// The set of atoms reachable from the empty state by applying actions
/// of the relaxation until a fixpoint.
pub fn reachable_atoms(problem: &RelaxedProblem) -> BTreeSet<usize> {
    let mut reached = BTreeSet::new();
    let mut applied = vec![false; problem.actions.len()];
    loop {
        let mut changed = false;
        for (i, action) in problem.actions.iter().enumerate() {
            if !applied[i] && action.pre.iter().all(|p| reached.contains(p)) {
                applied[i] = true;
                for &p in &action.add {
                    changed |= reached.insert(p);
                }
            }
        }
        if !changed {
            return reached;
        }
    }
}

/// True when every goal atom is reachable, i.e. when the relaxation has
/// a plan at all.
pub fn is_solvable(problem: &RelaxedProblem) -> bool {
    let reached = reachable_atoms(problem);
    problem.goal.iter().all(|g| reached.contains(g))
}

fn write_atom_set(
    f: &mut fmt::Formatter<'_>,
    label: &str,
    set: &BTreeSet<usize>,
    atoms: &[Atom],
) -> fmt::Result {
    write!(f, "{label}")?;
    for &i in set {
        write!(f, " {}", atoms[i].name)?;
    }
    writeln!(f)
}

fn write_actions(f: &mut fmt::Formatter<'_>, actions: &[Action], atoms: &[Atom]) -> fmt::Result {
    for action in actions {
        writeln!(f, "action {} cost {}", action.name, action.cost)?;
        if !action.pre.is_empty() {
            write_atom_set(f, "  pre:", &action.pre, atoms)?;
        }
        if !action.add.is_empty() {
            write_atom_set(f, "  add:", &action.add, atoms)?;
        }
        if !action.del.is_empty() {
            write_atom_set(f, "  del:", &action.del, atoms)?;
        }
    }
    Ok(())
}

/// Renders the problem in the same text format [`parse_problem`] reads,
/// so problems round-trip through their printed form.
impl fmt::Display for StripsProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "atoms:")?;
        for atom in &self.atoms {
            write!(f, " {}", atom.name)?;
        }
        writeln!(f)?;
        write_atom_set(f, "init:", &self.init, &self.atoms)?;
        write_atom_set(f, "goal:", &self.goal, &self.atoms)?;
        write_actions(f, &self.actions, &self.atoms)
    }
}

impl fmt::Display for RelaxedProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "atoms:")?;
        for atom in &self.atoms {
            write!(f, " {}", atom.name)?;
        }
        writeln!(f)?;
        writeln!(f, "init:")?;
        write_atom_set(f, "goal:", &self.goal, &self.atoms)?;
        write_actions(f, &self.actions, &self.atoms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[usize]) -> BTreeSet<usize> {
        items.iter().copied().collect()
    }

    /// Two actions feeding each other's preconditions; nothing reachable
    /// from the empty state.
    pub(crate) fn codep() -> StripsProblem {
        parse::parse_problem(
            "atoms: p q\ninit:\ngoal: p\n\
             action a\n  pre: p\n  add: q\n\
             action b\n  pre: q\n  add: p\n",
        )
        .unwrap()
    }

    fn chain() -> StripsProblem {
        parse::parse_problem(
            "atoms: p q\ninit:\ngoal: q\n\
             action a1 cost 1\n  add: p\n\
             action a2 cost 2\n  pre: p\n  add: q\n",
        )
        .unwrap()
    }

    #[test]
    fn relax_strips_init_from_goal_and_conditions() {
        let problem = parse_problem(
            "atoms: p q r\ninit: p\ngoal: p q\n\
             action a\n  pre: p r\n  add: q\n  del: r\n",
        )
        .unwrap();
        let relaxed = relax(&problem);
        // p disappears entirely: from the atom table, the goal, and the
        // precondition of a.
        assert_eq!(relaxed.atoms.len(), 2);
        assert_eq!(relaxed.atom_name(0), "q");
        assert_eq!(relaxed.atom_name(1), "r");
        assert_eq!(relaxed.goal, set(&[0]));
        assert_eq!(relaxed.actions[0].pre, set(&[1]));
        assert_eq!(relaxed.actions[0].add, set(&[0]));
        assert!(relaxed.actions[0].del.is_empty());
        assert_eq!(relaxed.provenance.atom_source, vec![1, 2]);
    }

    #[test]
    fn relax_keeps_codep_intact() {
        let problem = codep();
        let relaxed = relax(&problem);
        assert_eq!(relaxed.atoms.len(), 2);
        assert_eq!(relaxed.goal, set(&[0]));
        assert_eq!(relaxed.actions[0].pre, set(&[0]));
        assert_eq!(relaxed.actions[0].add, set(&[1]));
        assert_eq!(relaxed.actions[1].pre, set(&[1]));
        assert_eq!(relaxed.actions[1].add, set(&[0]));
    }

    #[test]
    fn relax_retains_action_whose_adds_all_came_from_init() {
        let problem = parse_problem(
            "atoms: p q\ninit: p\ngoal:\n\
             action a\n  add: p\n\
             action b\n  pre: q\n  add: p\n",
        )
        .unwrap();
        let relaxed = relax(&problem);
        assert_eq!(relaxed.actions.len(), 2);
        assert!(relaxed.actions[0].add.is_empty());
        assert!(relaxed.actions[0].pre.is_empty());
        assert!(relaxed.actions[1].add.is_empty());
        assert_eq!(relaxed.actions[1].pre, set(&[0]));
    }

    #[test]
    fn relax_drops_self_supporting_adds() {
        let problem = parse_problem(
            "atoms: p q\ninit:\ngoal: q\n\
             action a\n  pre: p\n  add: p q\n",
        )
        .unwrap();
        let relaxed = relax(&problem);
        assert_eq!(relaxed.actions[0].pre, set(&[0]));
        assert_eq!(relaxed.actions[0].add, set(&[1]));
    }

    #[test]
    fn relax_is_idempotent() {
        for problem in [codep(), chain()] {
            let once = relax(&problem);
            let twice = relax(&once.to_strips());
            assert_eq!(once.atoms, twice.atoms);
            assert_eq!(once.goal, twice.goal);
            assert_eq!(once.actions, twice.actions);
        }
    }

    #[test]
    fn reachable_atoms_of_codep_is_empty() {
        assert_eq!(reachable_atoms(&relax(&codep())), BTreeSet::new());
        assert!(!is_solvable(&relax(&codep())));
    }

    #[test]
    fn reachable_atoms_of_chain_is_everything() {
        assert_eq!(reachable_atoms(&relax(&chain())), set(&[0, 1]));
        assert!(is_solvable(&relax(&chain())));
    }

    #[test]
    fn no_actions_reaches_nothing() {
        let problem = parse_problem("atoms: p\ninit:\ngoal:\n").unwrap();
        let relaxed = relax(&problem);
        assert_eq!(reachable_atoms(&relaxed), BTreeSet::new());
        // An empty goal is satisfied by the empty plan.
        assert!(is_solvable(&relaxed));
    }

    #[test]
    fn reachability_is_monotone_in_the_action_set() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let shape = crate::generate::InstanceShape::default();
        for _ in 0..50 {
            let problem = crate::generate::random_problem(&mut rng, &shape);
            let relaxed = relax(&problem);
            if relaxed.actions.is_empty() {
                continue;
            }
            let full = reachable_atoms(&relaxed);
            let mut smaller = relaxed.clone();
            smaller.actions.pop();
            smaller.provenance.action_source.pop();
            let reduced = reachable_atoms(&smaller);
            assert!(
                reduced.is_subset(&full),
                "dropping an action must not grow the reachable set"
            );
        }
    }

    #[test]
    fn display_round_trips() {
        for problem in [codep(), chain()] {
            let printed = problem.to_string();
            let reparsed = parse_problem(&printed).unwrap();
            assert_eq!(problem, reparsed);
        }
    }
}
