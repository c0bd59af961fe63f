//! Ground logic programs built from normal and choice rules, plus the
//! model semantics the encoders are verified against.
//!
//! A normal rule `h :- b1, .., bn, not c1, .., not cm` forces its head
//! whenever its body holds; a choice rule `{h} :- body` merely permits
//! the head. Three notions of model matter here:
//!
//! * classical: every normal rule with a satisfied body has a true head;
//! * supported: classical, and every true atom is the head of some rule
//!   whose body holds (for choice rules the head must also be true);
//! * stable: the interpretation reproduces itself as the least model of
//!   its reduct.
//!
//! Every stable model is supported; the converse fails (`a :- a` has the
//! supported model `{a}` which is not stable).

use std::collections::BTreeMap;
use std::collections::BTreeSet;

pub mod enumerate;

pub use enumerate::{enumerate_models, EnumerateError, EnumerateOptions, ModelList, Semantics};

/// Structured identity of a program atom. The numeric payloads index
/// into the relaxed problem the program was encoded from.
///
/// The variant order fixes the atom numbering of a program: state atoms
/// first, then action atoms, then `ws`, then `dep`, then the sentinel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProgAtom {
    /// A state variable of the planning problem.
    Fluent(u32),
    /// An action atom; true models select the action.
    Action(u32),
    /// `ws(a, p)`: action `a` provides the derivation of fluent `p`.
    Support(u32, u32),
    /// `dep(p, q)`: deriving `p` relies on `q` being derived first.
    Dep(u32, u32),
    /// Head of the constraint-style rules, rendered `__f`.
    Sentinel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    Normal,
    Choice,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub kind: RuleKind,
    pub head: ProgAtom,
    pub pos: BTreeSet<ProgAtom>,
    pub neg: BTreeSet<ProgAtom>,
}

impl Rule {
    pub fn normal(
        head: ProgAtom,
        pos: impl IntoIterator<Item = ProgAtom>,
        neg: impl IntoIterator<Item = ProgAtom>,
    ) -> Self {
        Rule {
            kind: RuleKind::Normal,
            head,
            pos: pos.into_iter().collect(),
            neg: neg.into_iter().collect(),
        }
    }

    pub fn choice(
        head: ProgAtom,
        pos: impl IntoIterator<Item = ProgAtom>,
        neg: impl IntoIterator<Item = ProgAtom>,
    ) -> Self {
        Rule {
            kind: RuleKind::Choice,
            head,
            pos: pos.into_iter().collect(),
            neg: neg.into_iter().collect(),
        }
    }

    pub fn body_satisfied(&self, interp: &Interpretation) -> bool {
        self.pos.iter().all(|a| interp.contains(*a)) && self.neg.iter().all(|a| !interp.contains(*a))
    }

    /// Classical satisfaction. Choice rules are satisfied by every
    /// interpretation.
    pub fn satisfied(&self, interp: &Interpretation) -> bool {
        match self.kind {
            RuleKind::Choice => true,
            RuleKind::Normal => !self.body_satisfied(interp) || interp.contains(self.head),
        }
    }

    /// True when this rule supports its head under `interp`: the body
    /// holds, and for a choice rule the head was actually chosen.
    pub fn supports_head(&self, interp: &Interpretation) -> bool {
        self.body_satisfied(interp)
            && match self.kind {
                RuleKind::Normal => true,
                RuleKind::Choice => interp.contains(self.head),
            }
    }

    fn atoms(&self) -> impl Iterator<Item = ProgAtom> + '_ {
        std::iter::once(self.head).chain(self.pos.iter().copied()).chain(self.neg.iter().copied())
    }
}

/// A set of true atoms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Interpretation(BTreeSet<ProgAtom>);

impl Interpretation {
    pub fn new(atoms: impl IntoIterator<Item = ProgAtom>) -> Self {
        Interpretation(atoms.into_iter().collect())
    }

    pub fn contains(&self, atom: ProgAtom) -> bool {
        self.0.contains(&atom)
    }

    pub fn atoms(&self) -> &BTreeSet<ProgAtom> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The action indices selected by this model.
    pub fn action_projection(&self) -> BTreeSet<u32> {
        self.0
            .iter()
            .filter_map(|a| match a {
                ProgAtom::Action(i) => Some(*i),
                _ => None,
            })
            .collect()
    }

    /// Restriction to the given atom set.
    pub fn restrict(&self, keep: &BTreeSet<ProgAtom>) -> Interpretation {
        Interpretation(self.0.intersection(keep).copied().collect())
    }

    /// True when the digraph spanned by the true `dep` atoms has no
    /// directed cycle.
    pub fn is_acyclic(&self) -> bool {
        let arcs: Vec<(u32, u32)> = self
            .0
            .iter()
            .filter_map(|a| match a {
                ProgAtom::Dep(p, q) => Some((*p, *q)),
                _ => None,
            })
            .collect();
        dep_arcs_acyclic(&arcs)
    }
}

impl FromIterator<ProgAtom> for Interpretation {
    fn from_iter<T: IntoIterator<Item = ProgAtom>>(iter: T) -> Self {
        Interpretation(iter.into_iter().collect())
    }
}

/// Cycle check over an arc list; used for the `dep` digraphs induced by
/// interpretations.
pub(crate) fn dep_arcs_acyclic(arcs: &[(u32, u32)]) -> bool {
    let mut out: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    let mut indegree: BTreeMap<u32, usize> = BTreeMap::new();
    for &(p, q) in arcs {
        out.entry(p).or_default().push(q);
        indegree.entry(p).or_default();
        *indegree.entry(q).or_default() += 1;
    }
    let mut queue: Vec<u32> =
        indegree.iter().filter(|(_, &d)| d == 0).map(|(&v, _)| v).collect();
    let mut seen = 0;
    while let Some(v) = queue.pop() {
        seen += 1;
        for &y in out.get(&v).into_iter().flatten() {
            let d = indegree.get_mut(&y).expect("arc endpoint counted");
            *d -= 1;
            if *d == 0 {
                queue.push(y);
            }
        }
    }
    seen == indegree.len()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("least model needs a positive normal program, but rule {index} {reason}")]
pub struct NonPositiveError {
    pub index: usize,
    pub reason: &'static str,
}

/// A ground program: rules plus an optional minimize objective.
///
/// The atom table assigns each atom a dense handle in `ProgAtom` order.
/// The signature is exactly the set of atoms occurring in rules; the
/// table may additionally hold objective-only atoms so they can still be
/// numbered when serialized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicProgram {
    rules: Vec<Rule>,
    minimize: Vec<(ProgAtom, u64)>,
    signature: BTreeSet<ProgAtom>,
    atoms: Vec<ProgAtom>,
    handles: BTreeMap<ProgAtom, u32>,
}

impl LogicProgram {
    pub fn new(rules: Vec<Rule>, minimize: Vec<(ProgAtom, u64)>) -> Self {
        let signature: BTreeSet<ProgAtom> = rules.iter().flat_map(Rule::atoms).collect();
        let mut table: BTreeSet<ProgAtom> = signature.clone();
        table.extend(minimize.iter().map(|(a, _)| *a));
        let atoms: Vec<ProgAtom> = table.into_iter().collect();
        let handles = atoms.iter().enumerate().map(|(i, &a)| (a, i as u32)).collect();
        LogicProgram { rules, minimize, signature, atoms, handles }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn minimize(&self) -> &[(ProgAtom, u64)] {
        &self.minimize
    }

    /// Atoms occurring in at least one rule.
    pub fn signature(&self) -> &BTreeSet<ProgAtom> {
        &self.signature
    }

    /// The numbering table: the signature plus objective-only atoms, in
    /// `ProgAtom` order. Handles are indices into this slice.
    pub fn atoms(&self) -> &[ProgAtom] {
        &self.atoms
    }

    pub fn handle(&self, atom: ProgAtom) -> Option<u32> {
        self.handles.get(&atom).copied()
    }

    /// Classical satisfaction of every rule.
    pub fn is_model(&self, interp: &Interpretation) -> bool {
        self.rules.iter().all(|r| r.satisfied(interp))
    }

    /// The reduct with respect to `interp`: rules whose negative body
    /// intersects `interp` are dropped, surviving rules lose their
    /// negative body, and a choice rule survives (as a normal rule) only
    /// when its head was chosen.
    pub fn reduct(&self, interp: &Interpretation) -> LogicProgram {
        let rules = self
            .rules
            .iter()
            .filter(|r| r.neg.iter().all(|a| !interp.contains(*a)))
            .filter(|r| match r.kind {
                RuleKind::Normal => true,
                RuleKind::Choice => interp.contains(r.head),
            })
            .map(|r| Rule::normal(r.head, r.pos.iter().copied(), []))
            .collect();
        LogicProgram::new(rules, Vec::new())
    }

    /// Least model of a positive normal program, by fixpoint iteration.
    pub fn least_model(&self) -> Result<Interpretation, NonPositiveError> {
        for (index, rule) in self.rules.iter().enumerate() {
            if rule.kind == RuleKind::Choice {
                return Err(NonPositiveError { index, reason: "is a choice rule" });
            }
            if !rule.neg.is_empty() {
                return Err(NonPositiveError { index, reason: "uses negation" });
            }
        }
        let mut model = Interpretation::default();
        loop {
            let mut changed = false;
            for rule in &self.rules {
                if !model.contains(rule.head) && rule.body_satisfied(&model) {
                    model.0.insert(rule.head);
                    changed = true;
                }
            }
            if !changed {
                return Ok(model);
            }
        }
    }

    /// Stable model test: `interp` must equal the least model of its own
    /// reduct.
    pub fn is_stable(&self, interp: &Interpretation) -> bool {
        let least = self.reduct(interp).least_model().expect("reduct is positive");
        least == *interp
    }

    /// Supported model test: `interp` is a classical model and exactly
    /// the set of heads of its supporting rules.
    pub fn is_supported(&self, interp: &Interpretation) -> bool {
        if !self.is_model(interp) {
            return false;
        }
        let supported_heads: BTreeSet<ProgAtom> = self
            .rules
            .iter()
            .filter(|r| r.supports_head(interp))
            .map(|r| r.head)
            .collect();
        supported_heads == interp.0
    }

    /// The positive dependency digraph: one vertex per table atom, one
    /// arc from each rule head to each positive body atom.
    pub fn positive_dependency_graph(&self) -> crate::velim::Digraph {
        let mut g = crate::velim::Digraph::new(self.atoms.len());
        for rule in &self.rules {
            let head = self.handles[&rule.head] as usize;
            for b in &rule.pos {
                g.add_arc(head, self.handles[b] as usize);
            }
        }
        g
    }

    /// Total weight of the objective atoms that are true in `interp`.
    pub fn model_cost(&self, interp: &Interpretation) -> u64 {
        self.minimize.iter().filter(|(a, _)| interp.contains(*a)).map(|(_, w)| *w).sum()
    }
}
