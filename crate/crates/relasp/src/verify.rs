//! Cross-checks the three encodings of one instance against the
//! brute-force oracle.
//!
//! Every check is reported individually rather than folded into one
//! boolean, because the checks are not equally strong. The soundness
//! directions (every model corresponds to a plan), the diagnostic/causal
//! projection equivalence, and the cost agreements hold for every
//! instance. The completeness directions (every plan has a model of the
//! causal encodings, and the full-model correspondence between the
//! instrumented encoding and the stable encoding) can genuinely fail:
//!
//! * An action whose add set is only partly needed yields instrumented
//!   models that omit the unneeded effect, while the stable encoding
//!   derives every effect of a chosen action (see
//!   `spare_add_breaks_acyclic_soundness`).
//! * A plan containing an action that re-establishes an atom achieved
//!   earlier can force both arcs of a dependency 2-cycle, which the
//!   acyclicity instrumentation rejects even though the plan is valid
//!   (see `readding_an_achieved_atom_breaks_completeness`).
//!
//! Callers that sweep random instances should therefore treat the
//! soundness checks as invariants and the completeness checks as
//! reporting which instances are representable.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::encode::{default_ordering, encode_acyc, encode_p, encode_pc, encode_pd};
use crate::oracle::{goal_achieving_subsets, h_plus, OracleError};
use crate::program::{
    enumerate_models, EnumerateError, EnumerateOptions, Interpretation, LogicProgram, ProgAtom,
    Semantics,
};
use crate::program::enumerate::DEFAULT_SIGNATURE_BOUND;
use crate::strips::{is_solvable, RelaxedProblem};
use crate::velim::EliminationOrdering;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Forwarded to model enumeration.
    pub max_signature: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { max_signature: DEFAULT_SIGNATURE_BOUND }
    }
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    /// Empty when passed, otherwise the first discrepancy found.
    pub details: String,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub checks: Vec<CheckReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> &CheckReport {
        self.checks
            .iter()
            .find(|c| c.name == name)
            .unwrap_or_else(|| panic!("no check named {name}"))
    }
}

fn report(name: &'static str, passed: bool, details: String) -> CheckReport {
    CheckReport { name, passed, details: if passed { String::new() } else { details } }
}

/// First elements of both one-sided differences, for failure messages.
fn set_mismatch<T: Ord + fmt::Debug>(
    left_name: &str,
    left: &BTreeSet<T>,
    right_name: &str,
    right: &BTreeSet<T>,
) -> String {
    let mut parts = Vec::new();
    if let Some(item) = left.difference(right).next() {
        parts.push(format!("{left_name} has {item:?} which {right_name} lacks"));
    }
    if let Some(item) = right.difference(left).next() {
        parts.push(format!("{right_name} has {item:?} which {left_name} lacks"));
    }
    parts.join("; ")
}

/// The model the stable encoding assigns to an action subset: the chosen
/// action atoms plus everything they add.
fn model_of_subset(problem: &RelaxedProblem, subset: &BTreeSet<usize>) -> Interpretation {
    let mut atoms: BTreeSet<ProgAtom> =
        subset.iter().map(|&a| ProgAtom::Action(a as u32)).collect();
    for &a in subset {
        atoms.extend(problem.actions[a].add.iter().map(|&p| ProgAtom::Fluent(p as u32)));
    }
    Interpretation::new(atoms)
}

fn min_cost(program: &LogicProgram, models: &[Interpretation]) -> Option<u64> {
    models.iter().map(|m| program.model_cost(m)).min()
}

/// Runs every cross-check on one instance. Errors only on resource
/// bounds (too many actions for the oracle, too large a signature for
/// enumeration); check failures are reported, not raised.
pub fn verify_instance(
    problem: &RelaxedProblem,
    options: &VerifyOptions,
) -> Result<VerifyReport, VerifyError> {
    let opts = EnumerateOptions { limit: None, max_signature: options.max_signature };

    let subsets = goal_achieving_subsets(problem)?;
    let plans = h_plus(problem)?;

    let p = encode_p(problem);
    let stable = enumerate_models(&p, Semantics::Stable, &opts)?.models;

    let acyc = encode_acyc(problem);
    let acyc_models = enumerate_models(&acyc, Semantics::AcyclicSupported, &opts)?.models;

    let orderings =
        [default_ordering(problem), EliminationOrdering::input_order(problem.atoms.len())];
    let mut causal = Vec::new();
    for ordering in &orderings {
        let pc = encode_pc(problem, ordering);
        let pc_models = enumerate_models(&pc, Semantics::Supported, &opts)?.models;
        let pd = encode_pd(problem, ordering);
        let pd_models = enumerate_models(&pd, Semantics::Supported, &opts)?.models;
        causal.push((ordering, pc, pc_models, pd, pd_models));
    }

    let mut checks = Vec::new();

    // The stable models must be exactly the images of the plan subsets.
    let expected: BTreeSet<Interpretation> =
        subsets.iter().map(|s| model_of_subset(problem, s)).collect();
    debug_assert_eq!(expected.len(), subsets.len(), "subset images are distinct");
    let got: BTreeSet<Interpretation> = stable.iter().cloned().collect();
    checks.push(report(
        "stable-bijection",
        expected == got,
        set_mismatch("plan images", &expected, "stable models", &got),
    ));

    // The instrumented encoding, restricted to the atoms it shares with
    // the stable encoding, against the stable models.
    let shared: BTreeSet<ProgAtom> =
        p.signature().intersection(acyc.signature()).copied().collect();
    let stable_shared: BTreeSet<Interpretation> =
        stable.iter().map(|m| m.restrict(&shared)).collect();
    let acyc_shared: BTreeSet<Interpretation> =
        acyc_models.iter().map(|m| m.restrict(&shared)).collect();
    let sound = acyc_shared.difference(&stable_shared).next();
    checks.push(report(
        "acyclic-soundness",
        sound.is_none(),
        format!("acyclic model restricts to {sound:?}, which is not a stable model"),
    ));
    let complete = stable_shared.difference(&acyc_shared).next();
    checks.push(report(
        "acyclic-completeness",
        complete.is_none(),
        format!("stable model {complete:?} has no acyclic supported counterpart"),
    ));

    // Action projections. Actions that add nothing never occur in the
    // supported encodings (they have no support atom), so the oracle
    // side is projected onto the effective actions.
    let effective: BTreeSet<usize> = (0..problem.actions.len())
        .filter(|&a| !problem.actions[a].add.is_empty())
        .collect();
    let plan_projections: BTreeSet<BTreeSet<u32>> = subsets
        .iter()
        .map(|s| s.intersection(&effective).map(|&a| a as u32).collect())
        .collect();

    for (ordering, pc, pc_models, pd, pd_models) in &causal {
        let tag = ordering.strategy;
        let pc_projections: BTreeSet<BTreeSet<u32>> =
            pc_models.iter().map(Interpretation::action_projection).collect();
        let pd_projections: BTreeSet<BTreeSet<u32>> =
            pd_models.iter().map(Interpretation::action_projection).collect();

        let unsound = pc_projections.difference(&plan_projections).next();
        checks.push(report(
            "causal-soundness",
            unsound.is_none(),
            format!("[{tag:?}] model selects {unsound:?}, which is not an orderable goal-achieving subset"),
        ));
        let missing = plan_projections.difference(&pc_projections).next();
        checks.push(report(
            "causal-completeness",
            missing.is_none(),
            format!("[{tag:?}] plan subset {missing:?} is selected by no supported model"),
        ));
        let cyclic = pc_models.iter().find(|m| !m.is_acyclic());
        checks.push(report(
            "causal-acyclicity",
            cyclic.is_none(),
            format!("[{tag:?}] supported model {cyclic:?} has a dependency cycle"),
        ));
        checks.push(report(
            "diagnostic-projection",
            pd_projections == pc_projections,
            format!(
                "[{tag:?}] {}",
                set_mismatch("diagnostic", &pd_projections, "causal", &pc_projections)
            ),
        ));

        // Minimum model cost must agree with the oracle for every
        // encoding, with "no models" matching "no plan".
        for (label, program, models) in [
            ("causal", pc, pc_models),
            ("diagnostic", pd, pd_models),
        ] {
            let best = min_cost(program, models);
            checks.push(report(
                "cost-agreement",
                best == plans.h_plus,
                format!("[{tag:?}] {label} minimum {best:?} vs oracle {:?}", plans.h_plus),
            ));
        }
    }

    for (label, program, models) in
        [("stable", &p, &stable), ("instrumented", &acyc, &acyc_models)]
    {
        let best = min_cost(program, models);
        checks.push(report(
            "cost-agreement",
            best == plans.h_plus,
            format!("{label} minimum {best:?} vs oracle {:?}", plans.h_plus),
        ));
    }

    checks.push(report(
        "reachability-agreement",
        plans.h_plus.is_none() == !is_solvable(problem),
        format!("h+ {:?} vs goal reachability {}", plans.h_plus, is_solvable(problem)),
    ));

    Ok(VerifyReport { checks })
}
