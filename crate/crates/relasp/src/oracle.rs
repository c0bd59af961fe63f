//! Brute-force reference answers for small relaxed problems.
//!
//! Everything here enumerates all `2^|A|` action subsets, so callers are
//! capped at [`DEFAULT_MAX_ACTIONS`] actions. The encoders are checked
//! against these answers; nothing in this module looks at the encodings.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::strips::RelaxedProblem;

/// Cap on `|A|` for the exhaustive subset sweeps.
pub const DEFAULT_MAX_ACTIONS: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("problem has {count} actions; exhaustive search is capped at {bound}")]
    TooManyActions { count: usize, bound: usize },
}

fn check_bound(problem: &RelaxedProblem) -> Result<(), OracleError> {
    let count = problem.actions.len();
    if count > DEFAULT_MAX_ACTIONS {
        return Err(OracleError::TooManyActions { count, bound: DEFAULT_MAX_ACTIONS });
    }
    Ok(())
}

/// An execution order for `subset`: every action's preconditions hold
/// when its turn comes, starting from the empty state. Greedy lowest
/// index first; `None` when no order exists. Greedy choice is safe here
/// because applying an action never disables another.
pub fn execution_order(problem: &RelaxedProblem, subset: &BTreeSet<usize>) -> Option<Vec<usize>> {
    let mut state: BTreeSet<usize> = BTreeSet::new();
    let mut pending = subset.clone();
    let mut order = Vec::with_capacity(subset.len());
    while !pending.is_empty() {
        let next = pending
            .iter()
            .copied()
            .find(|&a| problem.actions[a].pre.is_subset(&state))?;
        pending.remove(&next);
        state.extend(problem.actions[next].add.iter().copied());
        order.push(next);
    }
    Some(order)
}

pub fn orderable(problem: &RelaxedProblem, subset: &BTreeSet<usize>) -> bool {
    execution_order(problem, subset).is_some()
}

fn subset_of_mask(mask: u32, n: usize) -> BTreeSet<usize> {
    (0..n).filter(|&a| mask & (1 << a) != 0).collect()
}

fn achieves_goal(problem: &RelaxedProblem, subset: &BTreeSet<usize>) -> bool {
    problem.goal.iter().all(|g| subset.iter().any(|&a| problem.actions[a].add.contains(g)))
}

fn subset_cost(problem: &RelaxedProblem, subset: &BTreeSet<usize>) -> u64 {
    subset.iter().map(|&a| problem.actions[a].cost as u64).sum()
}

/// All action subsets that can be ordered into a plan reaching the goal,
/// in set order.
pub fn goal_achieving_subsets(
    problem: &RelaxedProblem,
) -> Result<Vec<BTreeSet<usize>>, OracleError> {
    check_bound(problem)?;
    let n = problem.actions.len();
    let mut subsets = Vec::new();
    for mask in 0..(1u32 << n) {
        let subset = subset_of_mask(mask, n);
        if achieves_goal(problem, &subset) && orderable(problem, &subset) {
            subsets.push(subset);
        }
    }
    subsets.sort();
    Ok(subsets)
}

/// The optimal relaxed plans of a problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalPlans {
    /// Minimum total cost over orderable goal-achieving subsets; `None`
    /// when no such subset exists.
    pub h_plus: Option<u64>,
    /// Every subset attaining the minimum, each with an execution order,
    /// in set order. Empty exactly when `h_plus` is `None`.
    pub optimal: Vec<(BTreeSet<usize>, Vec<usize>)>,
}

pub fn h_plus(problem: &RelaxedProblem) -> Result<OptimalPlans, OracleError> {
    check_bound(problem)?;
    let n = problem.actions.len();
    let mut best: Option<u64> = None;
    let mut optimal: Vec<(BTreeSet<usize>, Vec<usize>)> = Vec::new();
    // Small subsets first so the incumbent bound prunes early.
    let mut masks: Vec<u32> = (0..(1u32 << n)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for mask in masks {
        let subset = subset_of_mask(mask, n);
        let cost = subset_cost(problem, &subset);
        if best.is_some_and(|b| cost > b) {
            continue;
        }
        if !achieves_goal(problem, &subset) {
            continue;
        }
        let Some(order) = execution_order(problem, &subset) else {
            continue;
        };
        if best == Some(cost) {
            optimal.push((subset, order));
        } else {
            best = Some(cost);
            optimal = vec![(subset, order)];
        }
    }
    optimal.sort();
    Ok(OptimalPlans { h_plus: best, optimal })
}
