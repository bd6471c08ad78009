//! Full answer-path exploration of a verifier.

use std::collections::BTreeSet;

use super::{Action, Verifier};
use crate::circuit::{DecisionTree, DtNode};
use crate::error::{Error, Result};
use crate::par::{pow2_label, Budget};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathReport {
    /// Every index queried on some path.
    pub set: BTreeSet<usize>,
    pub paths: u64,
    pub max_depth: usize,
}

/// Walks every answer path, calling `visit(history, verdict)` at each
/// verdict. Enforces the verifier contract along the way.
pub fn explore_paths(
    v: &dyn Verifier,
    budget: u64,
    visit: &mut dyn FnMut(&[(usize, bool)], bool),
) -> Result<PathReport> {
    let space = v.space();
    let ell = v.ell_bound();
    let budget = Budget::new(budget, "verifier path exploration", pow2_label(ell));
    let mut report = PathReport {
        set: BTreeSet::new(),
        paths: 0,
        max_depth: 0,
    };
    let mut stack: Vec<Vec<(usize, bool)>> = vec![Vec::new()];
    while let Some(h) = stack.pop() {
        match v.next(&h) {
            Action::Verdict(b) => {
                budget.charge(1)?;
                report.paths += 1;
                report.max_depth = report.max_depth.max(h.len());
                visit(&h, b);
            }
            Action::Query(i) => {
                if i >= space.total() {
                    return Err(Error::VerifierFault(format!(
                        "query {i} outside index space of {}",
                        space.total()
                    )));
                }
                if h.iter().any(|(j, _)| *j == i) {
                    return Err(Error::VerifierFault(format!(
                        "index {} queried twice",
                        space.label(i)
                    )));
                }
                if h.len() == ell {
                    return Err(Error::VerifierFault(format!(
                        "more than {ell} queries on one path"
                    )));
                }
                report.set.insert(i);
                let mut one = h.clone();
                one.push((i, true));
                let mut zero = h;
                zero.push((i, false));
                stack.push(one);
                stack.push(zero);
            }
        }
    }
    Ok(report)
}

/// The set `S` of indices the verifier can ever query, with `|S| ≤ 2^ℓ`
/// checked.
pub fn queried_variable_set(v: &dyn Verifier, budget: u64) -> Result<PathReport> {
    let report = explore_paths(v, budget, &mut |_, _| {})?;
    let ell = v.ell_bound();
    if ell < 64 && report.set.len() as u128 > 1u128 << ell {
        return Err(Error::Internal(format!(
            "{} queried indices exceed 2^{ell}",
            report.set.len()
        )));
    }
    Ok(report)
}

/// The verifier as an explicit decision tree over its index space.
pub fn verifier_tree(v: &dyn Verifier, budget: u64) -> Result<DecisionTree> {
    fn grow(
        v: &dyn Verifier,
        h: &mut Vec<(usize, bool)>,
        nodes: &mut Vec<DtNode>,
        budget: &Budget,
    ) -> Result<usize> {
        let id = nodes.len();
        match v.next(h) {
            Action::Verdict(b) => {
                budget.charge(1)?;
                nodes.push(DtNode::Leaf(b));
            }
            Action::Query(i) => {
                if h.len() >= v.ell_bound() || h.iter().any(|(j, _)| *j == i) {
                    return Err(Error::VerifierFault(format!(
                        "query {i} breaks the verifier contract"
                    )));
                }
                nodes.push(DtNode::Leaf(false));
                h.push((i, false));
                let c0 = grow(v, h, nodes, budget)?;
                h.pop();
                h.push((i, true));
                let c1 = grow(v, h, nodes, budget)?;
                h.pop();
                nodes[id] = DtNode::Query {
                    index: i,
                    children: [c0, c1],
                };
            }
        }
        Ok(id)
    }
    let budget = Budget::new(budget, "verifier tree extraction", pow2_label(v.ell_bound()));
    let mut nodes = Vec::new();
    grow(v, &mut Vec::new(), &mut nodes, &budget)?;
    DecisionTree::new(v.space().total(), nodes)
}
