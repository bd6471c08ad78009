use std::ops::ControlFlow;

use super::{explore_x, queried_variable_set, run_on, run_verifier, DebateSystem, Run, Verifier};
use crate::boolfn::{index_to_bits, BoolFn};
use crate::error::{Error, Result};
use crate::par::{collect_results, map_range, pow2_label, Budget, CheckOptions};

/// A losing run for the honest prover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub x: Vec<bool>,
    pub adversary_role: usize,
    /// The adversary's bits in round order (never-read bits shown as 0).
    pub adversary_bits: Vec<bool>,
    pub transcript: Vec<bool>,
    pub verdict: bool,
    pub probes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidityReport {
    pub valid: bool,
    pub max_probes: usize,
    pub ell_bound: usize,
    /// Adversary leaves explored.
    pub leaves: u64,
    pub counterexample: Option<Counterexample>,
}

struct PerInput {
    max_probes: usize,
    leaves: u64,
    counterexample: Option<Counterexample>,
}

/// Checks that on every input the prover arguing for `f(x)` wins against
/// every adaptive adversary.
pub fn check_validity(sys: &DebateSystem, f: &BoolFn, opts: CheckOptions) -> Result<ValidityReport> {
    if f.n() != sys.n {
        return Err(Error::Precondition(format!(
            "function has {} variables, system has {}",
            f.n(),
            sys.n
        )));
    }
    let budget = Budget::new(opts.budget, "validity check", pow2_label(sys.n + sys.k));
    let per_x = map_range(opts.exec, 1 << sys.n, |xi| -> Result<PerInput> {
        let x = index_to_bits(xi, sys.n);
        let honest = f.at(xi) as usize;
        let mut out = PerInput {
            max_probes: 0,
            leaves: 0,
            counterexample: None,
        };
        let v = sys.verifier.as_ref();
        // A counterexample ends this input early; nothing else to report.
        let _ = explore_x(
            sys,
            &x,
            honest,
            &budget,
            &mut |leaf| run_verifier(v, &mut |i| leaf.read(i)),
            &mut |leaf, run| {
                let run: Run = run?;
                out.leaves += 1;
                out.max_probes = out.max_probes.max(run.probes.len());
                if run.verdict == (honest == 1) {
                    return Ok(ControlFlow::Continue(()));
                }
                let transcript = leaf.transcript();
                let adversary_role = 1 - honest;
                out.counterexample = Some(Counterexample {
                    x: x.clone(),
                    adversary_role,
                    adversary_bits: transcript
                        .iter()
                        .skip(adversary_role)
                        .step_by(2)
                        .copied()
                        .collect(),
                    transcript,
                    verdict: run.verdict,
                    probes: run.probes,
                });
                Ok(ControlFlow::Break(()))
            },
        )?;
        Ok(out)
    });
    let per_x = collect_results(per_x)?;
    let max_probes = per_x.iter().map(|p| p.max_probes).max().unwrap_or(0);
    let leaves = per_x.iter().map(|p| p.leaves).sum();
    let counterexample = per_x.into_iter().find_map(|p| p.counterexample);
    Ok(ValidityReport {
        valid: counterexample.is_none(),
        max_probes,
        ell_bound: sys.ell_bound(),
        leaves,
        counterexample,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameValueReport {
    /// `∀α_1 ∃β_1 … V(x, α, β)` for every x.
    pub values: Vec<bool>,
    pub agrees: bool,
    pub first_disagreement: Option<usize>,
    /// Transcript positions the minimax ranges over.
    pub positions: Vec<usize>,
}

/// Reconstructs the function decided by `v` by minimax over the
/// transcript (AND over α bits, OR over β bits) and compares it with
/// `f_claim`. Positions the verifier never queries cannot change the
/// value, so only those in its queried set are branched on.
pub fn game_value(v: &dyn Verifier, f_claim: &BoolFn, opts: CheckOptions) -> Result<GameValueReport> {
    let space = v.space();
    if f_claim.n() != space.n {
        return Err(Error::Precondition(format!(
            "function has {} variables, verifier space has {}",
            f_claim.n(),
            space.n
        )));
    }
    let set = queried_variable_set(v, opts.budget)?.set;
    let positions: Vec<usize> = set.iter().filter_map(|&i| space.position(i)).collect();
    let budget = Budget::new(
        opts.budget,
        "game value minimax",
        pow2_label(space.n + positions.len()),
    );

    fn minimax(
        v: &dyn Verifier,
        x: &[bool],
        t: &mut Vec<bool>,
        positions: &[usize],
        budget: &Budget,
    ) -> Result<bool> {
        let Some((&p, rest)) = positions.split_first() else {
            budget.charge(1)?;
            return Ok(run_on(v, x, t)?.verdict);
        };
        let is_alpha = p % 2 == 0;
        for b in [false, true] {
            t[p] = b;
            let val = minimax(v, x, t, rest, budget)?;
            if val != is_alpha {
                t[p] = false;
                return Ok(val);
            }
        }
        t[p] = false;
        Ok(is_alpha)
    }

    let values = map_range(opts.exec, 1 << space.n, |xi| {
        let x = index_to_bits(xi, space.n);
        let mut t = vec![false; 2 * space.k];
        minimax(v, &x, &mut t, &positions, &budget)
    });
    let values = collect_results(values)?;
    let first_disagreement = (0..values.len()).find(|&i| values[i] != f_claim.at(i));
    Ok(GameValueReport {
        agrees: first_disagreement.is_none(),
        values,
        first_disagreement,
        positions,
    })
}
