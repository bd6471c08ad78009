//! Round removal and its inverse, dummy-round padding.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::boolfn::BoolFn;
use crate::debate::{
    check_validity, memo_get, memo_set, queried_variable_set, Action, DebateSystem, IndexSpace,
    Memo, Pending, ProverStrategy, Verifier, View,
};
use crate::error::{Error, Result};
use crate::par::CheckOptions;

/// A verifier running an inner verifier through an index renaming.
struct Remapped {
    inner: Arc<dyn Verifier>,
    space: IndexSpace,
    new_to_old: Vec<Option<usize>>,
    old_to_new: Vec<Option<usize>>,
}

impl Verifier for Remapped {
    fn space(&self) -> IndexSpace {
        self.space
    }

    fn ell_bound(&self) -> usize {
        self.inner.ell_bound()
    }

    fn next(&self, history: &[(usize, bool)]) -> Action {
        let old: Vec<(usize, bool)> = history
            .iter()
            .map(|&(i, a)| (self.new_to_old[i].expect("history holds mapped indices"), a))
            .collect();
        match self.inner.next(&old) {
            Action::Query(i) => Action::Query(
                self.old_to_new[i].expect("removed positions are never queried"),
            ),
            v => v,
        }
    }
}

/// Absolute index maps for a round-level embedding. `rounds[r']` is the old
/// round (0-based) behind new round `r'`, or `None` for a dummy round.
fn index_maps(
    n: usize,
    k_old: usize,
    rounds: &[Option<usize>],
) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    let mut new_to_old: Vec<Option<usize>> = (0..n).map(Some).collect();
    let mut old_to_new: Vec<Option<usize>> = (0..n).map(Some).collect();
    old_to_new.resize(n + 2 * k_old, None);
    for (r_new, r_old) in rounds.iter().enumerate() {
        for side in 0..2 {
            let new_idx = n + 2 * r_new + side;
            let old_idx = r_old.map(|r| n + 2 * r + side);
            new_to_old.push(old_idx);
            if let Some(o) = old_idx {
                old_to_new[o] = Some(new_idx);
            }
        }
    }
    (new_to_old, old_to_new)
}

fn remap_pending(p: Pending, old_pos_to_new: &[Option<usize>]) -> Pending {
    Pending(old_pos_to_new[p.0].expect("only kept positions can be unset"))
}

#[derive(Clone, Default)]
struct CompressMemo {
    inner: Memo,
    /// Own bits synthesized at removed rounds, by old position.
    synth: Vec<(usize, bool)>,
}

/// Replays the old strategy on the expanded transcript. At a removed round
/// the prover computes its own bit and assumes the opponent wrote 0.
struct CompressedProver {
    inner: Arc<dyn ProverStrategy>,
    role: usize,
    k_old: usize,
    new_pos_to_old: Arc<Vec<usize>>,
    old_pos_to_new: Arc<Vec<Option<usize>>>,
}

impl ProverStrategy for CompressedProver {
    fn bit(&self, view: &View<'_>, memo: &mut Memo) -> Result<bool, Pending> {
        let mut state = memo_get::<CompressMemo>(memo).cloned().unwrap_or_default();
        let target = self.new_pos_to_old[view.position()];
        let mut expanded: Vec<Option<bool>> = Vec::with_capacity(target);
        let mut outcome = Ok(false);
        for q in 0..=target {
            if q == target {
                let v = View::new(view.x(), &expanded, self.k_old);
                outcome = self.inner.bit(&v, &mut state.inner);
                break;
            }
            let b = match self.old_pos_to_new[q] {
                Some(p) => view.prefix()[p],
                None if q % 2 != self.role => Some(false),
                None => match state.synth.iter().find(|(s, _)| *s == q) {
                    Some(&(_, b)) => Some(b),
                    None => {
                        let v = View::new(view.x(), &expanded, self.k_old);
                        match self.inner.bit(&v, &mut state.inner) {
                            Ok(b) => {
                                state.synth.push((q, b));
                                Some(b)
                            }
                            Err(p) => {
                                outcome = Err(p);
                                break;
                            }
                        }
                    }
                },
            };
            expanded.push(b);
        }
        memo_set(memo, state);
        outcome.map_err(|p| remap_pending(p, &self.old_pos_to_new))
    }
}

/// Outcome of [`compress_rounds`].
#[derive(Clone, Debug)]
pub struct Compression {
    pub system: DebateSystem,
    /// Removed rounds of the input system (1-based).
    pub removed: Vec<usize>,
    /// Transcript indices of the input system the verifier can query.
    pub queried_transcript: BTreeSet<usize>,
}

/// Removes every round whose two bits the verifier never queries. The
/// queried set is unchanged by removal, so one pass reaches the fixed
/// point.
pub fn compress_rounds(sys: &DebateSystem, opts: CheckOptions) -> Result<Compression> {
    let space = sys.space();
    let set = queried_variable_set(sys.verifier.as_ref(), opts.budget)?.set;
    let queried_transcript: BTreeSet<usize> =
        set.iter().copied().filter(|&i| !space.is_input(i)).collect();
    let kept: Vec<usize> = (0..sys.k)
        .filter(|&r| {
            queried_transcript.contains(&space.alpha(r + 1))
                || queried_transcript.contains(&space.beta(r + 1))
        })
        .collect();
    let removed: Vec<usize> = (0..sys.k)
        .filter(|r| !kept.contains(r))
        .map(|r| r + 1)
        .collect();
    if removed.is_empty() {
        return Ok(Compression {
            system: sys.clone(),
            removed,
            queried_transcript,
        });
    }
    let rounds: Vec<Option<usize>> = kept.iter().map(|&r| Some(r)).collect();
    let (new_to_old, old_to_new) = index_maps(sys.n, sys.k, &rounds);
    let n = sys.n;
    let new_pos_to_old: Arc<Vec<usize>> =
        Arc::new(new_to_old[n..].iter().map(|o| o.unwrap() - n).collect());
    let old_pos_to_new: Arc<Vec<Option<usize>>> =
        Arc::new(old_to_new[n..].iter().map(|o| o.map(|i| i - n)).collect());
    let k_new = kept.len();
    let prover = |role: usize| -> Arc<dyn ProverStrategy> {
        Arc::new(CompressedProver {
            inner: sys.strategies[role].clone(),
            role,
            k_old: sys.k,
            new_pos_to_old: new_pos_to_old.clone(),
            old_pos_to_new: old_pos_to_new.clone(),
        })
    };
    let verifier = Arc::new(Remapped {
        inner: sys.verifier.clone(),
        space: IndexSpace::new(n, k_new),
        new_to_old: new_to_old.clone(),
        old_to_new,
    });
    let mut system = DebateSystem::new(
        n,
        k_new,
        [prover(0), prover(1)],
        verifier,
        format!("{}+compress", sys.label),
    )?;
    system.index_origin = new_to_old
        .iter()
        .map(|o| o.and_then(|i| sys.index_origin[i]))
        .collect();
    Ok(Compression {
        system,
        removed,
        queried_transcript,
    })
}

/// [`compress_rounds`] followed by an exhaustive validity check; failure
/// there is an implementation fault.
pub fn compress_verified(
    sys: &DebateSystem,
    f: &BoolFn,
    opts: CheckOptions,
) -> Result<Compression> {
    let c = compress_rounds(sys, opts)?;
    let report = check_validity(&c.system, f, opts)?;
    if !report.valid {
        return Err(Error::Internal(format!(
            "compressed system lost validity: {:?}",
            report.counterexample
        )));
    }
    Ok(c)
}

struct PaddedProver {
    inner: Arc<dyn ProverStrategy>,
    k_old: usize,
    /// Old position per new position, `None` at dummy rounds.
    new_pos_to_old: Arc<Vec<Option<usize>>>,
    old_pos_to_new: Arc<Vec<Option<usize>>>,
}

impl ProverStrategy for PaddedProver {
    fn bit(&self, view: &View<'_>, memo: &mut Memo) -> Result<bool, Pending> {
        if self.new_pos_to_old[view.position()].is_none() {
            return Ok(false);
        }
        let contracted: Vec<Option<bool>> = view
            .prefix()
            .iter()
            .enumerate()
            .filter(|(p, _)| self.new_pos_to_old[*p].is_some())
            .map(|(_, b)| *b)
            .collect();
        let v = View::new(view.x(), &contracted, self.k_old);
        self.inner
            .bit(&v, memo)
            .map_err(|p| remap_pending(p, &self.old_pos_to_new))
    }
}

/// Inserts dummy rounds: `before[i]` dummy rounds go in front of old round
/// `i + 1`, and `before[k]` after the last round. Dummy bits are 0 and
/// never queried.
pub fn pad_rounds(sys: &DebateSystem, before: &[usize]) -> Result<DebateSystem> {
    if before.len() != sys.k + 1 {
        return Err(Error::Precondition(format!(
            "padding needs {} slots, got {}",
            sys.k + 1,
            before.len()
        )));
    }
    let mut rounds: Vec<Option<usize>> = Vec::new();
    for (slot, &count) in before.iter().enumerate() {
        rounds.extend(std::iter::repeat_n(None, count));
        if slot < sys.k {
            rounds.push(Some(slot));
        }
    }
    let n = sys.n;
    let (new_to_old, old_to_new) = index_maps(n, sys.k, &rounds);
    let new_pos_to_old: Arc<Vec<Option<usize>>> =
        Arc::new(new_to_old[n..].iter().map(|o| o.map(|i| i - n)).collect());
    let old_pos_to_new: Arc<Vec<Option<usize>>> =
        Arc::new(old_to_new[n..].iter().map(|o| o.map(|i| i - n)).collect());
    let k_new = rounds.len();
    let prover = |role: usize| -> Arc<dyn ProverStrategy> {
        Arc::new(PaddedProver {
            inner: sys.strategies[role].clone(),
            k_old: sys.k,
            new_pos_to_old: new_pos_to_old.clone(),
            old_pos_to_new: old_pos_to_new.clone(),
        })
    };
    let verifier = Arc::new(Remapped {
        inner: sys.verifier.clone(),
        space: IndexSpace::new(n, k_new),
        new_to_old: new_to_old.clone(),
        old_to_new,
    });
    let mut system = DebateSystem::new(
        n,
        k_new,
        [prover(0), prover(1)],
        verifier,
        format!("{}+pad", sys.label),
    )?;
    system.index_origin = new_to_old
        .iter()
        .map(|o| o.and_then(|i| sys.index_origin[i]))
        .collect();
    Ok(system)
}
