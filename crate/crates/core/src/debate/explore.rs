//! Lazy enumeration of adversary behaviour.
//!
//! Adversary bits start unset. Whenever the honest strategy or the leaf
//! evaluation reads an unset bit, the branch forks into 0 and 1. Outcomes
//! only depend on bits that were read, so the leaves cover every adversary
//! exactly once while skipping bits nobody looks at.

use std::ops::ControlFlow;

use super::{DebateSystem, Memo, Pending, View};
use crate::boolfn::index_to_bits;
use crate::error::{Error, Result};
use crate::par::{collect_results, map_range, pow2_label, Budget, CheckOptions};

/// Leaf-phase access to `x ‖ transcript`, with forked adversary bits in an
/// overlay.
pub struct LeafView<'a> {
    x: &'a [bool],
    bits: &'a [Option<bool>],
    overlay: &'a [(usize, bool)],
}

impl LeafView<'_> {
    pub fn x(&self) -> &[bool] {
        self.x
    }

    pub fn position(&self, t: usize) -> Option<bool> {
        self.bits[t].or_else(|| {
            self.overlay
                .iter()
                .find(|(p, _)| *p == t)
                .map(|(_, b)| *b)
        })
    }

    /// Reads an absolute index.
    pub fn read(&self, idx: usize) -> Result<bool, Pending> {
        match idx.checked_sub(self.x.len()) {
            None => Ok(self.x[idx]),
            Some(t) => self.position(t).ok_or(Pending(t)),
        }
    }

    /// The transcript with never-read adversary bits filled with 0.
    pub fn transcript(&self) -> Vec<bool> {
        (0..self.bits.len())
            .map(|t| self.position(t).unwrap_or(false))
            .collect()
    }
}

#[derive(Clone)]
struct PlayState {
    bits: Vec<Option<bool>>,
    pos: usize,
    memo: Memo,
}

fn check_fork(bits: &[Option<bool>], t: usize, limit: usize) -> Result<()> {
    if t >= limit || bits[t].is_some() {
        return Err(Error::Internal(format!(
            "read of transcript position {t} cannot fork"
        )));
    }
    Ok(())
}

/// Explores every adversary against the honest prover `honest` on input
/// `x`. `leaf` evaluates a finished transcript and may itself read unset
/// bits; `visit` sees each leaf outcome in depth-first order (bit 0 first)
/// and can stop the exploration early.
pub fn explore_x<R>(
    sys: &DebateSystem,
    x: &[bool],
    honest: usize,
    budget: &Budget,
    leaf: &mut dyn FnMut(&LeafView<'_>) -> Result<R, Pending>,
    visit: &mut dyn FnMut(&LeafView<'_>, R) -> Result<ControlFlow<()>>,
) -> Result<ControlFlow<()>> {
    let len = 2 * sys.k;
    let strategy = sys.strategies[honest].as_ref();
    let mut stack = vec![PlayState {
        bits: vec![None; len],
        pos: 0,
        memo: None,
    }];
    'branches: while let Some(mut s) = stack.pop() {
        while s.pos < len {
            if s.pos % 2 != honest {
                s.pos += 1;
                continue;
            }
            let view = View::new(x, &s.bits[..s.pos], sys.k);
            match strategy.bit(&view, &mut s.memo) {
                Ok(b) => {
                    s.bits[s.pos] = Some(b);
                    s.pos += 1;
                }
                Err(Pending(t)) => {
                    check_fork(&s.bits, t, s.pos)?;
                    let mut one = s.clone();
                    one.bits[t] = Some(true);
                    s.bits[t] = Some(false);
                    stack.push(one);
                    stack.push(s);
                    continue 'branches;
                }
            }
        }
        let mut overlays: Vec<Vec<(usize, bool)>> = vec![Vec::new()];
        while let Some(ov) = overlays.pop() {
            let view = LeafView {
                x,
                bits: &s.bits,
                overlay: &ov,
            };
            match leaf(&view) {
                Ok(r) => {
                    budget.charge(1)?;
                    if visit(&view, r)?.is_break() {
                        return Ok(ControlFlow::Break(()));
                    }
                }
                Err(Pending(t)) => {
                    if t >= len || view.position(t).is_some() {
                        return Err(Error::Internal(format!(
                            "leaf read of transcript position {t} cannot fork"
                        )));
                    }
                    let mut one = ov.clone();
                    one.push((t, true));
                    let mut zero = ov;
                    zero.push((t, false));
                    overlays.push(one);
                    overlays.push(zero);
                }
            }
        }
    }
    Ok(ControlFlow::Continue(()))
}

/// Runs [`explore_x`] for every input and both honest roles, i.e. over all
/// valid transcripts. Inputs are scheduled per `opts`; results come back
/// in input order. `visit` breaking stops the current input only.
pub fn explore_valid<A, R, I, L, V>(
    sys: &DebateSystem,
    opts: CheckOptions,
    what: &str,
    init: I,
    leaf: L,
    visit: V,
) -> Result<Vec<A>>
where
    A: Send,
    I: Fn(&[bool]) -> A + Sync + Send,
    L: Fn(&LeafView<'_>) -> Result<R, Pending> + Sync + Send,
    V: Fn(&mut A, &LeafView<'_>, R) -> Result<ControlFlow<()>> + Sync + Send,
{
    let budget = Budget::new(opts.budget, what, pow2_label(sys.n + sys.k + 1));
    let per_x = map_range(opts.exec, 1 << sys.n, |xi| -> Result<A> {
        let x = index_to_bits(xi, sys.n);
        let mut acc = init(&x);
        for honest in 0..2 {
            let flow = explore_x(sys, &x, honest, &budget, &mut |l| leaf(l), &mut |l, r| {
                visit(&mut acc, l, r)
            })?;
            if flow.is_break() {
                break;
            }
        }
        Ok(acc)
    });
    collect_results(per_x)
}
