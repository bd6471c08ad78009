//! Bisection debate over a machine's computation path.
//!
//! Rounds `0..w` carry the claimed final configuration `F` in β. Phase `p`
//! (`0..T`) starts at round `R_p = w + p(w+1)`: its first `w` β bits hold
//! the claimed midpoint of the current interval, and the α bit of round
//! `R_p + w` selects the half to keep (1 = right). Every other bit is a
//! dummy 0.

use std::sync::Arc;

use super::machine::{InitBit, ToyMachine};
use crate::circuit::{Circuit, CircuitBuilder, Sig};
use crate::debate::{
    memo_get, memo_set, Ask, DebateSystem, IndexSpace, Memo, Pending, Probe, ProverStrategy,
    QueryLogic, Scripted, View,
};
use crate::error::{Error, Result};

/// Transcript positions of the bisection layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub n: usize,
    pub width: usize,
    pub horizon: usize,
}

impl Layout {
    pub fn of(m: &ToyMachine) -> Self {
        Self {
            n: m.n,
            width: m.width,
            horizon: m.horizon,
        }
    }

    pub fn k(&self) -> usize {
        self.width + self.horizon * (self.width + 1)
    }

    fn phase_round(&self, p: usize) -> usize {
        self.width + p * (self.width + 1)
    }

    /// Position of bit `b` of the claimed final configuration.
    pub fn final_pos(&self, b: usize) -> usize {
        2 * b + 1
    }

    /// Position of bit `b` of phase `p`'s midpoint.
    pub fn mid_pos(&self, p: usize, b: usize) -> usize {
        2 * (self.phase_round(p) + b) + 1
    }

    /// Position of phase `p`'s selection bit.
    pub fn sel_pos(&self, p: usize) -> usize {
        2 * (self.phase_round(p) + self.width)
    }

    /// What a position holds: `Some((phase, offset))` inside a phase,
    /// `None` in the final-configuration rounds.
    fn locate(&self, pos: usize) -> Option<(usize, usize)> {
        let r = pos / 2;
        let rel = r.checked_sub(self.width)?;
        Some((rel / (self.width + 1), rel % (self.width + 1)))
    }

    /// Half-length of phase `p`'s interval.
    fn half(&self, p: usize) -> usize {
        1 << (self.horizon - 1 - p)
    }
}

fn read_word(
    width: usize,
    read: &mut dyn FnMut(usize) -> Result<bool, Pending>,
    pos: impl Fn(usize) -> usize,
) -> Result<u32, Pending> {
    let mut c = 0;
    for b in 0..width {
        c |= (read(pos(b))? as u32) << b;
    }
    Ok(c)
}

/// Interval start after the selections of phases `0..p`, and the phase that
/// set it (`None` while it is still step 0).
fn lower_end(lay: &Layout, sel: &[bool]) -> (usize, Option<usize>) {
    let mut lo = 0;
    let mut phase = None;
    for (q, &s) in sel.iter().enumerate() {
        if s {
            lo += lay.half(q);
            phase = Some(q);
        }
    }
    (lo, phase)
}

struct Tables {
    trajectory: Vec<u32>,
    jumps: Vec<Vec<u32>>,
}

fn tables<'m>(m: &ToyMachine, x: &[bool], memo: &'m mut Memo) -> &'m Tables {
    if memo_get::<Tables>(memo).is_none() {
        memo_set(
            memo,
            Tables {
                trajectory: m.trajectory(x),
                jumps: m.jump_tables(x),
            },
        );
    }
    memo_get::<Tables>(memo).unwrap()
}

/// Prover 1: writes the true configurations.
struct Claimant {
    m: Arc<ToyMachine>,
    lay: Layout,
}

impl ProverStrategy for Claimant {
    fn bit(&self, view: &View<'_>, memo: &mut Memo) -> Result<bool, Pending> {
        let lay = &self.lay;
        let pos = view.position();
        let Some((p, off)) = lay.locate(pos) else {
            let t = tables(&self.m, view.x(), memo);
            return Ok(t.trajectory[self.m.steps()] >> (pos / 2) & 1 == 1);
        };
        if off == lay.width {
            return Ok(false);
        }
        let sel = (0..p)
            .map(|q| view.read(lay.sel_pos(q)))
            .collect::<Result<Vec<_>, _>>()?;
        let (lo, _) = lower_end(lay, &sel);
        let t = tables(&self.m, view.x(), memo);
        Ok(t.trajectory[lo + lay.half(p)] >> off & 1 == 1)
    }
}

/// Prover 0: keeps the left half if its claimed endpoints are inconsistent,
/// otherwise the right half.
struct Challenger {
    m: Arc<ToyMachine>,
    lay: Layout,
}

impl ProverStrategy for Challenger {
    fn bit(&self, view: &View<'_>, memo: &mut Memo) -> Result<bool, Pending> {
        let lay = &self.lay;
        let Some((p, off)) = lay.locate(view.position()) else {
            return Ok(false);
        };
        if off != lay.width {
            return Ok(false);
        }
        let sel = (0..p)
            .map(|q| view.read(lay.sel_pos(q)))
            .collect::<Result<Vec<_>, _>>()?;
        let (_, lo_phase) = lower_end(lay, &sel);
        let w = lay.width;
        let mut read = |t| view.read(t);
        let c_lo = match lo_phase {
            None => self.m.init_config(view.x()),
            Some(q) => read_word(w, &mut read, |b| lay.mid_pos(q, b))?,
        };
        let c_mid = read_word(w, &mut read, |b| lay.mid_pos(p, b))?;
        let t = tables(&self.m, view.x(), memo);
        let j = lay.horizon - 1 - p;
        Ok(t.jumps[j][c_lo as usize] == c_mid)
    }
}

/// Reads the selections, the claimed final configuration and the two ends
/// of the last unit interval, then all of `x`; accepts iff `F` is accepting
/// and one step maps the left end to the right end.
struct BisectionVerifier {
    m: Arc<ToyMachine>,
    lay: Layout,
}

impl QueryLogic for BisectionVerifier {
    fn space(&self) -> IndexSpace {
        IndexSpace::new(self.lay.n, self.lay.k())
    }

    fn ell_bound(&self) -> usize {
        self.lay.horizon + 3 * self.lay.width + self.lay.n
    }

    fn decide(&self, probe: &Probe<'_>) -> Result<bool, Ask> {
        let lay = &self.lay;
        let n = lay.n;
        let w = lay.width;
        let at = |t: usize| probe.read(n + t);
        let sel = (0..lay.horizon).map(|p| at(lay.sel_pos(p))).collect::<Result<Vec<_>, _>>()?;
        let word = |pos: &dyn Fn(usize) -> usize| -> Result<u32, Ask> {
            let mut c = 0;
            for b in 0..w {
                c |= (at(pos(b))? as u32) << b;
            }
            Ok(c)
        };
        let f = word(&|b| lay.final_pos(b))?;
        let (_, lo_phase) = lower_end(lay, &sel);
        let hi_phase = sel.iter().rposition(|&s| !s);
        let c_lo = match lo_phase {
            Some(q) => Some(word(&|b| lay.mid_pos(q, b))?),
            None => None,
        };
        let c_hi = match hi_phase {
            Some(q) => word(&|b| lay.mid_pos(q, b))?,
            None => f,
        };
        let x = (0..n).map(|i| probe.read(i)).collect::<Result<Vec<_>, _>>()?;
        let c_lo = c_lo.unwrap_or_else(|| self.m.init_config(&x));
        Ok(self.m.accepts(f) && self.m.next(c_lo, &x) == c_hi)
    }
}

/// The bisection debate for `m`, deciding acceptance after `2^T` steps.
pub fn build_bisection_debate(m: &ToyMachine) -> Result<DebateSystem> {
    let m = Arc::new(m.clone());
    let lay = Layout::of(&m);
    DebateSystem::new(
        lay.n,
        lay.k(),
        [
            Arc::new(Challenger {
                m: m.clone(),
                lay,
            }),
            Arc::new(Claimant { m: m.clone(), lay }),
        ],
        Arc::new(Scripted(BisectionVerifier { m: m.clone(), lay })),
        format!("bisection({})", m.name),
    )
}

/// Circuit over `x ‖ transcript` computing the bisection verifier:
/// multiplexer chains pick the unit interval's ends, one copy of the step
/// circuits checks them, and the accept circuit reads `F`.
pub fn bisection_verifier_circuit(m: &ToyMachine) -> Result<Circuit> {
    let lay = Layout::of(m);
    let (n, w) = (lay.n, lay.width);
    let mut b = CircuitBuilder::new(n + 2 * lay.k());
    let x: Vec<Sig> = (0..n).map(|i| b.input(i)).collect();
    let at = |b: &CircuitBuilder, t: usize| b.input(n + t);
    let f: Vec<Sig> = (0..w).map(|i| at(&b, lay.final_pos(i))).collect();
    let mut lo: Vec<Sig> = Vec::with_capacity(w);
    for bit in &m.init {
        let s = match *bit {
            InitBit::Const(v) => Sig::Const(v),
            InitBit::Var { index, positive: true } => x[index],
            InitBit::Var { index, positive: false } => b.not(x[index]),
        };
        lo.push(s);
    }
    let mut hi = f.clone();
    for p in 0..lay.horizon {
        let s = at(&b, lay.sel_pos(p));
        for i in 0..w {
            let mid = at(&b, lay.mid_pos(p, i));
            lo[i] = b.mux(s, mid, lo[i]);
            hi[i] = b.mux(s, hi[i], mid);
        }
    }
    let mut step_in = lo;
    step_in.extend_from_slice(&x);
    let mut eq = Sig::Const(true);
    for i in 0..w {
        let next = b.instantiate(&m.step[i], &step_in)?;
        let same = b.xnor(next, hi[i]);
        eq = b.and(eq, same);
    }
    let acc = b.instantiate(&m.accept, &f)?;
    let out = b.and(acc, eq);
    b.finish(out)
}

/// Checks that the honest claimant's configurations along the honest run
/// equal the true trajectory.
pub fn check_honest_claims(m: &ToyMachine, sys: &DebateSystem, x: &[bool]) -> Result<()> {
    let lay = Layout::of(m);
    let run = crate::debate::run_honest(sys, x)?;
    let bits = run.transcript.bits();
    let traj = m.trajectory(x);
    let word = |pos: &dyn Fn(usize) -> usize| (0..lay.width).fold(0u32, |c, b| c | (bits[pos(b)] as u32) << b);
    if word(&|b| lay.final_pos(b)) != traj[m.steps()] {
        return Err(Error::Internal("honest final configuration is wrong".into()));
    }
    let mut lo = 0;
    for p in 0..lay.horizon {
        let mid = lo + lay.half(p);
        if word(&|b| lay.mid_pos(p, b)) != traj[mid] {
            return Err(Error::Internal(format!("honest midpoint of phase {p} is wrong")));
        }
        if bits[lay.sel_pos(p)] {
            lo = mid;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::machine::{all_inputs, constant_machine, identity_machine, parity_accumulator};
    use super::*;
    use crate::debate::{check_validity, run_on};
    use crate::par::CheckOptions;

    #[test]
    fn layout_positions_alternate_roles() {
        let lay = Layout { n: 2, width: 3, horizon: 2 };
        assert_eq!(lay.k(), 11);
        for b in 0..3 {
            assert_eq!(lay.final_pos(b) % 2, 1);
            assert_eq!(lay.mid_pos(1, b) % 2, 1);
        }
        assert_eq!(lay.sel_pos(0), 12);
        assert_eq!(lay.sel_pos(1), 20);
        assert!(lay.sel_pos(1) < 2 * lay.k());
    }

    #[test]
    fn parity_acc_n2_is_valid() {
        for t in [1, 2] {
            let m = parity_accumulator(2, t).unwrap();
            let sys = build_bisection_debate(&m).unwrap();
            let f = m.truth_table().unwrap();
            let r = check_validity(&sys, &f, CheckOptions::default()).unwrap();
            assert!(r.valid, "T={t}: {:?}", r.counterexample);
            assert!(r.max_probes <= m.horizon + 3 * m.width + m.n);
            for x in all_inputs(2) {
                check_honest_claims(&m, &sys, &x).unwrap();
            }
        }
    }

    #[test]
    fn identity_machine_decides_its_literal() {
        let m = identity_machine(2, 2, vec![InitBit::Var { index: 0, positive: true }]).unwrap();
        let sys = build_bisection_debate(&m).unwrap();
        let f = m.truth_table().unwrap();
        assert_eq!(f.table(), &[false, true, false, true]);
        assert!(check_validity(&sys, &f, CheckOptions::default()).unwrap().valid);
    }

    #[test]
    fn constant_machine_is_valid() {
        let m = constant_machine(2, 1, false).unwrap();
        let sys = build_bisection_debate(&m).unwrap();
        assert!(check_validity(&sys, &m.truth_table().unwrap(), CheckOptions::default()).unwrap().valid);
    }

    #[test]
    fn circuit_matches_verifier_everywhere() {
        let m = parity_accumulator(2, 1).unwrap();
        let sys = build_bisection_debate(&m).unwrap();
        let c = bisection_verifier_circuit(&m).unwrap();
        let total = sys.space().total();
        for i in 0..1usize << total {
            let bits = crate::boolfn::index_to_bits(i, total);
            let v = run_on(sys.verifier.as_ref(), &bits[..2], &bits[2..]).unwrap().verdict;
            assert_eq!(c.eval(&bits).unwrap(), v, "at {i}");
        }
    }
}
