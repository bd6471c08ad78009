//! Cross-examination: Prover 0 writes every gate value, Prover 1 names one
//! gate, and the verifier checks that gate against its operands.
//!
//! The same layout serves compilation of an existing debate: the base
//! system's rounds come first and the circuit's inputs are the absolute
//! indices of `x ‖ base transcript`.

use std::sync::Arc;

use crate::circuit::{Circuit, Ref};
use crate::debate::{
    memo_get, memo_set, Ask, DebateSystem, IndexSpace, Memo, Pending, Probe, ProverStrategy,
    QueryLogic, Scripted, View,
};
use crate::error::{Error, Result};

/// `max(⌈log2 m⌉, 1)`: width of the challenge index.
pub fn index_bits(m: usize) -> usize {
    (m.max(2) - 1).ilog2() as usize + 1
}

/// `⌈log2 m⌉` for `m ≥ 1`.
pub fn ceil_log2(m: usize) -> usize {
    if m <= 1 {
        0
    } else {
        (m - 1).ilog2() as usize + 1
    }
}

#[derive(Debug)]
struct Layout {
    circuit: Circuit,
    space: IndexSpace,
    base_k: usize,
    m: usize,
    b: usize,
}

impl Layout {
    /// Transcript position of the claim for gate `g` (0-based).
    fn claim_pos(&self, g: usize) -> usize {
        2 * (self.base_k + g)
    }

    /// Transcript position of challenge bit `r` (0-based, MSB first).
    fn index_pos(&self, r: usize) -> usize {
        2 * (self.base_k + self.m + r) + 1
    }

    fn operand_abs(&self, r: Ref) -> usize {
        match r {
            Ref::Input(i) => i,
            Ref::Gate(g) => self.space.n + self.claim_pos(g),
        }
    }

    fn pointer_bit(&self, gate: usize, r: usize) -> bool {
        (gate >> (self.b - 1 - r)) & 1 == 1
    }
}

struct Logic(Arc<Layout>);

impl QueryLogic for Logic {
    fn space(&self) -> IndexSpace {
        self.0.space
    }

    fn ell_bound(&self) -> usize {
        self.0.b + 3
    }

    fn decide(&self, p: &Probe<'_>) -> Result<bool, Ask> {
        let l = &*self.0;
        let n = l.space.n;
        let mut v = 0usize;
        for r in 0..l.b {
            v = v << 1 | p.read(n + l.index_pos(r))? as usize;
        }
        let t = v.min(l.m - 1);
        let claim = p.read(n + l.claim_pos(t))?;
        let gate = l.circuit.gates()[t];
        let mut ops = [false; 2];
        for (slot, r) in gate.operands().enumerate() {
            ops[slot] = p.read(l.operand_abs(r))?;
        }
        if claim != gate.apply(ops[0], ops[1]) {
            Ok(true)
        } else {
            Ok(t == l.m - 1 && claim)
        }
    }
}

struct GateValues(Vec<bool>);

struct Prover0 {
    layout: Arc<Layout>,
    base: Option<Arc<dyn ProverStrategy>>,
}

impl ProverStrategy for Prover0 {
    fn bit(&self, view: &View<'_>, memo: &mut Memo) -> Result<bool, Pending> {
        let l = &*self.layout;
        let round = view.round() - 1;
        if round < l.base_k {
            let base = View::new(view.x(), view.prefix(), l.base_k);
            return self.base.as_ref().unwrap().bit(&base, memo);
        }
        let g = round - l.base_k;
        if g >= l.m {
            return Ok(false);
        }
        if memo_get::<GateValues>(memo).is_none() {
            let vals = l.circuit.eval_lazy(&mut |i| view.read_abs(i))?;
            memo_set(memo, GateValues(vals));
        }
        Ok(memo_get::<GateValues>(memo).unwrap().0[g])
    }
}

#[derive(Clone, Copy)]
enum Scan {
    From(usize),
    Found(usize),
}

struct Prover1 {
    layout: Arc<Layout>,
    base: Option<Arc<dyn ProverStrategy>>,
}

impl Prover1 {
    /// Output gate if its claim is 1, else the lowest inconsistent gate.
    fn pointer(&self, view: &View<'_>, memo: &mut Memo) -> Result<usize, Pending> {
        let l = &*self.layout;
        let start = match memo_get::<Scan>(memo) {
            Some(Scan::Found(g)) => return Ok(*g),
            Some(Scan::From(g)) => *g,
            None => {
                if view.read(l.claim_pos(l.m - 1))? {
                    memo_set(memo, Scan::Found(l.m - 1));
                    return Ok(l.m - 1);
                }
                0
            }
        };
        for g in start..l.m {
            let step = (|| {
                let claim = view.read(l.claim_pos(g))?;
                let gate = l.circuit.gates()[g];
                let mut ops = [false; 2];
                for (slot, r) in gate.operands().enumerate() {
                    ops[slot] = match r {
                        Ref::Input(i) => view.read_abs(i)?,
                        Ref::Gate(h) => view.read(l.claim_pos(h))?,
                    };
                }
                Ok(claim != gate.apply(ops[0], ops[1]))
            })();
            match step {
                Ok(true) => {
                    memo_set(memo, Scan::Found(g));
                    return Ok(g);
                }
                Ok(false) => {}
                Err(p) => {
                    memo_set(memo, Scan::From(g));
                    return Err(p);
                }
            }
        }
        memo_set(memo, Scan::Found(l.m - 1));
        Ok(l.m - 1)
    }
}

impl ProverStrategy for Prover1 {
    fn bit(&self, view: &View<'_>, memo: &mut Memo) -> Result<bool, Pending> {
        let l = &*self.layout;
        let round = view.round() - 1;
        if round < l.base_k {
            let base = View::new(view.x(), view.prefix(), l.base_k);
            return self.base.as_ref().unwrap().bit(&base, memo);
        }
        if round < l.base_k + l.m {
            return Ok(false);
        }
        if round == l.base_k + l.m && memo_get::<Scan>(memo).is_none() {
            // The base strategy's memo is dead from here on.
            *memo = None;
        }
        let g = self.pointer(view, memo)?;
        Ok(l.pointer_bit(g, round - l.base_k - l.m))
    }
}

/// Appends cross-examination rounds for `circuit` to `base` (or to an
/// empty debate when `base` is `None`). The circuit reads
/// `x ‖ base transcript`.
pub(crate) fn crossexam_system(
    n: usize,
    base: Option<&DebateSystem>,
    circuit: &Circuit,
    label: String,
) -> Result<DebateSystem> {
    let base_k = base.map_or(0, |s| s.k);
    if circuit.n_inputs() != n + 2 * base_k {
        return Err(Error::Precondition(format!(
            "circuit has {} inputs, expected {}",
            circuit.n_inputs(),
            n + 2 * base_k
        )));
    }
    let circuit = circuit.trimmed();
    let m = circuit.size();
    let b = index_bits(m);
    let k = base_k + m + b;
    let layout = Arc::new(Layout {
        circuit,
        space: IndexSpace::new(n, k),
        base_k,
        m,
        b,
    });
    let strategies: [Arc<dyn ProverStrategy>; 2] = [
        Arc::new(Prover0 {
            layout: layout.clone(),
            base: base.map(|s| s.strategies[0].clone()),
        }),
        Arc::new(Prover1 {
            layout: layout.clone(),
            base: base.map(|s| s.strategies[1].clone()),
        }),
    ];
    let mut sys = DebateSystem::new(n, k, strategies, Arc::new(Scripted(Logic(layout))), label)?;
    if let Some(base) = base {
        sys.index_origin = (0..sys.space().total())
            .map(|i| (i < base.space().total()).then(|| base.index_origin[i]).flatten())
            .collect();
    }
    Ok(sys)
}

/// Cross-examination debate for a circuit with `m` gates:
/// `k = m + B` rounds and at most `B + 3` probes, `B = max(⌈log2 m⌉, 1)`.
pub fn build_crossexam_debate(c: &Circuit) -> Result<DebateSystem> {
    crossexam_system(c.n_inputs(), None, c, "crossexam".into())
}
