use std::collections::{HashMap, VecDeque};

use super::{Circuit, Gate, Ref};
use crate::error::{Error, Result};

/// A signal under construction: a folded constant or a wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sig {
    Const(bool),
    Wire(Ref),
}

/// Incremental circuit construction with constant folding.
///
/// NOT gates are cached per wire so negating a signal twice costs one gate.
#[derive(Debug)]
pub struct CircuitBuilder {
    n_inputs: usize,
    gates: Vec<Gate>,
    not_cache: HashMap<Ref, Ref>,
}

impl CircuitBuilder {
    pub fn new(n_inputs: usize) -> Self {
        Self {
            n_inputs,
            gates: Vec::new(),
            not_cache: HashMap::new(),
        }
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn input(&self, i: usize) -> Sig {
        assert!(i < self.n_inputs, "input {i} out of range");
        Sig::Wire(Ref::Input(i))
    }

    pub(crate) fn push(&mut self, g: Gate) -> Sig {
        self.gates.push(g);
        Sig::Wire(Ref::Gate(self.gates.len() - 1))
    }

    pub fn and(&mut self, a: Sig, b: Sig) -> Sig {
        match (a, b) {
            (Sig::Const(false), _) | (_, Sig::Const(false)) => Sig::Const(false),
            (Sig::Const(true), s) | (s, Sig::Const(true)) => s,
            (Sig::Wire(x), Sig::Wire(y)) if x == y => a,
            (Sig::Wire(x), Sig::Wire(y)) => self.push(Gate::And(x, y)),
        }
    }

    pub fn or(&mut self, a: Sig, b: Sig) -> Sig {
        match (a, b) {
            (Sig::Const(true), _) | (_, Sig::Const(true)) => Sig::Const(true),
            (Sig::Const(false), s) | (s, Sig::Const(false)) => s,
            (Sig::Wire(x), Sig::Wire(y)) if x == y => a,
            (Sig::Wire(x), Sig::Wire(y)) => self.push(Gate::Or(x, y)),
        }
    }

    pub fn not(&mut self, a: Sig) -> Sig {
        let r = match a {
            Sig::Const(v) => return Sig::Const(!v),
            Sig::Wire(r) => r,
        };
        if let Ref::Gate(g) = r {
            if let Gate::Not(inner) = self.gates[g] {
                return Sig::Wire(inner);
            }
        }
        if let Some(&n) = self.not_cache.get(&r) {
            return Sig::Wire(n);
        }
        let s = self.push(Gate::Not(r));
        if let Sig::Wire(n) = s {
            self.not_cache.insert(r, n);
        }
        s
    }

    /// `(a OR b) AND NOT (a AND b)`.
    pub fn xor(&mut self, a: Sig, b: Sig) -> Sig {
        match (a, b) {
            (Sig::Const(c), s) | (s, Sig::Const(c)) => {
                if c {
                    self.not(s)
                } else {
                    s
                }
            }
            _ if a == b => Sig::Const(false),
            _ => {
                let o = self.or(a, b);
                let n = self.and(a, b);
                let nn = self.not(n);
                self.and(o, nn)
            }
        }
    }

    pub fn xnor(&mut self, a: Sig, b: Sig) -> Sig {
        let x = self.xor(a, b);
        self.not(x)
    }

    /// `sel ? hi : lo`. The selector is the first operand of each AND so a
    /// short-circuiting evaluator reads it before the data wire.
    pub fn mux(&mut self, sel: Sig, hi: Sig, lo: Sig) -> Sig {
        if hi == lo {
            return hi;
        }
        match (sel, hi, lo) {
            (Sig::Const(true), _, _) => hi,
            (Sig::Const(false), _, _) => lo,
            (_, Sig::Const(true), Sig::Const(false)) => sel,
            (_, Sig::Const(false), Sig::Const(true)) => self.not(sel),
            (_, Sig::Const(false), _) => {
                let ns = self.not(sel);
                self.and(ns, lo)
            }
            (_, Sig::Const(true), _) => self.or(sel, lo),
            (_, _, Sig::Const(false)) => self.and(sel, hi),
            (_, _, Sig::Const(true)) => {
                let ns = self.not(sel);
                self.or(ns, hi)
            }
            _ => {
                let a = self.and(sel, hi);
                let ns = self.not(sel);
                let b = self.and(ns, lo);
                self.or(a, b)
            }
        }
    }

    /// Copies `c` into this builder with its inputs bound to `inputs`.
    pub fn instantiate(&mut self, c: &Circuit, inputs: &[Sig]) -> Result<Sig> {
        if inputs.len() != c.n_inputs() {
            return Err(Error::InputShape {
                expected: c.n_inputs(),
                got: inputs.len(),
            });
        }
        let mut map: Vec<Sig> = Vec::with_capacity(c.size());
        let get = |r: Ref, map: &[Sig]| match r {
            Ref::Input(i) => inputs[i],
            Ref::Gate(g) => map[g],
        };
        for gate in &c.gates()[..=c.output()] {
            let s = match *gate {
                Gate::And(a, b) => {
                    let (a, b) = (get(a, &map), get(b, &map));
                    self.and(a, b)
                }
                Gate::Or(a, b) => {
                    let (a, b) = (get(a, &map), get(b, &map));
                    self.or(a, b)
                }
                Gate::Not(a) => {
                    let a = get(a, &map);
                    self.not(a)
                }
            };
            map.push(s);
        }
        Ok(map[c.output()])
    }

    /// Full adder: returns (sum, carry).
    pub fn full_adder(&mut self, a: Sig, b: Sig, c: Sig) -> (Sig, Sig) {
        let t = self.xor(a, b);
        let s = self.xor(t, c);
        let ab = self.and(a, b);
        let ct = self.and(c, t);
        (s, self.or(ab, ct))
    }

    pub fn half_adder(&mut self, a: Sig, b: Sig) -> (Sig, Sig) {
        (self.xor(a, b), self.and(a, b))
    }

    /// Binary population count of `bits`, least significant bit first, by
    /// carry-save reduction. Each full adder removes one bit, so the gate
    /// count is linear in the number of inputs.
    pub fn popcount(&mut self, bits: &[Sig]) -> Vec<Sig> {
        let mut columns: Vec<VecDeque<Sig>> = vec![bits.iter().copied().collect()];
        let mut out = Vec::new();
        let mut w = 0;
        while w < columns.len() {
            let mut col = std::mem::take(&mut columns[w]);
            let mut carries = Vec::new();
            while col.len() >= 3 {
                let (a, b, c) = (
                    col.pop_front().unwrap(),
                    col.pop_front().unwrap(),
                    col.pop_front().unwrap(),
                );
                let (s, cy) = self.full_adder(a, b, c);
                col.push_back(s);
                carries.push(cy);
            }
            if col.len() == 2 {
                let (a, b) = (col.pop_front().unwrap(), col.pop_front().unwrap());
                let (s, cy) = self.half_adder(a, b);
                col.push_back(s);
                carries.push(cy);
            }
            out.push(col.pop_front().unwrap_or(Sig::Const(false)));
            if !carries.is_empty() {
                if columns.len() == w + 1 {
                    columns.push(VecDeque::new());
                }
                columns[w + 1].extend(carries);
            }
            w += 1;
        }
        out
    }

    /// `value >= threshold` for an LSB-first unsigned value.
    pub fn at_least(&mut self, value: &[Sig], threshold: usize) -> Sig {
        if value.len() < usize::BITS as usize && threshold >> value.len() != 0 {
            return Sig::Const(false);
        }
        let mut ge = Sig::Const(true);
        for (i, &bit) in value.iter().enumerate() {
            ge = if threshold >> i & 1 == 1 {
                self.and(bit, ge)
            } else {
                self.or(bit, ge)
            };
        }
        ge
    }

    /// Strict majority of an odd number of signals.
    pub fn majority(&mut self, bits: &[Sig]) -> Result<Sig> {
        if bits.len().is_multiple_of(2) {
            return Err(Error::Precondition(format!(
                "majority of {} inputs is undefined on ties; need an odd count",
                bits.len()
            )));
        }
        let count = self.popcount(bits);
        Ok(self.at_least(&count, bits.len().div_ceil(2)))
    }

    /// Closes the circuit with `out` as its output gate. A bare input gets an
    /// identity gate `AND(x, x)`; a constant becomes `x1 AND NOT x1` or
    /// `x1 OR NOT x1`.
    pub fn finish(mut self, out: Sig) -> Result<Circuit> {
        let out = match out {
            Sig::Wire(Ref::Gate(g)) => g,
            Sig::Wire(r @ Ref::Input(_)) => {
                self.gates.push(Gate::And(r, r));
                self.gates.len() - 1
            }
            Sig::Const(v) => {
                if self.n_inputs == 0 {
                    return Err(Error::InvalidCircuit(
                        "constant circuit needs at least one input".into(),
                    ));
                }
                let x = Ref::Input(0);
                let nx = match self.not(Sig::Wire(x)) {
                    Sig::Wire(r) => r,
                    Sig::Const(_) => unreachable!(),
                };
                self.gates
                    .push(if v { Gate::Or(x, nx) } else { Gate::And(x, nx) });
                self.gates.len() - 1
            }
        };
        Circuit::new(self.n_inputs, self.gates, out)
    }
}

/// Majority of `t` inputs (odd `t`) via carry-save popcount and a constant
/// threshold comparison.
pub fn majority_circuit(t: usize) -> Result<Circuit> {
    if t == 0 || t.is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "majority needs an odd input count, got {t}"
        )));
    }
    let mut b = CircuitBuilder::new(t);
    let inputs: Vec<Sig> = (0..t).map(|i| b.input(i)).collect();
    let out = b.majority(&inputs)?;
    b.finish(out)
}
