//! Fan-in-two circuits over AND/OR/NOT.

mod builder;
mod dtree;
mod netlist;
mod normalize;

use std::fmt;

pub use builder::{majority_circuit, CircuitBuilder, Sig};
pub(crate) use dtree::tree_signal;
pub use dtree::{decision_tree_to_circuit, DecisionTree, DtNode, TreeCircuit};
pub use netlist::parse_netlist;
pub use normalize::{normalize_alternating, nref_value, Kind, NNode, NRef, NormalizedCircuit};

use crate::boolfn::BoolFn;
use crate::error::{Error, Result};

/// Operand reference: a primary input (0-based) or an earlier gate (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ref {
    Input(usize),
    Gate(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    And(Ref, Ref),
    Or(Ref, Ref),
    Not(Ref),
}

impl Gate {
    pub fn operands(&self) -> impl Iterator<Item = Ref> {
        let (a, b) = match *self {
            Gate::And(a, b) | Gate::Or(a, b) => (a, Some(b)),
            Gate::Not(a) => (a, None),
        };
        std::iter::once(a).chain(b)
    }

    /// The gate's logic table applied to operand values (`b` ignored for NOT).
    pub fn apply(&self, a: bool, b: bool) -> bool {
        match self {
            Gate::And(..) => a && b,
            Gate::Or(..) => a || b,
            Gate::Not(..) => !a,
        }
    }

    pub fn mnemonic(&self) -> &'static str {
        match self {
            Gate::And(..) => "AND",
            Gate::Or(..) => "OR",
            Gate::Not(..) => "NOT",
        }
    }
}

/// A validated single-output circuit; gates are in topological order.
#[derive(Clone, PartialEq, Eq)]
pub struct Circuit {
    n_inputs: usize,
    gates: Vec<Gate>,
    names: Vec<String>,
    output: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CircuitMetrics {
    pub size: usize,
    pub depth: usize,
}

impl Circuit {
    pub fn new(n_inputs: usize, gates: Vec<Gate>, output: usize) -> Result<Self> {
        let names = (1..=gates.len()).map(|i| format!("g{i}")).collect();
        Self::with_names(n_inputs, gates, names, output)
    }

    pub fn with_names(
        n_inputs: usize,
        gates: Vec<Gate>,
        names: Vec<String>,
        output: usize,
    ) -> Result<Self> {
        if names.len() != gates.len() {
            return Err(Error::InvalidCircuit("one name per gate required".into()));
        }
        if output >= gates.len() {
            return Err(Error::InvalidCircuit(format!(
                "output gate {output} does not exist ({} gates)",
                gates.len()
            )));
        }
        for (g, gate) in gates.iter().enumerate() {
            for op in gate.operands() {
                match op {
                    Ref::Input(i) if i >= n_inputs => {
                        return Err(Error::InvalidCircuit(format!(
                            "gate {} reads input {} of {n_inputs}",
                            names[g],
                            i + 1
                        )))
                    }
                    Ref::Gate(h) if h >= g => {
                        return Err(Error::InvalidCircuit(format!(
                            "gate {} reads a gate that is not earlier",
                            names[g]
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(Self {
            n_inputs,
            gates,
            names,
            output,
        })
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate_name(&self, g: usize) -> &str {
        &self.names[g]
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    /// Longest input-to-output path, counted in gates (NOT included).
    pub fn depth(&self) -> usize {
        self.gate_depths()[self.output]
    }

    fn gate_depths(&self) -> Vec<usize> {
        let mut depth = vec![0usize; self.gates.len()];
        for (g, gate) in self.gates.iter().enumerate() {
            depth[g] = 1 + gate
                .operands()
                .map(|op| match op {
                    Ref::Input(_) => 0,
                    Ref::Gate(h) => depth[h],
                })
                .max()
                .unwrap_or(0);
        }
        depth
    }

    pub fn metrics(&self) -> CircuitMetrics {
        CircuitMetrics {
            size: self.size(),
            depth: self.depth(),
        }
    }

    /// Drops gates listed after the output; they cannot feed it.
    pub fn trimmed(&self) -> Circuit {
        let keep = self.output + 1;
        Circuit {
            n_inputs: self.n_inputs,
            gates: self.gates[..keep].to_vec(),
            names: self.names[..keep].to_vec(),
            output: self.output,
        }
    }

    pub fn eval(&self, x: &[bool]) -> Result<bool> {
        Ok(self.eval_gates(x)?[self.output])
    }

    /// Value of every gate on `x`.
    pub fn eval_gates(&self, x: &[bool]) -> Result<Vec<bool>> {
        if x.len() != self.n_inputs {
            return Err(Error::InputShape {
                expected: self.n_inputs,
                got: x.len(),
            });
        }
        let v = self.eval_lazy(&mut |i| Ok::<_, ()>(x[i])).unwrap();
        Ok(v)
    }

    /// Evaluates every gate, fetching inputs on demand. AND/OR skip their
    /// second operand when the first is controlling, so an input is only
    /// fetched when some gate value needs it.
    pub fn eval_lazy<E>(
        &self,
        input: &mut dyn FnMut(usize) -> Result<bool, E>,
    ) -> Result<Vec<bool>, E> {
        let mut vals: Vec<bool> = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            let v = match *gate {
                Gate::And(a, b) => fetch(a, &vals, input)? && fetch(b, &vals, input)?,
                Gate::Or(a, b) => fetch(a, &vals, input)? || fetch(b, &vals, input)?,
                Gate::Not(a) => !fetch(a, &vals, input)?,
            };
            vals.push(v);
        }
        Ok(vals)
    }

    /// Output only, evaluating just the output's cone with short-circuiting.
    pub fn eval_output_lazy<E>(
        &self,
        input: &mut dyn FnMut(usize) -> Result<bool, E>,
    ) -> Result<bool, E> {
        let mut memo: Vec<Option<bool>> = vec![None; self.gates.len()];
        self.eval_ref_lazy(Ref::Gate(self.output), &mut memo, input)
    }

    fn eval_ref_lazy<E>(
        &self,
        r: Ref,
        memo: &mut Vec<Option<bool>>,
        input: &mut dyn FnMut(usize) -> Result<bool, E>,
    ) -> Result<bool, E> {
        let g = match r {
            Ref::Input(i) => return input(i),
            Ref::Gate(g) => g,
        };
        if let Some(v) = memo[g] {
            return Ok(v);
        }
        let v = match self.gates[g] {
            Gate::And(a, b) => {
                self.eval_ref_lazy(a, memo, input)? && self.eval_ref_lazy(b, memo, input)?
            }
            Gate::Or(a, b) => {
                self.eval_ref_lazy(a, memo, input)? || self.eval_ref_lazy(b, memo, input)?
            }
            Gate::Not(a) => !self.eval_ref_lazy(a, memo, input)?,
        };
        memo[g] = Some(v);
        Ok(v)
    }

    pub fn truth_table(&self) -> Result<BoolFn> {
        BoolFn::from_fn(self.n_inputs, |x| self.eval(x).expect("shape checked"))
    }

    /// True when both circuits agree on all inputs.
    pub fn equivalent(&self, other: &Circuit) -> bool {
        self.n_inputs == other.n_inputs
            && (0..1usize << self.n_inputs).all(|i| {
                let x = crate::boolfn::index_to_bits(i, self.n_inputs);
                self.eval(&x).ok() == other.eval(&x).ok()
            })
    }

    pub fn count_not(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Not(_)))
            .count()
    }

    pub fn to_netlist(&self) -> String {
        let mut out = format!("inputs {}\n", self.n_inputs);
        let r = |r: Ref| match r {
            Ref::Input(i) => format!("x{}", i + 1),
            Ref::Gate(g) => self.names[g].clone(),
        };
        for (g, gate) in self.gates.iter().enumerate() {
            let ops: Vec<String> = gate.operands().map(r).collect();
            out.push_str(&format!(
                "gate {} {} {}\n",
                self.names[g],
                gate.mnemonic(),
                ops.join(" ")
            ));
        }
        out.push_str(&format!("output {}\n", self.names[self.output]));
        out
    }
}

impl fmt::Debug for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Circuit(inputs={}, size={}, depth={})",
            self.n_inputs,
            self.size(),
            self.depth()
        )
    }
}

fn fetch<E>(
    r: Ref,
    vals: &[bool],
    input: &mut dyn FnMut(usize) -> Result<bool, E>,
) -> Result<bool, E> {
    match r {
        Ref::Input(i) => input(i),
        Ref::Gate(g) => Ok(vals[g]),
    }
}

/// XOR as `(a OR b) AND NOT (a AND b)`: four gates.
pub fn parity_circuit(n: usize) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::Precondition("parity needs at least one input".into()));
    }
    let mut b = CircuitBuilder::new(n);
    let mut layer: Vec<Sig> = (0..n).map(|i| b.input(i)).collect();
    while layer.len() > 1 {
        layer = layer
            .chunks(2)
            .map(|c| if c.len() == 2 { b.xor(c[0], c[1]) } else { c[0] })
            .collect();
    }
    b.finish(layer[0])
}

/// Balanced AND (or OR) tree.
pub fn and_or_circuit(n: usize, and: bool) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::Precondition("need at least one input".into()));
    }
    let mut b = CircuitBuilder::new(n);
    let mut layer: Vec<Sig> = (0..n).map(|i| b.input(i)).collect();
    while layer.len() > 1 {
        layer = layer
            .chunks(2)
            .map(|c| match (c.len(), and) {
                (2, true) => b.and(c[0], c[1]),
                (2, false) => b.or(c[0], c[1]),
                _ => c[0],
            })
            .collect();
    }
    b.finish(layer[0])
}

/// Shannon-expansion circuit realizing an arbitrary truth table.
pub fn circuit_from_function(f: &BoolFn) -> Result<Circuit> {
    let tree = DecisionTree::full(f);
    Ok(decision_tree_to_circuit(&tree)?.circuit)
}
