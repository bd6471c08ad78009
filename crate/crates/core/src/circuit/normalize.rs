//! Leveled alternating form: negations pushed to the leaves, AND at the
//! root, and AND/OR strictly alternating along every root-to-leaf path.

use std::collections::HashMap;

use super::{Circuit, CircuitBuilder, Gate, Ref, Sig};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    And,
    Or,
}

impl Kind {
    pub fn flip(self) -> Kind {
        match self {
            Kind::And => Kind::Or,
            Kind::Or => Kind::And,
        }
    }

    /// Kind of every node at `level` (root is level 0).
    pub fn at_level(level: usize) -> Kind {
        if level.is_multiple_of(2) {
            Kind::And
        } else {
            Kind::Or
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NRef {
    /// Input `var` (0-based), negated when `positive` is false.
    Lit { var: usize, positive: bool },
    Node(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NNode {
    pub kind: Kind,
    pub ops: [NRef; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedCircuit {
    n_inputs: usize,
    nodes: Vec<NNode>,
    root: usize,
    depth: usize,
    source_size: usize,
    source_depth: usize,
}

impl NormalizedCircuit {
    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn nodes(&self) -> &[NNode] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn source_size(&self) -> usize {
        self.source_size
    }

    pub fn source_depth(&self) -> usize {
        self.source_depth
    }

    /// Value of every node on `x` (nodes are stored children first).
    pub fn node_values(&self, x: &[bool]) -> Vec<bool> {
        let mut v = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let val = |r: NRef, v: &[bool]| nref_value(r, x, v);
            let (a, b) = (val(node.ops[0], &v), val(node.ops[1], &v));
            v.push(match node.kind {
                Kind::And => a && b,
                Kind::Or => a || b,
            });
        }
        v
    }

    pub fn eval(&self, x: &[bool]) -> bool {
        self.node_values(x)[self.root]
    }

    /// Checks strict alternation from an AND root and children-first order.
    pub fn is_alternating(&self) -> bool {
        if self.nodes[self.root].kind != Kind::And {
            return false;
        }
        self.nodes.iter().enumerate().all(|(i, node)| {
            node.ops.iter().all(|op| match *op {
                NRef::Lit { var, .. } => var < self.n_inputs,
                NRef::Node(c) => c < i && self.nodes[c].kind == node.kind.flip(),
            })
        })
    }

    /// Gate-level circuit with NOT gates realizing negative literals.
    pub fn to_circuit(&self) -> Result<Circuit> {
        let mut b = CircuitBuilder::new(self.n_inputs);
        let mut map: Vec<Sig> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let sig = |r: NRef, map: &[Sig], b: &mut CircuitBuilder| match r {
                NRef::Lit { var, positive } => {
                    let s = b.input(var);
                    if positive {
                        s
                    } else {
                        b.not(s)
                    }
                }
                NRef::Node(c) => map[c],
            };
            let x = sig(node.ops[0], &map, &mut b);
            let y = sig(node.ops[1], &map, &mut b);
            // Identity gates must survive, so bypass the folding constructors.
            let (Sig::Wire(x), Sig::Wire(y)) = (x, y) else {
                unreachable!("no constants in a normalized circuit")
            };
            let gate = match node.kind {
                Kind::And => Gate::And(x, y),
                Kind::Or => Gate::Or(x, y),
            };
            map.push(b.push(gate));
        }
        b.finish(map[self.root])
    }
}

pub fn nref_value(r: NRef, x: &[bool], nodes: &[bool]) -> bool {
    match r {
        NRef::Lit { var, positive } => x[var] == positive,
        NRef::Node(c) => nodes[c],
    }
}

/// A source gate (or input) under a polarity, with NOT gates resolved away.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Rail {
    Lit { var: usize, positive: bool },
    Gate { g: usize, positive: bool },
}

struct Normalizer<'a> {
    c: &'a Circuit,
    nodes: Vec<NNode>,
    memo: HashMap<(Rail, Kind), NRef>,
}

impl Normalizer<'_> {
    fn resolve(&self, r: Ref, positive: bool) -> Rail {
        match r {
            Ref::Input(var) => Rail::Lit { var, positive },
            Ref::Gate(g) => match self.c.gates()[g] {
                Gate::Not(a) => self.resolve(a, !positive),
                _ => Rail::Gate { g, positive },
            },
        }
    }

    /// Kind and operands of a gate rail after De Morgan.
    fn expand(&self, g: usize, positive: bool) -> (Kind, [Rail; 2]) {
        let (kind, a, b) = match self.c.gates()[g] {
            Gate::And(a, b) => (Kind::And, a, b),
            Gate::Or(a, b) => (Kind::Or, a, b),
            Gate::Not(_) => unreachable!("NOT resolved before expansion"),
        };
        let kind = if positive { kind } else { kind.flip() };
        (kind, [self.resolve(a, positive), self.resolve(b, positive)])
    }

    fn build(&mut self, rail: Rail, required: Kind) -> NRef {
        let Rail::Gate { g, positive } = rail else {
            let Rail::Lit { var, positive } = rail else { unreachable!() };
            return NRef::Lit { var, positive };
        };
        if let Some(&r) = self.memo.get(&(rail, required)) {
            return r;
        }
        let (kind, ops) = self.expand(g, positive);
        let node = if kind == required {
            let a = self.build(ops[0], kind.flip());
            let b = self.build(ops[1], kind.flip());
            NNode { kind, ops: [a, b] }
        } else {
            let inner = self.build(rail, kind);
            NNode {
                kind: required,
                ops: [inner, inner],
            }
        };
        self.nodes.push(node);
        let r = NRef::Node(self.nodes.len() - 1);
        self.memo.insert((rail, required), r);
        r
    }
}

/// Pushes negations to the leaves (dual rail), pads kind repeats with
/// identity gates of the missing kind, and wraps a non-AND root as
/// `AND(root, root)`.
pub fn normalize_alternating(c: &Circuit) -> NormalizedCircuit {
    let mut nz = Normalizer {
        c,
        nodes: Vec::new(),
        memo: HashMap::new(),
    };
    let top = nz.resolve(Ref::Gate(c.output()), true);
    let root = match nz.build(top, Kind::And) {
        NRef::Node(r) => r,
        lit @ NRef::Lit { .. } => {
            nz.nodes.push(NNode {
                kind: Kind::And,
                ops: [lit, lit],
            });
            nz.nodes.len() - 1
        }
    };
    let mut depth = vec![0usize; nz.nodes.len()];
    for (i, node) in nz.nodes.iter().enumerate() {
        depth[i] = 1 + node
            .ops
            .iter()
            .map(|op| match op {
                NRef::Node(c) => depth[*c],
                NRef::Lit { .. } => 0,
            })
            .max()
            .unwrap();
    }
    NormalizedCircuit {
        n_inputs: c.n_inputs(),
        depth: depth[root],
        nodes: nz.nodes,
        root,
        source_size: c.size(),
        source_depth: c.depth(),
    }
}
