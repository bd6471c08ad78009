//! Deterministic decision trees over an index space, their text format, and
//! conversion to circuits.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use super::{Circuit, CircuitBuilder, Sig};
use crate::boolfn::BoolFn;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DtNode {
    Query { index: usize, children: [usize; 2] },
    Leaf(bool),
}

/// A decision tree; node 0 is the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionTree {
    space: usize,
    nodes: Vec<DtNode>,
}

impl DecisionTree {
    pub fn new(space: usize, nodes: Vec<DtNode>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidCircuit("decision tree has no nodes".into()));
        }
        let mut seen = vec![false; nodes.len()];
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            if seen[i] {
                return Err(Error::InvalidCircuit(format!(
                    "tree node {i} is reachable twice"
                )));
            }
            seen[i] = true;
            if let DtNode::Query { index, children } = nodes[i] {
                if index >= space {
                    return Err(Error::InvalidCircuit(format!(
                        "tree queries index {index} outside a space of {space}"
                    )));
                }
                for c in children {
                    if c >= nodes.len() {
                        return Err(Error::InvalidCircuit(format!("tree child {c} missing")));
                    }
                    stack.push(c);
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidCircuit(format!("tree node {i} unreachable")));
        }
        Ok(Self { space, nodes })
    }

    pub fn constant(space: usize, v: bool) -> Self {
        Self {
            space,
            nodes: vec![DtNode::Leaf(v)],
        }
    }

    /// Complete Shannon tree of a truth table, querying x_1 first.
    pub fn full(f: &BoolFn) -> Self {
        fn grow(f: &BoolFn, var: usize, prefix: usize, nodes: &mut Vec<DtNode>) -> usize {
            let id = nodes.len();
            if var == f.n() {
                nodes.push(DtNode::Leaf(f.at(prefix)));
                return id;
            }
            nodes.push(DtNode::Leaf(false));
            let c0 = grow(f, var + 1, prefix, nodes);
            let c1 = grow(f, var + 1, prefix | 1 << var, nodes);
            if let (DtNode::Leaf(a), DtNode::Leaf(b)) = (nodes[c0], nodes[c1]) {
                if a == b {
                    nodes.truncate(id);
                    nodes.push(DtNode::Leaf(a));
                    return id;
                }
            }
            nodes[id] = DtNode::Query {
                index: var,
                children: [c0, c1],
            };
            id
        }
        let mut nodes = Vec::new();
        grow(f, 0, 0, &mut nodes);
        Self {
            space: f.n(),
            nodes,
        }
    }

    pub fn space(&self) -> usize {
        self.space
    }

    pub fn nodes(&self) -> &[DtNode] {
        &self.nodes
    }

    /// Longest root-to-leaf path, in queries.
    pub fn depth(&self) -> usize {
        fn d(t: &DecisionTree, i: usize) -> usize {
            match t.nodes[i] {
                DtNode::Leaf(_) => 0,
                DtNode::Query { children, .. } => 1 + d(t, children[0]).max(d(t, children[1])),
            }
        }
        d(self, 0)
    }

    /// Every index queried anywhere in the tree.
    pub fn indices(&self) -> BTreeSet<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                DtNode::Query { index, .. } => Some(*index),
                DtNode::Leaf(_) => None,
            })
            .collect()
    }

    /// Runs the tree; returns the verdict and the leaf reached. Queried
    /// indices are reported through `lookup`.
    pub fn eval_with<E>(
        &self,
        lookup: &mut dyn FnMut(usize) -> Result<bool, E>,
    ) -> Result<(bool, usize), E> {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                DtNode::Leaf(v) => return Ok((v, i)),
                DtNode::Query { index, children } => {
                    i = children[lookup(index)? as usize];
                }
            }
        }
    }

    pub fn eval(&self, input: &[bool]) -> bool {
        self.eval_with(&mut |i| Ok::<_, ()>(input[i])).unwrap().0
    }

    /// The same tree with every leaf flipped.
    pub fn complement(&self) -> Self {
        let nodes = self
            .nodes
            .iter()
            .map(|n| match *n {
                DtNode::Leaf(v) => DtNode::Leaf(!v),
                q => q,
            })
            .collect();
        Self {
            space: self.space,
            nodes,
        }
    }

    pub fn with_leaf(&self, leaf: usize, v: bool) -> Result<Self> {
        match self.nodes.get(leaf) {
            Some(DtNode::Leaf(_)) => {
                let mut t = self.clone();
                t.nodes[leaf] = DtNode::Leaf(v);
                Ok(t)
            }
            _ => Err(Error::Precondition(format!("node {leaf} is not a leaf"))),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, n) in self.nodes.iter().enumerate() {
            match n {
                DtNode::Query { index, children } => {
                    writeln!(out, "node {i} {index} {} {}", children[0], children[1]).unwrap()
                }
                DtNode::Leaf(v) => writeln!(out, "leaf {i} {}", *v as u8).unwrap(),
            }
        }
        out
    }

    /// Parses `node <id> <index> <child0> <child1>` / `leaf <id> <bit>`
    /// records tagged with their source line; the first record is the root.
    pub fn parse_records(space: usize, lines: &[(usize, &str)]) -> Result<Self> {
        let mut ids: HashMap<&str, usize> = HashMap::new();
        let mut raw: Vec<(usize, Vec<&str>)> = Vec::new();
        for &(line, text) in lines {
            let toks: Vec<&str> = text.split_whitespace().collect();
            if toks.len() < 2 {
                return Err(Error::Parse {
                    line,
                    msg: "expected a node or leaf record".into(),
                });
            }
            if ids.insert(toks[1], raw.len()).is_some() {
                return Err(Error::Parse {
                    line,
                    msg: format!("duplicate tree node id `{}`", toks[1]),
                });
            }
            raw.push((line, toks));
        }
        let mut nodes = Vec::with_capacity(raw.len());
        for (line, toks) in &raw {
            let perr = |msg: String| Error::Parse { line: *line, msg };
            let node = match (toks[0], toks.len()) {
                ("node", 5) => {
                    let index = toks[2]
                        .parse()
                        .map_err(|_| perr(format!("bad index `{}`", toks[2])))?;
                    let child = |t: &str| {
                        ids.get(t)
                            .copied()
                            .ok_or_else(|| perr(format!("unknown child `{t}`")))
                    };
                    DtNode::Query {
                        index,
                        children: [child(toks[3])?, child(toks[4])?],
                    }
                }
                ("leaf", 3) => match toks[2] {
                    "0" => DtNode::Leaf(false),
                    "1" => DtNode::Leaf(true),
                    b => return Err(perr(format!("bad leaf bit `{b}`"))),
                },
                _ => return Err(perr(format!("malformed record `{}`", toks.join(" ")))),
            };
            nodes.push(node);
        }
        let first_line = lines.first().map_or(1, |l| l.0);
        Self::new(space, nodes).map_err(|e| Error::Parse {
            line: first_line,
            msg: e.to_string(),
        })
    }

    /// Single-tree file: optional `space <N>` line then records.
    pub fn parse(text: &str, default_space: Option<usize>) -> Result<Self> {
        let mut space = default_space;
        let mut recs = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("space ") {
                space = Some(rest.trim().parse().map_err(|_| Error::Parse {
                    line: no + 1,
                    msg: format!("bad space `{rest}`"),
                })?);
            } else {
                recs.push((no + 1, line));
            }
        }
        let space = space.ok_or(Error::Parse {
            line: 1,
            msg: "tree file needs a `space <N>` line".into(),
        })?;
        Self::parse_records(space, &recs)
    }
}

/// A converted tree with its size accounting.
#[derive(Clone, Debug)]
pub struct TreeCircuit {
    pub circuit: Circuit,
    /// NOT gates in the circuit (the overhead on top of three gates per node).
    pub not_gates: usize,
}

/// Builds the multiplexer circuit of a tree inside an existing builder.
pub(crate) fn tree_signal(t: &DecisionTree, b: &mut CircuitBuilder, inputs: &[Sig]) -> Sig {
    fn go(t: &DecisionTree, i: usize, b: &mut CircuitBuilder, inputs: &[Sig]) -> Sig {
        match t.nodes[i] {
            DtNode::Leaf(v) => Sig::Const(v),
            DtNode::Query { index, children } => {
                let lo = go(t, children[0], b, inputs);
                let hi = go(t, children[1], b, inputs);
                b.mux(inputs[index], hi, lo)
            }
        }
    }
    go(t, 0, b, inputs)
}

/// Each internal node becomes `(v AND c1) OR (NOT v AND c0)`, at most three
/// gates plus one shared NOT per queried index.
pub fn decision_tree_to_circuit(t: &DecisionTree) -> Result<TreeCircuit> {
    let mut b = CircuitBuilder::new(t.space);
    let inputs: Vec<Sig> = (0..t.space).map(|i| b.input(i)).collect();
    let out = tree_signal(t, &mut b, &inputs);
    let circuit = b.finish(out)?;
    let not_gates = circuit.count_not();
    Ok(TreeCircuit { circuit, not_gates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::index_to_bits;

    fn leaf(v: bool) -> DtNode {
        DtNode::Leaf(v)
    }

    #[test]
    fn identity_and_negation() {
        let t = DecisionTree::new(
            3,
            vec![
                DtNode::Query { index: 2, children: [1, 2] },
                leaf(false),
                leaf(true),
            ],
        )
        .unwrap();
        let c = decision_tree_to_circuit(&t).unwrap().circuit;
        assert_eq!(c.size(), 1);
        for i in 0..8 {
            let x = index_to_bits(i, 3);
            assert_eq!(c.eval(&x).unwrap(), x[2]);
        }
        let n = decision_tree_to_circuit(&t.complement()).unwrap().circuit;
        for i in 0..8 {
            let x = index_to_bits(i, 3);
            assert_eq!(n.eval(&x).unwrap(), !x[2]);
        }
    }

    #[test]
    fn and_tree_is_equivalent() {
        let t = DecisionTree::new(
            2,
            vec![
                DtNode::Query { index: 0, children: [1, 2] },
                leaf(false),
                DtNode::Query { index: 1, children: [3, 4] },
                leaf(false),
                leaf(true),
            ],
        )
        .unwrap();
        assert_eq!(t.depth(), 2);
        let c = decision_tree_to_circuit(&t).unwrap().circuit;
        for i in 0..4 {
            let x = index_to_bits(i, 2);
            assert_eq!(c.eval(&x).unwrap(), t.eval(&x));
        }
    }

    #[test]
    fn full_tree_size_bound() {
        let f = BoolFn::parity(4).unwrap();
        let t = DecisionTree::full(&f);
        assert_eq!(t.depth(), 4);
        let tc = decision_tree_to_circuit(&t).unwrap();
        assert!(tc.circuit.size() <= 3 * ((1 << 4) - 1) + tc.not_gates);
        assert_eq!(tc.circuit.truth_table().unwrap().table(), f.table());
    }

    #[test]
    fn text_round_trip_and_errors() {
        let t = DecisionTree::full(&BoolFn::majority(3).unwrap());
        let text = format!("space 3\n{}", t.to_text());
        assert_eq!(DecisionTree::parse(&text, None).unwrap(), t);
        assert!(DecisionTree::parse("space 2\nnode 0 5 1 2\nleaf 1 0\nleaf 2 1\n", None).is_err());
        assert!(DecisionTree::parse("space 2\nnode 0 0 1 1\nleaf 1 0\n", None).is_err());
        assert!(DecisionTree::parse("node 0 0 1 2\nleaf 1 0\nleaf 2 1\n", None).is_err());
    }
}
