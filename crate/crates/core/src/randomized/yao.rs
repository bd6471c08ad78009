//! The hard distribution for shallow trees and its pairing bound.

use std::collections::BTreeSet;

use num_traits::Zero;

use super::{fmt_prob, Prob};
use crate::boolfn::{format_bits, BoolFn};
use crate::circuit::DecisionTree;
use crate::debate::{run_on, DebateSystem, IndexSpace, Memo, View};
use crate::error::{Error, Result};

/// One witness pair and the transcript valid for both members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YaoPair {
    /// 1-based variable.
    pub index: usize,
    pub w: Vec<bool>,
    pub w_tilde: Vec<bool>,
    pub transcript: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub x: Vec<bool>,
    pub transcript: Vec<bool>,
    pub truth: bool,
    pub weight: Prob,
    /// 1-based variable of the pair this atom came from.
    pub pair: usize,
}

/// Uniform over `2n` atoms; colliding witnesses appear once per pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HardDistribution {
    pub space: IndexSpace,
    pub pairs: Vec<YaoPair>,
    pub atoms: Vec<Atom>,
}

fn honest_bit(sys: &DebateSystem, role: usize, x: &[bool], bits: &[Option<bool>], memo: &mut Memo) -> Result<bool> {
    let view = View::new(x, bits, sys.k);
    sys.strategies[role]
        .bit(&view, memo)
        .map_err(|p| Error::Internal(format!("strategy read unset position {}", p.0)))
}

/// For each variable `i`: α bits from honest Prover 0 on `w_i`, β bits from
/// honest Prover 1 on `w̃_i`, each seeing the interleaved history. Ground
/// truths are checked against the verifier.
pub fn build_yao_distribution(sys: &DebateSystem, f: &BoolFn) -> Result<HardDistribution> {
    if f.n() != sys.n {
        return Err(Error::Precondition(format!(
            "function has {} variables, system has {}",
            f.n(),
            sys.n
        )));
    }
    if !f.depends_on_all() {
        return Err(Error::Precondition(format!(
            "{} does not depend on every variable",
            f.name()
        )));
    }
    let n = sys.n;
    let weight = Prob::new(1, 2 * n as u64);
    let mut pairs = Vec::with_capacity(n);
    let mut atoms = Vec::with_capacity(2 * n);
    for i in 1..=n {
        let wp = f.witness_pair(i)?;
        let mut bits: Vec<Option<bool>> = Vec::with_capacity(2 * sys.k);
        let (mut m0, mut m1): (Memo, Memo) = (None, None);
        for t in 0..2 * sys.k {
            let b = if t % 2 == 0 {
                honest_bit(sys, 0, &wp.w, &bits, &mut m0)?
            } else {
                honest_bit(sys, 1, &wp.w_tilde, &bits, &mut m1)?
            };
            bits.push(Some(b));
        }
        let transcript: Vec<bool> = bits.into_iter().map(Option::unwrap).collect();
        for (x, want) in [(&wp.w, false), (&wp.w_tilde, true)] {
            let got = run_on(sys.verifier.as_ref(), x, &transcript)?.verdict;
            if got != want {
                return Err(Error::Internal(format!(
                    "verifier gives {} on x={} with the shared transcript {} for variable {i}",
                    got as u8,
                    format_bits(x),
                    format_bits(&transcript)
                )));
            }
            atoms.push(Atom {
                x: x.clone(),
                transcript: transcript.clone(),
                truth: want,
                weight,
                pair: i,
            });
        }
        pairs.push(YaoPair {
            index: i,
            w: wp.w,
            w_tilde: wp.w_tilde,
            transcript,
        });
    }
    Ok(HardDistribution {
        space: sys.space(),
        pairs,
        atoms,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingReport {
    pub measured_error: Prob,
    /// Forced pairs over `2n`.
    pub certified_lower_bound: Prob,
    pub forced_pairs: usize,
    /// Distinct input positions queried anywhere in the tree.
    pub distinct_x: usize,
}

impl PairingReport {
    /// The tree queries fewer than `n/8` input positions.
    pub fn below_eighth(&self, n: usize) -> bool {
        8 * self.distinct_x < n
    }
}

fn run_tree(t: &DecisionTree, x: &[bool], transcript: &[bool]) -> (bool, usize, Vec<usize>) {
    let n = x.len();
    let mut probes = Vec::new();
    let (v, leaf) = t
        .eval_with::<()>(&mut |i| {
            probes.push(i);
            Ok(if i < n { x[i] } else { transcript[i - n] })
        })
        .unwrap();
    (v, leaf, probes)
}

/// Error of `tree` under `d`, and the part of it forced by pairs whose
/// witness position the tree never reads.
pub fn pairing_error_bound(tree: &DecisionTree, d: &HardDistribution) -> Result<PairingReport> {
    if tree.space() != d.space.total() {
        return Err(Error::Precondition(format!(
            "tree is over {} indices, distribution over {}",
            tree.space(),
            d.space.total()
        )));
    }
    let n = d.space.n;
    let mut forced = 0;
    for p in &d.pairs {
        let (_, leaf, probes) = run_tree(tree, &p.w, &p.transcript);
        if probes.contains(&(p.index - 1)) {
            continue;
        }
        let (_, leaf2, probes2) = run_tree(tree, &p.w_tilde, &p.transcript);
        if leaf != leaf2 || probes != probes2 {
            return Err(Error::Internal(format!(
                "pair for variable {} splits although x_{} is never read",
                p.index, p.index
            )));
        }
        forced += 1;
    }
    let mut measured = Prob::zero();
    for a in &d.atoms {
        if run_tree(tree, &a.x, &a.transcript).0 != a.truth {
            measured += a.weight;
        }
    }
    let certified = Prob::new(forced as u64, 2 * n as u64);
    if measured < certified {
        return Err(Error::Internal(format!(
            "measured error {} below the certified {}",
            fmt_prob(measured),
            fmt_prob(certified)
        )));
    }
    let distinct_x = tree.indices().into_iter().filter(|&i| i < n).collect::<BTreeSet<_>>().len();
    Ok(PairingReport {
        measured_error: measured,
        certified_lower_bound: certified,
        forced_pairs: forced,
        distinct_x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{normalize_alternating, parity_circuit, parse_netlist, DtNode};
    use crate::debate::{explore_x, IndexSpace};
    use crate::par::Budget;
    use crate::protocols::build_kw_debate;
    use std::ops::ControlFlow;

    fn kw(c: &crate::circuit::Circuit) -> DebateSystem {
        build_kw_debate(&normalize_alternating(c)).unwrap()
    }

    /// `T` is reachable with the given honest role on `x`.
    fn is_valid_for(sys: &DebateSystem, x: &[bool], honest: usize, t: &[bool]) -> bool {
        let budget = Budget::new(1 << 20, "test", "");
        let mut found = false;
        // Reading every position forks on each adversary bit.
        let n = x.len();
        let all = |l: &crate::debate::LeafView<'_>| (0..t.len()).map(|p| l.read(n + p)).collect();
        let _ = explore_x(sys, x, honest, &budget, &mut |l| all(l), &mut |_, tr: Vec<bool>| {
            found |= tr == t;
            Ok(ControlFlow::Continue(()))
        })
        .unwrap();
        found
    }

    #[test]
    fn parity2_has_four_atoms_two_transcripts() {
        let sys = kw(&parity_circuit(2).unwrap());
        let d = build_yao_distribution(&sys, &BoolFn::parity(2).unwrap()).unwrap();
        assert_eq!(d.atoms.len(), 4);
        let ts: BTreeSet<_> = d.pairs.iter().map(|p| p.transcript.clone()).collect();
        assert!(ts.len() <= 2);
        for a in &d.atoms {
            assert_eq!(a.weight, Prob::new(1, 4));
        }
    }

    #[test]
    fn and2_transcripts_valid_for_both_members() {
        let c = parse_netlist("inputs 2\ngate g AND x1 x2\noutput g").unwrap();
        let sys = kw(&c);
        let d = build_yao_distribution(&sys, &BoolFn::and(2).unwrap()).unwrap();
        assert_eq!(d.atoms.len(), 4);
        for p in &d.pairs {
            assert!(is_valid_for(&sys, &p.w, 0, &p.transcript));
            assert!(is_valid_for(&sys, &p.w_tilde, 1, &p.transcript));
        }
        for pair in d.atoms.chunks(2) {
            assert_ne!(pair[0].truth, pair[1].truth);
        }
    }

    #[test]
    fn x1_only_tree_on_parity4() {
        let sys = kw(&parity_circuit(4).unwrap());
        let d = build_yao_distribution(&sys, &BoolFn::parity(4).unwrap()).unwrap();
        let space = IndexSpace::new(4, sys.k).total();
        let t = DecisionTree::new(
            space,
            vec![
                DtNode::Query { index: 0, children: [1, 2] },
                DtNode::Leaf(false),
                DtNode::Leaf(true),
            ],
        )
        .unwrap();
        let r = pairing_error_bound(&t, &d).unwrap();
        assert_eq!(r.forced_pairs, 3);
        assert!(r.certified_lower_bound >= Prob::new(3, 8));
        assert!(r.measured_error >= r.certified_lower_bound);
    }

    #[test]
    fn constant_tree_is_forced_everywhere() {
        let sys = kw(&parity_circuit(4).unwrap());
        let d = build_yao_distribution(&sys, &BoolFn::parity(4).unwrap()).unwrap();
        let t = DecisionTree::constant(d.space.total(), true);
        let r = pairing_error_bound(&t, &d).unwrap();
        assert!(r.below_eighth(4));
        assert_eq!(r.measured_error, Prob::new(1, 2));
        assert!(r.measured_error >= Prob::new(7, 16));
    }

    #[test]
    fn full_x_tree_may_certify_nothing() {
        let sys = kw(&parity_circuit(2).unwrap());
        let d = build_yao_distribution(&sys, &BoolFn::parity(2).unwrap()).unwrap();
        let f = BoolFn::parity(2).unwrap();
        let inner = DecisionTree::full(&f);
        let t = DecisionTree::new(d.space.total(), inner.nodes().to_vec()).unwrap();
        let r = pairing_error_bound(&t, &d).unwrap();
        assert_eq!(r.forced_pairs, 0);
        assert_eq!(r.certified_lower_bound, Prob::zero());
    }

    #[test]
    fn constant_function_has_no_distribution() {
        let c = parse_netlist("inputs 2\ngate g AND x1 x2\noutput g").unwrap();
        let sys = kw(&c);
        let e = build_yao_distribution(&sys, &BoolFn::constant(2, false).unwrap()).unwrap_err();
        assert!(matches!(e, Error::Precondition(_)));
    }
}
