//! Randomized verifiers: weighted ensembles of decision trees, their error
//! on valid transcripts, the hard distribution for shallow trees, and
//! derandomization by majority vote.

mod newman;
mod yao;

use std::fmt;
use std::fmt::Write as _;
use std::ops::ControlFlow;

use num_rational::Ratio;
use num_traits::{One, Zero};
use rand::Rng;

use crate::circuit::{DecisionTree, DtNode};
use crate::debate::{explore_valid, run_verifier, DebateSystem, IndexSpace};
use crate::error::{Error, Result};
use crate::par::CheckOptions;

pub use newman::{newman_derandomize, newman_sample_count, NewmanOutcome, NewmanStats};
pub use yao::{build_yao_distribution, pairing_error_bound, Atom, HardDistribution, PairingReport, YaoPair};

/// Exact probabilities.
pub type Prob = Ratio<u64>;

/// Formats a probability as `num/den`.
pub fn fmt_prob(p: Prob) -> String {
    format!("{}/{}", p.numer(), p.denom())
}

/// A distribution over deterministic trees on one index space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomizedVerifier {
    space: IndexSpace,
    trees: Vec<(DecisionTree, Prob)>,
}

impl RandomizedVerifier {
    pub fn new(space: IndexSpace, trees: Vec<(DecisionTree, Prob)>) -> Result<Self> {
        if trees.is_empty() {
            return Err(Error::Precondition("randomized verifier has no trees".into()));
        }
        let mut total = Prob::zero();
        for (i, (t, w)) in trees.iter().enumerate() {
            if t.space() != space.total() {
                return Err(Error::Precondition(format!(
                    "tree {i} is over {} indices, space has {}",
                    t.space(),
                    space.total()
                )));
            }
            if w.is_zero() {
                return Err(Error::Precondition(format!("tree {i} has zero weight")));
            }
            total += *w;
        }
        if !total.is_one() {
            return Err(Error::Precondition(format!(
                "tree weights sum to {}, not 1",
                fmt_prob(total)
            )));
        }
        Ok(Self { space, trees })
    }

    /// Equal weights.
    pub fn uniform(space: IndexSpace, trees: Vec<DecisionTree>) -> Result<Self> {
        let w = Prob::new(1, trees.len().max(1) as u64);
        Self::new(space, trees.into_iter().map(|t| (t, w)).collect())
    }

    pub fn space(&self) -> IndexSpace {
        self.space
    }

    pub fn trees(&self) -> &[(DecisionTree, Prob)] {
        &self.trees
    }

    /// Maximum depth over the trees.
    pub fn q(&self) -> usize {
        self.trees.iter().map(|(t, _)| t.depth()).max().unwrap_or(0)
    }

    /// `space <n> <k>`, then per tree a `tree <num>/<den>` line followed by
    /// its node and leaf records.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "space {} {}", self.space.n, self.space.k).unwrap();
        for (t, w) in &self.trees {
            writeln!(out, "tree {}", fmt_prob(*w)).unwrap();
            out.push_str(&t.to_text());
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut space = None;
        let mut blocks: Vec<(usize, Prob, Vec<(usize, &str)>)> = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line_no = no + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: line_no, msg };
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                "space" => {
                    let [_, n, k] = toks[..] else {
                        return Err(perr("expected `space <n> <k>`".into()));
                    };
                    let num = |s: &str| s.parse::<usize>().map_err(|_| perr(format!("bad number `{s}`")));
                    space = Some(IndexSpace::new(num(n)?, num(k)?));
                }
                "tree" => {
                    let [_, w] = toks[..] else {
                        return Err(perr("expected `tree <num>/<den>`".into()));
                    };
                    let (a, b) = w.split_once('/').unwrap_or((w, "1"));
                    let parse = |s: &str| s.parse::<u64>().map_err(|_| perr(format!("bad weight `{w}`")));
                    let (a, b) = (parse(a)?, parse(b)?);
                    if b == 0 {
                        return Err(perr(format!("bad weight `{w}`")));
                    }
                    blocks.push((line_no, Prob::new(a, b), Vec::new()));
                }
                _ => match blocks.last_mut() {
                    Some(b) => b.2.push((line_no, line)),
                    None => return Err(perr("record before the first `tree` line".into())),
                },
            }
        }
        let space = space.ok_or(Error::Parse {
            line: 1,
            msg: "missing `space <n> <k>` line".into(),
        })?;
        let mut trees = Vec::with_capacity(blocks.len());
        for (line, w, recs) in blocks {
            if recs.is_empty() {
                return Err(Error::Parse {
                    line,
                    msg: "tree has no records".into(),
                });
            }
            trees.push((DecisionTree::parse_records(space.total(), &recs)?, w));
        }
        Self::new(space, trees)
    }
}

/// Worst-case error over valid transcripts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RvError {
    pub max: Prob,
    /// First `(x, transcript)` reaching the maximum, if it is positive.
    pub worst: Option<(Vec<bool>, Vec<bool>)>,
    pub leaves: u64,
}

impl fmt::Display for RvError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_prob(self.max))
    }
}

/// Weight of trees disagreeing with the deterministic verifier, maximised
/// over all valid `(x, T)`.
pub fn rv_error(rv: &RandomizedVerifier, sys: &DebateSystem, opts: CheckOptions) -> Result<RvError> {
    if rv.space != sys.space() {
        return Err(Error::Precondition(format!(
            "randomized verifier space {:?} differs from the system's {:?}",
            rv.space,
            sys.space()
        )));
    }
    let v = sys.verifier.as_ref();
    let per_x = explore_valid(
        sys,
        opts,
        "randomized error",
        |_| RvError {
            max: Prob::zero(),
            worst: None,
            leaves: 0,
        },
        |leaf| {
            let truth = run_verifier(v, &mut |i| leaf.read(i))?;
            let mut wrong = Prob::zero();
            for (t, w) in &rv.trees {
                let (b, _) = t.eval_with(&mut |i| leaf.read(i))?;
                if truth.as_ref().is_ok_and(|r| r.verdict != b) {
                    wrong += *w;
                }
            }
            Ok((truth, wrong))
        },
        |acc, leaf, (truth, wrong)| {
            truth?;
            acc.leaves += 1;
            if wrong > acc.max {
                acc.max = wrong;
                acc.worst = Some((leaf.x().to_vec(), leaf.transcript()));
            }
            Ok(ControlFlow::Continue(()))
        },
    )?;
    let mut out = RvError {
        max: Prob::zero(),
        worst: None,
        leaves: 0,
    };
    for r in per_x {
        out.leaves += r.leaves;
        if r.max > out.max {
            out.max = r.max;
            out.worst = r.worst;
        }
    }
    Ok(out)
}

/// Random tree of depth at most `depth` querying only `indices` (never the
/// same index twice on a path). Each internal position becomes a leaf with
/// probability `1/4` below the root.
pub fn random_tree<R: Rng>(rng: &mut R, space: usize, indices: &[usize], depth: usize) -> Result<DecisionTree> {
    fn grow<R: Rng>(
        rng: &mut R,
        indices: &[usize],
        used: &mut Vec<usize>,
        left: usize,
        nodes: &mut Vec<DtNode>,
    ) -> usize {
        let id = nodes.len();
        let free: Vec<usize> = indices.iter().copied().filter(|i| !used.contains(i)).collect();
        if left == 0 || free.is_empty() || (!used.is_empty() && rng.gen_ratio(1, 4)) {
            nodes.push(DtNode::Leaf(rng.gen()));
            return id;
        }
        let index = free[rng.gen_range(0..free.len())];
        nodes.push(DtNode::Leaf(false));
        used.push(index);
        let c0 = grow(rng, indices, used, left - 1, nodes);
        let c1 = grow(rng, indices, used, left - 1, nodes);
        used.pop();
        nodes[id] = DtNode::Query {
            index,
            children: [c0, c1],
        };
        id
    }
    let mut nodes = Vec::new();
    grow(rng, indices, &mut Vec::new(), depth, &mut nodes);
    DecisionTree::new(space, nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{normalize_alternating, parse_netlist};
    use crate::debate::verifier_tree;
    use crate::protocols::build_kw_debate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn kw_and2() -> DebateSystem {
        let c = parse_netlist("inputs 2\ngate g AND x1 x2\noutput g").unwrap();
        build_kw_debate(&normalize_alternating(&c)).unwrap()
    }

    #[test]
    fn exact_tree_has_no_error() {
        let sys = kw_and2();
        let t = verifier_tree(sys.verifier.as_ref(), 1 << 16).unwrap();
        let rv = RandomizedVerifier::uniform(sys.space(), vec![t]).unwrap();
        let e = rv_error(&rv, &sys, CheckOptions::default()).unwrap();
        assert_eq!(e.max, Prob::zero());
        assert!(e.worst.is_none());
    }

    #[test]
    fn tree_and_complement_err_half() {
        let sys = kw_and2();
        let t = verifier_tree(sys.verifier.as_ref(), 1 << 16).unwrap();
        let rv = RandomizedVerifier::uniform(sys.space(), vec![t.complement(), t]).unwrap();
        let e = rv_error(&rv, &sys, CheckOptions::default()).unwrap();
        assert_eq!(e.max, Prob::new(1, 2));
    }

    #[test]
    fn constant_zero_third_errs_on_accepting_atoms() {
        let sys = kw_and2();
        let t = verifier_tree(sys.verifier.as_ref(), 1 << 16).unwrap();
        let zero = DecisionTree::constant(sys.space().total(), false);
        let rv = RandomizedVerifier::uniform(sys.space(), vec![t.clone(), t, zero]).unwrap();
        let e = rv_error(&rv, &sys, CheckOptions::default()).unwrap();
        assert_eq!(e.max, Prob::new(1, 3));
        let (x, tr) = e.worst.unwrap();
        let run = crate::debate::run_on(sys.verifier.as_ref(), &x, &tr).unwrap();
        assert!(run.verdict);
    }

    #[test]
    fn weights_must_sum_to_one() {
        let s = IndexSpace::new(1, 1);
        let t = DecisionTree::constant(3, true);
        let e = RandomizedVerifier::new(s, vec![(t, Prob::new(1, 2))]).unwrap_err();
        assert!(matches!(e, Error::Precondition(_)));
    }

    #[test]
    fn text_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = IndexSpace::new(2, 2);
        let idx: Vec<usize> = (0..6).collect();
        let trees = vec![
            (random_tree(&mut rng, 6, &idx, 3).unwrap(), Prob::new(1, 3)),
            (random_tree(&mut rng, 6, &idx, 3).unwrap(), Prob::new(2, 3)),
        ];
        let rv = RandomizedVerifier::new(s, trees).unwrap();
        assert_eq!(RandomizedVerifier::parse(&rv.to_text()).unwrap(), rv);
    }

    #[test]
    fn random_trees_respect_depth_and_indices() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let t = random_tree(&mut rng, 10, &[2, 5, 7], 4).unwrap();
            assert!(t.depth() <= 3);
            assert!(t.indices().iter().all(|i| [2, 5, 7].contains(i)));
        }
    }
}
