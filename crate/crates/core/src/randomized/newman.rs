//! Derandomization by a majority over sampled trees, compiled through
//! cross-examination.

use std::ops::ControlFlow;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{fmt_prob, rv_error, Prob, RandomizedVerifier};
use crate::boolfn::format_bits;
use crate::circuit::{decision_tree_to_circuit, tree_signal, Circuit, CircuitBuilder, Sig};
use crate::debate::{explore_valid, run_verifier, DebateSystem};
use crate::error::{Error, Result};
use crate::par::CheckOptions;
use crate::protocols::ceil_log2;
use crate::transforms::crossexam_compile;

/// Resampling rounds allowed after the first attempt.
pub const MAX_RETRIES: usize = 10;

/// `(12(2k+n), the same rounded up to odd)`.
pub fn newman_sample_count(k: usize, n: usize) -> (usize, usize) {
    let t = 12 * (2 * k + n);
    (t, t | 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewmanStats {
    pub rv_error: Prob,
    pub t_nominal: usize,
    /// Trees in the majority.
    pub t: usize,
    pub attempts: usize,
    pub q: usize,
    pub distinct_trees: usize,
    /// Largest single-tree circuit, and its NOT gates.
    pub max_tree_gates: usize,
    pub max_tree_not_gates: usize,
    /// `3 * 2^q`.
    pub tree_gate_bound: usize,
    /// Size of the full verifier circuit.
    pub m: usize,
    pub final_ell: usize,
    /// `⌈log2(2k+n)⌉`.
    pub log_term: usize,
    /// `final_ell - q - log_term`.
    pub c_impl: i64,
    /// `c_impl > 10`.
    pub flagged: bool,
}

pub struct NewmanOutcome {
    pub circuit: Circuit,
    pub system: DebateSystem,
    pub stats: NewmanStats,
}

struct Sampler {
    cumulative: Vec<u64>,
    total: u64,
}

impl Sampler {
    fn new(rv: &RandomizedVerifier) -> Self {
        let lcm = rv.trees().iter().fold(1u64, |acc, (_, w)| acc.lcm(w.denom()));
        let mut cumulative = Vec::with_capacity(rv.trees().len());
        let mut total = 0;
        for (_, w) in rv.trees() {
            total += w.numer() * (lcm / w.denom());
            cumulative.push(total);
        }
        Self { cumulative, total }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        let u = rng.gen_range(0..self.total);
        self.cumulative.partition_point(|&c| c <= u)
    }
}

/// First valid `(x, T)` where the majority of `counts` (votes per tree of
/// `rv`) differs from the verifier.
fn majority_failure(
    rv: &RandomizedVerifier,
    sys: &DebateSystem,
    counts: &[usize],
    t: usize,
    opts: CheckOptions,
) -> Result<Option<(Vec<bool>, Vec<bool>)>> {
    let v = sys.verifier.as_ref();
    let used: Vec<usize> = (0..counts.len()).filter(|&j| counts[j] > 0).collect();
    let per_x = explore_valid(
        sys,
        opts,
        "majority check",
        |_| None,
        |leaf| {
            let truth = run_verifier(v, &mut |i| leaf.read(i))?;
            let mut ones = 0;
            for &j in &used {
                if rv.trees()[j].0.eval_with(&mut |i| leaf.read(i))?.0 {
                    ones += counts[j];
                }
            }
            Ok((truth, 2 * ones > t))
        },
        |acc: &mut Option<(Vec<bool>, Vec<bool>)>, leaf, (truth, maj)| {
            if truth?.verdict == maj {
                return Ok(ControlFlow::Continue(()));
            }
            *acc = Some((leaf.x().to_vec(), leaf.transcript()));
            Ok(ControlFlow::Break(()))
        },
    )?;
    Ok(per_x.into_iter().flatten().next())
}

/// Samples `t` trees from `rv` (seeded), retries until their majority equals
/// the verifier on every valid transcript, builds the majority circuit and
/// compiles it into `sys` by cross-examination.
pub fn newman_derandomize(
    rv: &RandomizedVerifier,
    sys: &DebateSystem,
    seed: u64,
    opts: CheckOptions,
) -> Result<NewmanOutcome> {
    let err = rv_error(rv, sys, opts)?;
    if err.max * 3 > Prob::from_integer(1) {
        return Err(Error::Precondition(format!(
            "randomized verifier errs with probability {} > 1/3",
            fmt_prob(err.max)
        )));
    }
    let (t_nominal, t) = newman_sample_count(sys.k, sys.n);
    let sampler = Sampler::new(rv);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = Vec::new();
    let mut last_failure = None;
    let mut attempts = 0;
    for _ in 0..=MAX_RETRIES {
        attempts += 1;
        counts = vec![0usize; rv.trees().len()];
        for _ in 0..t {
            counts[sampler.draw(&mut rng)] += 1;
        }
        last_failure = majority_failure(rv, sys, &counts, t, opts)?;
        if last_failure.is_none() {
            break;
        }
    }
    if let Some((x, tr)) = last_failure {
        return Err(Error::ConstructionFailed {
            retries: MAX_RETRIES,
            detail: format!(
                "majority of {t} sampled trees still wrong at x={} T={}; last sample votes {:?}",
                format_bits(&x),
                format_bits(&tr),
                counts
            ),
        });
    }

    let space = sys.space().total();
    let mut b = CircuitBuilder::new(space);
    let inputs: Vec<Sig> = (0..space).map(|i| b.input(i)).collect();
    let mut votes = Vec::with_capacity(t);
    let (mut distinct, mut max_gates, mut max_not) = (0, 0, 0);
    for (j, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let tree = &rv.trees()[j].0;
        let tc = decision_tree_to_circuit(tree)?;
        if tc.circuit.size() > max_gates {
            max_gates = tc.circuit.size();
            max_not = tc.not_gates;
        }
        distinct += 1;
        let s = tree_signal(tree, &mut b, &inputs);
        votes.extend(std::iter::repeat_n(s, c));
    }
    let out = b.majority(&votes)?;
    let circuit = b.finish(out)?;
    let system = crossexam_compile(sys, &circuit, opts)?;

    let q = rv.q();
    let log_term = ceil_log2(2 * sys.k + sys.n);
    let final_ell = system.ell_bound();
    let c_impl = final_ell as i64 - q as i64 - log_term as i64;
    let stats = NewmanStats {
        rv_error: err.max,
        t_nominal,
        t,
        attempts,
        q,
        distinct_trees: distinct,
        max_tree_gates: max_gates,
        max_tree_not_gates: max_not,
        tree_gate_bound: 3 << q,
        m: circuit.trimmed().size(),
        final_ell,
        log_term,
        c_impl,
        flagged: c_impl > 10,
    };
    Ok(NewmanOutcome {
        circuit,
        system,
        stats,
    })
}
