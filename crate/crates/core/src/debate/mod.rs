//! The debate model: index space, transcripts, verifiers, prover strategies
//! and debate systems, plus the exhaustive checks built on them.

mod explore;
mod paths;
mod validity;

use std::any::Any;
use std::fmt;
use std::sync::Arc;

pub use explore::{explore_valid, explore_x, LeafView};
pub use paths::{explore_paths, queried_variable_set, verifier_tree, PathReport};
pub use validity::{
    check_validity, game_value, Counterexample, GameValueReport, ValidityReport,
};

use crate::boolfn::format_bits;
use crate::error::{Error, Result};

/// Layout of `x_1..x_n, α_1, β_1, …, α_k, β_k` (0-based absolute indices).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IndexSpace {
    pub n: usize,
    pub k: usize,
}

impl IndexSpace {
    pub fn new(n: usize, k: usize) -> Self {
        Self { n, k }
    }

    pub fn total(&self) -> usize {
        self.n + 2 * self.k
    }

    /// Absolute index of `α_j` (1-based round).
    pub fn alpha(&self, j: usize) -> usize {
        self.n + 2 * (j - 1)
    }

    /// Absolute index of `β_j` (1-based round).
    pub fn beta(&self, j: usize) -> usize {
        self.n + 2 * (j - 1) + 1
    }

    pub fn is_input(&self, idx: usize) -> bool {
        idx < self.n
    }

    /// Transcript position of an absolute index, if it is one.
    pub fn position(&self, idx: usize) -> Option<usize> {
        (idx >= self.n && idx < self.total()).then(|| idx - self.n)
    }

    /// `x3`, `a2`, `b1` style label (1-based).
    pub fn label(&self, idx: usize) -> String {
        match self.position(idx) {
            None => format!("x{}", idx + 1),
            Some(t) if t % 2 == 0 => format!("a{}", t / 2 + 1),
            Some(t) => format!("b{}", t / 2 + 1),
        }
    }
}

/// A full transcript `α_1 β_1 … α_k β_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transcript {
    bits: Vec<bool>,
}

impl Transcript {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if !bits.len().is_multiple_of(2) {
            return Err(Error::InputShape {
                expected: bits.len() + 1,
                got: bits.len(),
            });
        }
        Ok(Self { bits })
    }

    pub fn k(&self) -> usize {
        self.bits.len() / 2
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn alpha(&self, j: usize) -> bool {
        self.bits[2 * (j - 1)]
    }

    pub fn beta(&self, j: usize) -> bool {
        self.bits[2 * (j - 1) + 1]
    }
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_bits(&self.bits))
    }
}

/// A verifier's next move.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Query(usize),
    Verdict(bool),
}

/// An adaptive query machine over an index space.
pub trait Verifier: Send + Sync {
    fn space(&self) -> IndexSpace;
    /// Declared maximum number of queries on any answer path.
    fn ell_bound(&self) -> usize;
    /// Next action after the `(index, answer)` pairs seen so far.
    fn next(&self, history: &[(usize, bool)]) -> Action;
}

/// Raised by [`Probe::read`] for an index whose answer is not known yet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ask(pub usize);

/// Read access to the answers a verifier has already received.
pub struct Probe<'a> {
    history: &'a [(usize, bool)],
}

impl Probe<'_> {
    pub fn read(&self, idx: usize) -> Result<bool, Ask> {
        self.history
            .iter()
            .find(|(i, _)| *i == idx)
            .map(|(_, a)| *a)
            .ok_or(Ask(idx))
    }
}

/// Verifier logic written as straight-line code over [`Probe::read`].
///
/// `decide` is replayed from scratch on every step; the first unanswered
/// read becomes the next query, so an index is never queried twice.
pub trait QueryLogic: Send + Sync {
    fn space(&self) -> IndexSpace;
    fn ell_bound(&self) -> usize;
    fn decide(&self, probe: &Probe<'_>) -> Result<bool, Ask>;
}

/// Adapts a [`QueryLogic`] to the [`Verifier`] contract.
pub struct Scripted<L>(pub L);

impl<L: QueryLogic> Verifier for Scripted<L> {
    fn space(&self) -> IndexSpace {
        self.0.space()
    }

    fn ell_bound(&self) -> usize {
        self.0.ell_bound()
    }

    fn next(&self, history: &[(usize, bool)]) -> Action {
        match self.0.decide(&Probe { history }) {
            Ok(v) => Action::Verdict(v),
            Err(Ask(i)) => Action::Query(i),
        }
    }
}

/// Verifier that queries nothing and always answers `value`.
pub struct ConstVerifier {
    pub space: IndexSpace,
    pub value: bool,
}

impl Verifier for ConstVerifier {
    fn space(&self) -> IndexSpace {
        self.space
    }

    fn ell_bound(&self) -> usize {
        0
    }

    fn next(&self, _: &[(usize, bool)]) -> Action {
        Action::Verdict(self.value)
    }
}

/// Result of one instrumented verifier run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub verdict: bool,
    pub probes: Vec<usize>,
}

/// Runs `v`, fetching answers through `lookup`. The outer error is the
/// lookup's; the inner one reports contract violations (out-of-range or
/// repeated index, more than ℓ queries).
pub fn run_verifier<E>(
    v: &dyn Verifier,
    lookup: &mut dyn FnMut(usize) -> Result<bool, E>,
) -> Result<Result<Run>, E> {
    let space = v.space();
    let ell = v.ell_bound();
    let mut history: Vec<(usize, bool)> = Vec::with_capacity(ell);
    loop {
        match v.next(&history) {
            Action::Verdict(verdict) => {
                return Ok(Ok(Run {
                    verdict,
                    probes: history.into_iter().map(|(i, _)| i).collect(),
                }))
            }
            Action::Query(i) => {
                if i >= space.total() {
                    return Ok(Err(Error::VerifierFault(format!(
                        "query {i} outside index space of {}",
                        space.total()
                    ))));
                }
                if history.iter().any(|(j, _)| *j == i) {
                    return Ok(Err(Error::VerifierFault(format!(
                        "index {} queried twice",
                        space.label(i)
                    ))));
                }
                if history.len() == ell {
                    return Ok(Err(Error::VerifierFault(format!(
                        "more than {ell} queries on one path"
                    ))));
                }
                let a = lookup(i)?;
                history.push((i, a));
            }
        }
    }
}

/// Runs `v` on a full assignment of `x ‖ transcript`.
pub fn run_on(v: &dyn Verifier, x: &[bool], transcript: &[bool]) -> Result<Run> {
    let space = v.space();
    if x.len() != space.n || transcript.len() != 2 * space.k {
        return Err(Error::InputShape {
            expected: space.total(),
            got: x.len() + transcript.len(),
        });
    }
    let r: Result<Result<Run>, ()> = run_verifier(v, &mut |i| {
        Ok(if i < space.n {
            x[i]
        } else {
            transcript[i - space.n]
        })
    });
    r.unwrap()
}

/// Raised by [`View::read`] when a transcript bit has not been fixed yet.
/// Carries the transcript position (0-based, `α_1` is 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pending(pub usize);

/// What a prover sees: the input and the transcript so far.
#[derive(Clone, Copy)]
pub struct View<'a> {
    x: &'a [bool],
    bits: &'a [Option<bool>],
    k: usize,
}

impl<'a> View<'a> {
    pub fn new(x: &'a [bool], bits: &'a [Option<bool>], k: usize) -> Self {
        debug_assert!(bits.len() < 2 * k);
        Self { x, bits, k }
    }

    pub fn x(&self) -> &'a [bool] {
        self.x
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Transcript position about to be written.
    pub fn position(&self) -> usize {
        self.bits.len()
    }

    /// 1-based round of the bit about to be written.
    pub fn round(&self) -> usize {
        self.bits.len() / 2 + 1
    }

    /// 0 for an α bit, 1 for a β bit.
    pub fn role(&self) -> usize {
        self.bits.len() % 2
    }

    pub fn read(&self, t: usize) -> Result<bool, Pending> {
        self.bits[t].ok_or(Pending(t))
    }

    /// Reads an absolute index: an input bit or an earlier transcript bit.
    pub fn read_abs(&self, idx: usize) -> Result<bool, Pending> {
        match idx.checked_sub(self.x.len()) {
            None => Ok(self.x[idx]),
            Some(t) => self.read(t),
        }
    }

    pub fn prefix(&self) -> &'a [Option<bool>] {
        self.bits
    }
}

/// Per-branch scratch space owned by one strategy. A strategy may store
/// anything derived from `x` and the bits it has already read; the
/// explorer clones it whenever a branch forks.
pub type Memo = Option<Arc<dyn Any + Send + Sync>>;

pub fn memo_get<T: Any>(memo: &Memo) -> Option<&T> {
    memo.as_ref().and_then(|m| m.downcast_ref::<T>())
}

pub fn memo_set<T: Any + Send + Sync>(memo: &mut Memo, value: T) {
    *memo = Some(Arc::new(value));
}

/// A deterministic prover. Called for the bits of its own role only.
pub trait ProverStrategy: Send + Sync {
    fn bit(&self, view: &View<'_>, memo: &mut Memo) -> Result<bool, Pending>;
}

/// Writes 0 in every round.
pub struct ZeroStrategy;

impl ProverStrategy for ZeroStrategy {
    fn bit(&self, _: &View<'_>, _: &mut Memo) -> Result<bool, Pending> {
        Ok(false)
    }
}

/// A debate system `(A, B, M)` with its provenance.
#[derive(Clone)]
pub struct DebateSystem {
    pub n: usize,
    pub k: usize,
    pub strategies: [Arc<dyn ProverStrategy>; 2],
    pub verifier: Arc<dyn Verifier>,
    /// Construction chain, e.g. `kw+pad+compress`.
    pub label: String,
    /// For each absolute index, the matching index of the system this one
    /// was derived from (`None` for material added by a transform).
    pub index_origin: Vec<Option<usize>>,
}

impl fmt::Debug for DebateSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DebateSystem")
            .field("n", &self.n)
            .field("k", &self.k)
            .field("ell", &self.ell_bound())
            .field("label", &self.label)
            .finish()
    }
}

impl DebateSystem {
    pub fn new(
        n: usize,
        k: usize,
        strategies: [Arc<dyn ProverStrategy>; 2],
        verifier: Arc<dyn Verifier>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let space = verifier.space();
        if space != IndexSpace::new(n, k) {
            return Err(Error::Precondition(format!(
                "verifier space (n={}, k={}) does not match system (n={n}, k={k})",
                space.n, space.k
            )));
        }
        Ok(Self {
            n,
            k,
            strategies,
            verifier,
            label: label.into(),
            index_origin: (0..n + 2 * k).map(Some).collect(),
        })
    }

    pub fn space(&self) -> IndexSpace {
        IndexSpace::new(self.n, self.k)
    }

    pub fn ell_bound(&self) -> usize {
        self.verifier.ell_bound()
    }
}

/// Outcome of [`run_debate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DebateRun {
    pub transcript: Transcript,
    pub verdict: bool,
    pub probes: Vec<usize>,
}

/// Plays the honest strategy of `1 - adversary_role` against `adversary`,
/// which returns `None` once it runs out of bits.
pub fn run_debate(
    sys: &DebateSystem,
    x: &[bool],
    adversary_role: usize,
    adversary: &mut dyn FnMut(&View<'_>) -> Option<bool>,
) -> Result<DebateRun> {
    if x.len() != sys.n {
        return Err(Error::InputShape {
            expected: sys.n,
            got: x.len(),
        });
    }
    let mut bits: Vec<Option<bool>> = Vec::with_capacity(2 * sys.k);
    let mut memo: Memo = None;
    for t in 0..2 * sys.k {
        let view = View::new(x, &bits, sys.k);
        let b = if t % 2 == adversary_role {
            adversary(&view).ok_or(Error::AdversaryExhausted(t / 2 + 1))?
        } else {
            sys.strategies[t % 2]
                .bit(&view, &mut memo)
                .map_err(|p| Error::Internal(format!("strategy read unset position {}", p.0)))?
        };
        bits.push(Some(b));
    }
    let transcript: Vec<bool> = bits.into_iter().map(|b| b.unwrap()).collect();
    let run = run_on(sys.verifier.as_ref(), x, &transcript)?;
    Ok(DebateRun {
        transcript: Transcript::new(transcript)?,
        verdict: run.verdict,
        probes: run.probes,
    })
}

/// Adversary that plays a fixed bit sequence.
pub fn scripted_adversary(bits: &[bool]) -> impl FnMut(&View<'_>) -> Option<bool> + '_ {
    let mut it = bits.iter();
    move |_| it.next().copied()
}

/// Both provers honest.
pub fn run_honest(sys: &DebateSystem, x: &[bool]) -> Result<DebateRun> {
    let adv = sys.strategies[0].clone();
    let mut memo: Memo = None;
    run_debate(sys, x, 0, &mut |view| adv.bit(view, &mut memo).ok())
}
