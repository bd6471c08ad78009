//! Replacing a verifier by cross-examination over a circuit computing it.

use std::ops::ControlFlow;

use crate::boolfn::format_bits;
use crate::circuit::Circuit;
use crate::debate::{explore_valid, run_verifier, DebateSystem, Run};
use crate::error::{Error, Result};
use crate::par::CheckOptions;
use crate::protocols::crossexam_system;

/// First valid `(x, transcript)` on which `cv` and the verifier differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disagreement {
    pub x: Vec<bool>,
    pub transcript: Vec<bool>,
    pub verifier: bool,
    pub circuit: bool,
}

/// Compares `cv` with the verifier on every valid transcript.
pub fn check_circuit_matches(
    sys: &DebateSystem,
    cv: &Circuit,
    opts: CheckOptions,
) -> Result<Option<Disagreement>> {
    if cv.n_inputs() != sys.space().total() {
        return Err(Error::Precondition(format!(
            "verifier circuit has {} inputs, index space has {}",
            cv.n_inputs(),
            sys.space().total()
        )));
    }
    let v = sys.verifier.as_ref();
    let per_x = explore_valid(
        sys,
        opts,
        "compile agreement check",
        |_| None,
        |leaf| {
            let run = run_verifier(v, &mut |i| leaf.read(i))?;
            let c = cv.eval_output_lazy(&mut |i| leaf.read(i))?;
            Ok((run, c))
        },
        |acc: &mut Option<Disagreement>, leaf, (run, c): (Result<Run>, bool)| {
            let run = run?;
            if run.verdict == c {
                return Ok(ControlFlow::Continue(()));
            }
            *acc = Some(Disagreement {
                x: leaf.x().to_vec(),
                transcript: leaf.transcript(),
                verifier: run.verdict,
                circuit: c,
            });
            Ok(ControlFlow::Break(()))
        },
    )?;
    Ok(per_x.into_iter().flatten().next())
}

/// Appends cross-examination over `cv` (which reads `x ‖ transcript`) to
/// `sys`, after checking that `cv` computes the verifier on every valid
/// transcript. Probe bound of the result: `⌈log2 m⌉ + 3`, with one index
/// bit when `m = 1`.
pub fn crossexam_compile(
    sys: &DebateSystem,
    cv: &Circuit,
    opts: CheckOptions,
) -> Result<DebateSystem> {
    if let Some(d) = check_circuit_matches(sys, cv, opts)? {
        return Err(Error::CompileMismatch(format!(
            "x={} T={} (verifier {}, circuit {})",
            format_bits(&d.x),
            format_bits(&d.transcript),
            d.verifier as u8,
            d.circuit as u8
        )));
    }
    crossexam_system(sys.n, Some(sys), cv, format!("{}+compile", sys.label))
}
