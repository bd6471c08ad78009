//! Toy space-bounded machines, the bisection debate over their computation
//! path, and compilation of that debate to logarithmically many probes.

mod bisection;
mod machine;

pub use bisection::{bisection_verifier_circuit, build_bisection_debate, check_honest_claims, Layout};
pub use machine::{
    constant_machine, counter_machine, identity_machine, machine_run, machine_run_naive,
    parity_accumulator, InitBit, ToyMachine, MAX_HORIZON, MAX_WIDTH,
};

use crate::boolfn::BoolFn;
use crate::debate::{check_validity, DebateSystem};
use crate::error::{Error, Result};
use crate::par::CheckOptions;
use crate::protocols::ceil_log2;
use crate::transforms::crossexam_compile;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PspaceReport {
    pub function: BoolFn,
    pub width: usize,
    pub horizon: usize,
    pub bisection_k: usize,
    pub bisection_ell: usize,
    pub bisection_max_probes: usize,
    /// Size of the verifier circuit.
    pub m: usize,
    pub compiled_k: usize,
    pub compiled_ell: usize,
    pub compiled_max_probes: usize,
    /// `⌈log2 m⌉ + 3`.
    pub bound: usize,
    pub leaves: u64,
}

/// Bisection debate, verifier circuit, compile, and exhaustive validity of
/// both systems.
pub fn pspace_pipeline(m: &ToyMachine, opts: CheckOptions) -> Result<(DebateSystem, PspaceReport)> {
    let f = m.truth_table()?;
    let sys = build_bisection_debate(m)?;
    let base = check_validity(&sys, &f, opts)?;
    if !base.valid {
        return Err(Error::Internal(format!(
            "bisection debate for {} is invalid: {:?}",
            m.name, base.counterexample
        )));
    }
    let cv = bisection_verifier_circuit(m)?;
    let compiled = crossexam_compile(&sys, &cv, opts)?;
    let after = check_validity(&compiled, &f, opts)?;
    if !after.valid {
        return Err(Error::Internal(format!(
            "compiled debate for {} is invalid: {:?}",
            m.name, after.counterexample
        )));
    }
    let size = cv.trimmed().size();
    let report = PspaceReport {
        function: f,
        width: m.width,
        horizon: m.horizon,
        bisection_k: sys.k,
        bisection_ell: sys.ell_bound(),
        bisection_max_probes: base.max_probes,
        m: size,
        compiled_k: compiled.k,
        compiled_ell: compiled.ell_bound(),
        compiled_max_probes: after.max_probes,
        bound: ceil_log2(size).max(1) + 3,
        leaves: base.leaves + after.leaves,
    };
    if report.compiled_max_probes > report.bound {
        return Err(Error::Internal(format!(
            "compiled probes {} exceed ⌈log2 m⌉ + 3 = {}",
            report.compiled_max_probes, report.bound
        )));
    }
    Ok((compiled, report))
}
