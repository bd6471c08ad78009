//! System descriptor files: a protocol, its source, and a transform chain.
//!
//! ```text
//! protocol kw            # kw | crossexam | bisection
//! circuit and2.nl        # kw and crossexam
//! machine parity.tm      # bisection
//! pad 0 2 1              # dummy rounds per slot
//! compress
//! compile                # cross-examination over the verifier's tree circuit
//! ```
//!
//! Paths are relative to the descriptor.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use dqc::boolfn::BoolFn;
use dqc::circuit::{decision_tree_to_circuit, normalize_alternating, parse_netlist, Circuit};
use dqc::debate::{verifier_tree, DebateSystem};
use dqc::par::CheckOptions;
use dqc::protocols::{build_crossexam_debate, build_kw_debate};
use dqc::pspace::{build_bisection_debate, ToyMachine};
use dqc::transforms::{compress_rounds, crossexam_compile, pad_rounds};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Protocol {
    Kw,
    Crossexam,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Protocol::Kw => "kw",
            Protocol::Crossexam => "crossexam",
        }
    }
}

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn load_circuit(path: &Path) -> Result<Circuit> {
    parse_netlist(&read(path)?).with_context(|| format!("in {}", path.display()))
}

pub fn load_machine(path: &Path) -> Result<ToyMachine> {
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let load = |f: &str| -> dqc::Result<String> {
        fs::read_to_string(dir.join(f))
            .map_err(|e| dqc::Error::Precondition(format!("cannot read {}: {e}", dir.join(f).display())))
    };
    ToyMachine::parse(&read(path)?, &load).with_context(|| format!("in {}", path.display()))
}

/// File stem used as a function name.
pub fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "f".into())
}

pub fn build(protocol: Protocol, c: &Circuit) -> Result<DebateSystem> {
    Ok(match protocol {
        Protocol::Kw => build_kw_debate(&normalize_alternating(c))?,
        Protocol::Crossexam => build_crossexam_debate(c)?,
    })
}

/// A built system with the function it decides.
pub struct Loaded {
    pub sys: DebateSystem,
    pub function: BoolFn,
    pub chain: Vec<String>,
    pub circuit: Option<Circuit>,
}

enum Step {
    Pad(Vec<usize>),
    Compress,
    Compile,
}

pub fn load_system(path: &Path, opts: CheckOptions) -> Result<Loaded> {
    let text = read(path)?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut protocol = None;
    let mut source: Option<PathBuf> = None;
    let mut steps = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = || format!("{}:{}", path.display(), no + 1);
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[..] {
            ["protocol", p] => protocol = Some(p.to_string()),
            ["circuit", f] | ["machine", f] => source = Some(dir.join(f)),
            ["pad", ref slots @ ..] => {
                let slots = slots
                    .iter()
                    .map(|s| s.parse::<usize>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| anyhow!("{}: bad pad slot", at()))?;
                steps.push(Step::Pad(slots));
            }
            ["compress"] => steps.push(Step::Compress),
            ["compile"] => steps.push(Step::Compile),
            _ => bail!("{}: unknown record `{line}`", at()),
        }
    }
    let protocol = protocol.ok_or_else(|| anyhow!("{}: missing `protocol`", path.display()))?;
    let source = source.ok_or_else(|| anyhow!("{}: missing circuit or machine", path.display()))?;
    let (mut sys, function, circuit) = match protocol.as_str() {
        "kw" | "crossexam" => {
            let c = load_circuit(&source)?;
            let p = if protocol == "kw" { Protocol::Kw } else { Protocol::Crossexam };
            let f = c.truth_table()?.named(stem(&source));
            (build(p, &c)?, f, Some(c))
        }
        "bisection" => {
            let m = load_machine(&source)?;
            (build_bisection_debate(&m)?, m.truth_table()?, None)
        }
        other => bail!("{}: unknown protocol `{other}`", path.display()),
    };
    let mut chain = vec![protocol];
    for step in steps {
        match step {
            Step::Pad(slots) => {
                sys = pad_rounds(&sys, &slots)?;
                chain.push(format!("pad({})", slots.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")));
            }
            Step::Compress => {
                sys = compress_rounds(&sys, opts)?.system;
                chain.push("compress".into());
            }
            Step::Compile => {
                let tree = verifier_tree(sys.verifier.as_ref(), opts.budget)?;
                let cv = decision_tree_to_circuit(&tree)?.circuit;
                sys = crossexam_compile(&sys, &cv, opts)?;
                chain.push("compile".into());
            }
        }
    }
    Ok(Loaded {
        sys,
        function,
        chain,
        circuit,
    })
}

/// Descriptor for a freshly built system over `circuit` (a path as given).
pub fn descriptor(protocol: Protocol, circuit: &str) -> String {
    let mut out = String::new();
    writeln!(out, "protocol {}", protocol.name()).unwrap();
    writeln!(out, "circuit {circuit}").unwrap();
    out
}
