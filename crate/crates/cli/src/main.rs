//! `dqc`: build, transform, verify and report on debate systems.
//!
//! Exit status: 0 when every check in the report passes, 1 when one fails,
//! 2 on usage, file or budget errors.

mod report;
mod system;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use dqc::boolfn::format_bits;
use dqc::circuit::{decision_tree_to_circuit, normalize_alternating, DecisionTree};
use dqc::corpus::{noisy_verifier, rng};
use dqc::debate::{check_validity, queried_variable_set, run_on, verifier_tree, ValidityReport};
use dqc::par::{CheckOptions, Exec, DEFAULT_BUDGET};
use dqc::protocols::{ceil_log2, size_implication};
use dqc::pspace::{parity_accumulator, pspace_pipeline, ToyMachine};
use dqc::randomized::{
    build_yao_distribution, fmt_prob, newman_derandomize, pairing_error_bound, random_tree, Prob,
    RandomizedVerifier,
};
use dqc::transforms::{compress_rounds, crossexam_compile, extract_advice, simulate_with_advice, AdviceTable};
use rand::Rng;

use report::{Format, Report};
use system::{build, descriptor, load_circuit, load_machine, load_system, read, stem, Protocol};

#[derive(Parser)]
#[command(name = "dqc", version, about = "Debate systems with query-bounded verifiers")]
struct Cli {
    /// Cap on explored leaves in exhaustive checks.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Append wall-clock time to the report.
    #[arg(long, global = true)]
    timing: bool,
    /// Run exhaustive checks on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Circuit inspection.
    #[command(subcommand)]
    Circuit(CircuitCmd),
    /// Debate construction, verification and transforms.
    #[command(subcommand)]
    Debate(DebateCmd),
    /// Verifier advice tables.
    #[command(subcommand)]
    Advice(AdviceCmd),
    /// Hard distribution and pairing bound for shallow trees.
    #[command(subcommand)]
    Yao(YaoCmd),
    /// Derandomization of a randomized verifier.
    #[command(subcommand)]
    Newman(NewmanCmd),
    /// Toy machine pipeline.
    #[command(subcommand)]
    Pspace(PspaceCmd),
}

#[derive(Subcommand)]
enum CircuitCmd {
    Info {
        #[arg(long)]
        circuit: PathBuf,
    },
}

#[derive(Subcommand)]
enum DebateCmd {
    Build {
        #[arg(long, value_enum)]
        protocol: Protocol,
        #[arg(long)]
        circuit: PathBuf,
        /// Run the exhaustive validity check.
        #[arg(long)]
        verify: bool,
        /// Write a system descriptor.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Verify {
        #[arg(long)]
        system: PathBuf,
    },
    Compress {
        #[arg(long)]
        system: PathBuf,
    },
    Compile {
        #[arg(long)]
        system: PathBuf,
        /// Circuit over `x ‖ transcript`; defaults to the verifier's tree.
        #[arg(long)]
        verifier_circuit: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum AdviceCmd {
    Extract {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Check {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        table: PathBuf,
    },
}

#[derive(Subcommand)]
enum YaoCmd {
    Run {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long, value_enum, default_value_t = Protocol::Kw)]
        protocol: Protocol,
        /// A single tree file.
        #[arg(long, conflicts_with = "random_trees")]
        tree: Option<PathBuf>,
        /// Number of seeded random trees.
        #[arg(long)]
        random_trees: Option<usize>,
        #[arg(long, default_value_t = 4)]
        max_depth: usize,
    },
}

#[derive(Subcommand)]
enum NewmanCmd {
    Run {
        #[arg(long)]
        system: PathBuf,
        /// Randomized verifier file; defaults to a seeded noisy copy of the
        /// system's verifier.
        #[arg(long)]
        rv: Option<PathBuf>,
        /// Write the randomized verifier used.
        #[arg(long)]
        write_rv: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum PspaceCmd {
    Demo {
        /// Machine file; defaults to the parity accumulator.
        #[arg(long, conflicts_with_all = ["n", "horizon"])]
        machine: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        horizon: usize,
        /// Write the machine as `<stem>.tm` plus netlists.
        #[arg(long)]
        export: Option<PathBuf>,
    },
}

struct Ctx {
    opts: CheckOptions,
    seed: u64,
}

fn validity_fields(r: &mut Report, v: &ValidityReport) {
    r.set("ell_bound", v.ell_bound);
    r.set("max_probes_observed", v.max_probes);
    r.set("leaves", v.leaves);
    r.check("valid", v.valid);
    r.check("probes_within_ell", v.max_probes <= v.ell_bound);
    if let Some(c) = &v.counterexample {
        r.set(
            "counterexample",
            format!(
                "x={} adversary=P{} adversary_bits={} transcript={} verdict={}",
                format_bits(&c.x),
                c.adversary_role,
                format_bits(&c.adversary_bits),
                format_bits(&c.transcript),
                c.verdict as u8
            ),
        );
    }
}

fn implied_size(r: &mut Report, probes: usize, m: usize) {
    let s = size_implication(probes, m);
    r.set(
        "implied_size",
        format!(
            "2^(probes-3)={} vs 2^ceil(log2 max(m,2))={}: {}",
            s.lhs,
            s.rhs,
            if s.holds { "consistent" } else { "violated" }
        ),
    );
}

fn circuit_info(path: &Path) -> Result<Report> {
    let c = load_circuit(path)?;
    let f = c.truth_table()?;
    let t = c.trimmed();
    let nc = normalize_alternating(&c);
    let mut r = Report::new();
    r.set("function", stem(path))
        .set("n", c.n_inputs())
        .set("circuit_size", c.size())
        .set("circuit_depth", c.depth())
        .set("trimmed_size", t.size())
        .set("not_gates", c.count_not())
        .set("normalized_depth", nc.depth())
        .set("normalized_size", nc.size())
        .set("depends_on_all", f.depends_on_all())
        .set("truth_table", f.to_hex());
    Ok(r)
}

fn debate_build(ctx: &Ctx, protocol: Protocol, path: &Path, verify: bool, out: Option<&Path>) -> Result<Report> {
    let c = load_circuit(path)?;
    let sys = build(protocol, &c)?;
    let m = c.trimmed().size();
    let bound = match protocol {
        Protocol::Kw => normalize_alternating(&c).depth() + 1,
        Protocol::Crossexam => ceil_log2(m.max(2)) + 3,
    };
    let mut r = Report::new();
    r.set("function", stem(path))
        .set("n", sys.n)
        .set("chain", protocol.name())
        .set("k", sys.k)
        .set("circuit_size", m)
        .set("circuit_depth", c.depth())
        .set("probe_bound", bound);
    if verify {
        let f = c.truth_table()?;
        let v = check_validity(&sys, &f, ctx.opts)?;
        validity_fields(&mut r, &v);
        r.check("probes_within_bound", v.max_probes <= bound);
        if protocol == Protocol::Crossexam {
            implied_size(&mut r, v.max_probes, m);
        }
    } else {
        r.set("ell_bound", sys.ell_bound());
    }
    if let Some(out) = out {
        let circuit_ref = relative_to(out, path)?;
        fs::write(out, descriptor(protocol, &circuit_ref)).with_context(|| format!("cannot write {}", out.display()))?;
        r.set("descriptor", out.display().to_string());
    }
    Ok(r)
}

/// How `target` is referred to from a file written at `from`.
fn relative_to(from: &Path, target: &Path) -> Result<String> {
    let dir = from.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let (dir, target_abs) = (dir.canonicalize()?, target.canonicalize()?);
    Ok(match target_abs.strip_prefix(&dir) {
        Ok(rel) => rel.display().to_string(),
        Err(_) => target_abs.display().to_string(),
    })
}

fn debate_verify(ctx: &Ctx, path: &Path) -> Result<Report> {
    let l = load_system(path, ctx.opts)?;
    let v = check_validity(&l.sys, &l.function, ctx.opts)?;
    let mut r = Report::new();
    r.set("function", l.function.name())
        .set("n", l.sys.n)
        .set("chain", l.chain.join("+"))
        .set("k", l.sys.k);
    if let Some(c) = &l.circuit {
        r.set("circuit_size", c.trimmed().size()).set("circuit_depth", c.depth());
    }
    validity_fields(&mut r, &v);
    Ok(r)
}

fn debate_compress(ctx: &Ctx, path: &Path) -> Result<Report> {
    let l = load_system(path, ctx.opts)?;
    let comp = compress_rounds(&l.sys, ctx.opts)?;
    let v = check_validity(&comp.system, &l.function, ctx.opts)?;
    let ell = l.sys.ell_bound();
    let s = comp.queried_transcript.len();
    let mut r = Report::new();
    let removed: Vec<String> = comp.removed.iter().map(|j| j.to_string()).collect();
    r.set("function", l.function.name())
        .set("n", l.sys.n)
        .set("chain", format!("{}+compress", l.chain.join("+")))
        .set("k_before", l.sys.k)
        .set("k", comp.system.k)
        .set("removed_rounds", if removed.is_empty() { "-".into() } else { removed.join(",") })
        .set("queried_transcript", s);
    r.check(
        "round_bound",
        2 * comp.system.k <= 2 * s && (2 * s) as u128 <= 1u128 << (ell + 1).min(127),
    );
    validity_fields(&mut r, &v);
    Ok(r)
}

fn debate_compile(ctx: &Ctx, path: &Path, cv_path: Option<&Path>) -> Result<Report> {
    let l = load_system(path, ctx.opts)?;
    let cv = match cv_path {
        Some(p) => load_circuit(p)?,
        None => {
            let tree = verifier_tree(l.sys.verifier.as_ref(), ctx.opts.budget)?;
            decision_tree_to_circuit(&tree)?.circuit
        }
    };
    let compiled = crossexam_compile(&l.sys, &cv, ctx.opts)?;
    let m = cv.trimmed().size();
    let bound = ceil_log2(m.max(2)) + 3;
    let v = check_validity(&compiled, &l.function, ctx.opts)?;
    let mut r = Report::new();
    r.set("function", l.function.name())
        .set("n", l.sys.n)
        .set("chain", format!("{}+compile", l.chain.join("+")))
        .set("k_before", l.sys.k)
        .set("k", compiled.k)
        .set("verifier_circuit_size", m)
        .set("probe_bound", bound);
    validity_fields(&mut r, &v);
    r.check("probes_within_bound", v.max_probes <= bound);
    implied_size(&mut r, v.max_probes, m);
    Ok(r)
}

fn advice_extract(ctx: &Ctx, path: &Path, out: Option<&Path>) -> Result<Report> {
    let l = load_system(path, ctx.opts)?;
    let t = extract_advice(l.sys.verifier.as_ref(), ctx.opts.budget)?;
    let mut r = Report::new();
    r.set("function", l.function.name())
        .set("n", l.sys.n)
        .set("chain", l.chain.join("+"))
        .set("k", l.sys.k)
        .set("ell_bound", t.ell)
        .set("rows", t.rows())
        .set("row_bound", t.row_bound().to_string())
        .set("advice_bits", t.bits())
        .set("redacted_transcript", t.redacted.len());
    r.check("rows_within_bound", t.rows() as u128 <= t.row_bound());
    if let Some(out) = out {
        fs::write(out, t.to_text()).with_context(|| format!("cannot write {}", out.display()))?;
        r.set("table", out.display().to_string());
    }
    Ok(r)
}

/// Largest `n + 2k` replayed exhaustively by `advice check`.
const ADVICE_CHECK_LIMIT: usize = 22;

fn advice_check(ctx: &Ctx, path: &Path, table: &Path) -> Result<Report> {
    let l = load_system(path, ctx.opts)?;
    let t = AdviceTable::parse(&read(table)?).with_context(|| format!("in {}", table.display()))?;
    let space = l.sys.space();
    if t.space != space {
        bail!("table is for n={} k={}, system has n={} k={}", t.space.n, t.space.k, space.n, space.k);
    }
    let total = space.total();
    if total > ADVICE_CHECK_LIMIT || (1u64 << total) > ctx.opts.budget {
        bail!("budget exceeded: advice check needs 2^{total} replays, budget is {}", ctx.opts.budget);
    }
    let v = l.sys.verifier.as_ref();
    let mut mismatches = 0u64;
    let mut first = None;
    for i in 0..1usize << total {
        let bits = dqc::boolfn::index_to_bits(i, total);
        let (x, tr) = bits.split_at(space.n);
        let a = run_on(v, x, tr)?;
        let b = simulate_with_advice(&t, x, tr)?;
        if a != b {
            mismatches += 1;
            first.get_or_insert_with(|| format!("x={} T={}", format_bits(x), format_bits(tr)));
        }
    }
    let mut r = Report::new();
    r.set("function", l.function.name())
        .set("n", space.n)
        .set("k", space.k)
        .set("pairs", 1u64 << total)
        .set("mismatches", mismatches);
    if let Some(f) = first {
        r.set("first_mismatch", f);
    }
    r.check("table_matches", mismatches == 0);
    r.check("rows_within_bound", t.rows() as u128 <= t.row_bound());
    Ok(r)
}

fn yao_run(
    ctx: &Ctx,
    path: &Path,
    protocol: Protocol,
    tree: Option<&Path>,
    random: Option<usize>,
    max_depth: usize,
) -> Result<Report> {
    let c = load_circuit(path)?;
    let f = c.truth_table()?.named(stem(path));
    let sys = build(protocol, &c)?;
    let d = build_yao_distribution(&sys, &f)?;
    let n = sys.n;
    let total = d.space.total();
    let mut r = Report::new();
    let transcripts: std::collections::BTreeSet<_> = d.pairs.iter().map(|p| &p.transcript).collect();
    r.set("function", f.name())
        .set("n", n)
        .set("chain", protocol.name())
        .set("k", sys.k)
        .set("atoms", d.atoms.len())
        .set("shared_transcripts", transcripts.len());
    let seven_sixteenths = Prob::new(7, 16);
    match (tree, random) {
        (Some(tp), _) => {
            let t = DecisionTree::parse(&read(tp)?, Some(total)).with_context(|| format!("in {}", tp.display()))?;
            let p = pairing_error_bound(&t, &d)?;
            r.set("tree_depth", t.depth())
                .set("measured_error", fmt_prob(p.measured_error))
                .set("certified_lower_bound", fmt_prob(p.certified_lower_bound))
                .set("forced_pairs", p.forced_pairs)
                .set("distinct_x", p.distinct_x);
            r.check("measured_at_least_certified", p.measured_error >= p.certified_lower_bound);
            if p.below_eighth(n) {
                r.check("below_eighth_error_at_least_7_16", p.measured_error >= seven_sixteenths);
            }
        }
        (None, count) => {
            let count = count.unwrap_or(100);
            let mut g = rng(ctx.seed);
            let all: Vec<usize> = (0..total).collect();
            let transcript_only: Vec<usize> = (n..total).collect();
            let (mut holds, mut below, mut below_ok) = (true, 0, true);
            let mut min_gap: Option<Prob> = None;
            let mut max_error = Prob::new(0, 1);
            for j in 0..count {
                let pool = match j % 3 {
                    0 => all.clone(),
                    1 => transcript_only.clone(),
                    _ => {
                        let mut p = transcript_only.clone();
                        p.push(g.gen_range(0..n));
                        p
                    }
                };
                let depth = g.gen_range(1..=max_depth.max(1));
                let t = random_tree(&mut g, total, &pool, depth)?;
                let p = pairing_error_bound(&t, &d)?;
                holds &= p.measured_error >= p.certified_lower_bound;
                if p.below_eighth(n) {
                    below += 1;
                    below_ok &= p.measured_error >= seven_sixteenths;
                }
                let gap = p.measured_error - p.certified_lower_bound;
                min_gap = Some(min_gap.map_or(gap, |m| m.min(gap)));
                max_error = max_error.max(p.measured_error);
            }
            r.set("trees", count)
                .set("max_depth", max_depth)
                .set("seed", ctx.seed)
                .set("below_eighth_trees", below)
                .set("max_measured_error", fmt_prob(max_error))
                .set("min_gap", min_gap.map_or("-".into(), fmt_prob));
            r.check("measured_at_least_certified", holds);
            r.check("below_eighth_error_at_least_7_16", below_ok);
        }
    }
    Ok(r)
}

fn newman_run(ctx: &Ctx, path: &Path, rv_path: Option<&Path>, write_rv: Option<&Path>) -> Result<Report> {
    let l = load_system(path, ctx.opts)?;
    let rv = match rv_path {
        Some(p) => RandomizedVerifier::parse(&read(p)?).with_context(|| format!("in {}", p.display()))?,
        None => noisy_verifier(&mut rng(ctx.seed), &l.sys, ctx.opts.budget)?,
    };
    if let Some(w) = write_rv {
        fs::write(w, rv.to_text()).with_context(|| format!("cannot write {}", w.display()))?;
    }
    let out = newman_derandomize(&rv, &l.sys, ctx.seed, ctx.opts)?;
    let s = &out.stats;
    let v = check_validity(&out.system, &l.function, ctx.opts)?;
    let bound = s.q as i64 + s.log_term as i64 + s.c_impl;
    let mut r = Report::new();
    r.set("function", l.function.name())
        .set("n", l.sys.n)
        .set("chain", format!("{}+newman+compile", l.chain.join("+")))
        .set("seed", ctx.seed)
        .set("rv_trees", rv.trees().len())
        .set("rv_error", fmt_prob(s.rv_error))
        .set("q", s.q)
        .set("t_nominal", s.t_nominal)
        .set("t", s.t)
        .set("attempts", s.attempts)
        .set("distinct_trees", s.distinct_trees)
        .set("max_tree_gates", s.max_tree_gates)
        .set("max_tree_not_gates", s.max_tree_not_gates)
        .set("tree_gate_bound", s.tree_gate_bound)
        .set("verifier_circuit_size", s.m)
        .set("k_before", l.sys.k)
        .set("k", out.system.k)
        .set("log_term", s.log_term)
        .set("c_impl", s.c_impl)
        .set("c_impl_above_10", s.flagged);
    validity_fields(&mut r, &v);
    r.check("probes_within_bound", (v.max_probes as i64) <= bound);
    Ok(r)
}

fn pspace_demo(ctx: &Ctx, machine: Option<&Path>, n: usize, horizon: usize, export: Option<&Path>) -> Result<Report> {
    let m: ToyMachine = match machine {
        Some(p) => load_machine(p)?,
        None => parity_accumulator(n, horizon)?,
    };
    if let Some(stem_path) = export {
        let dir = stem_path.parent().unwrap_or(Path::new(""));
        let base = stem_path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "machine".into());
        let (text, files) = m.to_files(&base);
        fs::write(dir.join(format!("{base}.tm")), text)?;
        for (name, body) in files {
            fs::write(dir.join(&name), body).with_context(|| format!("cannot write {name}"))?;
        }
    }
    let (sys, p) = pspace_pipeline(&m, ctx.opts)?;
    let q = queried_variable_set(sys.verifier.as_ref(), ctx.opts.budget)?;
    let mut r = Report::new();
    r.set("function", p.function.name())
        .set("n", m.n)
        .set("chain", "bisection+compile")
        .set("width", p.width)
        .set("horizon", p.horizon)
        .set("bisection_k", p.bisection_k)
        .set("bisection_ell", p.bisection_ell)
        .set("bisection_max_probes", p.bisection_max_probes)
        .set("verifier_circuit_size", p.m)
        .set("k", p.compiled_k)
        .set("ell_bound", p.compiled_ell)
        .set("max_probes_observed", p.compiled_max_probes)
        .set("probe_bound", p.bound)
        .set("queried_indices", q.set.len())
        .set("leaves", p.leaves);
    r.check("valid", true);
    r.check("probes_within_bound", p.compiled_max_probes <= p.bound);
    Ok(r)
}

fn run(cli: &Cli) -> Result<Report> {
    let opts = CheckOptions {
        budget: cli.budget,
        exec: if cli.sequential { Exec::Sequential } else { Exec::default() },
    };
    let ctx = Ctx { opts, seed: cli.seed };
    match &cli.cmd {
        Cmd::Circuit(CircuitCmd::Info { circuit }) => circuit_info(circuit),
        Cmd::Debate(d) => match d {
            DebateCmd::Build {
                protocol,
                circuit,
                verify,
                out,
            } => debate_build(&ctx, *protocol, circuit, *verify, out.as_deref()),
            DebateCmd::Verify { system } => debate_verify(&ctx, system),
            DebateCmd::Compress { system } => debate_compress(&ctx, system),
            DebateCmd::Compile {
                system,
                verifier_circuit,
            } => debate_compile(&ctx, system, verifier_circuit.as_deref()),
        },
        Cmd::Advice(a) => match a {
            AdviceCmd::Extract { system, out } => advice_extract(&ctx, system, out.as_deref()),
            AdviceCmd::Check { system, table } => advice_check(&ctx, system, table),
        },
        Cmd::Yao(YaoCmd::Run {
            circuit,
            protocol,
            tree,
            random_trees,
            max_depth,
        }) => yao_run(&ctx, circuit, *protocol, tree.as_deref(), *random_trees, *max_depth),
        Cmd::Newman(NewmanCmd::Run { system, rv, write_rv }) => {
            newman_run(&ctx, system, rv.as_deref(), write_rv.as_deref())
        }
        Cmd::Pspace(PspaceCmd::Demo {
            machine,
            n,
            horizon,
            export,
        }) => pspace_demo(&ctx, machine.as_deref(), *n, *horizon, export.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok(mut report) => {
            if cli.timing {
                report.set("wall_time", format!("{:.3}s", start.elapsed().as_secs_f64()));
            }
            print!("{}", report.render(cli.format));
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
