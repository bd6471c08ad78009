//! End-to-end acceptance run: one PASS/FAIL line per criterion.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use dqc::boolfn::BoolFn;
use dqc::circuit::{decision_tree_to_circuit, normalize_alternating, parity_circuit, parse_netlist, Circuit};
use dqc::corpus::{all_functions, noisy_verifier, random_circuit, random_circuits, random_padding, rng};
use dqc::debate::{check_validity, queried_variable_set, run_on, verifier_tree, DebateSystem};
use dqc::par::CheckOptions;
use dqc::protocols::{build_crossexam_debate, build_kw_debate, ceil_log2};
use dqc::pspace::{parity_accumulator, pspace_pipeline};
use dqc::randomized::{
    build_yao_distribution, fmt_prob, newman_derandomize, pairing_error_bound, random_tree, rv_error, Prob,
};
use dqc::transforms::{check_circuit_matches, compress_rounds, crossexam_compile, extract_advice, pad_rounds, simulate_with_advice};
use rand::Rng;

type Outcome = Result<String, String>;

fn opts() -> CheckOptions {
    CheckOptions::default()
}

fn fail<T>(msg: impl Into<String>) -> Result<T, String> {
    Err(msg.into())
}

fn e2s<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// The 16 two-variable functions plus 200 random circuits.
fn corpus() -> Result<Vec<(String, Circuit)>, String> {
    let mut out: Vec<(String, Circuit)> = e2s(all_functions(2))?
        .into_iter()
        .map(|(f, c)| (f.name().to_string(), c))
        .collect();
    for (i, c) in e2s(random_circuits(2024, 200, 6, 32))?.into_iter().enumerate() {
        out.push((format!("random#{i}"), c));
    }
    Ok(out)
}

fn kw_bound() -> Outcome {
    let items = corpus()?;
    let mut worst = 0usize;
    let mut leaves = 0u64;
    for (name, c) in &items {
        let f = e2s(c.truth_table())?;
        let nc = normalize_alternating(c);
        let sys = e2s(build_kw_debate(&nc))?;
        let r = e2s(check_validity(&sys, &f, opts()))?;
        if !r.valid {
            return fail(format!("{name}: invalid, {:?}", r.counterexample));
        }
        if r.max_probes > nc.depth() + 1 {
            return fail(format!("{name}: {} probes > depth {} + 1", r.max_probes, nc.depth()));
        }
        worst = worst.max(nc.depth());
        leaves += r.leaves;
    }
    Ok(format!("{} instances, max normalized depth {worst}, {leaves} adversary leaves", items.len()))
}

fn crossexam_bound() -> Outcome {
    let items = corpus()?;
    let mut leaves = 0u64;
    for (name, c) in &items {
        let f = e2s(c.truth_table())?;
        let m = c.trimmed().size();
        let sys = e2s(build_crossexam_debate(c))?;
        let r = e2s(check_validity(&sys, &f, opts()))?;
        if !r.valid {
            return fail(format!("{name}: invalid, {:?}", r.counterexample));
        }
        let bound = ceil_log2(m.max(2)) + 3;
        if r.max_probes > bound {
            return fail(format!("{name}: {} probes > {bound} (m={m})", r.max_probes));
        }
        leaves += r.leaves;
    }
    Ok(format!("{} instances, {leaves} adversary leaves", items.len()))
}

fn compression() -> Outcome {
    let mut r = rng(77);
    let bases = e2s(random_circuits(3, 50, 4, 8))?;
    for (i, c) in bases.iter().enumerate() {
        let f = e2s(c.truth_table())?;
        let sys = if i % 2 == 0 {
            e2s(build_kw_debate(&normalize_alternating(c)))?
        } else {
            e2s(build_crossexam_debate(c))?
        };
        let dummies = r.gen_range(1..=8);
        let before = random_padding(&mut r, sys.k, dummies);
        let padded = e2s(pad_rounds(&sys, &before))?;
        let comp = e2s(compress_rounds(&padded, opts()))?;
        let out = &comp.system;
        let s = &comp.queried_transcript;
        let space = out.space();
        let ps = padded.space();
        // Dummy rounds carry no origin; none may survive.
        for j in 1..=out.k {
            let a = space.alpha(j);
            if out.index_origin[a].is_none() {
                return fail(format!("system {i}: dummy round survived as round {j}"));
            }
        }
        // Every kept round has a probed bit.
        let q = e2s(queried_variable_set(out.verifier.as_ref(), opts().budget))?;
        for j in 1..=out.k {
            if !q.set.contains(&space.alpha(j)) && !q.set.contains(&space.beta(j)) {
                return fail(format!("system {i}: kept round {j} is never probed"));
            }
        }
        // Removed rounds are exactly the never-probed ones.
        for j in 1..=padded.k {
            let probed = s.contains(&ps.alpha(j)) || s.contains(&ps.beta(j));
            if probed == comp.removed.contains(&j) {
                return fail(format!("system {i}: round {j} probed={probed} but removed={}", !probed));
            }
        }
        let ell = padded.ell_bound();
        if 2 * out.k > 2 * s.len() || (2 * s.len()) as u128 > 1u128 << (ell + 1) {
            return fail(format!("system {i}: 2k'={} |S|={} ℓ={ell}", 2 * out.k, s.len()));
        }
        let v = e2s(check_validity(out, &f, opts()))?;
        if !v.valid {
            return fail(format!("system {i}: compressed system invalid"));
        }
    }
    Ok("50 padded systems".into())
}

fn dependence() -> Outcome {
    let mut notes = Vec::new();
    for n in [4, 8] {
        let c = e2s(parity_circuit(n))?;
        let f = e2s(BoolFn::parity(n))?;
        let systems: Vec<DebateSystem> = vec![
            e2s(build_kw_debate(&normalize_alternating(&c)))?,
            e2s(build_crossexam_debate(&c))?,
        ];
        for sys in &systems {
            let r = e2s(check_validity(sys, &f, opts()))?;
            if !r.valid {
                return fail(format!("{}: invalid", sys.label));
            }
            let q = e2s(queried_variable_set(sys.verifier.as_ref(), opts().budget))?;
            let xs = q.set.iter().filter(|&&i| i < n).count();
            if xs != n || sys.ell_bound() < ceil_log2(n) {
                return fail(format!("{}: |S∩x|={xs}, ℓ={}", sys.label, sys.ell_bound()));
            }
            notes.push(format!("{} ℓ={}", sys.label, sys.ell_bound()));
        }
    }
    Ok(notes.join(", "))
}

fn kw_systems(seed: u64, count: usize, max_depth: usize) -> Result<Vec<(Circuit, DebateSystem)>, String> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n = r.gen_range(2..=4);
        let size = r.gen_range(1..=6);
        let c = e2s(random_circuit(&mut r, n, size))?;
        let nc = normalize_alternating(&c);
        if nc.depth() <= max_depth {
            out.push((c, e2s(build_kw_debate(&nc))?));
        }
    }
    Ok(out)
}

fn compile() -> Outcome {
    let mut max_m = 0;
    for (i, (c, sys)) in kw_systems(11, 20, 4)?.iter().enumerate() {
        let f = e2s(c.truth_table())?;
        let tree = e2s(verifier_tree(sys.verifier.as_ref(), opts().budget))?;
        let cv = e2s(decision_tree_to_circuit(&tree))?.circuit;
        if let Some(d) = e2s(check_circuit_matches(sys, &cv, opts()))? {
            return fail(format!("system {i}: precondition fails at {d:?}"));
        }
        let compiled = e2s(crossexam_compile(sys, &cv, opts()))?;
        let r = e2s(check_validity(&compiled, &f, opts()))?;
        let m = cv.trimmed().size();
        let bound = ceil_log2(m.max(2)) + 3;
        if !r.valid || r.max_probes > bound {
            return fail(format!("system {i}: valid={} probes={} bound={bound}", r.valid, r.max_probes));
        }
        max_m = max_m.max(m);
    }
    Ok(format!("20 compiled systems, largest m={max_m}"))
}

fn advice() -> Outcome {
    let mut r = rng(5);
    let mut done = 0;
    let mut max_rows = 0;
    while done < 20 {
        let n = r.gen_range(2..=5);
        let size = r.gen_range(1..=10);
        let c = e2s(random_circuit(&mut r, n, size))?;
        let sys = if done % 2 == 0 {
            e2s(build_kw_debate(&normalize_alternating(&c)))?
        } else {
            e2s(build_crossexam_debate(&c))?
        };
        let total = sys.space().total();
        if total > 18 {
            continue;
        }
        let v = sys.verifier.as_ref();
        let t = e2s(extract_advice(v, opts().budget))?;
        if t.rows() as u128 > t.row_bound() {
            return fail(format!("{}: {} rows > 2^(ℓ+1)-1", sys.label, t.rows()));
        }
        for i in 0..1usize << total {
            let bits = dqc::boolfn::index_to_bits(i, total);
            let (x, tr) = bits.split_at(n);
            let a = e2s(run_on(v, x, tr))?;
            let b = e2s(simulate_with_advice(&t, x, tr))?;
            if a != b {
                return fail(format!("{}: mismatch at {i}", sys.label));
            }
        }
        max_rows = max_rows.max(t.rows());
        done += 1;
    }
    Ok(format!("20 tables, up to {max_rows} rows"))
}

fn yao() -> Outcome {
    let mut r = rng(31);
    let mut few = 0;
    let mut notes = Vec::new();
    for n in [4, 8] {
        let c = e2s(parity_circuit(n))?;
        let sys = e2s(build_kw_debate(&normalize_alternating(&c)))?;
        let d = e2s(build_yao_distribution(&sys, &e2s(BoolFn::parity(n))?))?;
        let total = d.space.total();
        let all: Vec<usize> = (0..total).collect();
        let transcript_only: Vec<usize> = (n..total).collect();
        let mut min_gap = Prob::new(1, 1);
        for j in 0..100 {
            let pool: Vec<usize> = match j % 3 {
                0 => all.clone(),
                1 => transcript_only.clone(),
                _ => {
                    let mut p = transcript_only.clone();
                    p.push(r.gen_range(0..n));
                    p
                }
            };
            let depth = r.gen_range(1..=6);
            let t = e2s(random_tree(&mut r, total, &pool, depth))?;
            let rep = e2s(pairing_error_bound(&t, &d))?;
            if rep.measured_error < rep.certified_lower_bound {
                return fail(format!("parity_{n} tree {j}: measured < certified"));
            }
            if rep.below_eighth(n) {
                few += 1;
                if rep.measured_error < Prob::new(7, 16) {
                    return fail(format!(
                        "parity_{n} tree {j}: {} x positions, error {} < 7/16",
                        rep.distinct_x,
                        fmt_prob(rep.measured_error)
                    ));
                }
            }
            min_gap = min_gap.min(rep.measured_error - rep.certified_lower_bound);
        }
        notes.push(format!("parity_{n} min gap {}", fmt_prob(min_gap)));
    }
    Ok(format!("200 trees, {few} below n/8, {}", notes.join(", ")))
}

fn newman() -> Outcome {
    let c = e2s(parse_netlist(
        "inputs 4\ngate a AND x1 x2\ngate b AND x3 x4\ngate o OR a b\noutput o",
    ))?;
    let f = e2s(c.truth_table())?;
    let sys = e2s(build_kw_debate(&normalize_alternating(&c)))?;
    let rv = e2s(noisy_verifier(&mut rng(8), &sys, opts().budget))?;
    let err = e2s(rv_error(&rv, &sys, opts()))?;
    if err.max > Prob::new(1, 3) {
        return fail(format!("randomized verifier error {}", fmt_prob(err.max)));
    }
    let out = e2s(newman_derandomize(&rv, &sys, 8, opts()))?;
    let s = &out.stats;
    if let Some(d) = e2s(check_circuit_matches(&sys, &out.circuit, opts()))? {
        return fail(format!("majority circuit disagrees at {d:?}"));
    }
    let r = e2s(check_validity(&out.system, &f, opts()))?;
    let bound = s.q as i64 + s.log_term as i64 + s.c_impl;
    if !r.valid || r.max_probes as i64 > bound {
        return fail(format!("valid={} probes={} bound={bound}", r.valid, r.max_probes));
    }
    Ok(format!(
        "k={} error={} t={} attempts={} m={} probes={} q={} log={} c_impl={}{}",
        sys.k,
        fmt_prob(err.max),
        s.t,
        s.attempts,
        s.m,
        r.max_probes,
        s.q,
        s.log_term,
        s.c_impl,
        if s.flagged { " (flagged: above 10)" } else { "" }
    ))
}

fn pspace() -> Outcome {
    let m = e2s(parity_accumulator(4, 2))?;
    let (_, r) = e2s(pspace_pipeline(&m, opts()))?;
    if r.function != e2s(BoolFn::parity(4))?.named(r.function.name().to_string()) {
        return fail("machine does not compute parity");
    }
    if r.compiled_max_probes > r.bound || r.compiled_max_probes > 40 {
        return fail(format!("compiled probes {} (bound {})", r.compiled_max_probes, r.bound));
    }
    Ok(format!(
        "w={} T={} bisection probes={} m={} compiled probes={} bound={}",
        r.width, r.horizon, r.bisection_max_probes, r.m, r.compiled_max_probes, r.bound
    ))
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn determinism() -> Outcome {
    let runs: Vec<Vec<String>> = vec![
        vec!["circuit", "info", "--circuit", &data("parity4.nl")],
        vec!["debate", "build", "--protocol", "crossexam", "--circuit", &data("and2.nl"), "--verify"],
        vec!["debate", "verify", "--system", &data("and2_kw.sys")],
        vec!["debate", "compress", "--system", &data("and2_kw_padded.sys")],
        vec!["debate", "compile", "--system", &data("and2_kw.sys")],
        vec!["advice", "extract", "--system", &data("and2_kw.sys")],
        vec!["yao", "run", "--circuit", &data("parity4.nl"), "--protocol", "kw", "--tree", &data("x1.dt")],
        vec!["yao", "run", "--circuit", &data("parity4.nl"), "--protocol", "kw", "--random-trees", "20"],
        vec!["newman", "run", "--system", &data("andor4_kw.sys")],
        vec!["pspace", "demo", "--n", "2", "--horizon", "1"],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();
    let bin = env!("CARGO_BIN_EXE_dqc");
    for args in &runs {
        let mut outs = Vec::new();
        for _ in 0..2 {
            let o = Command::new(bin)
                .args(["--seed", "42", "--format", "structured"])
                .args(args)
                .output()
                .map_err(|e| e.to_string())?;
            if o.status.code() == Some(2) {
                return fail(format!("{}: {}", args.join(" "), String::from_utf8_lossy(&o.stderr)));
            }
            outs.push(o.stdout);
        }
        if outs[0] != outs[1] {
            return fail(format!("{}: reports differ", args.join(" ")));
        }
    }
    Ok(format!("{} commands byte-identical across reruns", runs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("KW bound", kw_bound),
        ("cross-exam bound", crossexam_bound),
        ("round compression", compression),
        ("dependence lower bound", dependence),
        ("cross-exam compile", compile),
        ("advice round-trip", advice),
        ("Yao pairing bound", yao),
        ("Newman pipeline", newman),
        ("PSPACE demo", pspace),
        ("determinism", determinism),
    ];
    let filter: BTreeSet<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(note) => println!("criterion {id} ({name}): PASS in {secs:.1}s: {note}"),
            Err(why) => {
                failed += 1;
                println!("criterion {id} ({name}): FAIL in {secs:.1}s: {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
