//! Cross-checks of the lazy explorers against brute-force enumeration.

use std::collections::BTreeSet;

use dqc::boolfn::{index_to_bits, BoolFn};
use dqc::circuit::{normalize_alternating, Circuit};
use dqc::corpus::{all_functions, random_circuits};
use dqc::debate::{
    check_validity, queried_variable_set, run_debate, run_on, scripted_adversary, DebateSystem,
};
use dqc::par::{CheckOptions, Exec};
use dqc::protocols::{build_crossexam_debate, build_kw_debate};

struct Naive {
    valid: bool,
    max_probes: usize,
}

/// Plays every one of the `2^k` adversary bit strings against the honest
/// prover for `g(x)` on every input.
fn naive_validity(sys: &DebateSystem, g: &BoolFn) -> Naive {
    let mut out = Naive { valid: true, max_probes: 0 };
    for xi in 0..1usize << sys.n {
        let x = index_to_bits(xi, sys.n);
        let want = g.at(xi);
        let adversary = 1 - want as usize;
        for a in 0..1usize << sys.k {
            let bits = index_to_bits(a, sys.k);
            let run = run_debate(sys, &x, adversary, &mut scripted_adversary(&bits)).unwrap();
            out.max_probes = out.max_probes.max(run.probes.len());
            out.valid &= run.verdict == want;
        }
    }
    out
}

fn opts() -> CheckOptions {
    CheckOptions { budget: 1 << 24, exec: Exec::Sequential }
}

fn agree(sys: &DebateSystem, g: &BoolFn) {
    let lazy = check_validity(sys, g, opts()).unwrap();
    let naive = naive_validity(sys, g);
    assert_eq!(lazy.valid, naive.valid, "validity differs for {}", g.name());
    if lazy.valid {
        assert_eq!(lazy.max_probes, naive.max_probes, "probe count differs for {}", g.name());
    } else {
        assert!(lazy.counterexample.is_some());
    }
}

fn small_circuits() -> Vec<Circuit> {
    random_circuits(11, 40, 3, 6).unwrap()
}

#[test]
fn kw_matches_enumeration() {
    for c in small_circuits() {
        let f = c.truth_table().unwrap();
        let sys = build_kw_debate(&normalize_alternating(&c)).unwrap();
        if sys.k <= 10 {
            agree(&sys, &f);
        }
    }
}

#[test]
fn crossexam_matches_enumeration() {
    for c in small_circuits() {
        let f = c.truth_table().unwrap();
        let sys = build_crossexam_debate(&c).unwrap();
        if sys.k <= 10 {
            agree(&sys, &f);
        }
    }
}

#[test]
fn wrong_claims_match_enumeration() {
    // Checking a system against a function it does not compute must agree too.
    let c = random_circuits(5, 8, 2, 4).unwrap();
    for c in c {
        let sys = build_crossexam_debate(&c).unwrap();
        for (g, _) in all_functions(sys.n).unwrap() {
            agree(&sys, &g);
        }
    }
}

#[test]
fn every_two_variable_function_kw() {
    for (f, c) in all_functions(2).unwrap() {
        let sys = build_kw_debate(&normalize_alternating(&c)).unwrap();
        let naive = naive_validity(&sys, &f);
        assert!(naive.valid, "{}", f.name());
        agree(&sys, &f);
    }
}

#[test]
fn queried_set_matches_enumeration() {
    for c in small_circuits().into_iter().take(15) {
        let sys = build_kw_debate(&normalize_alternating(&c)).unwrap();
        let total = sys.n + 2 * sys.k;
        if total > 16 {
            continue;
        }
        let mut seen = BTreeSet::new();
        for i in 0..1usize << total {
            let bits = index_to_bits(i, total);
            let run = run_on(sys.verifier.as_ref(), &bits[..sys.n], &bits[sys.n..]).unwrap();
            seen.extend(run.probes);
        }
        let lazy = queried_variable_set(sys.verifier.as_ref(), 1 << 24).unwrap();
        assert_eq!(lazy.set, seen);
    }
}
