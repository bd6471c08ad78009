use dqc::boolfn::{index_to_bits, BoolFn};
use dqc::circuit::{decision_tree_to_circuit, normalize_alternating, parse_netlist, Circuit};
use dqc::corpus::{random_circuit, random_padding, rng};
use dqc::debate::{check_validity, run_honest, run_on, verifier_tree};
use dqc::par::{CheckOptions, Exec};
use dqc::protocols::{build_crossexam_debate, build_kw_debate, ceil_log2};
use dqc::pspace::{counter_machine, machine_run, machine_run_naive, parity_accumulator};
use dqc::randomized::random_tree;
use dqc::transforms::{compress_rounds, extract_advice, pad_rounds, simulate_with_advice, AdviceTable};
use proptest::prelude::*;

fn opts() -> CheckOptions {
    CheckOptions { budget: 1 << 22, exec: Exec::Sequential }
}

fn circuit(seed: u64, n: usize, size: usize) -> Circuit {
    random_circuit(&mut rng(seed), n, size).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn normalization_preserves_function(seed in any::<u64>(), n in 1usize..5, size in 1usize..10) {
        let c = circuit(seed, n, size);
        let nc = normalize_alternating(&c);
        prop_assert!(nc.is_alternating());
        for xi in 0..1usize << n {
            let x = index_to_bits(xi, n);
            prop_assert_eq!(nc.eval(&x), c.eval(&x).unwrap());
        }
        prop_assert!(nc.to_circuit().unwrap().equivalent(&c));
    }

    #[test]
    fn netlist_round_trip(seed in any::<u64>(), n in 1usize..6, size in 1usize..14) {
        let c = circuit(seed, n, size);
        let back = parse_netlist(&c.to_netlist()).unwrap();
        prop_assert_eq!(back.size(), c.size());
        prop_assert!(back.equivalent(&c));
    }

    #[test]
    fn hex_round_trip(n in 1usize..7, seed in any::<u64>()) {
        let mut r = rng(seed);
        let table: Vec<bool> = (0..1usize << n).map(|_| rand::Rng::gen(&mut r)).collect();
        let f = BoolFn::from_table(n, table).unwrap();
        let back = BoolFn::from_hex(&f.to_hex()).unwrap();
        prop_assert_eq!(back.table(), f.table());
    }

    #[test]
    fn kw_valid_within_depth(seed in any::<u64>(), n in 1usize..5, size in 1usize..9) {
        let c = circuit(seed, n, size);
        let f = c.truth_table().unwrap();
        let nc = normalize_alternating(&c);
        let sys = build_kw_debate(&nc).unwrap();
        let rep = check_validity(&sys, &f, opts()).unwrap();
        prop_assert!(rep.valid, "{:?}", rep.counterexample);
        prop_assert!(rep.max_probes <= nc.depth() + 1);
        for xi in 0..1usize << n {
            prop_assert_eq!(run_honest(&sys, &index_to_bits(xi, n)).unwrap().verdict, f.at(xi));
        }
    }

    #[test]
    fn crossexam_valid_within_log_size(seed in any::<u64>(), n in 1usize..5, size in 1usize..16) {
        let c = circuit(seed, n, size);
        let f = c.truth_table().unwrap();
        let m = c.trimmed().size();
        let sys = build_crossexam_debate(&c).unwrap();
        let rep = check_validity(&sys, &f, opts()).unwrap();
        prop_assert!(rep.valid, "{:?}", rep.counterexample);
        prop_assert!(rep.max_probes <= ceil_log2(m.max(2)) + 3);
    }

    #[test]
    fn compression_keeps_validity(seed in any::<u64>(), n in 1usize..4, size in 1usize..6, extra in 0usize..5) {
        let c = circuit(seed, n, size);
        let f = c.truth_table().unwrap();
        let sys = build_kw_debate(&normalize_alternating(&c)).unwrap();
        let slots = random_padding(&mut rng(seed ^ 1), sys.k, extra);
        let padded = pad_rounds(&sys, &slots).unwrap();
        prop_assert_eq!(padded.k, sys.k + extra);
        prop_assert!(check_validity(&padded, &f, opts()).unwrap().valid);
        let comp = compress_rounds(&padded, opts()).unwrap();
        prop_assert!(comp.system.k <= comp.queried_transcript.len());
        prop_assert!(check_validity(&comp.system, &f, opts()).unwrap().valid);
    }

    #[test]
    fn advice_replays_verifier(seed in any::<u64>(), n in 1usize..4, size in 1usize..6) {
        let c = circuit(seed, n, size);
        let sys = build_crossexam_debate(&c).unwrap();
        let total = sys.n + 2 * sys.k;
        prop_assume!(total <= 14);
        let t = extract_advice(sys.verifier.as_ref(), 1 << 22).unwrap();
        prop_assert!(t.rows() as u128 <= t.row_bound());
        let t = AdviceTable::parse(&t.to_text()).unwrap();
        for i in 0..1usize << total {
            let bits = index_to_bits(i, total);
            let (x, tr) = bits.split_at(sys.n);
            prop_assert_eq!(
                simulate_with_advice(&t, x, tr).unwrap(),
                run_on(sys.verifier.as_ref(), x, tr).unwrap()
            );
        }
    }

    #[test]
    fn tree_circuit_computes_tree(seed in any::<u64>(), space in 1usize..7, depth in 0usize..5) {
        let indices: Vec<usize> = (0..space).collect();
        let t = random_tree(&mut rng(seed), space, &indices, depth).unwrap();
        let c = decision_tree_to_circuit(&t).unwrap().circuit;
        for i in 0..1usize << space {
            let x = index_to_bits(i, space);
            prop_assert_eq!(c.eval(&x).unwrap(), t.eval(&x));
        }
    }

    #[test]
    fn verifier_tree_matches_verifier(seed in any::<u64>(), n in 1usize..4, size in 1usize..5) {
        let c = circuit(seed, n, size);
        let sys = build_kw_debate(&normalize_alternating(&c)).unwrap();
        let total = sys.n + 2 * sys.k;
        prop_assume!(total <= 14);
        let t = verifier_tree(sys.verifier.as_ref(), 1 << 22).unwrap();
        prop_assert!(t.depth() <= sys.ell_bound());
        for i in 0..1usize << total {
            let bits = index_to_bits(i, total);
            prop_assert_eq!(t.eval(&bits), run_on(sys.verifier.as_ref(), &bits[..sys.n], &bits[sys.n..]).unwrap().verdict);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn doubling_run_matches_stepping(width in 1usize..6, n in 1usize..4, horizon in 0usize..6) {
        let m = counter_machine(width.max(n), n, horizon).unwrap();
        for xi in 0..1usize << n {
            let x = index_to_bits(xi, n);
            prop_assert_eq!(machine_run(&m, &x), machine_run_naive(&m, &x));
        }
    }

    #[test]
    fn accumulator_decides_parity(n in 1usize..6, extra in 0usize..2) {
        let cb = ceil_log2(n).max(1);
        let m = parity_accumulator(n, cb + extra).unwrap();
        let f = m.truth_table().unwrap();
        let p = BoolFn::parity(n).unwrap();
        prop_assert_eq!(f.table(), p.table());
    }
}
