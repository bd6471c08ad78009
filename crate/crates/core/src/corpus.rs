//! Seeded instance generators shared by tests, benches and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boolfn::BoolFn;
use crate::circuit::{circuit_from_function, Circuit, Gate, Ref};
use crate::debate::{verifier_tree, DebateSystem};
use crate::error::Result;
use crate::randomized::{Prob, RandomizedVerifier};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random circuit with exactly `size` gates over `n` inputs; operands are
/// drawn uniformly from the inputs and earlier gates, the output is the
/// last gate. Roughly one gate in five is a NOT.
pub fn random_circuit<R: Rng>(rng: &mut R, n: usize, size: usize) -> Result<Circuit> {
    let mut gates = Vec::with_capacity(size);
    for g in 0..size.max(1) {
        let pick = |rng: &mut R| {
            let r = rng.gen_range(0..n + g);
            if r < n {
                Ref::Input(r)
            } else {
                Ref::Gate(r - n)
            }
        };
        let gate = match rng.gen_range(0..5) {
            0 => Gate::Not(pick(rng)),
            1 | 2 => Gate::And(pick(rng), pick(rng)),
            _ => Gate::Or(pick(rng), pick(rng)),
        };
        gates.push(gate);
    }
    let out = gates.len() - 1;
    Circuit::new(n, gates, out)
}

/// `count` random circuits with `1 ≤ n ≤ max_n` and `1 ≤ size ≤ max_size`.
pub fn random_circuits(seed: u64, count: usize, max_n: usize, max_size: usize) -> Result<Vec<Circuit>> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let n = r.gen_range(1..=max_n);
            let size = r.gen_range(1..=max_size);
            random_circuit(&mut r, n, size)
        })
        .collect()
}

/// Every function of `n` variables with a Shannon-expansion circuit.
pub fn all_functions(n: usize) -> Result<Vec<(BoolFn, Circuit)>> {
    let rows = 1usize << n;
    (0..1usize << rows)
        .map(|code| {
            let f = BoolFn::from_table(n, (0..rows).map(|i| code >> i & 1 == 1).collect())?
                .named(format!("f{n}_{code:0w$x}", w = rows.div_ceil(4)));
            let c = circuit_from_function(&f)?;
            Ok((f, c))
        })
        .collect()
}

/// Spreads `total` dummy rounds over the `k + 1` padding slots.
pub fn random_padding<R: Rng>(rng: &mut R, k: usize, total: usize) -> Vec<usize> {
    let mut slots = vec![0; k + 1];
    for _ in 0..total {
        slots[rng.gen_range(0..=k)] += 1;
    }
    slots
}

/// The verifier's own tree at weight 2/3 and a copy with one random leaf
/// flipped at weight 1/3: error exactly 1/3 on the atoms reaching that leaf.
pub fn noisy_verifier<R: Rng>(rng: &mut R, sys: &DebateSystem, budget: u64) -> Result<RandomizedVerifier> {
    let exact = verifier_tree(sys.verifier.as_ref(), budget)?;
    let leaves: Vec<usize> = exact
        .nodes()
        .iter()
        .enumerate()
        .filter(|(_, n)| matches!(n, crate::circuit::DtNode::Leaf(_)))
        .map(|(i, _)| i)
        .collect();
    let leaf = leaves[rng.gen_range(0..leaves.len())];
    let crate::circuit::DtNode::Leaf(v) = exact.nodes()[leaf] else {
        unreachable!()
    };
    let noisy = exact.with_leaf(leaf, !v)?;
    RandomizedVerifier::new(sys.space(), vec![(exact, Prob::new(2, 3)), (noisy, Prob::new(1, 3))])
}
