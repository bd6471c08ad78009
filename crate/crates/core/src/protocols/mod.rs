//! Constructive debate systems from circuits.

mod crossexam;
mod kw;

pub use crossexam::{build_crossexam_debate, ceil_log2, index_bits};
pub(crate) use crossexam::crossexam_system;
pub use kw::build_kw_debate;

/// The arithmetic behind the size implication for a system with `probes`
/// probes over a circuit of `m` gates: `2^(probes-3) ≤ 2^⌈log2 max(m, 2)⌉`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeImplication {
    pub lhs: u128,
    pub rhs: u128,
    pub holds: bool,
}

pub fn size_implication(probes: usize, m: usize) -> SizeImplication {
    let lhs = if probes >= 3 { 1u128 << (probes - 3).min(127) } else { 0 };
    let rhs = 1u128 << ceil_log2(m.max(2)).min(127);
    SizeImplication {
        lhs,
        rhs,
        holds: lhs <= rhs,
    }
}
