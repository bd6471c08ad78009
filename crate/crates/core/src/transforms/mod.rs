//! Debate-to-debate transformations.

mod advice;
mod compile;
mod compress;

pub use advice::{extract_advice, simulate_redacted, simulate_with_advice, AdviceTable};
pub use compile::{check_circuit_matches, crossexam_compile, Disagreement};
pub use compress::{compress_rounds, compress_verified, pad_rounds, Compression};
