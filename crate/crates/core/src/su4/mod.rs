//! Two-qubit synthesis.

mod kak;
mod lh;

pub use kak::{factor_local, interaction, kak_decompose, CanonicalClass, KakDecomposition};
pub use lh::{minimize_block_phase, to_lh_block, Completion, LhBlock, LhElement, SCORE_TOL};
