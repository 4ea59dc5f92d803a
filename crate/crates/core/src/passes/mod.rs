//! Compilation passes: primitives, CNOT layers, norm reduction and the driver.

mod layer;
mod norm;
mod optimize;
mod primitive;

pub use layer::CnotLayer;
pub use norm::{
    conjugation_cost_matrix, conjugation_costs, exhaustive_matching, greedy_matching,
    matching_weight, norm_reduction_step, ConjugationCosts, MatchingMode, NormOptions, NormStep,
    EXHAUSTIVE_MAX_QUBITS,
};
pub use optimize::{optimize, optimize_traced, CompileOptions, CompiledProgram, Side, Trace};
pub use primitive::{
    canonical_gates, pg_left, pg_left_factor, pg_right, pg_right_factor, resynthesize,
    sequence_circuit, LeftFactor,
};
