use serde::{Serialize, Serializer};

use crate::circuit::Circuit;
use crate::cost::{baseline_parallel_merge, input_norm, RealizationScheme};
use crate::error::Result;
use crate::passes::CompiledProgram;

pub(crate) fn finite_or_null<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_none()
    }
}

/// Count and norm comparison of a compiled program against its input.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Metrics {
    pub num_qubits: usize,
    pub scheme: RealizationScheme,
    pub two_qubit_count: usize,
    pub baseline_mq_count: usize,
    pub baseline_norm: f64,
    pub compiled_mq_count: usize,
    pub input_norm: f64,
    pub compiled_norm: f64,
    /// Two-qubit gate count over compiled multiqubit gate count.
    pub gate_count_ratio: f64,
    /// Parallel-merge baseline count over compiled count.
    pub parallel_merge_ratio: f64,
    /// Input norm over compiled norm; infinite when the compiled norm is 0
    /// (serialized as `null`).
    #[serde(serialize_with = "finite_or_null")]
    pub norm_ratio: f64,
}

/// Count ratio with the denominator clamped to 1.
pub fn count_ratio(num: usize, den: usize) -> f64 {
    num as f64 / den.max(1) as f64
}

pub fn norm_ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        if num == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    }
}

/// `input` must already be in the ZZ basis.
pub fn metrics(program: &CompiledProgram, input: &Circuit) -> Result<Metrics> {
    let (input, _) = input.strip_measurements()?;
    let base = baseline_parallel_merge(&input)?;
    let inorm = input_norm(&input)?;
    let cost = program.cost()?;
    let two = input.two_qubit_count();
    Ok(Metrics {
        num_qubits: input.num_qubits,
        scheme: program.scheme,
        two_qubit_count: two,
        baseline_mq_count: base.mq_count,
        baseline_norm: base.total_norm,
        compiled_mq_count: cost.mq_count,
        input_norm: inorm,
        compiled_norm: cost.total_norm,
        gate_count_ratio: count_ratio(two, cost.mq_count),
        parallel_merge_ratio: count_ratio(base.mq_count, cost.mq_count),
        norm_ratio: norm_ratio(inorm, cost.total_norm),
    })
}
