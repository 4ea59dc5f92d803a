//! Metrics, program serialization, verification and the benchmark harness.

mod metrics;
mod program;
mod report;
mod verify;

pub use metrics::{count_ratio, metrics, norm_ratio, Metrics};
pub use program::{
    program_from_json, program_to_json, Angle, BodyJson, LayerJson, ProgramJson, FORMAT_VERSION,
    MQ_CONSISTENCY_TOL,
};
pub use report::{run_bench, run_circuit, Aggregates, BenchOptions, Record, Report, TimedRecord};
pub use verify::{verify, VerifyMethod, VerifyReport, ANCILLA_TOL, RANDOM_STATES, VERIFY_TOL};
