use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::cost::{CostOrder, RealizationScheme};
use crate::error::{Error, Result};
use crate::noise::{
    paired_relative_error, paired_success_error, relative_error, sample_runs, Experiment, NoiseModel,
};
use crate::passes::{optimize_traced, CompileOptions, MatchingMode};
use crate::qasm::{parse_qasm, to_zz_basis};

use super::metrics::{metrics, Metrics};
use super::program::FORMAT_VERSION;

fn opt_finite<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) if v.is_finite() => s.serialize_f64(*v),
        _ => s.serialize_none(),
    }
}

fn display<S: Serializer, T: std::fmt::Display>(x: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(x)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchOptions {
    pub scheme: RealizationScheme,
    #[serde(serialize_with = "display")]
    pub cost: CostOrder,
    pub max_iters: usize,
    pub seed: u64,
    pub samples: usize,
    pub shots: u32,
    pub p_dephase: f64,
    pub p_depol_tq: f64,
    /// Widest physical register that gets fidelity estimates.
    pub sim_cap: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        let c = CompileOptions::default();
        let m = NoiseModel::default();
        BenchOptions {
            scheme: c.scheme,
            cost: c.cost,
            max_iters: c.max_iters,
            seed: m.seed,
            samples: 0,
            shots: 10,
            p_dephase: m.p_dephase,
            p_depol_tq: m.p_depol_tq,
            sim_cap: 12,
        }
    }
}

impl BenchOptions {
    pub fn compile_options(&self) -> CompileOptions {
        CompileOptions {
            scheme: self.scheme,
            cost: self.cost,
            max_iters: self.max_iters,
            matching: MatchingMode::Greedy,
            ..CompileOptions::default()
        }
    }

    pub fn noise_model(&self) -> Result<NoiseModel> {
        NoiseModel::new(self.p_dephase, self.p_depol_tq, self.seed)
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON options.
    pub fn hash(&self) -> String {
        let js = serde_json::to_string(self).expect("options serialize");
        hex::encode(&Sha256::digest(js.as_bytes())[..8])
    }
}

/// One benchmark row. Metric fields are empty when the circuit was skipped;
/// fidelity fields are empty when the register exceeds the simulation cap.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Record {
    pub name: String,
    pub num_qubits: Option<usize>,
    pub scheme: RealizationScheme,
    pub status: String,
    pub two_qubit_count: Option<usize>,
    pub baseline_mq_count: Option<usize>,
    pub compiled_mq_count: Option<usize>,
    pub input_norm: Option<f64>,
    pub baseline_norm: Option<f64>,
    pub compiled_norm: Option<f64>,
    pub gate_count_ratio: Option<f64>,
    pub parallel_merge_ratio: Option<f64>,
    #[serde(serialize_with = "opt_finite")]
    pub norm_ratio: Option<f64>,
    pub iterations: Option<usize>,
    pub cost_decreasing: Option<bool>,
    pub f_inp_success: Option<f64>,
    pub f_comp_success: Option<f64>,
    pub eps_success: Option<f64>,
    /// Interval from the error-free fraction of the Monte Carlo samples.
    pub eps_success_lo: Option<f64>,
    pub eps_success_hi: Option<f64>,
    pub f_inp_mc: Option<f64>,
    pub f_inp_mc_lo: Option<f64>,
    pub f_inp_mc_hi: Option<f64>,
    pub f_comp_mc: Option<f64>,
    pub f_comp_mc_lo: Option<f64>,
    pub f_comp_mc_hi: Option<f64>,
    pub eps_mc: Option<f64>,
    pub eps_mc_lo: Option<f64>,
    pub eps_mc_hi: Option<f64>,
    pub method: String,
    pub samples: usize,
    pub shots: u32,
    pub seed: u64,
    pub version: String,
    pub opts_hash: String,
}

impl Record {
    fn skeleton(name: &str, opts: &BenchOptions, status: String) -> Self {
        Record {
            name: name.to_string(),
            num_qubits: None,
            scheme: opts.scheme,
            status,
            two_qubit_count: None,
            baseline_mq_count: None,
            compiled_mq_count: None,
            input_norm: None,
            baseline_norm: None,
            compiled_norm: None,
            gate_count_ratio: None,
            parallel_merge_ratio: None,
            norm_ratio: None,
            iterations: None,
            cost_decreasing: None,
            f_inp_success: None,
            f_comp_success: None,
            eps_success: None,
            eps_success_lo: None,
            eps_success_hi: None,
            f_inp_mc: None,
            f_inp_mc_lo: None,
            f_inp_mc_hi: None,
            f_comp_mc: None,
            f_comp_mc_lo: None,
            f_comp_mc_hi: None,
            eps_mc: None,
            eps_mc_lo: None,
            eps_mc_hi: None,
            method: "n/a".into(),
            samples: 0,
            shots: 0,
            seed: opts.seed,
            version: FORMAT_VERSION.to_string(),
            opts_hash: opts.hash(),
        }
    }

    fn set_metrics(&mut self, m: &Metrics) {
        self.num_qubits = Some(m.num_qubits);
        self.two_qubit_count = Some(m.two_qubit_count);
        self.baseline_mq_count = Some(m.baseline_mq_count);
        self.compiled_mq_count = Some(m.compiled_mq_count);
        self.input_norm = Some(m.input_norm);
        self.baseline_norm = Some(m.baseline_norm);
        self.compiled_norm = Some(m.compiled_norm);
        self.gate_count_ratio = Some(m.gate_count_ratio);
        self.parallel_merge_ratio = Some(m.parallel_merge_ratio);
        self.norm_ratio = Some(m.norm_ratio);
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok" || self.status.starts_with("ok ")
    }
}

/// A record with its wall time, which is kept out of the CSV.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TimedRecord {
    #[serde(flatten)]
    pub record: Record,
    pub wall_time_ms: f64,
}

/// Compiles one QASM source and measures it. Never fails: problems become
/// the record's status.
pub fn run_circuit(name: &str, src: &str, opts: &BenchOptions) -> TimedRecord {
    let start = Instant::now();
    let record = match measure(name, src, opts) {
        Ok(r) => r,
        Err(e) => {
            let kind = match e {
                Error::Qasm(_) | Error::UnsupportedGate(_) => "skipped",
                _ => "error",
            };
            Record::skeleton(name, opts, format!("{kind}: {e}"))
        }
    };
    TimedRecord {
        record,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

fn measure(name: &str, src: &str, opts: &BenchOptions) -> Result<Record> {
    let input = to_zz_basis(&parse_qasm(src)?);
    let copts = opts.compile_options();
    let (program, trace) = optimize_traced(&input, &copts)?;
    let m = metrics(&program, &input)?;
    let mut r = Record::skeleton(name, opts, "ok".into());
    r.set_metrics(&m);
    r.iterations = Some(trace.accepted.len().saturating_sub(1));
    r.cost_decreasing = Some(trace.accepted.windows(2).all(|w| copts.cost.less(&w[1], &w[0])));
    let physical = input.num_qubits + program.ancilla().map_or(0, |_| 1);
    if physical > opts.sim_cap {
        r.status = "ok (fidelity n/a: register exceeds simulation cap)".into();
        return Ok(r);
    }
    let model = opts.noise_model()?;
    let e_inp = Experiment::from_circuit(&input)?;
    let e_comp = Experiment::from_program(&program)?;
    let fi = e_inp.success_probability(&model)?;
    let fc = e_comp.success_probability(&model)?;
    r.f_inp_success = Some(fi);
    r.f_comp_success = Some(fc);
    r.eps_success = relative_error(fc, fi);
    r.method = "success-prob".into();
    if opts.samples > 0 {
        let ideal = e_inp.ideal()?;
        let run_i = sample_runs(&e_inp, &model, opts.samples, opts.shots)?;
        let run_c = sample_runs(&e_comp, &model, opts.samples, opts.shots)?;
        let fi = run_i.fidelity(&ideal)?;
        let fc = run_c.fidelity(&ideal)?;
        r.f_inp_mc = Some(fi.value);
        r.f_inp_mc_lo = Some(fi.lo);
        r.f_inp_mc_hi = Some(fi.hi);
        r.f_comp_mc = Some(fc.value);
        r.f_comp_mc_lo = Some(fc.lo);
        r.f_comp_mc_hi = Some(fc.hi);
        if let Ok(eps) = paired_success_error(&run_c, &run_i) {
            r.eps_success_lo = Some(eps.lo);
            r.eps_success_hi = Some(eps.hi);
        }
        if let Ok(eps) = paired_relative_error(&run_c, &run_i, &ideal) {
            r.eps_mc = Some(eps.value);
            r.eps_mc_lo = Some(eps.lo);
            r.eps_mc_hi = Some(eps.hi);
        }
        r.method = "success-prob+monte-carlo".into();
        r.samples = opts.samples;
        r.shots = opts.shots;
    }
    Ok(r)
}

/// Means over records with status ok. These are qualitative summaries of a
/// small suite, not statistically rigorous estimates.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Aggregates {
    pub label: String,
    pub circuits: usize,
    pub ok: usize,
    pub mean_gate_count_ratio: Option<f64>,
    pub mean_parallel_merge_ratio: Option<f64>,
    pub mean_norm_ratio: Option<f64>,
    pub mean_eps_success: Option<f64>,
    pub mean_eps_mc: Option<f64>,
    pub gate_count_ratio_above_one: usize,
    pub parallel_merge_ratio_at_least_one: usize,
    pub parallel_merge_ratio_above_one: usize,
    pub norm_ratio_at_least_one: usize,
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = xs.filter(|x| x.is_finite()).collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

impl Aggregates {
    pub fn from_records(records: &[Record]) -> Self {
        let ok: Vec<&Record> = records.iter().filter(|r| r.is_ok()).collect();
        let count = |f: &dyn Fn(&Record) -> bool| ok.iter().filter(|r| f(r)).count();
        Aggregates {
            label: "qualitative means over a small circuit suite".into(),
            circuits: records.len(),
            ok: ok.len(),
            mean_gate_count_ratio: mean(ok.iter().filter_map(|r| r.gate_count_ratio)),
            mean_parallel_merge_ratio: mean(ok.iter().filter_map(|r| r.parallel_merge_ratio)),
            mean_norm_ratio: mean(ok.iter().filter_map(|r| r.norm_ratio)),
            mean_eps_success: mean(ok.iter().filter_map(|r| r.eps_success)),
            mean_eps_mc: mean(ok.iter().filter_map(|r| r.eps_mc)),
            gate_count_ratio_above_one: count(&|r| r.gate_count_ratio.is_some_and(|x| x > 1.0)),
            parallel_merge_ratio_at_least_one: count(&|r| r.parallel_merge_ratio.is_some_and(|x| x >= 1.0)),
            parallel_merge_ratio_above_one: count(&|r| r.parallel_merge_ratio.is_some_and(|x| x > 1.0)),
            norm_ratio_at_least_one: count(&|r| r.norm_ratio.is_some_and(|x| x >= 1.0)),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub version: String,
    pub opts_hash: String,
    pub options: BenchOptions,
    pub records: Vec<TimedRecord>,
    pub aggregates: Aggregates,
}

impl Report {
    pub fn new(options: BenchOptions, mut records: Vec<TimedRecord>) -> Self {
        records.sort_by(|a, b| {
            (&a.record.name, a.record.num_qubits).cmp(&(&b.record.name, b.record.num_qubits))
        });
        let plain: Vec<Record> = records.iter().map(|t| t.record.clone()).collect();
        Report {
            version: FORMAT_VERSION.to_string(),
            opts_hash: options.hash(),
            aggregates: Aggregates::from_records(&plain),
            options,
            records,
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().map(|t| &t.record)
    }

    /// CSV of all records: header row, RFC 4180 quoting, no wall times.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in self.rows() {
            w.serialize(r).map_err(|e| Error::Invariant(format!("csv: {e}")))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Invariant(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::Invariant(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Runs every `.qasm` file of `dir` (sorted by name) in parallel.
pub fn run_bench(dir: &Path, opts: &BenchOptions) -> Result<Report> {
    let mut files: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "qasm"))
        .collect();
    files.sort();
    let records = files
        .par_iter()
        .map(|path| {
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            match std::fs::read_to_string(path) {
                Ok(src) => run_circuit(&name, &src, opts),
                Err(e) => TimedRecord {
                    record: Record::skeleton(&name, opts, format!("skipped: unreadable: {e}")),
                    wall_time_ms: 0.0,
                },
            }
        })
        .collect();
    Ok(Report::new(opts.clone(), records))
}
