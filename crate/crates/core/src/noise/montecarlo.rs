use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{apply_insertions, gate_actions, insertions, NoiseModel, Substreams};
use crate::circuit::{sim, Circuit};
use crate::error::{Error, Result};
use crate::passes::{CnotLayer, CompiledProgram};
use crate::qasm::to_zz_basis;

use super::dist::{relative_error, ShotDistribution};

pub const BOOTSTRAP_REPLICATES: usize = 1000;
pub const DEFAULT_STATEVECTOR_CAP: usize = 16;

const SHOT_STREAM: u64 = 1 << 63;
const BOOTSTRAP_STREAM: u64 = u64::MAX;

/// Maps a final basis index of the simulated register to a measured
/// outcome: classical CNOT postprocessing, then qubit → bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Readout {
    pub width: usize,
    pub bits: Vec<(usize, usize)>,
    pub post: Option<CnotLayer>,
}

impl Readout {
    fn new(num_qubits: usize, measurements: &[(usize, usize)], post: Option<CnotLayer>) -> Self {
        let bits: Vec<(usize, usize)> = if measurements.is_empty() {
            (0..num_qubits).map(|q| (q, q)).collect()
        } else {
            measurements.to_vec()
        };
        let width = bits.iter().map(|b| b.1 + 1).max().unwrap_or(0);
        Readout {
            width,
            bits,
            post: post.filter(|l| !l.is_identity()),
        }
    }

    pub fn outcome(&self, index: usize) -> u64 {
        let y = self.post.as_ref().map_or(index, |l| l.apply_index(index));
        let mut out = 0u64;
        for &(q, b) in &self.bits {
            out = (out & !(1 << b)) | ((((y >> q) & 1) as u64) << b);
        }
        out
    }
}

/// A noisy-execution target: the physical circuit whose entangling gates
/// receive noise, and its readout.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub circuit: Circuit,
    pub readout: Readout,
}

impl Experiment {
    /// Input circuit in the ZZ basis; measurements become the readout.
    pub fn from_circuit(c: &Circuit) -> Result<Self> {
        let (body, meas) = c.strip_measurements()?;
        Ok(Experiment {
            circuit: to_zz_basis(&body),
            readout: Readout::new(c.num_qubits, &meas, None),
        })
    }

    /// Realized body of a compiled program. The leading CNOT layer maps
    /// `|0…0⟩` to itself and the trailing one is applied to the outcomes.
    pub fn from_program(p: &CompiledProgram) -> Result<Self> {
        let r = p.realize()?;
        Ok(Experiment {
            circuit: r.circuit,
            readout: Readout::new(p.num_qubits, &p.measurements, Some(p.post.clone())),
        })
    }

    pub fn check_cap(&self, cap: usize) -> Result<()> {
        if self.circuit.num_qubits > cap {
            return Err(Error::RegisterTooLarge {
                qubits: self.circuit.num_qubits,
                cap,
            });
        }
        Ok(())
    }

    fn outcome_probs(&self, c: &Circuit) -> Result<Vec<f64>> {
        let state = sim::simulate(c)?;
        let mut out = vec![0.0; 1 << self.readout.width];
        for (i, a) in state.iter().enumerate() {
            let p = a.norm_sqr();
            if p > 0.0 {
                out[self.readout.outcome(i) as usize] += p;
            }
        }
        Ok(out)
    }

    /// Noiseless outcome distribution.
    pub fn ideal(&self) -> Result<ShotDistribution> {
        self.check_cap(DEFAULT_STATEVECTOR_CAP)?;
        Ok(ShotDistribution::from_dense(
            self.readout.width,
            &self.outcome_probs(&self.circuit)?,
        ))
    }

    pub fn success_probability(&self, model: &NoiseModel) -> Result<f64> {
        super::success_probability(&self.circuit, model)
    }
}

/// Per-sample shot histograms of a Monte Carlo run, in sample order.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledRun {
    pub width: usize,
    pub shots: u32,
    pub histograms: Vec<Vec<(u64, u32)>>,
    /// Samples that received no insertion.
    pub clean: usize,
    /// Per-sample flag: no insertion happened.
    pub clean_mask: Vec<bool>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Estimate {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate {
            value,
            lo: value,
            hi: value,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

fn histogram(draws: &mut [u64]) -> Vec<(u64, u32)> {
    draws.sort_unstable();
    let mut h: Vec<(u64, u32)> = Vec::new();
    for &x in draws.iter() {
        match h.last_mut() {
            Some((y, k)) if *y == x => *k += 1,
            _ => h.push((x, 1)),
        }
    }
    h
}

/// Draws `samples` noise instances of `exp` and `shots` measurement shots
/// from each. Samples run in parallel; every sample owns its RNG substreams
/// so the result does not depend on scheduling.
pub fn sample_runs(exp: &Experiment, model: &NoiseModel, samples: usize, shots: u32) -> Result<SampledRun> {
    model.validate()?;
    exp.check_cap(DEFAULT_STATEVECTOR_CAP)?;
    if samples == 0 || shots == 0 {
        return Err(Error::InvalidArgument("samples and shots must be positive".into()));
    }
    let actions = gate_actions(&exp.circuit)?;
    let clean_probs = exp.outcome_probs(&exp.circuit)?;
    let weighted = |p: &[f64]| {
        WeightedIndex::new(p).map_err(|e| Error::Invariant(format!("outcome distribution: {e}")))
    };
    let clean_dist = weighted(&clean_probs)?;
    let streams = Substreams::new(model.seed);
    let results: Vec<Result<(Vec<(u64, u32)>, bool)>> = (0..samples as u64)
        .into_par_iter()
        .map(|s| {
            let mut rng = streams.sample(s);
            let ins = insertions(&actions, exp.circuit.num_qubits, model, &mut rng);
            let noisy;
            let dist = if ins.is_empty() {
                &clean_dist
            } else {
                noisy = weighted(&exp.outcome_probs(&apply_insertions(&exp.circuit, &ins))?)?;
                &noisy
            };
            let mut shot_rng = streams.sample(s | SHOT_STREAM);
            let mut draws: Vec<u64> = (0..shots).map(|_| dist.sample(&mut shot_rng) as u64).collect();
            Ok((histogram(&mut draws), ins.is_empty()))
        })
        .collect();
    let mut histograms = Vec::with_capacity(samples);
    let mut clean_mask = Vec::with_capacity(samples);
    for r in results {
        let (h, c) = r?;
        clean_mask.push(c);
        histograms.push(h);
    }
    let clean = clean_mask.iter().filter(|&&c| c).count();
    Ok(SampledRun {
        width: exp.readout.width,
        shots,
        histograms,
        clean,
        clean_mask,
        seed: model.seed,
    })
}

fn dense(ideal: &ShotDistribution) -> Vec<f64> {
    let mut v = vec![0.0; 1 << ideal.width];
    for (x, p) in &ideal.probs {
        v[*x as usize] = *p;
    }
    v
}

impl SampledRun {
    /// Pooled outcome distribution over all samples.
    pub fn distribution(&self) -> ShotDistribution {
        let mut counts = std::collections::BTreeMap::new();
        for h in &self.histograms {
            for &(x, k) in h {
                *counts.entry(x).or_insert(0u64) += k as u64;
            }
        }
        ShotDistribution::from_counts(self.width, counts)
    }

    /// TVD fidelity of the pool of `indices` (with repetition) against
    /// the dense ideal distribution.
    fn fidelity_of(&self, ideal: &[f64], indices: impl Iterator<Item = usize>, acc: &mut Vec<f64>) -> f64 {
        acc.iter_mut().for_each(|a| *a = 0.0);
        let mut total = 0.0;
        for i in indices {
            for &(x, k) in &self.histograms[i] {
                acc[x as usize] += k as f64;
                total += k as f64;
            }
        }
        let d: f64 = ideal.iter().zip(acc.iter()).map(|(p, c)| (p - c / total).abs()).sum();
        1.0 - 0.5 * d
    }

    fn resample(&self, rng: &mut impl Rng) -> Vec<usize> {
        let n = self.histograms.len();
        (0..n).map(|_| rng.random_range(0..n)).collect()
    }

    /// Pooled TVD fidelity with a basic-bootstrap 95% interval over samples.
    pub fn fidelity(&self, ideal: &ShotDistribution) -> Result<Estimate> {
        if ideal.width != self.width {
            return Err(Error::InvalidArgument("ideal distribution width differs".into()));
        }
        let ideal = dense(ideal);
        let mut acc = vec![0.0; ideal.len()];
        let value = self.fidelity_of(&ideal, 0..self.histograms.len(), &mut acc);
        let mut rng = Substreams::new(self.seed).sample(BOOTSTRAP_STREAM);
        let mut reps: Vec<f64> = (0..BOOTSTRAP_REPLICATES)
            .map(|_| {
                let idx = self.resample(&mut rng);
                self.fidelity_of(&ideal, idx.into_iter(), &mut acc)
            })
            .collect();
        Ok(basic_interval(value, &mut reps, 1.0))
    }
}

/// Basic bootstrap interval `[2v − q₉₇.₅, 2v − q₂.₅]`, clipped to `hi_max`.
/// It reflects the replicate spread around the estimate and so corrects
/// the downward bias of plug-in TVD fidelities.
fn basic_interval(value: f64, reps: &mut [f64], hi_max: f64) -> Estimate {
    reps.sort_by(|a, b| a.total_cmp(b));
    let at = |q: f64| reps[((q * reps.len() as f64) as usize).min(reps.len() - 1)];
    Estimate {
        value,
        lo: (2.0 * value - at(0.975)).min(hi_max),
        hi: (2.0 * value - at(0.025)).min(hi_max),
    }
}

/// Monte Carlo TVD fidelity of `exp` under `model`.
pub fn monte_carlo_fidelity(exp: &Experiment, model: &NoiseModel, samples: usize, shots: u32) -> Result<Estimate> {
    let ideal = exp.ideal()?;
    sample_runs(exp, model, samples, shots)?.fidelity(&ideal)
}

/// Relative error reduction of `comp` over `inp` with a paired bootstrap:
/// each replicate resamples the same sample indices in both runs.
pub fn paired_relative_error(comp: &SampledRun, inp: &SampledRun, ideal: &ShotDistribution) -> Result<Estimate> {
    if comp.histograms.len() != inp.histograms.len() || comp.width != ideal.width || inp.width != ideal.width {
        return Err(Error::InvalidArgument("runs are not paired".into()));
    }
    let ideal = dense(ideal);
    let mut acc = vec![0.0; ideal.len()];
    let n = comp.histograms.len();
    let fc = comp.fidelity_of(&ideal, 0..n, &mut acc);
    let fi = inp.fidelity_of(&ideal, 0..n, &mut acc);
    let value = relative_error(fc, fi)
        .ok_or_else(|| Error::InvalidArgument("input fidelity is 1; relative error undefined".into()))?;
    let mut rng = Substreams::new(comp.seed ^ inp.seed.rotate_left(32)).sample(BOOTSTRAP_STREAM);
    let mut reps: Vec<f64> = (0..BOOTSTRAP_REPLICATES)
        .filter_map(|_| {
            let idx = comp.resample(&mut rng);
            let fc = comp.fidelity_of(&ideal, idx.iter().copied(), &mut acc);
            let fi = inp.fidelity_of(&ideal, idx.iter().copied(), &mut acc);
            relative_error(fc, fi)
        })
        .collect();
    if reps.is_empty() {
        return Ok(Estimate::exact(value));
    }
    Ok(basic_interval(value, &mut reps, 1.0))
}

/// Relative error reduction from the fraction of error-free samples of
/// each run, with the same paired bootstrap as [`paired_relative_error`].
pub fn paired_success_error(comp: &SampledRun, inp: &SampledRun) -> Result<Estimate> {
    let n = comp.clean_mask.len();
    if n != inp.clean_mask.len() || n == 0 {
        return Err(Error::InvalidArgument("runs are not paired".into()));
    }
    let frac = |r: &SampledRun, idx: &mut dyn Iterator<Item = usize>| {
        idx.filter(|&i| r.clean_mask[i]).count() as f64 / n as f64
    };
    let value = relative_error(frac(comp, &mut (0..n)), frac(inp, &mut (0..n)))
        .ok_or_else(|| Error::InvalidArgument("no input sample saw an error; relative error undefined".into()))?;
    let mut rng = Substreams::new(comp.seed ^ inp.seed.rotate_left(32)).sample(BOOTSTRAP_STREAM - 1);
    let mut reps: Vec<f64> = (0..BOOTSTRAP_REPLICATES)
        .filter_map(|_| {
            let idx = comp.resample(&mut rng);
            relative_error(frac(comp, &mut idx.iter().copied()), frac(inp, &mut idx.iter().copied()))
        })
        .collect();
    if reps.is_empty() {
        return Ok(Estimate::exact(value));
    }
    Ok(basic_interval(value, &mut reps, 1.0))
}
