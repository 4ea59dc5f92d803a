//! Stochastic Pauli noise, success-probability estimate and Monte Carlo
//! TVD fidelity.

mod dist;
mod montecarlo;

use std::f64::consts::FRAC_PI_4;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{mat, Axis, Circuit, Gate};
use crate::cost::{nuclear_norm, zz_norm};
use crate::error::{Error, Result};

pub use dist::{relative_error, tvd_fidelity, ShotDistribution};
pub use montecarlo::{
    monte_carlo_fidelity, paired_relative_error, paired_success_error, sample_runs, Estimate, Experiment, Readout,
    SampledRun, BOOTSTRAP_REPLICATES,
};

/// Nuclear norm of the fully entangling two-qubit gate `exp(iπ/4 ZZ)`.
pub const FULL_TQ_NORM: f64 = FRAC_PI_4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NoiseModel {
    pub p_dephase: f64,
    pub p_depol_tq: f64,
    pub seed: u64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            p_dephase: 1e-3,
            p_depol_tq: 1e-3,
            seed: 0,
        }
    }
}

impl NoiseModel {
    pub fn new(p_dephase: f64, p_depol_tq: f64, seed: u64) -> Result<Self> {
        let m = NoiseModel {
            p_dephase,
            p_depol_tq,
            seed,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn noiseless(seed: u64) -> Self {
        NoiseModel {
            p_dephase: 0.0,
            p_depol_tq: 0.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("pDephase", self.p_dephase), ("pDepolTq", self.p_depol_tq)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!("{name} = {p} is not a probability")));
            }
        }
        Ok(())
    }
}

/// Participating qubits and nuclear norm of an entangling gate; `None` for
/// gates that receive no noise.
pub fn entangling_action(g: &Gate) -> Result<Option<(Vec<usize>, f64)>> {
    Ok(match g {
        Gate::Single { .. } | Gate::Barrier(_) => None,
        Gate::Cnot {
            control, target, ..
        } => Some((vec![*control, *target], FRAC_PI_4)),
        Gate::Zz { theta, a, b } => Some((vec![*a, *b], zz_norm(*theta))),
        Gate::MultiQubit(m) if m.is_empty() => None,
        Gate::MultiQubit(m) => Some((m.support().to_vec(), nuclear_norm(m))),
        Gate::Gadget(p) if p.weight() <= 1 => None,
        Gate::Gadget(p) if p.weight() == 2 => Some((p.support.to_vec(), zz_norm(p.angle()))),
        other => {
            return Err(Error::UnsupportedGate(format!(
                "{} (convert to the ZZ basis or realize the program first)",
                other.name()
            )))
        }
    })
}

fn scaled_depol(norm: f64, model: &NoiseModel) -> f64 {
    (model.p_depol_tq * norm / FULL_TQ_NORM).min(1.0)
}

/// Per-qubit depolarization probability of `g`, scaled from the fully
/// entangling two-qubit gate by the nuclear-norm ratio.
pub fn depol_prob(g: &Gate, model: &NoiseModel) -> Result<f64> {
    Ok(entangling_action(g)?.map_or(0.0, |(_, nu)| scaled_depol(nu, model)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Channel {
    Dephase,
    Depolarize,
}

/// One inserted Pauli, placed before gate `gate` of the source circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Insertion {
    pub gate: usize,
    pub qubit: usize,
    pub pauli: Axis,
    pub channel: Channel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoisyInstance {
    pub circuit: Circuit,
    pub insertions: Vec<Insertion>,
}

/// Counter-based draws: the key is the model seed, the stream is the sample
/// index and the word position encodes `(gate, qubit)`, so every
/// opportunity owns a fixed slice of the keystream.
pub(crate) struct Substreams {
    base: ChaCha8Rng,
}

impl Substreams {
    pub(crate) fn new(seed: u64) -> Self {
        Substreams {
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub(crate) fn sample(&self, sample: u64) -> ChaCha8Rng {
        let mut r = self.base.clone();
        r.set_stream(sample);
        r.set_word_pos(0);
        r
    }
}

fn draw(rng: &mut ChaCha8Rng, slot: u128) -> [f64; 3] {
    rng.set_word_pos(slot * 8);
    [rng.random(), rng.random(), rng.random()]
}

const PAULIS: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

/// Insertions for one noise sample over precomputed gate actions.
pub(crate) fn insertions(
    actions: &[Option<(Vec<usize>, f64)>],
    num_qubits: usize,
    model: &NoiseModel,
    rng: &mut ChaCha8Rng,
) -> Vec<Insertion> {
    let mut out = Vec::new();
    if model.p_dephase == 0.0 && model.p_depol_tq == 0.0 {
        return out;
    }
    for (gi, a) in actions.iter().enumerate() {
        let Some((qubits, nu)) = a else { continue };
        let pd = scaled_depol(*nu, model);
        for &q in qubits {
            let [u0, u1, u2] = draw(rng, (gi * num_qubits + q) as u128);
            if u0 < model.p_dephase {
                out.push(Insertion {
                    gate: gi,
                    qubit: q,
                    pauli: Axis::Z,
                    channel: Channel::Dephase,
                });
            }
            if u1 < pd {
                out.push(Insertion {
                    gate: gi,
                    qubit: q,
                    pauli: PAULIS[((u2 * 3.0) as usize).min(2)],
                    channel: Channel::Depolarize,
                });
            }
        }
    }
    out
}

pub(crate) fn gate_actions(c: &Circuit) -> Result<Vec<Option<(Vec<usize>, f64)>>> {
    c.gates.iter().map(entangling_action).collect()
}

/// Draws noise sample `sample` of `model` for `c`: before every entangling
/// gate each participating qubit independently receives `Z` with
/// probability `pDephase` and a uniform Pauli with probability
/// [`depol_prob`]. Identical `(seed, sample)` give identical instances.
pub fn inject_noise(c: &Circuit, model: &NoiseModel, sample: u64) -> Result<NoisyInstance> {
    model.validate()?;
    let actions = gate_actions(c)?;
    let mut rng = Substreams::new(model.seed).sample(sample);
    let ins = insertions(&actions, c.num_qubits, model, &mut rng);
    Ok(NoisyInstance {
        circuit: apply_insertions(c, &ins),
        insertions: ins,
    })
}

pub(crate) fn apply_insertions(c: &Circuit, ins: &[Insertion]) -> Circuit {
    let mut out = Circuit {
        num_qubits: c.num_qubits,
        num_clbits: c.num_clbits,
        gates: Vec::with_capacity(c.gates.len() + ins.len()),
        global_phase: c.global_phase,
    };
    let mut k = 0;
    for (gi, g) in c.gates.iter().enumerate() {
        while k < ins.len() && ins[k].gate == gi {
            out.push(Gate::single(ins[k].qubit, mat::pauli(ins[k].pauli)));
            k += 1;
        }
        out.push(g.clone());
    }
    out
}

/// Probability that no Pauli is inserted anywhere:
/// `Π (1 − pDephase)(1 − p_depol(g))` over all (gate, qubit) opportunities.
pub fn success_probability(c: &Circuit, model: &NoiseModel) -> Result<f64> {
    model.validate()?;
    let mut f = 1.0;
    for a in gate_actions(c)?.into_iter().flatten() {
        let (qubits, nu) = a;
        let per = (1.0 - model.p_dephase) * (1.0 - scaled_depol(nu, model));
        f *= per.powi(qubits.len() as i32);
    }
    Ok(f)
}
