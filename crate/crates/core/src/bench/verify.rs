use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::circuit::mat::{distance_mod_phase, C64, ZERO};
use crate::circuit::{sim, to_unitary, Circuit};
use crate::error::{Error, Result};
use crate::passes::CompiledProgram;

pub const VERIFY_TOL: f64 = 1e-8;
pub const ANCILLA_TOL: f64 = 1e-12;
pub const RANDOM_STATES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyMethod {
    Unitary,
    RandomStates,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyReport {
    pub passed: bool,
    pub method: VerifyMethod,
    /// Distance between input and program, global phase removed.
    pub distance: f64,
    /// Largest population left outside the ancilla `|0⟩` subspace.
    pub ancilla_leak: f64,
    pub measurements_match: bool,
}

fn random_state(dim: usize, rng: &mut impl Rng) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
    v
}

/// Compares the physical realization of `program` with `input`.
///
/// Registers whose physical width fits `cap` are compared as dense
/// unitaries; wider ones need `allow_states` and are compared on
/// [`RANDOM_STATES`] random input states sharing one global phase.
pub fn verify(program: &CompiledProgram, input: &Circuit, cap: usize, allow_states: bool) -> Result<VerifyReport> {
    let (input, meas) = input.strip_measurements()?;
    if input.num_qubits != program.num_qubits {
        return Err(Error::InvalidArgument(format!(
            "program has {} qubits, input has {}",
            program.num_qubits, input.num_qubits
        )));
    }
    let measurements_match = meas == program.measurements;
    let phys = program.physical_circuit()?;
    let n = input.num_qubits;
    let d = 1usize << n;
    let ancilla = program.ancilla().is_some();
    let (method, distance, leak) = if phys.num_qubits <= cap {
        let u = to_unitary(&phys, cap)?;
        let reference = to_unitary(&input, cap)?;
        let mut leak: f64 = 0.0;
        if ancilla {
            for j in 0..d {
                let col: f64 = (d..2 * d).map(|i| u[(i, j)].norm_sqr()).sum();
                leak = leak.max(col);
            }
        }
        let block: DMatrix<C64> = u.view((0, 0), (d, d)).into_owned();
        (VerifyMethod::Unitary, distance_mod_phase(&reference, &block), leak)
    } else if allow_states {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let pops = sim::lower(&phys)?;
        let iops = sim::lower(&input)?;
        let mut phase: Option<C64> = None;
        let (mut dist, mut leak) = (0.0f64, 0.0f64);
        for _ in 0..RANDOM_STATES {
            let psi = random_state(d, &mut rng);
            let mut expected = psi.clone();
            sim::run_ops(&iops, &mut expected);
            let mut got = vec![ZERO; 1 << phys.num_qubits];
            got[..d].copy_from_slice(&psi);
            sim::run_ops(&pops, &mut got);
            if ancilla {
                leak = leak.max(got[d..].iter().map(|a| a.norm_sqr()).sum());
            }
            let ph = *phase.get_or_insert_with(|| {
                let o: C64 = expected.iter().zip(&got).map(|(e, g)| e.conj() * g).sum();
                if o.norm() > 0.0 {
                    o / o.norm()
                } else {
                    C64::new(1.0, 0.0)
                }
            });
            let err = expected
                .iter()
                .zip(&got[..d])
                .map(|(e, g)| (e * ph - g).norm_sqr())
                .sum::<f64>()
                .sqrt();
            dist = dist.max(err);
        }
        (VerifyMethod::RandomStates, dist, leak)
    } else {
        return Err(Error::RegisterTooLarge {
            qubits: phys.num_qubits,
            cap,
        });
    };
    Ok(VerifyReport {
        passed: distance < VERIFY_TOL && leak < ANCILLA_TOL && measurements_match,
        method,
        distance,
        ancilla_leak: leak,
        measurements_match,
    })
}
