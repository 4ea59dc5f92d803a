//! Circuit data model, dense oracle, layering and SU(4) block formation.

mod gate;
mod layer;
pub mod mat;
mod qubits;
pub mod sim;

pub use gate::{Gate, StdGate};
pub(crate) use gate::dyn4;
pub use layer::{form_su4_blocks, gates_commute, layerize, BlockItem, Layer, Su4Block};
pub use qubits::{Axis, QubitSet};
pub use sim::{to_unitary, DEFAULT_ORACLE_CAP};

use crate::error::{Error, Result};

/// Ordered gate list over `num_qubits` qubits.
///
/// Gates apply left to right in time. `global_phase` is a scalar phase in
/// radians multiplying the whole circuit.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    pub num_qubits: usize,
    pub num_clbits: usize,
    pub gates: Vec<Gate>,
    pub global_phase: f64,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            ..Default::default()
        }
    }

    pub fn with_gates(num_qubits: usize, gates: Vec<Gate>) -> Self {
        Circuit {
            num_qubits,
            gates,
            ..Default::default()
        }
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.gates.push(gate);
        self
    }

    pub fn extend(&mut self, other: &Circuit) {
        self.gates.extend(other.gates.iter().cloned());
        self.global_phase += other.global_phase;
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Checks operand ranges and uniqueness within each gate.
    pub fn validate(&self) -> Result<()> {
        for g in &self.gates {
            let qs = g.qubits();
            for (i, &q) in qs.iter().enumerate() {
                if q >= self.num_qubits {
                    return Err(Error::InvalidArgument(format!(
                        "{} acts on qubit {q} outside a {}-qubit register",
                        g.name(),
                        self.num_qubits
                    )));
                }
                if !matches!(g, Gate::Barrier(_)) && qs[..i].contains(&q) {
                    return Err(Error::InvalidArgument(format!(
                        "{} repeats qubit {q}",
                        g.name()
                    )));
                }
            }
            if let Gate::Measure { bit, .. } = g {
                if *bit >= self.num_clbits {
                    return Err(Error::InvalidArgument(format!(
                        "measurement into bit {bit} outside {} classical bits",
                        self.num_clbits
                    )));
                }
            }
        }
        Ok(())
    }

    /// Adjoint circuit: gates reversed and inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            num_clbits: self.num_clbits,
            gates: self
                .gates
                .iter()
                .rev()
                .filter(|g| !matches!(g, Gate::Measure { .. } | Gate::Barrier(_)))
                .map(Gate::inverse)
                .collect(),
            global_phase: -self.global_phase,
        }
    }

    /// Number of entangling gates (each CNOT / ZZ / multi-qubit op counts once).
    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_entangling()).count()
    }

    /// Removes terminal measurements and barriers, returning the
    /// qubit → classical bit map. Fails if a measured qubit is acted on again.
    pub fn strip_measurements(&self) -> Result<(Circuit, Vec<(usize, usize)>)> {
        let mut measured: Vec<Option<usize>> = vec![None; self.num_qubits];
        let mut map = Vec::new();
        let mut out = Circuit {
            num_qubits: self.num_qubits,
            num_clbits: self.num_clbits,
            gates: Vec::with_capacity(self.gates.len()),
            global_phase: self.global_phase,
        };
        for g in &self.gates {
            match g {
                Gate::Measure { qubit, bit } => {
                    measured[*qubit] = Some(*bit);
                    map.push((*qubit, *bit));
                }
                Gate::Barrier(_) => {}
                other => {
                    if let Some(q) = other.qubits().into_iter().find(|&q| measured[q].is_some()) {
                        return Err(Error::UnsupportedGate(format!(
                            "{} after measurement of qubit {q} (mid-circuit measurement)",
                            other.name()
                        )));
                    }
                    out.gates.push(other.clone());
                }
            }
        }
        Ok((out, map))
    }
}
