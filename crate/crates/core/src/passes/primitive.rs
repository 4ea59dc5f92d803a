//! The left- and right-handed compilation primitives.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::circuit::mat;
use crate::circuit::{form_su4_blocks, layerize, Axis, BlockItem, Circuit, Gate};
use crate::error::{Error, Result};
use crate::gadget::{conjugate_by_cnot, decompose_pg, simplify, GadgetSequence, JStar, PhaseGadget, TRIVIAL_ANGLE};
use crate::su4::minimize_block_phase;

use super::CnotLayer;

/// Rewrites generalized CNOTs as canonical CNOTs dressed with Cliffords and
/// rejects anything outside the CNOT + single-qubit + ZZ set.
pub fn canonical_gates(c: &Circuit) -> Result<Circuit> {
    let mut out = Circuit::new(c.num_qubits);
    out.global_phase = c.global_phase;
    for g in &c.gates {
        match g {
            Gate::Single { .. } | Gate::Zz { .. } => {
                out.push(g.clone());
            }
            Gate::Barrier(_) => {}
            Gate::Cnot {
                control_axis,
                control,
                target_axis,
                target,
            } => match (control_axis, target_axis) {
                (Axis::Z, Axis::X) => {
                    out.push(Gate::cx(*control, *target));
                }
                (Axis::X, Axis::Z) => {
                    out.push(Gate::cx(*target, *control));
                }
                (p, q) => {
                    let w = mat::z_to_axis(*p);
                    // V X V† = Q
                    let v = mat::z_to_axis(*q) * mat::hadamard();
                    out.push(Gate::single(*control, w.adjoint()));
                    out.push(Gate::single(*target, v.adjoint()));
                    out.push(Gate::cx(*control, *target));
                    out.push(Gate::single(*control, w));
                    out.push(Gate::single(*target, v));
                }
            },
            Gate::Gadget(p) if p.weight() == 1 => {
                let q = p.support.first().unwrap();
                out.push(Gate::single(q, mat::pauli_exp(p.axis, p.angle())));
            }
            other => return Err(Error::UnsupportedGate(other.name().to_string())),
        }
    }
    Ok(out)
}

/// Layering, SU(4) blocking and phase-minimized block synthesis.
pub fn resynthesize(c: &Circuit) -> Result<Circuit> {
    let c = canonical_gates(c)?;
    let layers = layerize(&c)?;
    let items = form_su4_blocks(&layers);
    let expanded: Vec<Vec<Gate>> = items
        .par_iter()
        .map(|item| match item {
            BlockItem::Single(g) => Ok(vec![g.clone()]),
            BlockItem::Block(b) => Ok(minimize_block_phase(&b.unitary, b.pair)?.gates(true)),
        })
        .collect::<Result<_>>()?;
    Ok(Circuit::with_gates(
        c.num_qubits,
        expanded.into_iter().flatten().collect(),
    ))
}

fn push_rotation(out: &mut Vec<PhaseGadget>, axis: Axis, theta: f64, q: usize) {
    // exp(−iθP/2) = G_P(−θ/π)
    let alpha = -theta / PI;
    if alpha.abs() >= TRIVIAL_ANGLE {
        out.push(PhaseGadget::new(axis, alpha, [q]));
    }
}

/// Factorization `c ≡ U_PG · U_C`: the CNOT layer acts first.
#[derive(Debug, Clone)]
pub struct LeftFactor {
    pub gadgets: GadgetSequence,
    pub layer: CnotLayer,
    /// Gadget–CNOT commutations performed.
    pub events: usize,
}

/// Pulls every CNOT to the start of the circuit, first CNOT first.
pub fn pg_left(c: &Circuit) -> Result<(GadgetSequence, CnotLayer)> {
    let f = pg_left_factor(c)?;
    Ok((f.gadgets, f.layer))
}

pub fn pg_left_factor(c: &Circuit) -> Result<LeftFactor> {
    let n = c.num_qubits;
    let c = resynthesize(c)?;
    let mut gadgets: Vec<PhaseGadget> = Vec::new();
    let mut layer = CnotLayer::identity(n);
    let mut events = 0;
    for g in &c.gates {
        match g {
            Gate::Single { qubit, u } => {
                let (a, b, cc, _) = mat::zxz(u);
                push_rotation(&mut gadgets, Axis::Z, cc, *qubit);
                push_rotation(&mut gadgets, Axis::X, b, *qubit);
                push_rotation(&mut gadgets, Axis::Z, a, *qubit);
            }
            Gate::Zz { theta, a, b } => {
                let alpha = 2.0 * theta / PI;
                if alpha.abs() >= TRIVIAL_ANGLE {
                    gadgets.push(PhaseGadget::new(Axis::Z, alpha, [*a, *b]));
                }
            }
            Gate::Cnot {
                control, target, ..
            } => {
                for p in gadgets.iter_mut() {
                    *p = conjugate_by_cnot(p, *control, *target);
                }
                events += gadgets.len();
                layer.push(*control, *target);
            }
            other => return Err(Error::UnsupportedGate(other.name().to_string())),
        }
    }
    Ok(LeftFactor {
        gadgets: simplify(&GadgetSequence::from_gadgets(n, gadgets)),
        layer,
        events,
    })
}

/// Factorization `c ≡ U_C · U_PG` (gadgets act first), from the left
/// primitive applied to `c†`.
pub fn pg_right(c: &Circuit) -> Result<(CnotLayer, GadgetSequence)> {
    let f = pg_right_factor(c)?;
    Ok((f.layer, f.gadgets))
}

pub fn pg_right_factor(c: &Circuit) -> Result<LeftFactor> {
    let f = pg_left_factor(&c.inverse())?;
    Ok(LeftFactor {
        gadgets: f.gadgets.adjoint(),
        layer: f.layer.inverse(),
        events: f.events,
    })
}

/// The gadget sequence as a CNOT + single-qubit circuit.
pub fn sequence_circuit(seq: &GadgetSequence) -> Result<Circuit> {
    let mut c = Circuit::new(seq.num_qubits);
    for g in &seq.gadgets {
        let d = decompose_pg(g, JStar::Default, seq.num_qubits)?;
        c.gates.extend(d.gates);
        c.global_phase += d.global_phase;
    }
    c.gates.extend(seq.frame.gates());
    Ok(c)
}
