//! Gadget decomposition, CNOT commutation and sequence simplification.

use crate::circuit::mat;
use crate::circuit::{Axis, Circuit, Gate};
use crate::error::{Error, Result};

use super::{GadgetSequence, PhaseGadget};

/// Angles below this are treated as zero.
pub const TRIVIAL_ANGLE: f64 = 1e-12;

/// Where the parity of a gadget is collected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JStar {
    /// Lowest qubit of the support.
    Default,
    /// A qubit of the support.
    Qubit(usize),
    /// An ancilla outside the support, prepared in `|0⟩`.
    Ancilla(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `C·G = G'·C`.
    Left,
    /// `G·C = C·G'`.
    Right,
}

fn partner(axis: Axis) -> Axis {
    match axis {
        Axis::Z => Axis::X,
        _ => Axis::Z,
    }
}

/// Expands a phase gadget into generalized CNOT fanouts around one
/// single-qubit rotation.
pub fn decompose_pg(g: &PhaseGadget, jstar: JStar, num_qubits: usize) -> Result<Circuit> {
    let top = g.support.last().map_or(0, |m| m + 1);
    let mut c = Circuit::new(num_qubits.max(top));
    if g.support.is_empty() {
        c.global_phase = g.angle();
        return Ok(c);
    }
    let (center, center_axis, controls, middle) = match jstar {
        JStar::Default | JStar::Qubit(_) => {
            let js = match jstar {
                JStar::Qubit(q) => q,
                _ => g.support.first().unwrap(),
            };
            if !g.support.contains(js) {
                return Err(Error::InvalidArgument(format!(
                    "j* = q{js} outside gadget support"
                )));
            }
            let ctl: Vec<usize> = g.support.iter().filter(|&q| q != js).collect();
            (js, partner(g.axis), ctl, mat::pauli_exp(g.axis, g.angle()))
        }
        JStar::Ancilla(a) => {
            if g.support.contains(a) {
                return Err(Error::InvalidArgument(format!(
                    "ancilla q{a} inside gadget support"
                )));
            }
            (a, Axis::Y, g.support.to_vec(), mat::pauli_exp(Axis::Z, g.angle()))
        }
    };
    if center >= c.num_qubits {
        c.num_qubits = center + 1;
    }
    let fan: Vec<Gate> = controls
        .iter()
        .map(|&q| Gate::Cnot {
            control_axis: g.axis,
            control: q,
            target_axis: center_axis,
            target: center,
        })
        .collect();
    c.gates.extend(fan.iter().cloned());
    c.push(Gate::single(center, middle));
    c.gates.extend(fan.into_iter().rev());
    Ok(c)
}

/// `C G C` for the canonical CNOT with the given control and target.
///
/// Panics on a `Y` gadget, whose image is not a single-axis string.
pub fn conjugate_by_cnot(g: &PhaseGadget, control: usize, target: usize) -> PhaseGadget {
    let mut out = g.clone();
    match g.axis {
        Axis::Z => {
            if g.support.contains(target) {
                out.support.toggle(control);
            }
        }
        Axis::X => {
            if g.support.contains(control) {
                out.support.toggle(target);
            }
        }
        Axis::Y => panic!("Y gadget cannot pass a CNOT as a single-axis gadget"),
    }
    out
}

/// Moves a CNOT past a gadget; `C` is self-inverse so both directions
/// produce the same conjugated gadget.
pub fn commute_cnot(
    control: usize,
    target: usize,
    g: &PhaseGadget,
    _direction: Direction,
) -> Result<PhaseGadget> {
    if control == target {
        return Err(Error::InvalidArgument("CNOT with control == target".into()));
    }
    if g.axis == Axis::Y {
        return Err(Error::InvalidArgument(
            "CNOT commutation needs a Z or X gadget".into(),
        ));
    }
    Ok(conjugate_by_cnot(g, control, target))
}

pub fn pg_commutes(a: &PhaseGadget, b: &PhaseGadget) -> bool {
    !a.anticommutes_with(b)
}

/// Brings `α` into `[-1/2, 1/2]`; returns whether `P_J` was split off.
fn normalize(alpha: f64) -> (f64, bool) {
    // period 4, and G(α ± 2) = -G(α)
    let mut a = alpha - 2.0 * (alpha / 2.0).round();
    let mut extracted = false;
    if a > 0.5 + TRIVIAL_ANGLE {
        a -= 1.0;
        extracted = true;
    } else if a < -0.5 - TRIVIAL_ANGLE {
        a += 1.0;
        extracted = true;
    }
    (a, extracted)
}

/// Merges equal-key gadgets that can be brought together, normalizes angles
/// into `[-1/2, 1/2]` by pushing Paulis into the trailing frame, and drops
/// trivial gadgets. The result equals the input up to global phase.
pub fn simplify(seq: &GadgetSequence) -> GadgetSequence {
    let mut out = seq.clone();
    loop {
        let mut changed = merge_pass(&mut out.gadgets);
        changed |= normalize_pass(&mut out);
        let before = out.gadgets.len();
        out.gadgets.retain(|g| g.alpha.abs() >= TRIVIAL_ANGLE);
        changed |= out.gadgets.len() != before;
        if !changed {
            return out;
        }
    }
}

fn merge_pass(gs: &mut Vec<PhaseGadget>) -> bool {
    let mut changed = false;
    let mut i = 0;
    while i < gs.len() {
        let mut j = i + 1;
        while j < gs.len() {
            if gs[j].axis == gs[i].axis && gs[j].support == gs[i].support {
                let a = gs.remove(j).alpha;
                gs[i].alpha += a;
                changed = true;
            } else if !pg_commutes(&gs[i], &gs[j]) {
                break;
            } else {
                j += 1;
            }
        }
        i += 1;
    }
    changed
}

fn normalize_pass(seq: &mut GadgetSequence) -> bool {
    let mut changed = false;
    for i in 0..seq.gadgets.len() {
        let (a, extracted) = normalize(seq.gadgets[i].alpha);
        if a != seq.gadgets[i].alpha {
            changed = true;
        }
        seq.gadgets[i].alpha = a;
        if extracted {
            let p = seq.gadgets[i].clone();
            for g in &mut seq.gadgets[i + 1..] {
                if p.anticommutes_with(g) {
                    g.alpha = -g.alpha;
                }
            }
            seq.frame.absorb(p.axis, &p.support);
        }
    }
    changed
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::mat::distance_mod_phase;
    use crate::circuit::to_unitary;

    fn unitary(c: &Circuit) -> nalgebra::DMatrix<mat::C64> {
        to_unitary(c, 12).unwrap()
    }

    #[test]
    fn decomposition_matches_gadget() {
        for axis in [Axis::Z, Axis::X, Axis::Y] {
            let g = PhaseGadget::new(axis, 0.37, [0, 2, 3]);
            let reference = unitary(&Circuit::with_gates(4, vec![Gate::Gadget(g.clone())]));
            for js in [JStar::Default, JStar::Qubit(3)] {
                let c = decompose_pg(&g, js, 4).unwrap();
                assert!(distance_mod_phase(&reference, &unitary(&c)) < 1e-10);
            }
        }
    }

    #[test]
    fn ancilla_variant_acts_on_zero_ancilla() {
        let g = PhaseGadget::new(Axis::X, -0.41, [0, 1, 2]);
        let c = decompose_pg(&g, JStar::Ancilla(3), 3).unwrap();
        assert_eq!(c.num_qubits, 4);
        let u = unitary(&c);
        let reference = unitary(&Circuit::with_gates(3, vec![Gate::Gadget(g)]));
        // restrict to ancilla = 0 in and out
        let sub = u.view((0, 0), (8, 8)).into_owned();
        assert!(distance_mod_phase(&reference, &sub) < 1e-10);
        assert!(decompose_pg(&PhaseGadget::new(Axis::Z, 0.1, [0, 1]), JStar::Ancilla(1), 2).is_err());
    }

    #[test]
    fn cnot_conjugation() {
        let cases = [
            (PhaseGadget::new(Axis::Z, 0.3, [1, 2]), 0, 1),
            (PhaseGadget::new(Axis::Z, 0.3, [0, 1]), 0, 1),
            (PhaseGadget::new(Axis::X, 0.3, [0, 2]), 0, 1),
            (PhaseGadget::new(Axis::X, 0.3, [0, 1, 2]), 0, 1),
            (PhaseGadget::new(Axis::X, 0.3, [2]), 0, 1),
        ];
        for (g, c, t) in cases {
            let g2 = commute_cnot(c, t, &g, Direction::Left).unwrap();
            let lhs = Circuit::with_gates(3, vec![Gate::Gadget(g), Gate::cx(c, t)]);
            let rhs = Circuit::with_gates(3, vec![Gate::cx(c, t), Gate::Gadget(g2)]);
            assert!(distance_mod_phase(&unitary(&lhs), &unitary(&rhs)) < 1e-10);
        }
        assert!(commute_cnot(0, 1, &PhaseGadget::new(Axis::Y, 0.1, [0]), Direction::Right).is_err());
    }

    #[test]
    fn simplify_merges_and_normalizes() {
        let seq = GadgetSequence::from_gadgets(
            3,
            vec![
                PhaseGadget::new(Axis::Z, 0.3, [0, 1]),
                PhaseGadget::new(Axis::Z, 0.4, [1, 2]),
                PhaseGadget::new(Axis::Z, 0.5, [0, 1]),
                PhaseGadget::new(Axis::X, 1.7, [1]),
                PhaseGadget::new(Axis::Z, 0.2, [1, 2]),
                PhaseGadget::new(Axis::X, 0.0, [2]),
            ],
        );
        let s = simplify(&seq);
        assert_eq!(s.gadgets.len(), 4);
        assert!(s.gadgets.iter().all(|g| g.alpha.abs() <= 0.5 + 1e-12));
        let d = distance_mod_phase(&unitary(&seq.to_circuit()), &unitary(&s.to_circuit()));
        assert!(d < 1e-10, "{d}");
    }
}
