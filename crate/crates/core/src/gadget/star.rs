//! Realization of generalized-CNOT stars as a single `U_MQ` plus local gates.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

use crate::circuit::mat::{self, Mat2, C64, ONE};
use crate::circuit::{Axis, Circuit, Gate, QubitSet};
use crate::error::{Error, Result};

use super::MultiQubitGate;

/// `post · U_MQ · pre`, up to the stored global phase.
///
/// Every qubit of the gate has a Pauli axis `Q` with `pre = W†` and
/// `post = f(Q)·W`, where `W Z W† = Q`.
#[derive(Debug, Clone)]
pub struct StarRealization {
    pub pre: Vec<(usize, Mat2)>,
    pub gate: MultiQubitGate,
    pub post: Vec<(usize, Mat2)>,
    pub axes: Vec<(usize, Axis)>,
    pub global_phase: f64,
}

impl StarRealization {
    pub fn gates(&self) -> Vec<Gate> {
        let local = |(q, u): &(usize, Mat2)| {
            (!mat::is_identity_mod_phase(u, 1e-14)).then(|| Gate::single(*q, *u))
        };
        let mut out: Vec<Gate> = self.pre.iter().filter_map(local).collect();
        if !self.gate.is_empty() {
            out.push(Gate::MultiQubit(self.gate.clone()));
        }
        out.extend(self.post.iter().filter_map(local));
        out
    }

    pub fn to_circuit(&self, num_qubits: usize) -> Circuit {
        let mut c = Circuit::with_gates(num_qubits, self.gates());
        c.global_phase = self.global_phase;
        c
    }
}

fn classify(m: &Mat2) -> (Option<Axis>, C64) {
    for a in [Axis::X, Axis::Y, Axis::Z] {
        let w = (mat::pauli(a) * m).trace() * 0.5;
        if w.norm() > 0.5 {
            return (Some(a), w);
        }
    }
    (None, m.trace() * 0.5)
}

/// Realizes the product of generalized CNOTs `C_{P_i∧Q}` that all share the
/// star center `(target, target_axis)`. `controls` is in time order.
///
/// The product is `Π⁺(Q) ⊗ I + Π⁻(Q) ⊗ R` with `R` a Pauli string. With
/// support `S` of `R`, the result is one `U_MQ` holding `π/4` on each spoke
/// `(s, target)` for `s ∈ S`, dressed with single-qubit Cliffords.
pub fn realize_star(
    target: usize,
    target_axis: Axis,
    controls: &[(usize, Axis)],
) -> Result<StarRealization> {
    let mut acc: BTreeMap<usize, Mat2> = BTreeMap::new();
    for &(q, a) in controls {
        if q == target {
            return Err(Error::InvalidArgument(format!(
                "control on star center q{target}"
            )));
        }
        let m = acc.entry(q).or_insert_with(mat::identity2);
        *m = mat::pauli(a) * *m;
    }
    let mut omega = ONE;
    let mut spokes: Vec<(usize, Axis)> = Vec::new();
    for (q, m) in &acc {
        let (axis, w) = classify(m);
        omega *= w;
        if let Some(a) = axis {
            spokes.push((*q, a));
        }
    }

    // e^{iδ} = ω·i^{|S|}; target correction Π⁺ + e^{iδ} Π⁻ in the Q_t basis
    let e = omega * C64::i().powu(spokes.len() as u32);
    let proj_p = (mat::identity2() + mat::pauli(target_axis)) * C64::from(0.5);
    let proj_m = (mat::identity2() - mat::pauli(target_axis)) * C64::from(0.5);
    let t = proj_p + proj_m * e;

    let mut pre = Vec::new();
    let mut post = Vec::new();
    let mut axes = Vec::new();
    let mut gate = MultiQubitGate::new();
    if spokes.is_empty() {
        post.push((target, t));
    } else {
        for &(q, a) in &spokes {
            let w = mat::z_to_axis(a);
            pre.push((q, w.adjoint()));
            gate.add(q, target, FRAC_PI_4);
            post.push((q, mat::pauli_exp(a, -FRAC_PI_4) * w));
            axes.push((q, a));
        }
        let wt = mat::z_to_axis(target_axis);
        pre.push((target, wt.adjoint()));
        post.push((target, t * wt));
        axes.push((target, target_axis));
    }
    Ok(StarRealization {
        pre,
        gate,
        post,
        axes,
        global_phase: 0.0,
    })
}

/// Collapses a fanout of generalized CNOTs with a common star center.
pub fn fanout_to_mq(fanout: &[Gate]) -> Result<StarRealization> {
    let mut center: Option<(usize, Axis)> = None;
    let mut controls = Vec::with_capacity(fanout.len());
    for g in fanout {
        let Gate::Cnot {
            control_axis,
            control,
            target_axis,
            target,
        } = g
        else {
            return Err(Error::InvalidArgument(format!(
                "fanout contains non-CNOT gate {}",
                g.name()
            )));
        };
        match center {
            None => center = Some((*target, *target_axis)),
            Some(c) if c != (*target, *target_axis) => {
                return Err(Error::InvalidArgument(
                    "fanout has heterogeneous targets".into(),
                ))
            }
            _ => {}
        }
        controls.push((*control, *control_axis));
    }
    let Some((t, ta)) = center else {
        return Err(Error::InvalidArgument("empty fanout".into()));
    };
    realize_star(t, ta, &controls)
}

/// Interface between `G_Z(·, J)` and a following `G_X(·, K)` in the ancilla
/// scheme: the uncompute star of the first followed by the compute star of
/// the second, both centered on `Y_a`.
pub fn merge_interface(j: &QubitSet, k: &QubitSet, ancilla: usize) -> Result<StarRealization> {
    interface(Axis::Z, j, Axis::X, k, ancilla)
}

pub(crate) fn interface(
    first_axis: Axis,
    first: &QubitSet,
    second_axis: Axis,
    second: &QubitSet,
    ancilla: usize,
) -> Result<StarRealization> {
    if first.contains(ancilla) || second.contains(ancilla) {
        return Err(Error::InvalidArgument(format!(
            "ancilla q{ancilla} inside gadget support"
        )));
    }
    let controls: Vec<(usize, Axis)> = first
        .iter()
        .map(|q| (q, first_axis))
        .chain(second.iter().map(|q| (q, second_axis)))
        .collect();
    realize_star(ancilla, Axis::Y, &controls)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::mat::distance_mod_phase;
    use crate::circuit::to_unitary;

    fn star_reference(n: usize, target: usize, ta: Axis, controls: &[(usize, Axis)]) -> Circuit {
        let gates = controls
            .iter()
            .map(|&(q, a)| Gate::Cnot {
                control_axis: a,
                control: q,
                target_axis: ta,
                target,
            })
            .collect();
        Circuit::with_gates(n, gates)
    }

    #[test]
    fn stars_match_cnot_products() {
        let cases: Vec<(usize, Axis, Vec<(usize, Axis)>)> = vec![
            (0, Axis::X, vec![(1, Axis::Z), (2, Axis::Z)]),
            (3, Axis::Y, vec![(0, Axis::Z), (1, Axis::X), (1, Axis::Z), (2, Axis::X)]),
            (1, Axis::Z, vec![(0, Axis::X), (2, Axis::Y), (0, Axis::X)]),
            (2, Axis::Y, vec![(0, Axis::Z), (1, Axis::Z), (0, Axis::Z), (1, Axis::Z)]),
        ];
        for (t, ta, ctl) in cases {
            let reference = to_unitary(&star_reference(4, t, ta, &ctl), 12).unwrap();
            let r = realize_star(t, ta, &ctl).unwrap();
            let got = to_unitary(&r.to_circuit(4), 12).unwrap();
            assert!(distance_mod_phase(&reference, &got) < 1e-10, "{t} {ta:?} {ctl:?}");
        }
    }

    #[test]
    fn interface_spokes() {
        let j: QubitSet = [0, 1, 2].into();
        let k: QubitSet = [1, 3].into();
        let r = merge_interface(&j, &k, 4).unwrap();
        assert_eq!(r.gate.support().to_vec(), vec![0, 1, 2, 3, 4]);
        let same = interface(Axis::Z, &j, Axis::Z, &k, 4).unwrap();
        assert_eq!(same.gate.support().to_vec(), vec![0, 2, 3, 4]);
        assert!(merge_interface(&j, &k, 2).is_err());
    }
}
