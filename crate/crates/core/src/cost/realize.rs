//! Physical realization of gadget sequences with multiqubit gates.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::circuit::mat::{self, Mat2};
use crate::circuit::{Axis, Circuit, Gate};
use crate::error::{Error, Result};
use crate::gadget::{realize_star, GadgetSequence, MultiQubitGate, PauliFrame, PhaseGadget, StarRealization};

use super::{nuclear_norm, CostVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RealizationScheme {
    /// Two stars per gadget around a rotation on a support qubit.
    NoAncilla,
    /// One ancilla; the stars between consecutive gadgets merge.
    AncillaMerged,
}

#[derive(Debug, Clone)]
struct Slot {
    axes: BTreeMap<usize, Axis>,
    gate: MultiQubitGate,
    pre: BTreeMap<usize, Mat2>,
    post: BTreeMap<usize, Mat2>,
    gens: Vec<PauliFrame>,
    /// Holds spokes on the ancilla.
    ancilla: bool,
    /// Holds a pair phase off the `π/4` grid.
    non_clifford: bool,
}

impl Slot {
    fn new() -> Self {
        Slot {
            axes: BTreeMap::new(),
            gate: MultiQubitGate::new(),
            pre: BTreeMap::new(),
            post: BTreeMap::new(),
            gens: Vec::new(),
            ancilla: false,
            non_clifford: false,
        }
    }

    fn consistent(&self, axes: &[(usize, Axis)]) -> bool {
        axes.iter()
            .all(|(q, a)| self.axes.get(q).is_none_or(|b| b == a))
    }

    fn claim(&mut self, q: usize, a: Axis) {
        if self.axes.insert(q, a).is_none() {
            let w = mat::z_to_axis(a);
            self.pre.insert(q, w.adjoint());
            self.post.insert(q, w);
        }
    }

    fn add_direct(&mut self, axis: Axis, a: usize, b: usize, theta: f64) {
        self.claim(a, axis);
        self.claim(b, axis);
        self.gate.add(a, b, theta);
        self.non_clifford |= !is_clifford_phase(theta);
        self.gens.push(PauliFrame::string(axis, &[a, b].into()));
    }

    fn add_star(&mut self, star: &StarRealization, gens: Vec<PauliFrame>) {
        for &(q, a) in &star.axes {
            self.claim(q, a);
        }
        for ((q, a), (pq, m)) in star.axes.iter().zip(star.post.iter()) {
            debug_assert_eq!(q, pq);
            // m = f·W ; slot post = g·W  →  f·g·W
            let w = mat::z_to_axis(*a);
            let old = self.post[q];
            self.post.insert(*q, m * w.adjoint() * old);
        }
        for ((a, b), t) in star.gate.pairs() {
            self.gate.add(a, b, t);
        }
        self.gens.extend(gens);
    }

    /// Brings every pair phase into `(−π/4, π/4]`, moving `(iZZ)^k` into the
    /// trailing locals.
    fn finish(&mut self) {
        let pairs: Vec<_> = self.gate.pairs().collect();
        for ((a, b), t) in pairs {
            let k = ((t - 1e-12) / FRAC_PI_2 + 0.5).ceil() as i64 - 1;
            if k == 0 {
                continue;
            }
            self.gate.add(a, b, -(k as f64) * FRAC_PI_2);
            if k.rem_euclid(2) == 1 {
                let z = mat::pauli(Axis::Z);
                for q in [a, b] {
                    let p = self.post[&q];
                    self.post.insert(q, p * z);
                }
            }
        }
    }

    fn gates(&self) -> Vec<Gate> {
        let mut out = Vec::new();
        for (q, u) in &self.pre {
            if !mat::is_identity_mod_phase(u, 1e-14) {
                out.push(Gate::single(*q, *u));
            }
        }
        if !self.gate.is_empty() {
            out.push(Gate::MultiQubit(self.gate.clone()));
        }
        for (q, u) in &self.post {
            if !mat::is_identity_mod_phase(u, 1e-14) {
                out.push(Gate::single(*q, *u));
            }
        }
        out
    }
}

fn is_clifford_phase(theta: f64) -> bool {
    let k = theta / FRAC_PI_4;
    (k - k.round()).abs() < 1e-12
}

/// What a new multiqubit term brings to a slot. Ancilla spokes and
/// non-Clifford pairs never share a gate, so every gate on the ancilla
/// stays Clifford.
#[derive(Debug, Clone, Copy)]
struct Contribution {
    ancilla: bool,
    non_clifford: bool,
}

impl Contribution {
    fn fits(&self, s: &Slot) -> bool {
        !(self.ancilla && s.non_clifford) && !(self.non_clifford && s.ancilla)
    }
}

#[derive(Debug, Clone)]
enum Element {
    Slot(Slot),
    Local { qubit: usize, u: Mat2, gen: PauliFrame },
}

impl Element {
    fn commutes_with(&self, gens: &[PauliFrame]) -> bool {
        match self {
            Element::Slot(s) => s
                .gens
                .iter()
                .all(|g| gens.iter().all(|h| g.commutes_with(h))),
            Element::Local { gen, .. } => gens.iter().all(|h| gen.commutes_with(h)),
        }
    }
}

/// A realized sequence: the physical circuit and its multiqubit gates.
#[derive(Debug, Clone)]
pub struct Realization {
    pub scheme: RealizationScheme,
    pub ancilla: Option<usize>,
    pub circuit: Circuit,
    pub gates: Vec<MultiQubitGate>,
}

impl Realization {
    pub fn mq_count(&self) -> usize {
        self.gates.len()
    }

    pub fn total_norm(&self) -> f64 {
        self.gates.iter().map(nuclear_norm).sum()
    }

    pub fn cost(&self) -> CostVector {
        CostVector {
            mq_count: self.mq_count(),
            total_norm: self.total_norm(),
        }
    }
}

struct Builder {
    elements: Vec<Element>,
}

impl Builder {
    /// Index of the latest slot reachable by commuting backwards whose axes
    /// agree with `axes`.
    fn find_slot(&self, axes: &[(usize, Axis)], gens: &[PauliFrame], what: Contribution) -> Option<usize> {
        for i in (0..self.elements.len()).rev() {
            let e = &self.elements[i];
            if let Element::Slot(s) = e {
                if s.consistent(axes) && what.fits(s) {
                    return Some(i);
                }
            }
            if !e.commutes_with(gens) {
                return None;
            }
        }
        None
    }

    fn slot_mut(&mut self, axes: &[(usize, Axis)], gens: &[PauliFrame], what: Contribution) -> &mut Slot {
        let i = match self.find_slot(axes, gens, what) {
            Some(i) => i,
            None => {
                self.elements.push(Element::Slot(Slot::new()));
                self.elements.len() - 1
            }
        };
        match &mut self.elements[i] {
            Element::Slot(s) => {
                s.ancilla |= what.ancilla;
                s
            }
            _ => unreachable!(),
        }
    }

    fn local(&mut self, qubit: usize, axis: Axis, theta: f64) {
        self.elements.push(Element::Local {
            qubit,
            u: mat::pauli_exp(axis, theta),
            gen: PauliFrame::single(axis, qubit),
        });
    }

    fn direct(&mut self, g: &PhaseGadget) {
        let s = g.support.to_vec();
        let axes = [(s[0], g.axis), (s[1], g.axis)];
        let gens = [PauliFrame::string(g.axis, &g.support)];
        let what = Contribution {
            ancilla: false,
            non_clifford: !is_clifford_phase(g.angle()),
        };
        self.slot_mut(&axes, &gens, what)
            .add_direct(g.axis, s[0], s[1], g.angle());
    }

    fn star(&mut self, star: StarRealization, center: (usize, Axis), on_ancilla: bool) {
        if star.gate.is_empty() {
            for (q, u) in star.post {
                self.elements.push(Element::Local {
                    qubit: q,
                    u,
                    gen: PauliFrame::single(center.1, q),
                });
            }
            return;
        }
        let mut r = PauliFrame::default();
        for &(q, a) in &star.axes {
            if q != center.0 {
                r = r.mul(&PauliFrame::single(a, q));
            }
        }
        let gens = vec![PauliFrame::single(center.1, center.0), r];
        let what = Contribution {
            ancilla: on_ancilla,
            non_clifford: star.gate.pairs().any(|(_, t)| !is_clifford_phase(t)),
        };
        let slot = self.slot_mut(&star.axes, &gens, what);
        slot.non_clifford |= what.non_clifford;
        slot.add_star(&star, gens);
    }

    fn finish(mut self, num_qubits: usize) -> (Circuit, Vec<MultiQubitGate>) {
        let mut c = Circuit::new(num_qubits);
        let mut gates = Vec::new();
        for e in &mut self.elements {
            match e {
                Element::Slot(s) => {
                    s.finish();
                    if !s.gate.is_empty() {
                        gates.push(s.gate.clone());
                    }
                    c.gates.extend(s.gates());
                }
                Element::Local { qubit, u, .. } => {
                    c.push(Gate::single(*qubit, *u));
                }
            }
        }
        (c, gates)
    }
}

fn partner(axis: Axis) -> Axis {
    if axis == Axis::Z {
        Axis::X
    } else {
        Axis::Z
    }
}

fn controls(g: &PhaseGadget, skip: Option<usize>) -> Vec<(usize, Axis)> {
    g.support
        .iter()
        .filter(|q| Some(*q) != skip)
        .map(|q| (q, g.axis))
        .collect()
}

/// Realizes `seq` with multiqubit gates. With [`RealizationScheme::AncillaMerged`]
/// the ancilla is qubit `seq.num_qubits` and starts and ends in `|0⟩`.
///
/// Weight-1 gadgets become local rotations and weight-2 gadgets become a
/// single pair term. Every multiqubit term is commuted backwards and merged
/// into the latest earlier gate with matching per-qubit axes.
pub fn realize(seq: &GadgetSequence, scheme: RealizationScheme) -> Result<Realization> {
    let n = seq.num_qubits;
    let ancilla = (scheme == RealizationScheme::AncillaMerged).then_some(n);
    if let Some(a) = ancilla {
        if seq.gadgets.iter().any(|g| g.support.contains(a)) {
            return Err(Error::InvalidArgument(format!(
                "ancilla q{a} collides with a gadget support"
            )));
        }
    }
    let mut b = Builder {
        elements: Vec::new(),
    };
    let mut open: Option<&PhaseGadget> = None;
    for g in &seq.gadgets {
        let w = g.weight();
        match (w, ancilla) {
            (0, _) => {}
            (1 | 2, _) => {
                if let (Some(o), Some(a)) = (open, ancilla) {
                    if o.anticommutes_with(g) {
                        b.star(realize_star(a, Axis::Y, &controls(o, None))?, (a, Axis::Y), true);
                        open = None;
                    }
                }
                if w == 1 {
                    b.local(g.support.first().unwrap(), g.axis, g.angle());
                } else {
                    b.direct(g);
                }
            }
            (_, None) => {
                let js = g.support.first().unwrap();
                let center = (js, partner(g.axis));
                let fan = controls(g, Some(js));
                b.star(realize_star(js, center.1, &fan)?, center, false);
                b.local(js, g.axis, g.angle());
                b.star(realize_star(js, center.1, &fan)?, center, false);
            }
            (_, Some(a)) => {
                let mut ctl = open.map(|o| controls(o, None)).unwrap_or_default();
                ctl.extend(controls(g, None));
                b.star(realize_star(a, Axis::Y, &ctl)?, (a, Axis::Y), true);
                b.local(a, Axis::Z, g.angle());
                open = Some(g);
            }
        }
    }
    if let (Some(o), Some(a)) = (open, ancilla) {
        b.star(realize_star(a, Axis::Y, &controls(o, None))?, (a, Axis::Y), true);
    }
    for q in seq.frame.x.union(&seq.frame.z).iter() {
        let axis = seq.frame.axis_at(q).unwrap();
        b.elements.push(Element::Local {
            qubit: q,
            u: mat::pauli(axis),
            gen: PauliFrame::single(axis, q),
        });
    }
    let (circuit, gates) = b.finish(n + ancilla.map_or(0, |_| 1));
    Ok(Realization {
        scheme,
        ancilla,
        circuit,
        gates,
    })
}

/// Exact nuclear norm of a star with `k` spokes at `π/4`.
pub fn star_norm(k: usize) -> f64 {
    FRAC_PI_4 * (k as f64).sqrt()
}
