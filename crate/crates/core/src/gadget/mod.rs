//! Phase gadgets, multiqubit gates and the rewrite rules between them.

mod rules;
mod star;

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::circuit::mat;
use crate::circuit::{Axis, Circuit, Gate, QubitSet};

pub use rules::{
    commute_cnot, conjugate_by_cnot, decompose_pg, pg_commutes, simplify, Direction, JStar,
    TRIVIAL_ANGLE,
};
pub use star::{fanout_to_mq, merge_interface, realize_star, StarRealization};

/// `G_P(α, J) = exp(iαπ/2 · P_{j1} P_{j2} …)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseGadget {
    pub axis: Axis,
    pub alpha: f64,
    pub support: QubitSet,
}

impl PhaseGadget {
    pub fn new(axis: Axis, alpha: f64, support: impl IntoIterator<Item = usize>) -> Self {
        PhaseGadget {
            axis,
            alpha,
            support: support.into_iter().collect(),
        }
    }

    pub fn weight(&self) -> usize {
        self.support.len()
    }

    pub fn inverse(&self) -> Self {
        PhaseGadget {
            alpha: -self.alpha,
            ..self.clone()
        }
    }

    /// Physical rotation angle `απ/2`.
    pub fn angle(&self) -> f64 {
        self.alpha * FRAC_PI_2
    }

    /// True when the Pauli strings of `self` and `other` anticommute.
    pub fn anticommutes_with(&self, other: &PhaseGadget) -> bool {
        self.axis != other.axis && self.support.intersection_len(&other.support) % 2 == 1
    }
}

/// `U_MQ = exp(i Σ_{n<m} θ_nm Z_n Z_m)`, stored once per unordered pair.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MultiQubitGate {
    pairs: BTreeMap<(usize, usize), f64>,
}

impl MultiQubitGate {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut g = Self::new();
        for (n, m, t) in pairs {
            g.add(n, m, t);
        }
        g
    }

    /// Adds `θ` to the pair phase of `(n, m)`.
    pub fn add(&mut self, n: usize, m: usize, theta: f64) {
        assert_ne!(n, m, "pair phase on a single qubit");
        let key = (n.min(m), n.max(m));
        let e = self.pairs.entry(key).or_insert(0.0);
        *e += theta;
        if *e == 0.0 {
            self.pairs.remove(&key);
        }
    }

    pub fn theta(&self, n: usize, m: usize) -> f64 {
        self.pairs
            .get(&(n.min(m), n.max(m)))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn pairs(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.pairs.iter().map(|(k, v)| (*k, *v))
    }

    pub fn num_pairs(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.values().all(|t| *t == 0.0)
    }

    pub fn support(&self) -> QubitSet {
        self.pairs
            .iter()
            .filter(|(_, t)| **t != 0.0)
            .flat_map(|((a, b), _)| [*a, *b])
            .collect()
    }

    pub fn inverse(&self) -> Self {
        MultiQubitGate {
            pairs: self.pairs.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }

    pub fn relabeled(&self, f: impl Fn(usize) -> usize) -> Self {
        Self::from_pairs(self.pairs().map(|((a, b), t)| (f(a), f(b), t)))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::from_pairs(self.pairs().map(|((a, b), t)| (a, b, c * t)))
    }

    /// Symmetric `φ` of the double-sum form: `θ/2` on both `(n,m)` and `(m,n)`.
    pub fn phi_matrix(&self, num_qubits: usize) -> DMatrix<f64> {
        let mut phi = DMatrix::zeros(num_qubits, num_qubits);
        for ((a, b), t) in self.pairs() {
            phi[(a, b)] += t / 2.0;
            phi[(b, a)] += t / 2.0;
        }
        phi
    }

    /// Same gate restricted to its support, indices compacted, with the map
    /// back to the original labels.
    pub fn compact(&self) -> (Self, Vec<usize>) {
        let support = self.support().to_vec();
        let index = |q: usize| support.binary_search(&q).unwrap();
        (self.relabeled(index), support)
    }
}

/// Pauli correction `Π X^x Z^z` (global phase dropped).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PauliFrame {
    pub x: QubitSet,
    pub z: QubitSet,
}

impl PauliFrame {
    /// The Pauli string `P_J`.
    pub fn string(axis: Axis, support: &QubitSet) -> Self {
        let mut f = PauliFrame::default();
        f.absorb(axis, support);
        f
    }

    pub fn single(axis: Axis, q: usize) -> Self {
        Self::string(axis, &QubitSet::singleton(q))
    }

    pub fn mul(&self, other: &PauliFrame) -> PauliFrame {
        PauliFrame {
            x: self.x.symmetric_difference(&other.x),
            z: self.z.symmetric_difference(&other.z),
        }
    }

    pub fn commutes_with(&self, other: &PauliFrame) -> bool {
        (self.x.intersection_len(&other.z) + self.z.intersection_len(&other.x)) % 2 == 0
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_empty() && self.z.is_empty()
    }

    pub fn axis_at(&self, q: usize) -> Option<Axis> {
        match (self.x.contains(q), self.z.contains(q)) {
            (false, false) => None,
            (true, false) => Some(Axis::X),
            (false, true) => Some(Axis::Z),
            (true, true) => Some(Axis::Y),
        }
    }

    /// Multiplies in the Pauli string `P_J` of a gadget.
    pub fn absorb(&mut self, axis: Axis, support: &QubitSet) {
        if matches!(axis, Axis::X | Axis::Y) {
            self.x = self.x.symmetric_difference(support);
        }
        if matches!(axis, Axis::Z | Axis::Y) {
            self.z = self.z.symmetric_difference(support);
        }
    }

    pub fn anticommutes_with(&self, g: &PhaseGadget) -> bool {
        let n = match g.axis {
            Axis::Z => self.x.intersection_len(&g.support),
            Axis::X => self.z.intersection_len(&g.support),
            Axis::Y => {
                self.x.intersection_len(&g.support) + self.z.intersection_len(&g.support)
            }
        };
        n % 2 == 1
    }

    pub fn gates(&self) -> Vec<Gate> {
        let qs: QubitSet = self.x.union(&self.z);
        qs.iter()
            .map(|q| Gate::single(q, mat::pauli(self.axis_at(q).unwrap())))
            .collect()
    }

    /// Per-qubit labels `I`, `X`, `Y`, `Z`.
    pub fn labels(&self, num_qubits: usize) -> Vec<String> {
        (0..num_qubits)
            .map(|q| self.axis_at(q).map_or("I", Axis::as_str).to_string())
            .collect()
    }

    pub fn from_labels(labels: &[String]) -> Option<PauliFrame> {
        let mut f = PauliFrame::default();
        for (q, l) in labels.iter().enumerate() {
            match l.as_str() {
                "I" => {}
                other => f.absorb(Axis::parse(other)?, &QubitSet::singleton(q)),
            }
        }
        Some(f)
    }
}

/// Ordered gadgets followed by a trailing Pauli frame.
///
/// As an operator the sequence is `frame · G_M ⋯ G_1`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GadgetSequence {
    pub num_qubits: usize,
    pub gadgets: Vec<PhaseGadget>,
    pub frame: PauliFrame,
}

impl GadgetSequence {
    pub fn new(num_qubits: usize) -> Self {
        GadgetSequence {
            num_qubits,
            ..Default::default()
        }
    }

    pub fn from_gadgets(num_qubits: usize, gadgets: Vec<PhaseGadget>) -> Self {
        GadgetSequence {
            num_qubits,
            gadgets,
            frame: PauliFrame::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.gadgets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gadgets.is_empty()
    }

    pub fn to_circuit(&self) -> Circuit {
        let mut gates: Vec<Gate> = self.gadgets.iter().cloned().map(Gate::Gadget).collect();
        gates.extend(self.frame.gates());
        Circuit::with_gates(self.num_qubits, gates)
    }

    /// Adjoint: gadgets reversed and negated, frame moved to the front and
    /// pushed back through (Paulis are self-inverse up to phase).
    pub fn adjoint(&self) -> GadgetSequence {
        let mut gadgets: Vec<PhaseGadget> = self.gadgets.iter().rev().map(|g| g.inverse()).collect();
        // (F·G_M⋯G_1)† = G_1†⋯G_M†·F ; move F to the end
        for g in gadgets.iter_mut() {
            if self.frame.anticommutes_with(g) {
                g.alpha = -g.alpha;
            }
        }
        GadgetSequence {
            num_qubits: self.num_qubits,
            gadgets,
            frame: self.frame.clone(),
        }
    }

    /// Conjugates every gadget by the canonical CNOT `C_{control,target}`.
    pub fn conjugated(&self, control: usize, target: usize) -> GadgetSequence {
        let mut frame = self.frame.clone();
        // Pauli frame conjugation: X_c → X_c X_t, Z_t → Z_c Z_t
        if frame.x.contains(control) {
            frame.x.toggle(target);
        }
        if frame.z.contains(target) {
            frame.z.toggle(control);
        }
        GadgetSequence {
            num_qubits: self.num_qubits,
            gadgets: self
                .gadgets
                .iter()
                .map(|g| conjugate_by_cnot(g, control, target))
                .collect(),
            frame,
        }
    }
}
