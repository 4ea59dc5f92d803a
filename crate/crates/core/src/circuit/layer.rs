//! Greedy commuting-layer construction and SU(4) block formation.

use std::collections::HashMap;

use super::mat::{self, Mat4};
use super::{sim, Axis, Circuit, Gate, StdGate};
use crate::error::{Error, Result};

/// Pairwise-commuting gates.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Layer {
    pub gates: Vec<Gate>,
}

/// Accumulated two-qubit unitary on `pair = (lo, hi)`, little-endian with
/// `lo` as the least significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Su4Block {
    pub pair: (usize, usize),
    pub unitary: Mat4,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BlockItem {
    Block(Su4Block),
    Single(Gate),
}

type Term = Vec<(usize, Axis)>;

/// Pauli generators of a gate whose exponent is a sum of Pauli products with
/// a fixed axis per qubit. `None` when the gate has no such description.
fn pauli_terms(g: &Gate) -> Option<Vec<Term>> {
    match g {
        Gate::Single { qubit, u } => {
            if mat::is_identity_mod_phase(u, 1e-12) {
                Some(vec![])
            } else {
                mat::rotation_axis(u, 1e-12).map(|a| vec![vec![(*qubit, a)]])
            }
        }
        Gate::Cnot {
            control_axis,
            control,
            target_axis,
            target,
        } => Some(vec![
            vec![(*control, *control_axis)],
            vec![(*target, *target_axis)],
            vec![(*control, *control_axis), (*target, *target_axis)],
        ]),
        Gate::Zz { a, b, .. }
        | Gate::Std(StdGate::Rzz { a, b, .. }) => Some(vec![vec![(*a, Axis::Z), (*b, Axis::Z)]]),
        Gate::Std(StdGate::Cz(a, b))
        | Gate::Std(StdGate::Cu1 {
            control: a,
            target: b,
            ..
        })
        | Gate::Std(StdGate::Crz {
            control: a,
            target: b,
            ..
        }) => Some(vec![
            vec![(*a, Axis::Z)],
            vec![(*b, Axis::Z)],
            vec![(*a, Axis::Z), (*b, Axis::Z)],
        ]),
        Gate::Gadget(p) => Some(vec![p.support.iter().map(|q| (q, p.axis)).collect()]),
        Gate::MultiQubit(m) => Some(
            m.pairs()
                .map(|((a, b), _)| vec![(a, Axis::Z), (b, Axis::Z)])
                .collect(),
        ),
        Gate::Barrier(_) => Some(vec![]),
        _ => None,
    }
}

fn terms_commute(a: &Term, b: &Term) -> bool {
    let mut odd = false;
    for (qa, xa) in a {
        for (qb, xb) in b {
            if qa == qb && xa != xb {
                odd = !odd;
            }
        }
    }
    !odd
}

/// Exact operator commutation test: symbolic on Pauli generators when it
/// proves commutation, dense on the joint support otherwise.
pub fn gates_commute(a: &Gate, b: &Gate) -> bool {
    let qa = a.qubits();
    let qb = b.qubits();
    if !qa.iter().any(|q| qb.contains(q)) {
        return true;
    }
    if let (Some(ta), Some(tb)) = (pauli_terms(a), pauli_terms(b)) {
        if ta.iter().all(|x| tb.iter().all(|y| terms_commute(x, y))) {
            return true;
        }
    }
    let mut joint: Vec<usize> = qa.clone();
    for q in qb {
        if !joint.contains(&q) {
            joint.push(q);
        }
    }
    if joint.len() > 8 {
        return false;
    }
    let index: HashMap<usize, usize> = joint.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let ra = a.relabeled(|q| index[&q]);
    let rb = b.relabeled(|q| index[&q]);
    let ab = Circuit::with_gates(joint.len(), vec![ra.clone(), rb.clone()]);
    let ba = Circuit::with_gates(joint.len(), vec![rb, ra]);
    match (sim::to_unitary(&ab, 8), sim::to_unitary(&ba, 8)) {
        (Ok(x), Ok(y)) => (x - y).camax() < 1e-10,
        _ => false,
    }
}

/// Places each gate one layer above the highest layer holding a gate it
/// fails to commute with.
pub fn layerize(circuit: &Circuit) -> Result<Vec<Layer>> {
    let mut layers: Vec<Layer> = Vec::new();
    // per qubit: (layer, position in layer), kept sorted by layer
    let mut history: Vec<Vec<(usize, usize)>> = vec![Vec::new(); circuit.num_qubits];
    for g in &circuit.gates {
        match g {
            Gate::Single { .. } | Gate::Cnot { .. } | Gate::Zz { .. } => {}
            Gate::Barrier(_) => continue,
            other => return Err(Error::UnsupportedGate(other.name().into())),
        }
        let qs = g.qubits();
        let mut blocking: Option<usize> = None;
        for &q in &qs {
            for &(l, pos) in history[q].iter().rev() {
                if blocking.is_some_and(|b| l <= b) {
                    break;
                }
                if !gates_commute(&layers[l].gates[pos], g) {
                    blocking = Some(l);
                    break;
                }
            }
        }
        let target = blocking.map_or(0, |l| l + 1);
        if target == layers.len() {
            layers.push(Layer::default());
        }
        let pos = layers[target].gates.len();
        layers[target].gates.push(g.clone());
        for &q in &qs {
            let h = &mut history[q];
            let at = h.partition_point(|&(l, _)| l <= target);
            h.insert(at, (target, pos));
        }
    }
    Ok(layers)
}

fn embed(gate: &Gate, pair: (usize, usize)) -> Mat4 {
    match gate {
        Gate::Single { qubit, u } => {
            if *qubit == pair.0 {
                mat::kron2(u, &mat::identity2())
            } else {
                mat::kron2(&mat::identity2(), u)
            }
        }
        other => {
            let m = other.local_matrix().expect("two-qubit gate with a local matrix");
            let local = Mat4::from_iterator(m.iter().cloned());
            if other.qubits()[0] == pair.0 {
                local
            } else {
                let s = mat::swap4();
                s * local * s
            }
        }
    }
}

/// Accumulates consecutive gates on the same qubit pair into SU(4) blocks.
///
/// Single-qubit gates join the open block on their qubit, or the next block
/// created on it; any that never meet a block are kept as-is at the end.
pub fn form_su4_blocks(layers: &[Layer]) -> Vec<BlockItem> {
    let n = layers
        .iter()
        .flat_map(|l| l.gates.iter())
        .flat_map(|g| g.qubits())
        .max()
        .map_or(0, |q| q + 1);
    let mut items: Vec<BlockItem> = Vec::new();
    let mut open: Vec<Option<usize>> = vec![None; n];
    let mut pending: Vec<Vec<Gate>> = vec![Vec::new(); n];
    for g in layers.iter().flat_map(|l| l.gates.iter()) {
        let qs = g.qubits();
        match qs.len() {
            1 => {
                let q = qs[0];
                match open[q] {
                    Some(bi) => {
                        if let BlockItem::Block(b) = &mut items[bi] {
                            b.unitary = embed(g, b.pair) * b.unitary;
                        }
                    }
                    None => pending[q].push(g.clone()),
                }
            }
            2 => {
                let (x, y) = (qs[0], qs[1]);
                if open[x].is_some() && open[x] == open[y] {
                    let bi = open[x].unwrap();
                    if let BlockItem::Block(b) = &mut items[bi] {
                        b.unitary = embed(g, b.pair) * b.unitary;
                    }
                    continue;
                }
                for q in [x, y] {
                    if let Some(bi) = open[q] {
                        if let BlockItem::Block(b) = &items[bi] {
                            let (p0, p1) = b.pair;
                            open[p0] = None;
                            open[p1] = None;
                        }
                    }
                }
                let pair = (x.min(y), x.max(y));
                let mut unitary = Mat4::identity();
                for q in [pair.0, pair.1] {
                    for p in pending[q].drain(..) {
                        unitary = embed(&p, pair) * unitary;
                    }
                }
                unitary = embed(g, pair) * unitary;
                items.push(BlockItem::Block(Su4Block { pair, unitary }));
                open[x] = Some(items.len() - 1);
                open[y] = Some(items.len() - 1);
            }
            _ => unreachable!("layers hold one- and two-qubit gates only"),
        }
    }
    for q in 0..n {
        for p in pending[q].drain(..) {
            items.push(BlockItem::Single(p));
        }
    }
    items
}

impl Su4Block {
    pub fn is_identity(&self, tol: f64) -> bool {
        let d = crate::circuit::dyn4(&self.unitary);
        let id = crate::circuit::dyn4(&Mat4::identity());
        mat::distance_mod_phase(&d, &id) < tol && self.unitary[(0, 0)].norm() > 1.0 - tol
    }
}

/// Re-expands blocks and leftovers into a circuit (dense matrices are kept as
/// opaque two-qubit unitaries), for testing.
#[cfg(test)]
pub(crate) fn blocks_unitary(items: &[BlockItem], num_qubits: usize) -> Result<nalgebra::DMatrix<mat::C64>> {
    let dim = 1usize << num_qubits;
    let mut u = nalgebra::DMatrix::<mat::C64>::identity(dim, dim);
    for item in items {
        let ops = match item {
            BlockItem::Single(g) => sim::lower_gate(g)?,
            BlockItem::Block(b) => {
                let mut rows = Vec::with_capacity(16);
                for r in 0..4 {
                    for c in 0..4 {
                        rows.push(b.unitary[(r, c)]);
                    }
                }
                vec![sim::Op::Dense {
                    qubits: vec![b.pair.0, b.pair.1],
                    m: rows,
                }]
            }
        };
        for j in 0..dim {
            let mut col: Vec<mat::C64> = u.column(j).iter().cloned().collect();
            sim::run_ops(&ops, &mut col);
            u.set_column(j, &nalgebra::DVector::from_column_slice(&col));
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn blocks_preserve_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let n = 4;
            let mut c = Circuit::new(n);
            for _ in 0..30 {
                let a = rng.random_range(0..n);
                let b = (a + rng.random_range(1..n)) % n;
                match rng.random_range(0..3) {
                    0 => c.push(Gate::single(a, mat::u3(rng.random(), rng.random(), rng.random()))),
                    1 => c.push(Gate::cx(a, b)),
                    _ => c.push(Gate::zz(a, b, rng.random())),
                };
            }
            let layers = layerize(&c).unwrap();
            let count: usize = layers.iter().map(|l| l.gates.len()).sum();
            assert_eq!(count, c.len());
            let items = form_su4_blocks(&layers);
            let u = blocks_unitary(&items, n).unwrap();
            let reference = sim::to_unitary(&c, n).unwrap();
            assert!(mat::distance_mod_phase(&u, &reference) < 1e-10);
        }
    }
}
