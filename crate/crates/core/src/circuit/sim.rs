//! Statevector kernels and the dense unitary oracle.
//!
//! Basis index bit `q` is the computational value of qubit `q`.

use nalgebra::DMatrix;

use super::mat::{cis, C64, ONE, ZERO};
use super::{Axis, Circuit, Gate};
use crate::error::{Error, Result};

pub const DEFAULT_ORACLE_CAP: usize = 12;

/// A gate lowered to a statevector kernel.
#[derive(Debug, Clone)]
pub enum Op {
    /// Dense matrix on a few qubits (little-endian over `qubits`).
    Dense { qubits: Vec<usize>, m: Vec<C64> },
    /// `exp(i Σ θ Z_a Z_b)`.
    ZzPhases { terms: Vec<(usize, usize, f64)> },
    /// `exp(iθ P)` for the Pauli string given by masks.
    PauliRotation { string: PauliString, theta: f64 },
    /// Bare Pauli string.
    Pauli(PauliString),
    /// Scalar phase `e^{iφ}`.
    GlobalPhase(f64),
}

/// Pauli string encoded as bit masks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PauliString {
    pub flip: usize,
    pub sign: usize,
    pub num_y: u32,
}

impl PauliString {
    pub fn from_axes(items: impl IntoIterator<Item = (usize, Axis)>) -> Self {
        let mut p = PauliString::default();
        for (q, axis) in items {
            let bit = 1usize << q;
            match axis {
                Axis::X => p.flip |= bit,
                Axis::Z => p.sign |= bit,
                Axis::Y => {
                    p.flip |= bit;
                    p.sign |= bit;
                    p.num_y += 1;
                }
            }
        }
        p
    }

    /// `P|x⟩ = phase(x) |x ⊕ flip⟩`
    #[inline]
    fn phase(&self, x: usize) -> C64 {
        let base = match self.num_y % 4 {
            0 => ONE,
            1 => C64::new(0.0, 1.0),
            2 => -ONE,
            _ => C64::new(0.0, -1.0),
        };
        if (x & self.sign).count_ones() % 2 == 1 {
            -base
        } else {
            base
        }
    }

    pub fn apply(&self, state: &mut [C64]) {
        if self.flip == 0 {
            for (x, amp) in state.iter_mut().enumerate() {
                if (x & self.sign).count_ones() % 2 == 1 {
                    *amp = -*amp;
                }
            }
            // a pure-Z string carries no Y factors
            return;
        }
        for x in 0..state.len() {
            let y = x ^ self.flip;
            if x < y {
                let (ax, ay) = (state[x], state[y]);
                state[y] = self.phase(x) * ax;
                state[x] = self.phase(y) * ay;
            }
        }
    }

    fn rotate(&self, state: &mut [C64], theta: f64) {
        let (s, c) = theta.sin_cos();
        let is = C64::new(0.0, s);
        if self.flip == 0 {
            let (plus, minus) = (cis(theta), cis(-theta));
            for (x, amp) in state.iter_mut().enumerate() {
                *amp *= if (x & self.sign).count_ones() % 2 == 0 {
                    plus
                } else {
                    minus
                };
            }
            return;
        }
        for x in 0..state.len() {
            let y = x ^ self.flip;
            if x < y {
                let (ax, ay) = (state[x], state[y]);
                // (Pψ)[x] = phase(y) ψ[y]
                state[x] = ax * c + is * self.phase(y) * ay;
                state[y] = ay * c + is * self.phase(x) * ax;
            }
        }
    }
}

impl Op {
    pub fn apply(&self, state: &mut [C64]) {
        match self {
            Op::Dense { qubits, m } => apply_dense(state, qubits, m),
            Op::ZzPhases { terms } => {
                for (x, amp) in state.iter_mut().enumerate() {
                    let mut ph = 0.0;
                    for &(a, b, t) in terms {
                        if ((x >> a) ^ (x >> b)) & 1 == 0 {
                            ph += t;
                        } else {
                            ph -= t;
                        }
                    }
                    *amp *= cis(ph);
                }
            }
            Op::PauliRotation { string, theta } => string.rotate(state, *theta),
            Op::Pauli(p) => p.apply(state),
            Op::GlobalPhase(ph) => {
                let f = cis(*ph);
                state.iter_mut().for_each(|a| *a *= f);
            }
        }
    }
}

fn apply_dense(state: &mut [C64], qubits: &[usize], m: &[C64]) {
    let k = qubits.len();
    let dim = 1usize << k;
    let mask: usize = qubits.iter().map(|q| 1usize << q).sum();
    let offsets: Vec<usize> = (0..dim)
        .map(|i| {
            qubits
                .iter()
                .enumerate()
                .filter(|(b, _)| (i >> b) & 1 == 1)
                .map(|(_, q)| 1usize << q)
                .sum()
        })
        .collect();
    let mut buf = vec![ZERO; dim];
    for base in 0..state.len() {
        if base & mask != 0 {
            continue;
        }
        for (i, off) in offsets.iter().enumerate() {
            buf[i] = state[base + off];
        }
        for (r, off) in offsets.iter().enumerate() {
            let row = &m[r * dim..(r + 1) * dim];
            state[base + off] = row.iter().zip(&buf).map(|(a, b)| a * b).sum();
        }
    }
}

/// Lowers one gate to kernels. Measurements are rejected; barriers vanish.
pub fn lower_gate(gate: &Gate) -> Result<Vec<Op>> {
    Ok(match gate {
        Gate::MultiQubit(g) => vec![Op::ZzPhases {
            terms: g.pairs().map(|((a, b), t)| (a, b, t)).collect(),
        }],
        Gate::Gadget(g) => vec![Op::PauliRotation {
            string: PauliString::from_axes(g.support.iter().map(|q| (q, g.axis))),
            theta: g.alpha * std::f64::consts::FRAC_PI_2,
        }],
        Gate::Zz { theta, a, b } => vec![Op::ZzPhases {
            terms: vec![(*a, *b, *theta)],
        }],
        Gate::Measure { qubit, .. } => return Err(Error::MeasurementPresent(*qubit)),
        Gate::Barrier(_) => vec![],
        other => {
            let m = other
                .local_matrix()
                .ok_or_else(|| Error::UnsupportedGate(other.name().into()))?;
            let dim = m.nrows();
            let mut rows = Vec::with_capacity(dim * dim);
            for r in 0..dim {
                for c in 0..dim {
                    rows.push(m[(r, c)]);
                }
            }
            vec![Op::Dense {
                qubits: other.qubits(),
                m: rows,
            }]
        }
    })
}

pub fn lower(circuit: &Circuit) -> Result<Vec<Op>> {
    let mut ops = Vec::with_capacity(circuit.gates.len() + 1);
    for g in &circuit.gates {
        ops.extend(lower_gate(g)?);
    }
    if circuit.global_phase != 0.0 {
        ops.push(Op::GlobalPhase(circuit.global_phase));
    }
    Ok(ops)
}

pub fn run_ops(ops: &[Op], state: &mut [C64]) {
    for op in ops {
        op.apply(state);
    }
}

/// Final state of `circuit` started from `|0…0⟩`.
pub fn simulate(circuit: &Circuit) -> Result<Vec<C64>> {
    let ops = lower(circuit)?;
    let mut state = vec![ZERO; 1 << circuit.num_qubits];
    state[0] = ONE;
    run_ops(&ops, &mut state);
    Ok(state)
}

/// Runs `circuit` on an arbitrary initial state.
pub fn evolve(circuit: &Circuit, initial: &[C64]) -> Result<Vec<C64>> {
    let ops = lower(circuit)?;
    let mut state = initial.to_vec();
    run_ops(&ops, &mut state);
    Ok(state)
}

/// Dense `2^N × 2^N` unitary of `circuit`, gates applied in order.
pub fn to_unitary(circuit: &Circuit, cap: usize) -> Result<DMatrix<C64>> {
    let n = circuit.num_qubits;
    if n > cap {
        return Err(Error::RegisterTooLarge { qubits: n, cap });
    }
    let ops = lower(circuit)?;
    let dim = 1usize << n;
    let mut u = DMatrix::from_element(dim, dim, ZERO);
    let mut col = vec![ZERO; dim];
    for j in 0..dim {
        col.iter_mut().for_each(|a| *a = ZERO);
        col[j] = ONE;
        run_ops(&ops, &mut col);
        u.set_column(j, &nalgebra::DVector::from_column_slice(&col));
    }
    Ok(u)
}

pub fn probabilities(state: &[C64]) -> Vec<f64> {
    state.iter().map(|a| a.norm_sqr()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::mat::{self, distance_mod_phase};
    use crate::gadget::PhaseGadget;

    #[test]
    fn empty_circuit_is_identity() {
        let u = to_unitary(&Circuit::new(2), 12).unwrap();
        assert!((u - DMatrix::identity(4, 4)).camax() < 1e-15);
    }

    #[test]
    fn cnot_permutation_little_endian() {
        // C_{Z0∧X1}: control qubit 0 (least significant), target qubit 1.
        let u = to_unitary(&Circuit::with_gates(2, vec![Gate::cx(0, 1)]), 12).unwrap();
        let mut expect = DMatrix::from_element(4, 4, ZERO);
        for (x, y) in [(0, 0), (1, 3), (2, 2), (3, 1)] {
            expect[(y, x)] = ONE;
        }
        assert!((u - expect).camax() < 1e-12);
    }

    #[test]
    fn single_qubit_z_gadget_sign() {
        let alpha: f64 = 0.37;
        let g = PhaseGadget::new(Axis::Z, alpha, [0]);
        let u = to_unitary(&Circuit::with_gates(1, vec![Gate::Gadget(g)]), 12).unwrap();
        let t = alpha * std::f64::consts::FRAC_PI_2;
        assert!((u[(0, 0)] - cis(t)).norm() < 1e-14);
        assert!((u[(1, 1)] - cis(-t)).norm() < 1e-14);
    }

    #[test]
    fn pauli_rotation_matches_dense() {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let g = PhaseGadget::new(axis, 0.61, [0, 2]);
            let u = to_unitary(&Circuit::with_gates(3, vec![Gate::Gadget(g)]), 12).unwrap();
            // exp(iθ P⊗I⊗P) built by dense kron
            let p = mat::pauli(axis);
            let i2 = mat::identity2();
            let k = |a: &mat::Mat2, b: &mat::Mat2, c: &mat::Mat2| {
                let ab = a.kronecker(b);
                ab.kronecker(c)
            };
            // kron order: qubit 2 ⊗ qubit 1 ⊗ qubit 0
            let pp = k(&p, &i2, &p);
            let th = 0.61 * std::f64::consts::FRAC_PI_2;
            let mut expect = DMatrix::from_element(8, 8, ZERO);
            for r in 0..8 {
                for c in 0..8 {
                    let id = if r == c { ONE } else { ZERO };
                    expect[(r, c)] = id * th.cos() + C64::new(0.0, th.sin()) * pp[(r, c)];
                }
            }
            assert!(distance_mod_phase(&u, &expect) < 1e-12);
            assert!((u - expect).camax() < 1e-12);
        }
    }

    #[test]
    fn measurement_rejected() {
        let mut c = Circuit::new(1);
        c.num_clbits = 1;
        c.push(Gate::Measure { qubit: 0, bit: 0 });
        assert!(matches!(to_unitary(&c, 12), Err(Error::MeasurementPresent(0))));
    }

    #[test]
    fn register_cap_enforced() {
        assert!(matches!(
            to_unitary(&Circuit::new(13), 12),
            Err(Error::RegisterTooLarge { .. })
        ));
    }
}
