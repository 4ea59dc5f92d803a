use nalgebra::DMatrix;

use super::mat::{self, Mat2, C64, ONE, ZERO};
use super::Axis;
use crate::gadget::{MultiQubitGate, PhaseGadget};

/// Multi-qubit gates accepted by the frontend before basis conversion.
#[derive(Debug, Clone, PartialEq)]
pub enum StdGate {
    Cz(usize, usize),
    /// Controlled `Rz(θ)`.
    Crz { theta: f64, control: usize, target: usize },
    /// Controlled phase `diag(1, e^{iλ})`.
    Cu1 { lambda: f64, control: usize, target: usize },
    Swap(usize, usize),
    Ccx { c1: usize, c2: usize, target: usize },
    /// `exp(-iθ/2 Z⊗Z)` (OpenQASM `rzz`).
    Rzz { theta: f64, a: usize, b: usize },
    /// Controlled arbitrary single-qubit unitary.
    Cu { u: Mat2, control: usize, target: usize, label: &'static str },
    Cswap { control: usize, a: usize, b: usize },
}

impl StdGate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            StdGate::Cz(a, b) | StdGate::Swap(a, b) => vec![a, b],
            StdGate::Crz { control, target, .. }
            | StdGate::Cu1 { control, target, .. }
            | StdGate::Cu { control, target, .. } => vec![control, target],
            StdGate::Ccx { c1, c2, target } => vec![c1, c2, target],
            StdGate::Rzz { a, b, .. } => vec![a, b],
            StdGate::Cswap { control, a, b } => vec![control, a, b],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            StdGate::Cz(..) => "cz",
            StdGate::Crz { .. } => "crz",
            StdGate::Cu1 { .. } => "cu1",
            StdGate::Swap(..) => "swap",
            StdGate::Ccx { .. } => "ccx",
            StdGate::Rzz { .. } => "rzz",
            StdGate::Cu { label, .. } => label,
            StdGate::Cswap { .. } => "cswap",
        }
    }

    /// Matrix over `self.qubits()` in little-endian order.
    pub fn local_matrix(&self) -> DMatrix<C64> {
        let controlled = |u: &Mat2| {
            let mut m = DMatrix::identity(4, 4);
            // index = b_control + 2 b_target; control set => rows/cols 1 and 3
            m[(1, 1)] = u[(0, 0)];
            m[(1, 3)] = u[(0, 1)];
            m[(3, 1)] = u[(1, 0)];
            m[(3, 3)] = u[(1, 1)];
            m
        };
        match self {
            StdGate::Cz(..) => {
                let mut m = DMatrix::identity(4, 4);
                m[(3, 3)] = -ONE;
                m
            }
            StdGate::Crz { theta, .. } => controlled(&mat::rz(*theta)),
            StdGate::Cu1 { lambda, .. } => controlled(&mat::phase(*lambda)),
            StdGate::Swap(..) => dyn4(&mat::swap4()),
            StdGate::Rzz { theta, .. } => dyn4(&mat::zz4(-theta / 2.0)),
            StdGate::Cu { u, .. } => controlled(u),
            StdGate::Ccx { .. } => {
                let mut m = DMatrix::from_element(8, 8, ZERO);
                for x in 0..8usize {
                    let y = if x & 3 == 3 { x ^ 4 } else { x };
                    m[(y, x)] = ONE;
                }
                m
            }
            StdGate::Cswap { .. } => {
                let mut m = DMatrix::from_element(8, 8, ZERO);
                for x in 0..8usize {
                    let y = if x & 1 == 1 {
                        let (a, b) = ((x >> 1) & 1, (x >> 2) & 1);
                        1 | (b << 1) | (a << 2)
                    } else {
                        x
                    };
                    m[(y, x)] = ONE;
                }
                m
            }
        }
    }

    fn relabel(&mut self, f: &impl Fn(usize) -> usize) {
        match self {
            StdGate::Cz(a, b) | StdGate::Swap(a, b) => {
                *a = f(*a);
                *b = f(*b);
            }
            StdGate::Crz { control, target, .. }
            | StdGate::Cu1 { control, target, .. }
            | StdGate::Cu { control, target, .. } => {
                *control = f(*control);
                *target = f(*target);
            }
            StdGate::Ccx { c1, c2, target } => {
                *c1 = f(*c1);
                *c2 = f(*c2);
                *target = f(*target);
            }
            StdGate::Rzz { a, b, .. } => {
                *a = f(*a);
                *b = f(*b);
            }
            StdGate::Cswap { control, a, b } => {
                *control = f(*control);
                *a = f(*a);
                *b = f(*b);
            }
        }
    }
}

pub(crate) fn dyn4(m: &mat::Mat4) -> DMatrix<C64> {
    DMatrix::from_iterator(4, 4, m.iter().cloned())
}

pub(crate) fn dyn2(m: &Mat2) -> DMatrix<C64> {
    DMatrix::from_iterator(2, 2, m.iter().cloned())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    /// Arbitrary single-qubit unitary.
    Single { qubit: usize, u: Mat2 },
    /// Generalized CNOT `C_{P_j ∧ Q_k} = exp[i(I−P_j)(I−Q_k)π/4]`.
    Cnot {
        control_axis: Axis,
        control: usize,
        target_axis: Axis,
        target: usize,
    },
    /// `exp(iθ Z_a Z_b)`.
    Zz { theta: f64, a: usize, b: usize },
    MultiQubit(MultiQubitGate),
    Gadget(PhaseGadget),
    Std(StdGate),
    Measure { qubit: usize, bit: usize },
    Barrier(Vec<usize>),
}

impl Gate {
    pub fn single(qubit: usize, u: Mat2) -> Gate {
        Gate::Single { qubit, u }
    }

    /// Canonical CNOT `C_{Z_c ∧ X_t}`.
    pub fn cx(control: usize, target: usize) -> Gate {
        Gate::Cnot {
            control_axis: Axis::Z,
            control,
            target_axis: Axis::X,
            target,
        }
    }

    pub fn h(q: usize) -> Gate {
        Gate::single(q, mat::hadamard())
    }

    pub fn x(q: usize) -> Gate {
        Gate::single(q, mat::pauli(Axis::X))
    }

    pub fn rz(q: usize, theta: f64) -> Gate {
        Gate::single(q, mat::rz(theta))
    }

    pub fn rx(q: usize, theta: f64) -> Gate {
        Gate::single(q, mat::rx(theta))
    }

    pub fn zz(a: usize, b: usize, theta: f64) -> Gate {
        Gate::Zz { theta, a, b }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::Single { .. } => "single",
            Gate::Cnot { .. } => "cnot",
            Gate::Zz { .. } => "zz",
            Gate::MultiQubit(_) => "mq",
            Gate::Gadget(_) => "gadget",
            Gate::Std(s) => s.name(),
            Gate::Measure { .. } => "measure",
            Gate::Barrier(_) => "barrier",
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::Single { qubit, .. } | Gate::Measure { qubit, .. } => vec![*qubit],
            Gate::Cnot {
                control, target, ..
            } => vec![*control, *target],
            Gate::Zz { a, b, .. } => vec![*a, *b],
            Gate::MultiQubit(g) => g.support().to_vec(),
            Gate::Gadget(g) => g.support.to_vec(),
            Gate::Std(s) => s.qubits(),
            Gate::Barrier(qs) => qs.clone(),
        }
    }

    /// Gates acting on two or more qubits (barriers excluded).
    pub fn is_entangling(&self) -> bool {
        match self {
            Gate::Cnot { .. } | Gate::Zz { .. } | Gate::Std(_) => true,
            Gate::MultiQubit(g) => !g.is_empty(),
            Gate::Gadget(g) => g.support.len() >= 2,
            _ => false,
        }
    }

    /// Dense matrix over `self.qubits()` (little-endian), for gates with a
    /// small fixed arity. Multiqubit gates, gadgets, measurements and
    /// barriers return `None`.
    pub fn local_matrix(&self) -> Option<DMatrix<C64>> {
        match self {
            Gate::Single { u, .. } => Some(dyn2(u)),
            Gate::Cnot {
                control_axis,
                target_axis,
                ..
            } => Some(dyn4(&mat::generalized_cnot4(*control_axis, *target_axis))),
            Gate::Zz { theta, .. } => Some(dyn4(&mat::zz4(*theta))),
            Gate::Std(s) => Some(s.local_matrix()),
            _ => None,
        }
    }

    /// Adjoint gate. Measurements and barriers are returned unchanged.
    pub fn inverse(&self) -> Gate {
        match self {
            Gate::Single { qubit, u } => Gate::Single {
                qubit: *qubit,
                u: u.adjoint(),
            },
            Gate::Cnot { .. } => self.clone(),
            Gate::Zz { theta, a, b } => Gate::Zz {
                theta: -theta,
                a: *a,
                b: *b,
            },
            Gate::MultiQubit(g) => Gate::MultiQubit(g.inverse()),
            Gate::Gadget(g) => Gate::Gadget(g.inverse()),
            Gate::Std(s) => Gate::Std(match s.clone() {
                StdGate::Crz {
                    theta,
                    control,
                    target,
                } => StdGate::Crz {
                    theta: -theta,
                    control,
                    target,
                },
                StdGate::Cu1 {
                    lambda,
                    control,
                    target,
                } => StdGate::Cu1 {
                    lambda: -lambda,
                    control,
                    target,
                },
                StdGate::Rzz { theta, a, b } => StdGate::Rzz { theta: -theta, a, b },
                StdGate::Cu {
                    u,
                    control,
                    target,
                    label,
                } => StdGate::Cu {
                    u: u.adjoint(),
                    control,
                    target,
                    label,
                },
                other => other,
            }),
            Gate::Measure { .. } | Gate::Barrier(_) => self.clone(),
        }
    }

    /// Renumber qubits through `f`.
    pub fn relabeled(&self, f: impl Fn(usize) -> usize) -> Gate {
        let mut g = self.clone();
        match &mut g {
            Gate::Single { qubit, .. } | Gate::Measure { qubit, .. } => *qubit = f(*qubit),
            Gate::Cnot {
                control, target, ..
            } => {
                *control = f(*control);
                *target = f(*target);
            }
            Gate::Zz { a, b, .. } => {
                *a = f(*a);
                *b = f(*b);
            }
            Gate::MultiQubit(m) => *m = m.relabeled(&f),
            Gate::Gadget(p) => p.support = p.support.iter().map(&f).collect(),
            Gate::Std(s) => s.relabel(&f),
            Gate::Barrier(qs) => qs.iter_mut().for_each(|q| *q = f(*q)),
        }
        g
    }
}
