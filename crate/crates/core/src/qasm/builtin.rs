use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::circuit::mat::{self, c, Mat2};
use crate::circuit::{Axis, Gate, StdGate};

/// Gates available without a definition: the OpenQASM primitives `U` and
/// `CX` plus the `qelib1.inc` library.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    U3,
    U2,
    U1,
    Rx,
    Ry,
    Rz,
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Id,
    Sx,
    Sxdg,
    Cx,
    Cy,
    Cz,
    Ch,
    Crx,
    Cry,
    Crz,
    Cu1,
    Cu3,
    Swap,
    Ccx,
    Cswap,
    Rzz,
}

impl Builtin {
    pub fn lookup(name: &str) -> Option<Builtin> {
        use Builtin::*;
        Some(match name {
            "U" | "u3" | "u" => U3,
            "u2" => U2,
            "u1" | "p" => U1,
            "rx" => Rx,
            "ry" => Ry,
            "rz" => Rz,
            "h" => H,
            "x" => X,
            "y" => Y,
            "z" => Z,
            "s" => S,
            "sdg" => Sdg,
            "t" => T,
            "tdg" => Tdg,
            "id" => Id,
            "sx" => Sx,
            "sxdg" => Sxdg,
            "CX" | "cx" => Cx,
            "cy" => Cy,
            "cz" => Cz,
            "ch" => Ch,
            "crx" => Crx,
            "cry" => Cry,
            "crz" => Crz,
            "cu1" | "cp" => Cu1,
            "cu3" => Cu3,
            "swap" => Swap,
            "ccx" => Ccx,
            "cswap" => Cswap,
            "rzz" => Rzz,
            _ => return None,
        })
    }

    /// `(num_params, num_qubits)`.
    pub fn signature(self) -> (usize, usize) {
        use Builtin::*;
        match self {
            U3 => (3, 1),
            U2 => (2, 1),
            U1 | Rx | Ry | Rz => (1, 1),
            H | X | Y | Z | S | Sdg | T | Tdg | Id | Sx | Sxdg => (0, 1),
            Cx | Cy | Cz | Ch | Swap => (0, 2),
            Crx | Cry | Crz | Cu1 | Rzz => (1, 2),
            Cu3 => (3, 2),
            Ccx | Cswap => (0, 3),
        }
    }
}

fn sx() -> Mat2 {
    let (p, m) = (c(0.5, 0.5), c(0.5, -0.5));
    Mat2::new(p, m, m, p)
}

fn single(b: Builtin, p: &[f64]) -> Mat2 {
    use Builtin::*;
    match b {
        U3 => mat::u3(p[0], p[1], p[2]),
        U2 => mat::u3(FRAC_PI_2, p[0], p[1]),
        U1 => mat::phase(p[0]),
        Rx => mat::rx(p[0]),
        Ry => mat::ry(p[0]),
        Rz => mat::rz(p[0]),
        H => mat::hadamard(),
        X => mat::pauli(Axis::X),
        Y => mat::pauli(Axis::Y),
        Z => mat::pauli(Axis::Z),
        S => mat::phase(FRAC_PI_2),
        Sdg => mat::phase(-FRAC_PI_2),
        T => mat::phase(FRAC_PI_4),
        Tdg => mat::phase(-FRAC_PI_4),
        Id => mat::identity2(),
        Sx => sx(),
        Sxdg => sx().adjoint(),
        _ => unreachable!("not a single-qubit builtin"),
    }
}

pub fn gate(b: Builtin, p: &[f64], q: &[usize]) -> Gate {
    use Builtin::*;
    let cu = |u: Mat2, label: &'static str| {
        Gate::Std(StdGate::Cu {
            u,
            control: q[0],
            target: q[1],
            label,
        })
    };
    match b {
        Cx => Gate::cx(q[0], q[1]),
        Cy => cu(mat::pauli(Axis::Y), "cy"),
        Cz => Gate::Std(StdGate::Cz(q[0], q[1])),
        Ch => cu(mat::hadamard(), "ch"),
        Crx => cu(mat::rx(p[0]), "crx"),
        Cry => cu(mat::ry(p[0]), "cry"),
        Cu3 => cu(mat::u3(p[0], p[1], p[2]), "cu3"),
        Crz => Gate::Std(StdGate::Crz {
            theta: p[0],
            control: q[0],
            target: q[1],
        }),
        Cu1 => Gate::Std(StdGate::Cu1 {
            lambda: p[0],
            control: q[0],
            target: q[1],
        }),
        Swap => Gate::Std(StdGate::Swap(q[0], q[1])),
        Rzz => Gate::Std(StdGate::Rzz {
            theta: p[0],
            a: q[0],
            b: q[1],
        }),
        Ccx => Gate::Std(StdGate::Ccx {
            c1: q[0],
            c2: q[1],
            target: q[2],
        }),
        Cswap => Gate::Std(StdGate::Cswap {
            control: q[0],
            a: q[1],
            b: q[2],
        }),
        _ => Gate::single(q[0], single(b, p)),
    }
}
