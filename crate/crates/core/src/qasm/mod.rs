//! OpenQASM 2.0 frontend and conversion to the CNOT / `Z⊗Z` basis.

mod builtin;
mod lexer;
mod parser;

use std::f64::consts::FRAC_PI_4;

use thiserror::Error;

pub use builtin::Builtin;
pub use parser::{parse_program, BodyOp, Callee, Expr, Func, GateDef, Operand, QasmProgram, Stmt, StmtKind};

use crate::circuit::mat::{self, z_to_axis};
use crate::circuit::{Axis, Circuit, Gate, StdGate};
use crate::gadget::{decompose_pg, JStar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QasmErrorKind {
    Syntax,
    /// Valid OpenQASM this frontend does not accept (`if`, `reset`, ...).
    Unsupported,
    UnknownGate,
    Semantic,
}

#[derive(Debug, Clone, Error, PartialEq)]
#[error("{line}:{col}: {msg}")]
pub struct QasmError {
    pub kind: QasmErrorKind,
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl QasmError {
    pub fn new(kind: QasmErrorKind, line: usize, col: usize, msg: impl Into<String>) -> Self {
        QasmError {
            kind,
            line,
            col,
            msg: msg.into(),
        }
    }
}

impl QasmProgram {
    /// Inlines every gate call into a flat circuit over the concatenated
    /// quantum registers.
    pub fn to_circuit(&self) -> Result<Circuit, QasmError> {
        let qoff = parser::register_offsets(&self.qregs);
        let coff = parser::register_offsets(&self.cregs);
        let mut c = Circuit::new(self.num_qubits());
        c.num_clbits = self.num_clbits();
        for st in &self.statements {
            let located = |msg: String| QasmError::new(QasmErrorKind::Semantic, st.line, st.col, msg);
            let resolve = |ops: &[&Operand], regs: &std::collections::BTreeMap<&str, (usize, usize)>| {
                let width = ops
                    .iter()
                    .filter(|o| o.index.is_none())
                    .map(|o| regs[o.reg.as_str()].1)
                    .try_fold(None, |w: Option<usize>, s| match w {
                        Some(w) if w != s => Err(located("register operands differ in size".into())),
                        _ => Ok(Some(s)),
                    })?;
                let reps = width.unwrap_or(1);
                let rows: Vec<Vec<usize>> = (0..reps)
                    .map(|k| {
                        ops.iter()
                            .map(|o| {
                                let (off, _) = regs[o.reg.as_str()];
                                off + o.index.unwrap_or(k)
                            })
                            .collect()
                    })
                    .collect();
                Ok::<_, QasmError>(rows)
            };
            match &st.kind {
                StmtKind::Apply { callee, params, args } => {
                    let ps: Vec<f64> = params.iter().map(|e| e.eval(&[])).collect();
                    let refs: Vec<&Operand> = args.iter().collect();
                    for qs in resolve(&refs, &qoff)? {
                        if (1..qs.len()).any(|i| qs[..i].contains(&qs[i])) {
                            return Err(located("repeated qubit in gate arguments".into()));
                        }
                        parser::expand(self, *callee, &ps, &qs, &mut c.gates);
                    }
                }
                StmtKind::Measure { qubit, bit } => {
                    let qs = resolve(&[qubit], &qoff)?;
                    let bs = resolve(&[bit], &coff)?;
                    if qs.len() != bs.len() {
                        return Err(located("measure operands differ in size".into()));
                    }
                    for (q, b) in qs.iter().zip(&bs) {
                        c.push(Gate::Measure { qubit: q[0], bit: b[0] });
                    }
                }
                StmtKind::Barrier(args) => {
                    let mut qs = Vec::new();
                    for a in args {
                        for row in resolve(&[a], &qoff)? {
                            qs.extend(row);
                        }
                    }
                    c.push(Gate::Barrier(qs));
                }
            }
        }
        Ok(c)
    }
}

/// Parses OpenQASM 2.0 source into a circuit with all custom gates inlined.
pub fn parse_qasm(src: &str) -> Result<Circuit, QasmError> {
    parse_program(src)?.to_circuit()
}

fn ccx(out: &mut Circuit, a: usize, b: usize, t: usize) {
    let tg = |q| Gate::single(q, mat::phase(FRAC_PI_4));
    let tdg = |q| Gate::single(q, mat::phase(-FRAC_PI_4));
    for g in [
        Gate::h(t),
        Gate::cx(b, t),
        tdg(t),
        Gate::cx(a, t),
        tg(t),
        Gate::cx(b, t),
        tdg(t),
        Gate::cx(a, t),
        tg(b),
        tg(t),
        Gate::h(t),
        Gate::cx(a, b),
        tg(a),
        tdg(b),
        Gate::cx(a, b),
    ] {
        out.push(g);
    }
}

fn lower_std(s: &StdGate, out: &mut Circuit) {
    match *s {
        StdGate::Cz(a, b) => {
            out.push(Gate::h(b));
            out.push(Gate::cx(a, b));
            out.push(Gate::h(b));
        }
        StdGate::Cu1 {
            lambda,
            control,
            target,
        } => {
            out.push(Gate::rz(control, lambda / 2.0));
            out.push(Gate::rz(target, lambda / 2.0));
            out.push(Gate::zz(control, target, lambda / 4.0));
            out.global_phase += lambda / 4.0;
        }
        StdGate::Crz {
            theta,
            control,
            target,
        } => {
            out.push(Gate::rz(target, theta / 2.0));
            out.push(Gate::zz(control, target, theta / 4.0));
        }
        StdGate::Rzz { theta, a, b } => {
            out.push(Gate::zz(a, b, -theta / 2.0));
        }
        StdGate::Swap(a, b) => {
            out.push(Gate::cx(a, b));
            out.push(Gate::cx(b, a));
            out.push(Gate::cx(a, b));
        }
        StdGate::Ccx { c1, c2, target } => ccx(out, c1, c2, target),
        StdGate::Cswap { control, a, b } => {
            out.push(Gate::cx(b, a));
            ccx(out, control, a, b);
            out.push(Gate::cx(b, a));
        }
        StdGate::Cu {
            u, control, target, ..
        } => {
            let e = mat::zyz(&u);
            out.push(Gate::rz(target, (e.lambda - e.phi) / 2.0));
            out.push(Gate::cx(control, target));
            out.push(Gate::single(
                target,
                mat::ry(-e.theta / 2.0) * mat::rz(-(e.lambda + e.phi) / 2.0),
            ));
            out.push(Gate::cx(control, target));
            out.push(Gate::single(target, mat::rz(e.phi) * mat::ry(e.theta / 2.0)));
            out.push(Gate::single(control, mat::phase(e.global)));
        }
    }
}

/// Rewrites every entangling gate with single-qubit gates, canonical CNOTs
/// and `Z⊗Z` rotations. The unitary is preserved exactly, global phase
/// included.
pub fn to_zz_basis(circuit: &Circuit) -> Circuit {
    let mut out = Circuit {
        num_qubits: circuit.num_qubits,
        num_clbits: circuit.num_clbits,
        gates: Vec::with_capacity(circuit.gates.len()),
        global_phase: circuit.global_phase,
    };
    for g in &circuit.gates {
        match g {
            Gate::Std(s) => lower_std(s, &mut out),
            Gate::Cnot {
                control_axis,
                control,
                target_axis,
                target,
            } if (*control_axis, *target_axis) != (Axis::Z, Axis::X) => {
                let vc = z_to_axis(*control_axis);
                let vt = z_to_axis(*target_axis) * mat::hadamard();
                out.push(Gate::single(*control, vc.adjoint()));
                out.push(Gate::single(*target, vt.adjoint()));
                out.push(Gate::cx(*control, *target));
                out.push(Gate::single(*control, vc));
                out.push(Gate::single(*target, vt));
            }
            Gate::MultiQubit(m) => {
                for ((a, b), t) in m.pairs() {
                    out.push(Gate::zz(a, b, t));
                }
            }
            Gate::Gadget(p) if p.weight() >= 2 => {
                let d = decompose_pg(p, JStar::Default, circuit.num_qubits)
                    .expect("default center always lies in the support");
                out.extend(&to_zz_basis(&d));
            }
            other => {
                out.push(other.clone());
            }
        }
    }
    out
}
