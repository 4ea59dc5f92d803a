//! The iterative driver and the compiled program it produces.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::cost::{realize, CostOrder, CostVector, Realization, RealizationScheme};
use crate::error::{Error, Result};
use crate::gadget::GadgetSequence;

use super::norm::{norm_reduction_step, MatchingMode, NormOptions};
use super::primitive::{pg_left_factor, pg_right_factor, sequence_circuit};
use super::CnotLayer;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CompileOptions {
    pub scheme: RealizationScheme,
    pub cost: CostOrder,
    pub matching: MatchingMode,
    pub max_iters: usize,
    /// Upper bound on norm-reduction rounds per iteration.
    pub max_norm_steps: usize,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            scheme: RealizationScheme::AncillaMerged,
            cost: CostOrder::Lexicographic,
            matching: MatchingMode::Greedy,
            max_iters: 50,
            max_norm_steps: 64,
        }
    }
}

impl CompileOptions {
    fn norm(&self) -> NormOptions {
        NormOptions {
            scheme: self.scheme,
            order: self.cost,
            matching: self.matching,
        }
    }
}

/// `post · body · pre` followed by classical readout of `measurements`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledProgram {
    pub num_qubits: usize,
    pub scheme: RealizationScheme,
    pub pre: CnotLayer,
    pub body: GadgetSequence,
    pub post: CnotLayer,
    /// `(qubit, classical bit)` pairs measured at the end.
    pub measurements: Vec<(usize, usize)>,
}

impl CompiledProgram {
    pub fn identity(num_qubits: usize, scheme: RealizationScheme) -> Self {
        CompiledProgram {
            num_qubits,
            scheme,
            pre: CnotLayer::identity(num_qubits),
            body: GadgetSequence::new(num_qubits),
            post: CnotLayer::identity(num_qubits),
            measurements: Vec::new(),
        }
    }

    pub fn ancilla(&self) -> Option<usize> {
        (self.scheme == RealizationScheme::AncillaMerged).then_some(self.num_qubits)
    }

    pub fn realize(&self) -> Result<Realization> {
        realize(&self.body, self.scheme)
    }

    pub fn cost(&self) -> Result<CostVector> {
        Ok(self.realize()?.cost())
    }

    /// Logical circuit: CNOT layers around the gadget sequence.
    pub fn logical_circuit(&self) -> Circuit {
        let mut c = self.pre.to_circuit();
        c.extend(&self.body.to_circuit());
        c.extend(&self.post.to_circuit());
        c
    }

    /// Physical circuit with multiqubit gates; includes the ancilla if any.
    pub fn physical_circuit(&self) -> Result<Circuit> {
        let r = self.realize()?;
        let mut c = Circuit::new(r.circuit.num_qubits);
        c.gates.extend(self.pre.to_circuit().gates);
        c.gates.extend(r.circuit.gates);
        c.gates.extend(self.post.to_circuit().gates);
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// Record of a compilation run.
#[derive(Debug, Clone, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Trace {
    /// Cost after initialization and after every accepted iteration.
    pub accepted: Vec<CostVector>,
    pub sides: Vec<Side>,
    pub norm_steps: usize,
    pub commutation_events: usize,
    /// Number of rejected candidates (0 or 1, the terminating one).
    pub rejected: usize,
}

struct Candidate {
    pre: CnotLayer,
    body: GadgetSequence,
    post: CnotLayer,
    cost: CostVector,
    side: Side,
}

fn reduce(mut cand: Candidate, opts: &CompileOptions, trace: &mut Trace) -> Result<Candidate> {
    for _ in 0..opts.max_norm_steps {
        let step = norm_reduction_step(&cand.body, &opts.norm())?;
        if !step.improved {
            break;
        }
        trace.norm_steps += 1;
        let n = cand.body.num_qubits;
        let c = CnotLayer::from_word(n, &step.cnots);
        cand.pre = cand.pre.then(&c);
        cand.post = c.then(&cand.post);
        cand.body = step.seq;
        cand.cost = step.cost;
    }
    Ok(cand)
}

/// Both primitives on `body`, each followed by norm reduction; the cheaper wins.
fn best_step(
    pre: &CnotLayer,
    body: &Circuit,
    post: &CnotLayer,
    opts: &CompileOptions,
    trace: &mut Trace,
) -> Result<Candidate> {
    let left = pg_left_factor(body)?;
    let right = pg_right_factor(body)?;
    trace.commutation_events += left.events + right.events;
    let l = Candidate {
        pre: pre.then(&left.layer),
        cost: realize(&left.gadgets, opts.scheme)?.cost(),
        body: left.gadgets,
        post: post.clone(),
        side: Side::Left,
    };
    let r = Candidate {
        pre: pre.clone(),
        cost: realize(&right.gadgets, opts.scheme)?.cost(),
        body: right.gadgets,
        post: right.layer.then(post),
        side: Side::Right,
    };
    let l = reduce(l, opts, trace)?;
    let r = reduce(r, opts, trace)?;
    Ok(if opts.cost.less(&r.cost, &l.cost) { r } else { l })
}

/// Compiles a CNOT + single-qubit + ZZ circuit with terminal measurements.
pub fn optimize(c: &Circuit, opts: &CompileOptions) -> Result<CompiledProgram> {
    Ok(optimize_traced(c, opts)?.0)
}

pub fn optimize_traced(c: &Circuit, opts: &CompileOptions) -> Result<(CompiledProgram, Trace)> {
    let (unitary_part, measurements) = c.strip_measurements()?;
    if unitary_part
        .gates
        .iter()
        .any(|g| matches!(g, Gate::Measure { .. }))
    {
        return Err(Error::Invariant("measurement left after stripping".into()));
    }
    let n = c.num_qubits;
    let mut trace = Trace::default();
    let id = CnotLayer::identity(n);
    let mut cur = best_step(&id, &unitary_part, &id, opts, &mut trace)?;
    trace.accepted.push(cur.cost);
    trace.sides.push(cur.side);
    for _ in 0..opts.max_iters {
        let body = sequence_circuit(&cur.body)?;
        let next = best_step(&cur.pre, &body, &cur.post, opts, &mut trace)?;
        if !opts.cost.less(&next.cost, &cur.cost) {
            trace.rejected += 1;
            break;
        }
        trace.accepted.push(next.cost);
        trace.sides.push(next.side);
        cur = next;
    }
    Ok((
        CompiledProgram {
            num_qubits: n,
            scheme: opts.scheme,
            pre: cur.pre,
            body: cur.body,
            post: cur.post,
            measurements,
        },
        trace,
    ))
}
