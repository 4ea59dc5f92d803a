//! Left-handed two-qubit blocks: ZZ rotations interleaved with local layers.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::circuit::mat::{self, cis, kron2, Mat2, Mat4};
use crate::circuit::{Axis, Gate};

use super::kak::{factor_local, kak_decompose};

const DROP_TOL: f64 = 1e-12;
/// Score tolerance used when comparing completions.
pub const SCORE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum LhElement {
    /// `u0` on the first qubit of the pair, `u1` on the second.
    Local(Mat2, Mat2),
    /// `exp(iφ Z⊗Z)`.
    Zz(f64),
}

impl LhElement {
    fn matrix(&self) -> Mat4 {
        match self {
            LhElement::Local(a, b) => kron2(a, b),
            LhElement::Zz(t) => mat::zz4(*t),
        }
    }
}

/// The six CNOT completions, as CNOT lists in time order over local indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Completion {
    Identity,
    Cnm,
    Cmn,
    CnmCmn,
    CmnCnm,
    Swap,
}

impl Completion {
    pub const ALL: [Completion; 6] = [
        Completion::Identity,
        Completion::Cnm,
        Completion::Cmn,
        Completion::CnmCmn,
        Completion::CmnCnm,
        Completion::Swap,
    ];

    /// `(control, target)` pairs in time order; `0` is the first qubit.
    pub fn cnots(self) -> &'static [(usize, usize)] {
        match self {
            Completion::Identity => &[],
            Completion::Cnm => &[(0, 1)],
            Completion::Cmn => &[(1, 0)],
            // operator product C_nm·C_mn applies C_mn first
            Completion::CnmCmn => &[(1, 0), (0, 1)],
            Completion::CmnCnm => &[(0, 1), (1, 0)],
            Completion::Swap => &[(0, 1), (1, 0), (0, 1)],
        }
    }

    pub fn matrix(self) -> Mat4 {
        self.cnots()
            .iter()
            .fold(Mat4::identity(), |acc, &(c, _)| mat::cnot4(c == 0) * acc)
    }
}

/// Two-qubit block as time-ordered elements followed by trailing CNOTs.
#[derive(Debug, Clone, PartialEq)]
pub struct LhBlock {
    pub pair: (usize, usize),
    pub elements: Vec<LhElement>,
    pub global_phase: f64,
    pub completion: Completion,
}

impl LhBlock {
    fn empty(pair: (usize, usize)) -> Self {
        LhBlock {
            pair,
            elements: Vec::new(),
            global_phase: 0.0,
            completion: Completion::Identity,
        }
    }

    pub fn zz_angles(&self) -> Vec<f64> {
        self.elements
            .iter()
            .filter_map(|e| match e {
                LhElement::Zz(t) => Some(*t),
                _ => None,
            })
            .collect()
    }

    /// Total entanglement phase `Σ|φ|`.
    pub fn total_phase(&self) -> f64 {
        self.zz_angles().iter().map(|t| t.abs()).sum()
    }

    pub fn local_layers(&self) -> usize {
        self.elements
            .iter()
            .filter(|e| matches!(e, LhElement::Local(..)))
            .count()
    }

    /// Trailing CNOTs as `(control, target)` on the real qubits.
    pub fn trailing_cnots(&self) -> Vec<(usize, usize)> {
        let q = [self.pair.0, self.pair.1];
        self.completion
            .cnots()
            .iter()
            .map(|&(c, t)| (q[c], q[t]))
            .collect()
    }

    /// Product of the elements without the trailing CNOTs.
    pub fn body_matrix(&self) -> Mat4 {
        self.elements
            .iter()
            .fold(Mat4::identity(), |acc, e| e.matrix() * acc)
            * cis(self.global_phase)
    }

    /// Block followed by its trailing CNOTs.
    pub fn matrix(&self) -> Mat4 {
        self.completion.matrix() * self.body_matrix()
    }

    /// Gates in time order; the global phase is not included.
    pub fn gates(&self, with_trailing: bool) -> Vec<Gate> {
        let (a, b) = self.pair;
        let mut out = Vec::new();
        for e in &self.elements {
            match e {
                LhElement::Local(u0, u1) => {
                    for (q, u) in [(a, u0), (b, u1)] {
                        if !mat::is_identity_mod_phase(u, DROP_TOL) {
                            out.push(Gate::single(q, *u));
                        }
                    }
                }
                LhElement::Zz(t) => out.push(Gate::zz(a, b, *t)),
            }
        }
        if with_trailing {
            out.extend(self.trailing_cnots().into_iter().map(|(c, t)| Gate::cx(c, t)));
        }
        out
    }
}

fn wrap_quarter(t: f64) -> (f64, i64) {
    // into (−π/4, π/4]
    let m = ((t - DROP_TOL) / FRAC_PI_2 + 0.5).ceil() as i64 - 1;
    (t - m as f64 * FRAC_PI_2, m)
}

fn diagonal_block(u: &Mat4) -> Option<LhBlock> {
    let off = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .map(|(i, j)| u[(i, j)].norm())
        .fold(0.0, f64::max);
    if off > DROP_TOL {
        return None;
    }
    let p: Vec<f64> = (0..4).map(|k| u[(k, k)].arg()).collect();
    let (theta, _) = wrap_quarter((p[0] - p[1] - p[2] + p[3]) / 4.0);
    let rest = u * mat::zz4(-theta);
    let (r0, r1) = factor_local(&rest);
    let mut b = LhBlock::empty((0, 1));
    if theta.abs() >= DROP_TOL {
        b.elements.push(LhElement::Zz(theta));
    }
    b.elements.push(LhElement::Local(r0, r1));
    Some(b)
}

/// Left-handed form of `u`: at most three ZZ rotations, the first leading the
/// block, angles in `(−π/4, π/4]`.
pub fn to_lh_block(u: &Mat4) -> crate::Result<LhBlock> {
    let mut block = match diagonal_block(u) {
        Some(b) => b,
        None => {
            let k = kak_decompose(u)?;
            let h = mat::hadamard();
            let v = mat::z_to_axis(Axis::Y);
            let vd = v.adjoint();
            let [a, bb, c] = k.class.coeffs();
            LhBlock {
                pair: (0, 1),
                elements: vec![
                    LhElement::Local(h * k.right.0, h * k.right.1),
                    LhElement::Zz(a),
                    LhElement::Local(vd * h, vd * h),
                    LhElement::Zz(bb),
                    LhElement::Local(v, v),
                    LhElement::Zz(c),
                    LhElement::Local(k.left.0, k.left.1),
                ],
                global_phase: k.global_phase,
                completion: Completion::Identity,
            }
        }
    };
    tidy(&mut block);
    lead_with_zz(&mut block);
    tidy(&mut block);
    // settle the global phase against the input
    let rec = block.body_matrix();
    let overlap: mat::C64 = rec.iter().zip(u.iter()).map(|(x, y)| x.conj() * y).sum();
    block.global_phase += overlap.arg();
    Ok(block)
}

/// Drops zero rotations, merges adjacent local layers, removes identity layers.
fn tidy(b: &mut LhBlock) {
    let mut out: Vec<LhElement> = Vec::with_capacity(b.elements.len());
    for e in b.elements.drain(..) {
        match e {
            LhElement::Zz(t) if t.abs() < DROP_TOL => {}
            LhElement::Local(u0, u1) => {
                if let Some(LhElement::Local(p0, p1)) = out.last_mut() {
                    *p0 = u0 * *p0;
                    *p1 = u1 * *p1;
                } else {
                    out.push(LhElement::Local(u0, u1));
                }
            }
            z => out.push(z),
        }
    }
    out.retain(|e| match e {
        LhElement::Local(u0, u1) => {
            !(mat::is_identity_mod_phase(u0, DROP_TOL) && mat::is_identity_mod_phase(u1, DROP_TOL))
        }
        _ => true,
    });
    b.elements = out;
}

/// Pushes the Z-rotation tail of a leading local layer through the first ZZ.
fn lead_with_zz(b: &mut LhBlock) {
    if b.elements.len() < 2 {
        return;
    }
    let (LhElement::Local(u0, u1), LhElement::Zz(_)) = (&b.elements[0], &b.elements[1]) else {
        return;
    };
    let mut keep = [*u0, *u1];
    let mut moved = [mat::identity2(), mat::identity2()];
    for w in 0..2 {
        let u = keep[w];
        if mat::is_diagonal2(&u, DROP_TOL) {
            moved[w] = u;
            keep[w] = mat::identity2();
        } else {
            let (a, bx, c, g) = mat::zxz(&u);
            moved[w] = mat::rz(a);
            keep[w] = mat::rx(bx) * mat::rz(c) * cis(g);
        }
    }
    b.elements[0] = LhElement::Local(keep[0], keep[1]);
    b.elements.insert(2, LhElement::Local(moved[0], moved[1]));
}

/// Picks the completion `W` minimizing `Σ|φ|` of the block realizing
/// `W† U`, so that the block followed by `W` equals `U`.
pub fn minimize_block_phase(u: &Mat4, pair: (usize, usize)) -> crate::Result<LhBlock> {
    let mut best: Option<LhBlock> = None;
    for w in Completion::ALL {
        let mut b = to_lh_block(&(w.matrix().adjoint() * u))?;
        b.pair = pair;
        b.completion = w;
        let better = match &best {
            None => true,
            Some(cur) => {
                let (s, t) = (b.total_phase(), cur.total_phase());
                s < t - SCORE_TOL
                    || (s <= t + SCORE_TOL && w.cnots().len() < cur.completion.cnots().len())
            }
        };
        if better {
            best = Some(b);
        }
    }
    Ok(best.expect("six completions"))
}
