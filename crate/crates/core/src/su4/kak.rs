//! Cartan (KAK) decomposition of two-qubit unitaries.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};
use std::sync::OnceLock;

use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use serde::{Deserialize, Serialize};

use crate::circuit::mat::{self, cis, kron2, Mat2, Mat4, C64, I, ONE, ZERO};
use crate::circuit::Axis;
use crate::error::{Error, Result};

const CHAMBER_TOL: f64 = 1e-12;

/// Interaction coefficients of `exp(i(θx XX + θy YY + θz ZZ))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalClass {
    pub tx: f64,
    pub ty: f64,
    pub tz: f64,
}

impl CanonicalClass {
    pub fn new(tx: f64, ty: f64, tz: f64) -> Self {
        CanonicalClass { tx, ty, tz }
    }

    pub fn coeffs(&self) -> [f64; 3] {
        [self.tx, self.ty, self.tz]
    }

    pub fn matrix(&self) -> Mat4 {
        interaction(self.coeffs())
    }

    pub fn in_chamber(&self, tol: f64) -> bool {
        FRAC_PI_4 + tol >= self.tx && self.tx + tol >= self.ty && self.ty + tol >= self.tz.abs()
    }

    /// Re-canonicalizes the coefficients; a no-op inside the chamber.
    pub fn canonicalized(&self) -> CanonicalClass {
        let mut st = State::new(self.coeffs());
        st.canonicalize();
        CanonicalClass::from(st.c)
    }
}

impl From<[f64; 3]> for CanonicalClass {
    fn from(c: [f64; 3]) -> Self {
        CanonicalClass::new(c[0], c[1], c[2])
    }
}

/// `U = e^{iγ} (left.0 ⊗ left.1) · N(class) · (right.0 ⊗ right.1)`, where the
/// first matrix of each pair acts on the low index bit.
#[derive(Debug, Clone)]
pub struct KakDecomposition {
    pub left: (Mat2, Mat2),
    pub class: CanonicalClass,
    pub right: (Mat2, Mat2),
    pub global_phase: f64,
}

impl KakDecomposition {
    pub fn matrix(&self) -> Mat4 {
        kron2(&self.left.0, &self.left.1)
            * self.class.matrix()
            * kron2(&self.right.0, &self.right.1)
            * cis(self.global_phase)
    }
}

fn pp(axis: Axis) -> Mat4 {
    let p = mat::pauli(axis);
    kron2(&p, &p)
}

/// `exp(i(a XX + b YY + c ZZ))`.
pub fn interaction(c: [f64; 3]) -> Mat4 {
    let m = magic();
    let d = diagonals();
    let diag = Vector4::from_fn(|k, _| cis(c[0] * d[0][k] + c[1] * d[1][k] + c[2] * d[2][k]));
    m * Matrix4::from_diagonal(&diag) * m.adjoint()
}

fn magic() -> &'static Mat4 {
    static M: OnceLock<Mat4> = OnceLock::new();
    M.get_or_init(|| {
        let h = C64::from(FRAC_1_SQRT_2);
        Mat4::new(
            ONE, ZERO, ZERO, I, //
            ZERO, I, ONE, ZERO, //
            ZERO, I, -ONE, ZERO, //
            ONE, ZERO, ZERO, -I,
        ) * h
    })
}

/// Eigenvalues of XX, YY, ZZ along the magic basis.
fn diagonals() -> &'static [[f64; 4]; 3] {
    static D: OnceLock<[[f64; 4]; 3]> = OnceLock::new();
    D.get_or_init(|| {
        let m = magic();
        let mut out = [[0.0; 4]; 3];
        for (row, axis) in out.iter_mut().zip([Axis::X, Axis::Y, Axis::Z]) {
            let d = m.adjoint() * pp(axis) * m;
            for (k, v) in row.iter_mut().enumerate() {
                *v = d[(k, k)].re;
            }
        }
        out
    })
}

/// Splits a local 4×4 operator into `kron2(a0, a1)` with `a0 ∈ SU(2)`.
pub fn factor_local(l: &Mat4) -> (Mat2, Mat2) {
    // pick the a1 entry carrying the largest block
    let mut best = (0, 0, -1.0);
    for i1 in 0..2 {
        for j1 in 0..2 {
            let n: f64 = (0..4)
                .map(|k| l[((k & 1) + 2 * i1, (k >> 1) + 2 * j1)].norm_sqr())
                .sum();
            if n > best.2 {
                best = (i1, j1, n);
            }
        }
    }
    let (i1, j1, _) = best;
    let blk = Mat2::from_fn(|i0, j0| l[(i0 + 2 * i1, j0 + 2 * j1)]);
    let a0 = blk / blk.determinant().sqrt();
    let a1 = Mat2::from_fn(|i1, j1| {
        let mut s = ZERO;
        for i0 in 0..2 {
            for j0 in 0..2 {
                s += a0[(i0, j0)].conj() * l[(i0 + 2 * i1, j0 + 2 * j1)];
            }
        }
        s * 0.5
    });
    (a0, a1)
}

struct State {
    c: [f64; 3],
    kl: Mat4,
    kr: Mat4,
}

impl State {
    fn new(c: [f64; 3]) -> Self {
        State {
            c,
            kl: Mat4::identity(),
            kr: Mat4::identity(),
        }
    }

    /// `N(c) = V† N(c') V` with `c'` read off from `V P V†`.
    fn conjugate(&mut self, v: Mat4) {
        let mut next = [0.0; 3];
        for (k, axis) in [Axis::X, Axis::Y, Axis::Z].into_iter().enumerate() {
            let q = v * pp(axis) * v.adjoint();
            let (idx, sign) = [Axis::X, Axis::Y, Axis::Z]
                .into_iter()
                .enumerate()
                .find_map(|(j, b)| {
                    let s = (pp(b) * q).trace().re / 4.0;
                    (s.abs() > 0.5).then_some((j, s.signum()))
                })
                .expect("local Clifford maps Pauli pairs to Pauli pairs");
            next[idx] = sign * self.c[k];
        }
        self.c = next;
        self.kl *= v.adjoint();
        self.kr = v * self.kr;
    }

    /// `N(c) = N(c − m·π/2 e_k) · (i P_k P_k)^m`; the phase is recovered at the end.
    fn shift(&mut self, k: usize, m: i64) {
        if m == 0 {
            return;
        }
        self.c[k] -= m as f64 * FRAC_PI_2;
        if m.rem_euclid(2) == 1 {
            self.kr = pp([Axis::X, Axis::Y, Axis::Z][k]) * self.kr;
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        let v = match (a.min(b), a.max(b)) {
            (0, 1) => mat::phase(FRAC_PI_2),
            (0, 2) => mat::hadamard(),
            _ => mat::rx(FRAC_PI_2),
        };
        self.conjugate(kron2(&v, &v));
    }

    fn flip(&mut self, a: usize, b: usize) {
        let p = match (a.min(b), a.max(b)) {
            (0, 1) => mat::pauli(Axis::Z),
            (0, 2) => mat::pauli(Axis::Y),
            _ => mat::pauli(Axis::X),
        };
        self.conjugate(kron2(&p, &mat::identity2()));
    }

    fn canonicalize(&mut self) {
        for k in 0..3 {
            // into (−π/4, π/4]
            let m = ((self.c[k] - CHAMBER_TOL) / FRAC_PI_2 + 0.5).ceil() as i64 - 1;
            self.shift(k, m);
        }
        for _ in 0..3 {
            for k in 0..2 {
                if self.c[k + 1].abs() > self.c[k].abs() + CHAMBER_TOL {
                    self.swap(k, k + 1);
                }
            }
        }
        match (self.c[0] < 0.0, self.c[1] < 0.0) {
            (true, true) => self.flip(0, 1),
            (true, false) => self.flip(0, 2),
            (false, true) => self.flip(1, 2),
            _ => {}
        }
        if self.c[2] < -FRAC_PI_4 + CHAMBER_TOL {
            self.shift(2, -1);
        }
        for v in &mut self.c {
            if v.abs() < CHAMBER_TOL {
                *v = 0.0;
            }
        }
    }
}

fn diagonalizer(m2: &Mat4) -> Option<Matrix4<f64>> {
    for c in [1.0, 0.618_033_988_7, 2.718_281_828, 0.318_309_886, 5.123_456] {
        let re = m2.map(|z| z.re);
        let im = m2.map(|z| z.im);
        let eig = SymmetricEigen::new(re + im * c);
        let p = eig.eigenvectors;
        let pc = p.map(C64::from);
        let d = pc.transpose() * m2 * pc;
        let off: f64 = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| d[(i, j)].norm())
            .fold(0.0, f64::max);
        if off < 1e-9 {
            return Some(p);
        }
    }
    None
}

pub fn kak_decompose(u: &Mat4) -> Result<KakDecomposition> {
    if (u.adjoint() * u - Mat4::identity()).norm() > 1e-9 {
        return Err(Error::InvalidArgument("kak_decompose: input is not unitary".into()));
    }
    let det = u.determinant();
    let g0 = det.arg() / 4.0;
    let us = u * cis(-g0);
    let b = magic();
    let up = b.adjoint() * us * b;
    let m2 = up.transpose() * up;
    let mut p = diagonalizer(&m2)
        .ok_or_else(|| Error::Invariant("kak_decompose: simultaneous diagonalization failed".into()))?;

    let pc = p.map(C64::from);
    let dvals: Vec<C64> = {
        let d = pc.transpose() * m2 * pc;
        (0..4).map(|k| d[(k, k)]).collect()
    };
    // deterministic ordering by eigenphase, sign fixed on the largest entry
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&x, &y| dvals[x].arg().total_cmp(&dvals[y].arg()));
    let mut sorted = Matrix4::<f64>::zeros();
    for (dst, &src) in order.iter().enumerate() {
        let mut col = p.column(src).into_owned();
        let big = col.iter().cloned().fold(0.0f64, |a, v| if v.abs() > a.abs() { v } else { a });
        if big < 0.0 {
            col = -col;
        }
        sorted.set_column(dst, &col);
    }
    p = sorted;
    if p.determinant() < 0.0 {
        let c0 = -p.column(0).into_owned();
        p.set_column(0, &c0);
    }
    let mut phis: Vec<f64> = order.iter().map(|&k| dvals[k].arg() / 2.0).collect();
    let pc = p.map(C64::from);
    let k1 = {
        // Σφ ≡ 0 or π (mod 2π); shift one φ by π to land on det K1 = 1
        let k = up * pc * Matrix4::from_diagonal(&Vector4::from_fn(|i, _| cis(-phis[i])));
        if k.determinant().re < 0.0 {
            phis[0] += std::f64::consts::PI;
            up * pc * Matrix4::from_diagonal(&Vector4::from_fn(|i, _| cis(-phis[i])))
        } else {
            k
        }
    };

    // φ_k = g + Σ c_j d_j[k]
    let d = diagonals();
    let a = Matrix4::<f64>::from_fn(|k, j| if j == 0 { 1.0 } else { d[j - 1][k] });
    let sol = a
        .try_inverse()
        .ok_or_else(|| Error::Invariant("magic basis diagonals singular".into()))?
        * Vector4::from_column_slice(&phis);

    let mut st = State::new([sol[1], sol[2], sol[3]]);
    st.kl = b * k1 * b.adjoint();
    st.kr = b * pc.transpose() * b.adjoint();
    st.canonicalize();

    let (l0, l1) = factor_local(&st.kl);
    let (r0, r1) = factor_local(&st.kr);
    let mut out = KakDecomposition {
        left: (l0, l1),
        class: CanonicalClass::from(st.c),
        right: (r0, r1),
        global_phase: 0.0,
    };
    // absorb rounding of the factored phases
    let rec = out.matrix();
    let overlap: C64 = rec.iter().zip(u.iter()).map(|(x, y)| x.conj() * y).sum();
    out.global_phase = overlap.arg();
    Ok(out)
}
